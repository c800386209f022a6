#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "nsf/tensor.hpp"

// Uniform cell-centered Cartesian grids in 1D/2D, discrete fields, the
// second-order difference operators and midpoint/trapezoid quadrature used by
// every weak-form evaluation in the project.

namespace nsf::field {

enum class BoundaryKind { no_slip_no_flux, periodic };

// Ghost-cell extension policy at non-periodic boundaries.  `one_sided`
// replaces the ghost stencil by a second-order one-sided difference.
enum class Extension { one_sided, even, odd };

class Grid {
public:
    Grid() = default;
    Grid(int dim, std::array<int, 2> cells, std::array<double, 2> extent, BoundaryKind boundary);

    static Grid line(int nx, double length, BoundaryKind b) { return Grid(1, {nx, 1}, {length, 0.0}, b); }
    static Grid box(int nx, int ny, double lx, double ly, BoundaryKind b) {
        return Grid(2, {nx, ny}, {lx, ly}, b);
    }

    int dim() const { return dim_; }
    int cells(int axis) const { return cells_[static_cast<std::size_t>(axis)]; }
    double extent(int axis) const { return extent_[static_cast<std::size_t>(axis)]; }
    double h(int axis) const { return h_[static_cast<std::size_t>(axis)]; }
    BoundaryKind boundary() const { return boundary_; }

    int cell_count() const { return dim_ == 1 ? cells_[0] : cells_[0] * cells_[1]; }
    double cell_volume() const { return dim_ == 1 ? h_[0] : h_[0] * h_[1]; }

    int index(int ix, int iy = 0) const { return iy * cells_[0] + ix; }
    Vec center(int cell) const;

    bool operator==(const Grid& o) const {
        return dim_ == o.dim_ && cells_ == o.cells_ && extent_ == o.extent_ &&
               boundary_ == o.boundary_;
    }

private:
    int dim_ = 1;
    std::array<int, 2> cells_ = {0, 0};
    std::array<double, 2> extent_ = {0.0, 0.0};
    std::array<double, 2> h_ = {0.0, 0.0};
    BoundaryKind boundary_ = BoundaryKind::periodic;
};

class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(const Grid& g, double fill = 0.0)
        : grid_(g), v_(static_cast<std::size_t>(g.cell_count()), fill) {}

    const Grid& grid() const { return grid_; }
    double operator[](int c) const { return v_[static_cast<std::size_t>(c)]; }
    double& operator[](int c) { return v_[static_cast<std::size_t>(c)]; }
    const std::vector<double>& data() const { return v_; }
    std::vector<double>& data() { return v_; }
    int size() const { return static_cast<int>(v_.size()); }

private:
    Grid grid_;
    std::vector<double> v_;
};

class VectorField {
public:
    VectorField() = default;
    explicit VectorField(const Grid& g) : grid_(g) {
        for (int d = 0; d < g.dim(); ++d) comp_[static_cast<std::size_t>(d)] = ScalarField(g);
    }

    const Grid& grid() const { return grid_; }
    const ScalarField& comp(int d) const { return comp_[static_cast<std::size_t>(d)]; }
    ScalarField& comp(int d) { return comp_[static_cast<std::size_t>(d)]; }
    Vec at(int c) const {
        Vec v(grid_.dim());
        for (int d = 0; d < grid_.dim(); ++d) v[d] = comp_[static_cast<std::size_t>(d)][c];
        return v;
    }
    void set(int c, const Vec& v) {
        for (int d = 0; d < grid_.dim(); ++d) comp_[static_cast<std::size_t>(d)][c] = v[d];
    }

private:
    Grid grid_;
    std::array<ScalarField, 2> comp_;
};

class TensorField {
public:
    TensorField() = default;
    explicit TensorField(const Grid& g) : grid_(g) {
        for (int i = 0; i < g.dim() * g.dim(); ++i)
            comp_[static_cast<std::size_t>(i)] = ScalarField(g);
    }

    const Grid& grid() const { return grid_; }
    const ScalarField& comp(int i, int j) const {
        return comp_[static_cast<std::size_t>(i * grid_.dim() + j)];
    }
    ScalarField& comp(int i, int j) { return comp_[static_cast<std::size_t>(i * grid_.dim() + j)]; }
    Mat at(int c) const {
        Mat m(grid_.dim());
        for (int i = 0; i < grid_.dim(); ++i)
            for (int j = 0; j < grid_.dim(); ++j) m(i, j) = comp(i, j)[c];
        return m;
    }
    void set(int c, const Mat& m) {
        for (int i = 0; i < grid_.dim(); ++i)
            for (int j = 0; j < grid_.dim(); ++j) comp(i, j)[c] = m(i, j);
    }

private:
    Grid grid_;
    std::array<ScalarField, 4> comp_;
};

template <class T>
struct TimeSeries {
    std::vector<double> times;
    std::vector<T> values;

    void append(double t, T v) {
        if (times.empty()) {
            if (t != 0.0) throw std::invalid_argument("TimeSeries: first time must be 0");
        } else if (!(t > times.back())) {
            throw std::invalid_argument("TimeSeries: times must be strictly increasing");
        }
        times.push_back(t);
        values.push_back(std::move(v));
    }
    std::size_t size() const { return times.size(); }
};

// Derivative of f along `axis`; extension selects the boundary closure in
// no_slip_no_flux mode (ignored on periodic grids).
ScalarField derivative(const ScalarField& f, int axis, Extension ext = Extension::one_sided);

VectorField gradient(const ScalarField& f, Extension ext = Extension::one_sided);
ScalarField divergence(const VectorField& v, Extension ext = Extension::one_sided);
VectorField divergence_tensor(const TensorField& t, Extension ext = Extension::one_sided);

/// Full velocity gradient (grad u)_{ij} = d u_i / d x_j.
TensorField gradient_vector(const VectorField& u, Extension ext = Extension::one_sided);

/// D[u] = (grad u + grad^t u) / 2; symmetric by construction.
TensorField symmetric_gradient(const VectorField& u, Extension ext = Extension::one_sided);

TensorField traceless_part(const TensorField& a);

/// Midpoint rule: sum of cell values times cell volume.
double integrate(const ScalarField& f);

/// Trapezoid rule over the full series.
double integrate_time(const TimeSeries<double>& ts);

/// Composite quadrature of `values` over times[0..upto] on a uniformly spaced
/// time grid: Simpson / Simpson-3/8 combination, exact for cubics.  Falls back
/// to trapezoid on non-uniform spacing.
double integrate_time_upto(const std::vector<double>& times, const std::vector<double>& values,
                           std::size_t upto);

struct KornFieldResult {
    double lhs = 0.0;    // integral of |v|^2
    double rhs = 0.0;    // integral of |T[grad v]|^2
    double ratio = 0.0;  // lhs / rhs, 0 when both vanish
    bool degenerate = false;
};

/// Discrete Korn-Poincare quotient for a vector field vanishing on the
/// boundary cells of a no-slip grid.
KornFieldResult korn_poincare_field_check(const VectorField& v);

}  // namespace nsf::field
