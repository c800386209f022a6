#include "nsf/field.hpp"

#include <cmath>

namespace nsf::field {

Grid::Grid(int dim, std::array<int, 2> cells, std::array<double, 2> extent, BoundaryKind boundary)
    : dim_(dim), cells_(cells), extent_(extent), boundary_(boundary) {
    if (dim < 1 || dim > 2) throw std::invalid_argument("Grid: dim must be 1 or 2");
    for (int d = 0; d < dim; ++d) {
        const std::size_t k = static_cast<std::size_t>(d);
        if (cells_[k] < 4) throw std::invalid_argument("Grid: need at least 4 cells per axis");
        if (!(extent_[k] > 0.0)) throw std::invalid_argument("Grid: extent must be positive");
        h_[k] = extent_[k] / cells_[k];
    }
    if (dim == 1) {
        cells_[1] = 1;
        extent_[1] = 0.0;
        h_[1] = 0.0;
    }
}

Vec Grid::center(int cell) const {
    if (dim_ == 1) return Vec(1, (cell + 0.5) * h_[0], 0.0);
    const int ix = cell % cells_[0];
    const int iy = cell / cells_[0];
    return Vec(2, (ix + 0.5) * h_[0], (iy + 0.5) * h_[1]);
}

namespace {

// One scalar derivative along an axis; `line` walks that axis, other index fixed.
struct AxisView {
    const ScalarField* f;
    int axis;
    int other;  // fixed index on the complementary axis (2D only)
    int n;

    double at(int i) const {
        const Grid& g = f->grid();
        if (g.dim() == 1) return (*f)[i];
        return axis == 0 ? (*f)[g.index(i, other)] : (*f)[g.index(other, i)];
    }
};

double deriv_at(const AxisView& v, int i, double h, BoundaryKind b, Extension ext) {
    const int n = v.n;
    if (b == BoundaryKind::periodic) {
        const int ip = (i + 1) % n, im = (i + n - 1) % n;
        return (v.at(ip) - v.at(im)) / (2.0 * h);
    }
    if (i > 0 && i < n - 1) return (v.at(i + 1) - v.at(i - 1)) / (2.0 * h);
    switch (ext) {
        case Extension::even:
            // ghost mirrors the boundary cell
            if (i == 0) return (v.at(1) - v.at(0)) / (2.0 * h);
            return (v.at(n - 1) - v.at(n - 2)) / (2.0 * h);
        case Extension::odd:
            // ghost mirrors with sign flip (value vanishes on the wall)
            if (i == 0) return (v.at(1) + v.at(0)) / (2.0 * h);
            return (-v.at(n - 1) - v.at(n - 2)) / (2.0 * h);
        case Extension::one_sided:
        default:
            if (i == 0) return (-3.0 * v.at(0) + 4.0 * v.at(1) - v.at(2)) / (2.0 * h);
            return (3.0 * v.at(n - 1) - 4.0 * v.at(n - 2) + v.at(n - 3)) / (2.0 * h);
    }
}

}  // namespace

ScalarField derivative(const ScalarField& f, int axis, Extension ext) {
    const Grid& g = f.grid();
    ScalarField out(g);
    const double h = g.h(axis);
    if (g.dim() == 1) {
        AxisView v{&f, 0, 0, g.cells(0)};
        for (int i = 0; i < g.cells(0); ++i) out[i] = deriv_at(v, i, h, g.boundary(), ext);
        return out;
    }
    if (axis == 0) {
        for (int iy = 0; iy < g.cells(1); ++iy) {
            AxisView v{&f, 0, iy, g.cells(0)};
            for (int ix = 0; ix < g.cells(0); ++ix)
                out[g.index(ix, iy)] = deriv_at(v, ix, h, g.boundary(), ext);
        }
    } else {
        for (int ix = 0; ix < g.cells(0); ++ix) {
            AxisView v{&f, 1, ix, g.cells(1)};
            for (int iy = 0; iy < g.cells(1); ++iy)
                out[g.index(ix, iy)] = deriv_at(v, iy, h, g.boundary(), ext);
        }
    }
    return out;
}

VectorField gradient(const ScalarField& f, Extension ext) {
    VectorField out(f.grid());
    for (int d = 0; d < f.grid().dim(); ++d) out.comp(d) = derivative(f, d, ext);
    return out;
}

ScalarField divergence(const VectorField& v, Extension ext) {
    const Grid& g = v.grid();
    ScalarField out(g);
    for (int d = 0; d < g.dim(); ++d) {
        ScalarField dd = derivative(v.comp(d), d, ext);
        for (int c = 0; c < g.cell_count(); ++c) out[c] += dd[c];
    }
    return out;
}

VectorField divergence_tensor(const TensorField& t, Extension ext) {
    const Grid& g = t.grid();
    VectorField out(g);
    for (int i = 0; i < g.dim(); ++i) {
        for (int j = 0; j < g.dim(); ++j) {
            ScalarField dd = derivative(t.comp(i, j), j, ext);
            for (int c = 0; c < g.cell_count(); ++c) out.comp(i)[c] += dd[c];
        }
    }
    return out;
}

TensorField gradient_vector(const VectorField& u, Extension ext) {
    const Grid& g = u.grid();
    TensorField out(g);
    for (int i = 0; i < g.dim(); ++i)
        for (int j = 0; j < g.dim(); ++j) out.comp(i, j) = derivative(u.comp(i), j, ext);
    return out;
}

TensorField symmetric_gradient(const VectorField& u, Extension ext) {
    const Grid& g = u.grid();
    TensorField grad = gradient_vector(u, ext);
    TensorField out(g);
    for (int c = 0; c < g.cell_count(); ++c) out.set(c, sym(grad.at(c)));
    return out;
}

TensorField traceless_part(const TensorField& a) {
    TensorField out(a.grid());
    for (int c = 0; c < a.grid().cell_count(); ++c) out.set(c, nsf::traceless_part(a.at(c)));
    return out;
}

double integrate(const ScalarField& f) {
    double s = 0.0;
    for (double v : f.data()) s += v;
    return s * f.grid().cell_volume();
}

double integrate_time(const TimeSeries<double>& ts) {
    double s = 0.0;
    for (std::size_t i = 1; i < ts.size(); ++i)
        s += 0.5 * (ts.values[i] + ts.values[i - 1]) * (ts.times[i] - ts.times[i - 1]);
    return s;
}

double integrate_time_upto(const std::vector<double>& times, const std::vector<double>& values,
                           std::size_t upto) {
    if (upto == 0 || times.empty()) return 0.0;
    if (upto >= times.size()) upto = times.size() - 1;

    bool uniform = true;
    const double dt = times[1] - times[0];
    for (std::size_t i = 1; i <= upto; ++i)
        if (std::abs((times[i] - times[i - 1]) - dt) > 1e-9 * std::max(1.0, std::abs(dt))) {
            uniform = false;
            break;
        }
    auto trap = [&](std::size_t a, std::size_t b) {
        double s = 0.0;
        for (std::size_t i = a + 1; i <= b; ++i)
            s += 0.5 * (values[i] + values[i - 1]) * (times[i] - times[i - 1]);
        return s;
    };
    if (!uniform) return trap(0, upto);

    auto simpson = [&](std::size_t a, std::size_t b) {  // b - a even
        double s = 0.0;
        for (std::size_t i = a; i + 2 <= b; i += 2)
            s += dt / 3.0 * (values[i] + 4.0 * values[i + 1] + values[i + 2]);
        return s;
    };
    auto simpson38 = [&](std::size_t a) {  // 3 intervals from a
        return 3.0 * dt / 8.0 *
               (values[a] + 3.0 * values[a + 1] + 3.0 * values[a + 2] + values[a + 3]);
    };

    const std::size_t k = upto;
    if (k == 1) return trap(0, 1);
    if (k % 2 == 0) return simpson(0, k);
    if (k == 3) return simpson38(0);
    return simpson(0, k - 3) + simpson38(k - 3);
}

KornFieldResult korn_poincare_field_check(const VectorField& v) {
    const Grid& g = v.grid();
    if (g.boundary() != BoundaryKind::no_slip_no_flux)
        throw std::invalid_argument("korn_poincare_field_check: requires a no-slip grid");
    for (int c = 0; c < g.cell_count(); ++c) {
        const int ix = g.dim() == 1 ? c : c % g.cells(0);
        const int iy = g.dim() == 1 ? 0 : c / g.cells(0);
        const bool bnd = ix == 0 || ix == g.cells(0) - 1 ||
                         (g.dim() == 2 && (iy == 0 || iy == g.cells(1) - 1));
        if (bnd && v.at(c).norm2() > 0.0)
            throw std::invalid_argument("korn_poincare_field_check: field must vanish on boundary cells");
    }

    TensorField grad = gradient_vector(v, Extension::odd);
    KornFieldResult r;
    for (int c = 0; c < g.cell_count(); ++c) {
        r.lhs += v.at(c).norm2();
        r.rhs += nsf::traceless_part(grad.at(c)).norm2();
    }
    r.lhs *= g.cell_volume();
    r.rhs *= g.cell_volume();
    if (r.rhs > 0.0) {
        r.ratio = r.lhs / r.rhs;
    } else {
        r.ratio = 0.0;
        r.degenerate = true;
    }
    return r;
}

}  // namespace nsf::field
