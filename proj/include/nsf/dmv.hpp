#pragma once

#include <functional>
#include <string>
#include <vector>

#include "nsf/field.hpp"
#include "nsf/solver.hpp"
#include "nsf/thermo.hpp"

// Discrete Young-measure fields on the phase space (rho, theta, u, D_u,
// D_theta) and the weak-form admissibility checks for measure-valued
// solutions: compatibility of the gradient moments, the continuity and
// momentum identities, the energy defect, the entropy inequality slack, the
// concentration bound, Korn-Poincare quotients and the uniform bounds.

namespace nsf::dmv {

struct PhasePoint {
    double rho = 0.0;
    double theta = 0.0;
    Vec u;
    Mat Du;
    Vec Dtheta;
};

// Phase observables with the vacuum/zero-temperature limit conventions:
// rho-weighted quantities vanish with rho; 1/theta factors are clamped.
double rho_energy(const thermo::EquationOfState& eos, const PhasePoint& a,
                  double theta_floor = 1e-10);  // rho |u|^2/2 + rho e
double rho_entropy(const thermo::EquationOfState& eos, const PhasePoint& a,
                   double theta_floor = 1e-10);  // rho s
double dissipation_density(const thermo::TransportCoefficients& tc, const PhasePoint& a,
                           double theta_floor = 1e-10);  // (1/th)(S:Du + kappa |Dth|^2 / th)

class DiscreteMeasure {
public:
    DiscreteMeasure(std::vector<PhasePoint> atoms, std::vector<double> weights);
    static DiscreteMeasure dirac(PhasePoint a) { return DiscreteMeasure({std::move(a)}, {1.0}); }

    int size() const { return static_cast<int>(atoms_.size()); }
    const PhasePoint& atom(int k) const { return atoms_[static_cast<std::size_t>(k)]; }
    double weight(int k) const { return weights_[static_cast<std::size_t>(k)]; }

    template <class G>
    auto expectation(G&& g) const {
        auto acc = g(atoms_[0]) * weights_[0];
        for (std::size_t k = 1; k < atoms_.size(); ++k)
            if (weights_[k] != 0.0) acc += g(atoms_[k]) * weights_[k];
        return acc;
    }

private:
    std::vector<PhasePoint> atoms_;
    std::vector<double> weights_;
};

/// Parameterized measure family with a fixed atom count per (time, cell).
class MeasureField {
public:
    MeasureField(field::Grid grid, std::vector<double> times, int atoms_per_cell);

    const field::Grid& grid() const { return grid_; }
    const std::vector<double>& times() const { return times_; }
    int time_count() const { return static_cast<int>(times_.size()); }
    int atom_count() const { return atoms_per_cell_; }

    PhasePoint& atom(int t, int cell, int k) { return atoms_[flat(t, cell, k)]; }
    const PhasePoint& atom(int t, int cell, int k) const { return atoms_[flat(t, cell, k)]; }
    double& weight(int t, int cell, int k) { return weights_[flat(t, cell, k)]; }
    double weight(int t, int cell, int k) const { return weights_[flat(t, cell, k)]; }

    template <class G>
    double expect(int t, int cell, G&& g) const {
        double acc = 0.0;
        for (int k = 0; k < atoms_per_cell_; ++k) {
            const double w = weight(t, cell, k);
            if (w != 0.0) acc += w * g(atom(t, cell, k));
        }
        return acc;
    }

    DiscreteMeasure measure_at(int t, int cell) const;
    void validate() const;  // weights nonnegative, normalized per (t, cell)

private:
    std::size_t flat(int t, int cell, int k) const {
        return (static_cast<std::size_t>(t) * static_cast<std::size_t>(grid_.cell_count()) +
                static_cast<std::size_t>(cell)) *
                   static_cast<std::size_t>(atoms_per_cell_) +
               static_cast<std::size_t>(k);
    }
    field::Grid grid_;
    std::vector<double> times_;
    int atoms_per_cell_ = 1;
    std::vector<PhasePoint> atoms_;
    std::vector<double> weights_;
};

/// Young measure of a solution ensemble: at each (t, cell) the K states with
/// equal weights; D_u and D_theta from the discrete operators, so the
/// gradient compatibility holds by construction up to discretization error.
MeasureField from_ensemble(const std::vector<solver::Trajectory>& runs);

/// Dirac field sampled from a closed-form solution with analytic gradients.
MeasureField from_strong(const solver::ManufacturedSolution& ms, const field::Grid& g,
                         const std::vector<double>& times);

// ---------------------------------------------------------------------------
// Test function dictionary: a finite spanning family of smooth space-time
// test functions with analytic derivatives.  Spatial factors are Fourier
// modes on periodic grids (their midpoint sums vanish exactly, so constant
// fields produce round-off residuals) and boundary-compatible trigonometric
// bumps / polynomials on no-slip grids.
// ---------------------------------------------------------------------------

struct TimePoly {  // a + b (t/T) + c (t/T)^2
    double a = 1.0, b = 0.0, c = 0.0, T = 1.0;
    double value(double t) const {
        const double s = t / T;
        return a + b * s + c * s * s;
    }
    double deriv(double t) const { return (b + 2.0 * c * (t / T)) / T; }
};

struct AxisFactor {
    // trig: amp * cos(w x + phase); poly: c0 + c1 x + c2 x^2 + c3 x^3
    enum class Kind { trig, poly } kind = Kind::trig;
    double amp = 1.0, w = 0.0, phase = 0.0;
    std::array<double, 4> c = {1.0, 0.0, 0.0, 0.0};

    static AxisFactor one() { return {}; }
    static AxisFactor cosw(double w_, double phase_ = 0.0, double amp_ = 1.0) {
        AxisFactor f;
        f.w = w_;
        f.phase = phase_;
        f.amp = amp_;
        return f;
    }
    static AxisFactor sinw(double w_, double amp_ = 1.0);
    static AxisFactor poly(double c0, double c1, double c2 = 0.0, double c3 = 0.0);

    double value(double x) const;
    double deriv(double x) const;
};

struct ScalarTerm {
    TimePoly tp;
    AxisFactor fx, fy;
};

class ScalarTestFn {
public:
    std::string id;
    bool nonneg = false;
    int dim = 1;
    std::vector<ScalarTerm> terms;

    double value(double t, const Vec& x) const;
    double dt(double t, const Vec& x) const;
    Vec grad(double t, const Vec& x) const;
};

class VectorTestFn {
public:
    std::string id;
    int dim = 1;
    std::array<std::vector<ScalarTerm>, 2> comp;

    Vec value(double t, const Vec& x) const;
    Vec dt(double t, const Vec& x) const;
    Mat grad(double t, const Vec& x) const;  // (i, j) = d comp_i / d x_j
    double div(double t, const Vec& x) const { return grad(t, x).trace(); }
};

class TensorTestFn {
public:
    std::string id;
    int dim = 1;
    std::array<std::vector<ScalarTerm>, 4> comp;  // row-major, kept symmetric

    Mat value(double t, const Vec& x) const;
    Vec div(double t, const Vec& x) const;  // (div T)_i = sum_j d T_ij / d x_j
};

struct TestFunctionDictionary {
    std::vector<ScalarTestFn> scalar;        // continuity / entropy tests
    std::vector<ScalarTestFn> nonneg;        // entropy inequality tests, >= 0
    std::vector<VectorTestFn> vector_flux;   // normal component vanishes on walls
    std::vector<VectorTestFn> vector_bulk;   // vanishes on walls (momentum tests)
    std::vector<TensorTestFn> tensor;        // symmetric, free up to the boundary

    /// Default spanning family for a grid and horizon T.
    static TestFunctionDictionary standard(const field::Grid& g, double t_end);
};

// ---------------------------------------------------------------------------
// Defects and checks
// ---------------------------------------------------------------------------

struct ConcentrationAtom {
    int time_index = 0;
    int cell = 0;
    Mat mass;  // tensor-valued point mass
};

struct DefectData {
    std::vector<ConcentrationAtom> nu_c;        // concentration measure, default empty
    field::TimeSeries<double> D_series;         // concentration defect D(tau)
    std::vector<field::ScalarField> sigma_extra;  // optional surplus densities per time
};

struct ResidualEntry {
    std::string test_id;
    double tau = 0.0;
    double value = 0.0;
};

double max_abs(const std::vector<ResidualEntry>& entries);

/// Gradient-moment compatibility: for tensor tests T and flux-compatible
/// vector tests phi,
///   r_T   = II < u > . div T + II < D_u > : T
///   r_phi = II < theta > div phi + II < D_theta > . phi
/// (both vanish in the continuum).  One entry per test, integrated over the
/// full stored horizon.
std::vector<ResidualEntry> compatibility_residual(const MeasureField& V,
                                                  const TestFunctionDictionary& dict);

/// Weak continuity identity residual per (scalar test, tau).
std::vector<ResidualEntry> continuity_residual(const MeasureField& V,
                                               const TestFunctionDictionary& dict);

/// Weak momentum identity residual per (bulk vector test, tau); includes the
/// pressure and viscous moments, the concentration pairing and, when present,
/// the body-force term.
std::vector<ResidualEntry> momentum_residual(const MeasureField& V, const DefectData& defect,
                                             const thermo::EquationOfState& eos,
                                             const thermo::TransportCoefficients& tc,
                                             const TestFunctionDictionary& dict,
                                             const solver::Forcing* forcing = nullptr);

struct EnergyCheck {
    field::TimeSeries<double> D;  // energy defect, work-corrected when forced
    bool pass = false;            // D(tau) >= -tol for all tau
    double min_D = 0.0;
};

EnergyCheck energy_check(const MeasureField& V, const thermo::EquationOfState& eos,
                         const solver::Forcing* forcing = nullptr, double tol = 1e-10);

/// Entropy inequality slack per (nonnegative test, tau); admissibility
/// requires slack >= -tol.
std::vector<ResidualEntry> entropy_inequality_residual(const MeasureField& V,
                                                       const thermo::EquationOfState& eos,
                                                       const thermo::TransportCoefficients& tc,
                                                       const TestFunctionDictionary& dict,
                                                       const solver::Forcing* forcing = nullptr,
                                                       double theta_floor = 1e-10);

struct ConcentrationBound {
    double C = 0.0;
    bool pass = false;
    std::string witness;
};

/// Verifies TV(nu_C)(t) <= C D(t) with one constant, and TV = 0 wherever the
/// defect vanishes (below tol_defect).
ConcentrationBound concentration_bound_check(const DefectData& defect, double tol_defect = 1e-12);

struct KornMeasureResult {
    double lhs_g12 = 0.0, rhs_g12 = 0.0, ratio_g12 = 0.0;
    double lhs_g12a = 0.0, rhs_g12a = 0.0, ratio_g12a = 0.0;
    double mean_korn_term = 0.0;       // II | <u> - u_ref |^2
    double chain_identity_error = 0.0;  // max pointwise error of the variance split
};

/// Korn-Poincare quotients against a reference velocity (analytic), plus the
/// mean-centered variant and the exact variance-splitting identity combining
/// the two.
KornMeasureResult korn_poincare_measure_check(const MeasureField& V,
                                              const solver::ManufacturedSolution& reference);

struct UniformBoundReport {
    double sup_state_integral = 0.0;   // sup_t int rho + rho|u|^2 + rho e + rho |s|
    double visc_dissipation = 0.0;     // II mu/(2 th) |T[grad u]|^2 + lambda/th (div u)^2
    double heat_dissipation = 0.0;     // II kappa |grad log theta|^2
};

UniformBoundReport uniform_bound_report(const std::vector<solver::Trajectory>& runs,
                                        const thermo::EquationOfState& eos,
                                        const thermo::TransportCoefficients& tc,
                                        double theta_floor = 1e-10);

}  // namespace nsf::dmv
