#pragma once

#include <functional>
#include <optional>
#include <string>

#include "nsf/field.hpp"
#include "nsf/thermo.hpp"

// Explicit RK4 integrator for the compressible Navier-Stokes-Fourier system
// in primitive variables (rho, theta, u), with conservation and entropy
// monitors, and manufactured reference solutions with analytic derivatives
// for verification runs.

namespace nsf::solver {

class SolverError : public std::runtime_error {
public:
    explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

struct State {
    field::ScalarField rho;
    field::ScalarField theta;
    field::VectorField u;
    double t = 0.0;

    const field::Grid& grid() const { return rho.grid(); }
};

struct MonitorRecord {
    double t = 0.0;
    double total_mass = 0.0;
    double total_energy = 0.0;   // integral of rho |u|^2 / 2 + rho e
    double total_entropy = 0.0;  // integral of rho s
    double entropy_production_integral = 0.0;
    double min_rho = 0.0;
    double min_theta = 0.0;
    double work_input = 0.0;  // cumulative forcing work, 0 for unforced runs
};

// Deterministic body/heating forcing; absent members mean zero.
struct Forcing {
    std::function<Vec(double, const Vec&)> f_u;     // acceleration
    std::function<double(double, const Vec&)> f_e;  // specific heating rate

    bool empty() const { return !f_u && !f_e; }
};

struct Derivs {
    field::ScalarField drho;
    field::ScalarField dtheta;
    field::VectorField du;
};

/// Right-hand side of the primitive-variable system on the state's grid.
/// Throws SolverError if rho or theta dips below its floor.
Derivs rhs(const State& state, const thermo::EquationOfState& eos,
           const thermo::TransportCoefficients& tc, const Forcing* forcing = nullptr,
           double rho_floor = 1e-8, double theta_floor = 1e-8);

/// One classical RK4 step.
State step(const State& state, const thermo::EquationOfState& eos,
           const thermo::TransportCoefficients& tc, double dt, const Forcing* forcing = nullptr);

struct RunOptions {
    double t_end = 0.1;
    double cfl = 0.4;
    int snapshots = 16;  // stored slices after t = 0 (stride chosen to match)
    double rho_floor = 1e-8;
    double theta_floor = 1e-8;
    long max_steps = 50'000'000;
};

struct Trajectory {
    field::TimeSeries<State> states;                // stored at uniform stride, first at t = 0
    std::vector<MonitorRecord> monitors;            // one per step (plus initial)
    double dt = 0.0;
};

/// Integrates with a fixed step chosen from the initial state:
///   dt = cfl * min( h / (|u| + c_s), h^2 rho / max(mu, lambda, kappa / de_dtheta) ),
/// rounded down so that snapshots land on uniform times.  Aborts on NaN or
/// floor violations.
Trajectory run(const State& init, const thermo::EquationOfState& eos,
               const thermo::TransportCoefficients& tc, const RunOptions& opt,
               const Forcing* forcing = nullptr);

MonitorRecord compute_monitors(const State& state, const thermo::EquationOfState& eos,
                               const thermo::TransportCoefficients& tc, double work_input = 0.0,
                               double theta_floor = 1e-8);

struct MonitorSummary {
    double energy_drift_rel = 0.0;   // max |E - E0 - W| / |E0|
    double sigma_min = 0.0;          // min entropy production integral over steps
    double entropy_min_increment = 0.0;  // min one-step change of total entropy (unforced runs)
    bool sigma_nonnegative = false;
};

MonitorSummary summarize_monitors(const Trajectory& traj);

/// Largest stable-looking time step for a state (the formula used by run()).
double suggest_dt(const State& state, const thermo::EquationOfState& eos,
                  const thermo::TransportCoefficients& tc, double cfl);

// ---------------------------------------------------------------------------
// Manufactured reference solutions.
//
// Closed-form (rho, theta, u)(t, x) with analytic space and time derivatives.
// `constant` solves the system exactly; the smooth kinds solve it up to a
// computed residual forcing, returned so the solver can be driven in
// manufactured mode and so weak-form checks can account for the source terms.
// ---------------------------------------------------------------------------

enum class ManufacturedKind { constant, smooth_vortex_1d, smooth_2d };

struct ManufacturedParams {
    double rho_bar = 1.0;
    double theta_bar = 1.0;
    double amplitude = 0.0;        // velocity/density amplitude
    double theta_amplitude = 0.0;  // relative temperature amplitude
    double speed = 0.5;            // 1D profile speed
    int mode = 1;                  // spatial mode count
    double time_rate = 1.0;        // rate of the smooth_2d time envelope
    double extent_x = 1.0;
    double extent_y = 1.0;
    double delta = 0.05;           // positivity box: values must stay in [2d, 1/d - d]
};

class ManufacturedSolution {
public:
    ManufacturedSolution(ManufacturedKind kind, ManufacturedParams p,
                         thermo::EquationOfState eos, thermo::TransportCoefficients tc);

    ManufacturedKind manufactured_kind() const { return kind_; }
    const ManufacturedParams& params() const { return params_; }
    const thermo::EquationOfState& eos() const { return eos_; }
    const thermo::TransportCoefficients& transport() const { return tc_; }
    int dim() const { return dim_; }

    double rho(double t, const Vec& x) const;
    double theta(double t, const Vec& x) const;
    Vec velocity(double t, const Vec& x) const;

    double drho_dt(double t, const Vec& x) const;
    Vec grad_rho(double t, const Vec& x) const;
    double dtheta_dt(double t, const Vec& x) const;
    Vec grad_theta(double t, const Vec& x) const;
    double lap_theta(double t, const Vec& x) const;
    Vec du_dt(double t, const Vec& x) const;
    Mat grad_u(double t, const Vec& x) const;  // (grad u)_{ij} = d u_i / d x_j
    Vec lap_u(double t, const Vec& x) const;
    Vec grad_div_u(double t, const Vec& x) const;

    /// Momentum / internal-energy residual forcing making (rho, theta, u) an
    /// exact solution of the forced system.  Continuity holds exactly by
    /// construction, so no mass forcing is needed.
    Forcing forcing() const;

    /// Project onto a grid at time t.
    State sample(const field::Grid& g, double t) const;

private:
    void validate_range() const;
    ManufacturedKind kind_;
    ManufacturedParams params_;
    thermo::EquationOfState eos_;
    thermo::TransportCoefficients tc_;
    int dim_ = 1;
};

ManufacturedSolution manufactured_strong_solution(ManufacturedKind kind, ManufacturedParams p,
                                                  thermo::EquationOfState eos,
                                                  thermo::TransportCoefficients tc);

}  // namespace nsf::solver
