#include "nsf/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace nsf::solver {

using field::BoundaryKind;
using field::Extension;
using field::Grid;
using field::ScalarField;
using field::TensorField;
using field::VectorField;

namespace {

void check_floors(const State& s, double rho_floor, double theta_floor, const char* where) {
    for (int c = 0; c < s.grid().cell_count(); ++c) {
        const double r = s.rho[c], t = s.theta[c];
        if (!std::isfinite(r) || !std::isfinite(t) || !std::isfinite(s.u.at(c).norm2())) {
            std::ostringstream os;
            os << where << ": non-finite state at t = " << s.t << ", cell " << c;
            throw SolverError(os.str());
        }
        if (r < rho_floor || t < theta_floor) {
            std::ostringstream os;
            os << where << ": floor violation at t = " << s.t << ", cell " << c << " (rho = " << r
               << ", theta = " << t << ")";
            throw SolverError(os.str());
        }
    }
}

}  // namespace

Derivs rhs(const State& state, const thermo::EquationOfState& eos,
           const thermo::TransportCoefficients& tc, const Forcing* forcing, double rho_floor,
           double theta_floor) {
    const Grid& g = state.grid();
    const int n = g.cell_count();
    check_floors(state, rho_floor, theta_floor, "rhs");

    VectorField momentum(g);
    ScalarField p(g);
    for (int c = 0; c < n; ++c) {
        momentum.set(c, state.rho[c] * state.u.at(c));
        p[c] = eos.p(state.rho[c], state.theta[c]);
    }

    // velocity gradients with the no-slip (odd) closure, temperature gradient
    // with the no-flux (even) closure; generic one-sided closure elsewhere
    TensorField grad_u = field::gradient_vector(state.u, Extension::odd);
    VectorField grad_theta = field::gradient(state.theta, Extension::even);
    ScalarField div_m = field::divergence(momentum, Extension::odd);
    VectorField grad_p = field::gradient(p, Extension::one_sided);

    TensorField stress(g);
    VectorField heat_flux(g);
    for (int c = 0; c < n; ++c) {
        stress.set(c, thermo::newton_stress(tc, state.rho[c], state.theta[c], grad_u.at(c)));
        heat_flux.set(c, thermo::fourier_flux(tc, state.rho[c], state.theta[c], grad_theta.at(c)));
    }
    VectorField div_stress = field::divergence_tensor(stress, Extension::one_sided);
    ScalarField div_q = field::divergence(heat_flux, Extension::one_sided);

    Derivs d{ScalarField(g), ScalarField(g), VectorField(g)};
    for (int c = 0; c < n; ++c) {
        const double rho = state.rho[c], theta = state.theta[c];
        const Vec u = state.u.at(c);
        const Vec x = g.center(c);
        const Mat gu = grad_u.at(c);
        const double divu = gu.trace();

        d.drho[c] = -div_m[c];

        Vec du = (1.0 / rho) * (div_stress.at(c) - grad_p.at(c)) - gu * u;
        if (forcing && forcing->f_u) du += forcing->f_u(state.t, x);
        d.du.set(c, du);

        const double de_dth = eos.de_dtheta(rho, theta);
        const double de_drh = eos.de_drho(rho, theta);
        double dtheta = (-div_q[c] + ddot(stress.at(c), gu) - p[c] * divu +
                         rho * rho * de_drh * divu) /
                        (rho * de_dth);
        dtheta -= dot(u, grad_theta.at(c));
        if (forcing && forcing->f_e) dtheta += forcing->f_e(state.t, x) / de_dth;
        d.dtheta[c] = dtheta;
    }
    return d;
}

namespace {

State axpy(const State& s, double a, const Derivs& d, double t_new) {
    State out = s;
    const int n = s.grid().cell_count();
    for (int c = 0; c < n; ++c) {
        out.rho[c] = s.rho[c] + a * d.drho[c];
        out.theta[c] = s.theta[c] + a * d.dtheta[c];
        out.u.set(c, s.u.at(c) + a * d.du.at(c));
    }
    out.t = t_new;
    return out;
}

}  // namespace

State step(const State& state, const thermo::EquationOfState& eos,
           const thermo::TransportCoefficients& tc, double dt, const Forcing* forcing) {
    const Derivs k1 = rhs(state, eos, tc, forcing);
    const State s2 = axpy(state, 0.5 * dt, k1, state.t + 0.5 * dt);
    const Derivs k2 = rhs(s2, eos, tc, forcing);
    const State s3 = axpy(state, 0.5 * dt, k2, state.t + 0.5 * dt);
    const Derivs k3 = rhs(s3, eos, tc, forcing);
    const State s4 = axpy(state, dt, k3, state.t + dt);
    const Derivs k4 = rhs(s4, eos, tc, forcing);

    State out = state;
    const int n = state.grid().cell_count();
    for (int c = 0; c < n; ++c) {
        out.rho[c] = state.rho[c] +
                     dt / 6.0 * (k1.drho[c] + 2.0 * k2.drho[c] + 2.0 * k3.drho[c] + k4.drho[c]);
        out.theta[c] =
            state.theta[c] +
            dt / 6.0 * (k1.dtheta[c] + 2.0 * k2.dtheta[c] + 2.0 * k3.dtheta[c] + k4.dtheta[c]);
        out.u.set(c, state.u.at(c) + dt / 6.0 * (k1.du.at(c) + 2.0 * k2.du.at(c) +
                                                 2.0 * k3.du.at(c) + k4.du.at(c)));
    }
    out.t = state.t + dt;
    return out;
}

double suggest_dt(const State& state, const thermo::EquationOfState& eos,
                  const thermo::TransportCoefficients& tc, double cfl) {
    const Grid& g = state.grid();
    double h_min = g.h(0);
    if (g.dim() == 2) h_min = std::min(h_min, g.h(1));

    double dt = std::numeric_limits<double>::infinity();
    for (int c = 0; c < g.cell_count(); ++c) {
        const double rho = state.rho[c], theta = state.theta[c];
        const double dpdr = eos.dp_drho(rho, theta);
        const double dpdt = eos.dp_dtheta(rho, theta);
        const double dedt = eos.de_dtheta(rho, theta);
        const double cs = std::sqrt(dpdr + dpdt * dpdt * theta / (rho * rho * dedt));
        const double speed = state.u.at(c).norm() + cs;
        if (speed > 0.0) dt = std::min(dt, h_min / speed);
        const double diff =
            std::max({tc.mu(rho, theta), tc.lambda(rho, theta), tc.kappa(rho, theta) / dedt});
        if (diff > 0.0) dt = std::min(dt, h_min * h_min * rho / diff);
    }
    return cfl * dt;
}

MonitorRecord compute_monitors(const State& state, const thermo::EquationOfState& eos,
                               const thermo::TransportCoefficients& tc, double work_input,
                               double theta_floor) {
    const Grid& g = state.grid();
    MonitorRecord m;
    m.t = state.t;
    m.work_input = work_input;
    m.min_rho = std::numeric_limits<double>::infinity();
    m.min_theta = std::numeric_limits<double>::infinity();

    TensorField grad_u = field::gradient_vector(state.u, Extension::odd);
    VectorField grad_theta = field::gradient(state.theta, Extension::even);

    double mass = 0.0, energy = 0.0, entropy = 0.0, sigma = 0.0;
    for (int c = 0; c < g.cell_count(); ++c) {
        const double rho = state.rho[c], theta = state.theta[c];
        const Vec u = state.u.at(c);
        mass += rho;
        energy += 0.5 * rho * u.norm2() + rho * eos.e(rho, theta);
        entropy += rho * eos.s(rho, theta);
        sigma += thermo::entropy_production_density(tc, eos, rho, theta, sym(grad_u.at(c)),
                                                    grad_theta.at(c), theta_floor);
        m.min_rho = std::min(m.min_rho, rho);
        m.min_theta = std::min(m.min_theta, theta);
    }
    const double vol = g.cell_volume();
    m.total_mass = mass * vol;
    m.total_energy = energy * vol;
    m.total_entropy = entropy * vol;
    m.entropy_production_integral = sigma * vol;
    return m;
}

Trajectory run(const State& init, const thermo::EquationOfState& eos,
               const thermo::TransportCoefficients& tc, const RunOptions& opt,
               const Forcing* forcing) {
    if (!(opt.t_end > 0.0)) throw std::invalid_argument("run: t_end must be positive");
    if (opt.snapshots < 1) throw std::invalid_argument("run: need at least one snapshot");

    const double dt0 = suggest_dt(init, eos, tc, opt.cfl);
    if (!(dt0 > 0.0) || !std::isfinite(dt0)) throw SolverError("run: no admissible time step");
    long steps = static_cast<long>(std::ceil(opt.t_end / dt0));
    const long per_snap = (steps + opt.snapshots - 1) / opt.snapshots;
    steps = per_snap * opt.snapshots;
    if (steps > opt.max_steps) throw SolverError("run: step budget exceeded");
    const double dt = opt.t_end / static_cast<double>(steps);

    Trajectory traj;
    traj.dt = dt;
    State cur = init;
    cur.t = 0.0;

    double work = 0.0;
    auto work_rate = [&](const State& s) {
        if (!forcing || forcing->empty()) return 0.0;
        double w = 0.0;
        for (int c = 0; c < s.grid().cell_count(); ++c) {
            const Vec x = s.grid().center(c);
            if (forcing->f_u) w += s.rho[c] * dot(s.u.at(c), forcing->f_u(s.t, x));
            if (forcing->f_e) w += s.rho[c] * forcing->f_e(s.t, x);
        }
        return w * s.grid().cell_volume();
    };

    traj.states.append(0.0, cur);
    traj.monitors.push_back(compute_monitors(cur, eos, tc, 0.0, opt.theta_floor));
    double rate_prev = work_rate(cur);

    for (long k = 1; k <= steps; ++k) {
        cur = step(cur, eos, tc, dt, forcing);
        cur.t = static_cast<double>(k) * dt;
        check_floors(cur, opt.rho_floor, opt.theta_floor, "run");
        const double rate = work_rate(cur);
        work += 0.5 * dt * (rate_prev + rate);
        rate_prev = rate;
        traj.monitors.push_back(compute_monitors(cur, eos, tc, work, opt.theta_floor));
        if (k % per_snap == 0) {
            const double ts = opt.t_end * static_cast<double>(k / per_snap) /
                              static_cast<double>(opt.snapshots);
            traj.states.append(ts, cur);
        }
    }
    return traj;
}

MonitorSummary summarize_monitors(const Trajectory& traj) {
    MonitorSummary s;
    if (traj.monitors.empty()) return s;
    const double e0 = traj.monitors.front().total_energy;
    s.sigma_min = std::numeric_limits<double>::infinity();
    s.entropy_min_increment = std::numeric_limits<double>::infinity();
    double drift = 0.0;
    for (std::size_t i = 0; i < traj.monitors.size(); ++i) {
        const MonitorRecord& m = traj.monitors[i];
        drift = std::max(drift, std::abs(m.total_energy - e0 - m.work_input));
        s.sigma_min = std::min(s.sigma_min, m.entropy_production_integral);
        if (i > 0)
            s.entropy_min_increment = std::min(
                s.entropy_min_increment, m.total_entropy - traj.monitors[i - 1].total_entropy);
    }
    s.energy_drift_rel = drift / std::abs(e0);
    s.sigma_nonnegative = s.sigma_min >= 0.0;
    return s;
}

}  // namespace nsf::solver
