#include <cmath>
#include <numbers>
#include <sstream>

#include "nsf/solver.hpp"

namespace nsf::solver {

namespace {
constexpr double pi = std::numbers::pi;

// 1D traveling-wave profile: rho = R(xi), u = c (1 - rho_bar / R),
// theta = theta_bar (1 + B sin xi), xi = w (x - c t).  The pair (rho, u)
// satisfies the continuity equation exactly: rho u = c (R - rho_bar).
struct Wave1D {
    double rho_bar, theta_bar, A, B, c, w;

    double xi(double t, double x) const { return w * (x - c * t); }
    double R(double xi_) const { return rho_bar * (1.0 + A * std::sin(xi_)); }
    double R1(double xi_) const { return rho_bar * A * std::cos(xi_); }   // dR/dxi
    double R2(double xi_) const { return -rho_bar * A * std::sin(xi_); }  // d2R/dxi2
    double u(double xi_) const { return c * (1.0 - rho_bar / R(xi_)); }
    double u1(double xi_) const { return c * rho_bar * R1(xi_) / (R(xi_) * R(xi_)); }
    double u2(double xi_) const {
        const double r = R(xi_);
        return c * rho_bar * (R2(xi_) * r - 2.0 * R1(xi_) * R1(xi_)) / (r * r * r);
    }
    double th(double xi_) const { return theta_bar * (1.0 + B * std::sin(xi_)); }
    double th1(double xi_) const { return theta_bar * B * std::cos(xi_); }
    double th2(double xi_) const { return -theta_bar * B * std::sin(xi_); }
};

Wave1D wave(const ManufacturedParams& p) {
    return {p.rho_bar, p.theta_bar, p.amplitude, p.theta_amplitude,
            p.speed,   2.0 * pi * p.mode / p.extent_x};
}

// 2D no-slip vortex from the stream function psi = A g(t) sin^2(a x) sin^2(b y)
// (divergence-free velocity, rho constant, continuity exact) with a no-flux
// temperature bump theta = theta_bar (1 + B g(t) cos(a x) cos(b y)).
struct Vortex2D {
    double rho_bar, theta_bar, A, B, a, b, gamma;

    double g(double t) const { return std::exp(-gamma * t); }

    Vec u(double t, const Vec& x) const {
        const double sx = std::sin(a * x[0]), sy = std::sin(b * x[1]);
        return Vec::of(A * g(t) * b * sx * sx * std::sin(2.0 * b * x[1]),
                       -A * g(t) * a * std::sin(2.0 * a * x[0]) * sy * sy);
    }
    Mat grad(double t, const Vec& x) const {
        const double sx = std::sin(a * x[0]), sy = std::sin(b * x[1]);
        const double s2x = std::sin(2.0 * a * x[0]), s2y = std::sin(2.0 * b * x[1]);
        const double c2x = std::cos(2.0 * a * x[0]), c2y = std::cos(2.0 * b * x[1]);
        Mat m(2);
        m(0, 0) = A * g(t) * b * a * s2x * s2y;
        m(0, 1) = A * g(t) * 2.0 * b * b * sx * sx * c2y;
        m(1, 0) = -A * g(t) * 2.0 * a * a * c2x * sy * sy;
        m(1, 1) = -A * g(t) * a * b * s2x * s2y;
        return m;
    }
    Vec lap(double t, const Vec& x) const {
        const double sx = std::sin(a * x[0]), sy = std::sin(b * x[1]);
        const double s2x = std::sin(2.0 * a * x[0]), s2y = std::sin(2.0 * b * x[1]);
        const double c2x = std::cos(2.0 * a * x[0]), c2y = std::cos(2.0 * b * x[1]);
        const double u1xx = A * g(t) * b * 2.0 * a * a * c2x * s2y;
        const double u1yy = -A * g(t) * 4.0 * b * b * b * sx * sx * s2y;
        const double u2xx = A * g(t) * 4.0 * a * a * a * s2x * sy * sy;
        const double u2yy = -A * g(t) * a * 2.0 * b * b * s2x * c2y;
        return Vec::of(u1xx + u1yy, u2xx + u2yy);
    }
    double th(double t, const Vec& x) const {
        return theta_bar * (1.0 + B * g(t) * std::cos(a * x[0]) * std::cos(b * x[1]));
    }
    Vec grad_th(double t, const Vec& x) const {
        return Vec::of(-theta_bar * B * g(t) * a * std::sin(a * x[0]) * std::cos(b * x[1]),
                       -theta_bar * B * g(t) * b * std::cos(a * x[0]) * std::sin(b * x[1]));
    }
    double lap_th(double t, const Vec& x) const {
        return -theta_bar * B * g(t) * (a * a + b * b) * std::cos(a * x[0]) * std::cos(b * x[1]);
    }
};

Vortex2D vortex(const ManufacturedParams& p) {
    return {p.rho_bar,       p.theta_bar,     p.amplitude, p.theta_amplitude,
            pi / p.extent_x, pi / p.extent_y, p.time_rate};
}

}  // namespace

ManufacturedSolution::ManufacturedSolution(ManufacturedKind kind, ManufacturedParams p,
                                           thermo::EquationOfState eos,
                                           thermo::TransportCoefficients tc)
    : kind_(kind), params_(p), eos_(std::move(eos)), tc_(std::move(tc)) {
    dim_ = (kind == ManufacturedKind::smooth_2d) ? 2 : 1;
    validate_range();
}

void ManufacturedSolution::validate_range() const {
    const ManufacturedParams& p = params_;
    if (!(p.rho_bar > 0.0) || !(p.theta_bar > 0.0))
        throw std::invalid_argument("manufactured solution: background must be positive");
    if (std::abs(p.amplitude) >= 1.0 || std::abs(p.theta_amplitude) >= 1.0)
        throw std::invalid_argument("manufactured solution: amplitudes must stay below 1");
    const double d = p.delta;
    if (!(d > 0.0) || !(d < 0.5))
        throw std::invalid_argument("manufactured solution: delta must lie in (0, 1/2)");
    const double lo = 2.0 * d, hi = 1.0 / d - d;
    const double rho_min = p.rho_bar * (1.0 - std::abs(p.amplitude));
    const double rho_max = p.rho_bar * (1.0 + std::abs(p.amplitude));
    const double th_min = p.theta_bar * (1.0 - std::abs(p.theta_amplitude));
    const double th_max = p.theta_bar * (1.0 + std::abs(p.theta_amplitude));
    if (rho_min <= lo || rho_max >= hi || th_min <= lo || th_max >= hi) {
        std::ostringstream os;
        os << "manufactured solution leaves the positivity box [" << lo << ", " << hi
           << "]: rho in [" << rho_min << ", " << rho_max << "], theta in [" << th_min << ", "
           << th_max << "]";
        throw std::invalid_argument(os.str());
    }
}

double ManufacturedSolution::rho(double t, const Vec& x) const {
    switch (kind_) {
        case ManufacturedKind::constant: return params_.rho_bar;
        case ManufacturedKind::smooth_vortex_1d: {
            const Wave1D w = wave(params_);
            return w.R(w.xi(t, x[0]));
        }
        case ManufacturedKind::smooth_2d: return params_.rho_bar;
    }
    return params_.rho_bar;
}

double ManufacturedSolution::theta(double t, const Vec& x) const {
    switch (kind_) {
        case ManufacturedKind::constant: return params_.theta_bar;
        case ManufacturedKind::smooth_vortex_1d: {
            const Wave1D w = wave(params_);
            return w.th(w.xi(t, x[0]));
        }
        case ManufacturedKind::smooth_2d: return vortex(params_).th(t, x);
    }
    return params_.theta_bar;
}

Vec ManufacturedSolution::velocity(double t, const Vec& x) const {
    switch (kind_) {
        case ManufacturedKind::constant: return Vec::zero(dim_);
        case ManufacturedKind::smooth_vortex_1d: {
            const Wave1D w = wave(params_);
            return Vec(1, w.u(w.xi(t, x[0])), 0.0);
        }
        case ManufacturedKind::smooth_2d: return vortex(params_).u(t, x);
    }
    return Vec::zero(dim_);
}

double ManufacturedSolution::drho_dt(double t, const Vec& x) const {
    if (kind_ != ManufacturedKind::smooth_vortex_1d) return 0.0;
    const Wave1D w = wave(params_);
    return -w.c * w.w * w.R1(w.xi(t, x[0]));
}

Vec ManufacturedSolution::grad_rho(double t, const Vec& x) const {
    if (kind_ != ManufacturedKind::smooth_vortex_1d) return Vec::zero(dim_);
    const Wave1D w = wave(params_);
    return Vec(1, w.w * w.R1(w.xi(t, x[0])), 0.0);
}

double ManufacturedSolution::dtheta_dt(double t, const Vec& x) const {
    switch (kind_) {
        case ManufacturedKind::constant: return 0.0;
        case ManufacturedKind::smooth_vortex_1d: {
            const Wave1D w = wave(params_);
            return -w.c * w.w * w.th1(w.xi(t, x[0]));
        }
        case ManufacturedKind::smooth_2d: {
            const Vortex2D v = vortex(params_);
            return -v.gamma * (v.th(t, x) - v.theta_bar);
        }
    }
    return 0.0;
}

Vec ManufacturedSolution::grad_theta(double t, const Vec& x) const {
    switch (kind_) {
        case ManufacturedKind::constant: return Vec::zero(dim_);
        case ManufacturedKind::smooth_vortex_1d: {
            const Wave1D w = wave(params_);
            return Vec(1, w.w * w.th1(w.xi(t, x[0])), 0.0);
        }
        case ManufacturedKind::smooth_2d: return vortex(params_).grad_th(t, x);
    }
    return Vec::zero(dim_);
}

double ManufacturedSolution::lap_theta(double t, const Vec& x) const {
    switch (kind_) {
        case ManufacturedKind::constant: return 0.0;
        case ManufacturedKind::smooth_vortex_1d: {
            const Wave1D w = wave(params_);
            return w.w * w.w * w.th2(w.xi(t, x[0]));
        }
        case ManufacturedKind::smooth_2d: return vortex(params_).lap_th(t, x);
    }
    return 0.0;
}

Vec ManufacturedSolution::du_dt(double t, const Vec& x) const {
    switch (kind_) {
        case ManufacturedKind::constant: return Vec::zero(dim_);
        case ManufacturedKind::smooth_vortex_1d: {
            const Wave1D w = wave(params_);
            return Vec(1, -w.c * w.w * w.u1(w.xi(t, x[0])), 0.0);
        }
        case ManufacturedKind::smooth_2d: {
            const Vortex2D v = vortex(params_);
            return -v.gamma * v.u(t, x);
        }
    }
    return Vec::zero(dim_);
}

Mat ManufacturedSolution::grad_u(double t, const Vec& x) const {
    switch (kind_) {
        case ManufacturedKind::constant: return Mat::zero(dim_);
        case ManufacturedKind::smooth_vortex_1d: {
            const Wave1D w = wave(params_);
            return Mat::of1(w.w * w.u1(w.xi(t, x[0])));
        }
        case ManufacturedKind::smooth_2d: return vortex(params_).grad(t, x);
    }
    return Mat::zero(dim_);
}

Vec ManufacturedSolution::lap_u(double t, const Vec& x) const {
    switch (kind_) {
        case ManufacturedKind::constant: return Vec::zero(dim_);
        case ManufacturedKind::smooth_vortex_1d: {
            const Wave1D w = wave(params_);
            return Vec(1, w.w * w.w * w.u2(w.xi(t, x[0])), 0.0);
        }
        case ManufacturedKind::smooth_2d: return vortex(params_).lap(t, x);
    }
    return Vec::zero(dim_);
}

Vec ManufacturedSolution::grad_div_u(double t, const Vec& x) const {
    switch (kind_) {
        case ManufacturedKind::constant: return Vec::zero(dim_);
        case ManufacturedKind::smooth_vortex_1d: return lap_u(t, x);  // div u = du/dx in 1D
        case ManufacturedKind::smooth_2d: return Vec::zero(2);        // divergence-free
    }
    return Vec::zero(dim_);
}

Forcing ManufacturedSolution::forcing() const {
    if (kind_ == ManufacturedKind::constant) return {};

    // Residuals of the momentum and internal-energy equations evaluated on
    // the closed-form fields.  Transport gradients are chained through
    // (rho, theta) with small central differences, which covers custom
    // coefficient laws as well.
    const ManufacturedSolution self = *this;
    const int n = dim_;

    auto grad_coeff = [](const thermo::StateFn& c, double rho, double theta, const Vec& gr,
                         const Vec& gth) {
        const double hr = 1e-6 * std::max(1.0, std::abs(rho));
        const double ht = 1e-6 * std::max(1.0, std::abs(theta));
        const double d_rho = (c(rho + hr, theta) - c(rho - hr, theta)) / (2.0 * hr);
        const double d_theta = (c(rho, theta + ht) - c(rho, theta - ht)) / (2.0 * ht);
        Vec out(gr.dim());
        for (int i = 0; i < gr.dim(); ++i) out[i] = d_rho * gr[i] + d_theta * gth[i];
        return out;
    };

    Forcing f;
    f.f_u = [self, n, grad_coeff](double t, const Vec& x) {
        const double rho = self.rho(t, x), theta = self.theta(t, x);
        const Vec gr = self.grad_rho(t, x), gth = self.grad_theta(t, x);
        const Mat gu = self.grad_u(t, x);
        const Vec u = self.velocity(t, x);
        const double divu = gu.trace();

        Vec grad_p(n);
        for (int i = 0; i < n; ++i)
            grad_p[i] = self.eos_.dp_drho(rho, theta) * gr[i] +
                        self.eos_.dp_dtheta(rho, theta) * gth[i];

        const Vec grad_mu = grad_coeff(
            [&self](double r, double th) { return self.tc_.mu(r, th); }, rho, theta, gr, gth);
        const Vec grad_la = grad_coeff(
            [&self](double r, double th) { return self.tc_.lambda(r, th); }, rho, theta, gr, gth);

        const Mat T = traceless_part(gu);
        const double mu = self.tc_.mu(rho, theta);
        const double la = self.tc_.lambda(rho, theta);
        const Vec lap = self.lap_u(t, x);
        const Vec gdiv = self.grad_div_u(t, x);
        Vec div_s(n);
        for (int i = 0; i < n; ++i) {
            double v =
                mu * (lap[i] + (1.0 - 2.0 / n) * gdiv[i]) + la * gdiv[i] + grad_la[i] * divu;
            for (int j = 0; j < n; ++j) v += T(i, j) * grad_mu[j];
            div_s[i] = v;
        }

        return self.du_dt(t, x) + gu * u + (1.0 / rho) * grad_p - (1.0 / rho) * div_s;
    };

    f.f_e = [self, grad_coeff](double t, const Vec& x) {
        const double rho = self.rho(t, x), theta = self.theta(t, x);
        const Vec gth = self.grad_theta(t, x);
        const Vec gr = self.grad_rho(t, x);
        const Mat gu = self.grad_u(t, x);
        const Vec u = self.velocity(t, x);
        const double divu = gu.trace();

        const Vec grad_ka = grad_coeff(
            [&self](double r, double th) { return self.tc_.kappa(r, th); }, rho, theta, gr, gth);
        const double kappa = self.tc_.kappa(rho, theta);
        const double div_q = -(dot(grad_ka, gth) + kappa * self.lap_theta(t, x));

        const Mat stress = thermo::newton_stress(self.tc_, rho, theta, gu);
        const double s_dot = ddot(stress, gu);
        const double p = self.eos_.p(rho, theta);

        const double theta_dot = self.dtheta_dt(t, x) + dot(u, gth);
        return self.eos_.de_dtheta(rho, theta) * theta_dot -
               rho * self.eos_.de_drho(rho, theta) * divu + (div_q - s_dot + p * divu) / rho;
    };
    return f;
}

State ManufacturedSolution::sample(const field::Grid& g, double t) const {
    if (g.dim() != dim_)
        throw std::invalid_argument("manufactured solution: grid dimension mismatch");
    State s{field::ScalarField(g), field::ScalarField(g), field::VectorField(g), t};
    for (int c = 0; c < g.cell_count(); ++c) {
        const Vec x = g.center(c);
        s.rho[c] = rho(t, x);
        s.theta[c] = theta(t, x);
        s.u.set(c, velocity(t, x));
    }
    return s;
}

ManufacturedSolution manufactured_strong_solution(ManufacturedKind kind, ManufacturedParams p,
                                                  thermo::EquationOfState eos,
                                                  thermo::TransportCoefficients tc) {
    return ManufacturedSolution(kind, std::move(p), std::move(eos), std::move(tc));
}

}  // namespace nsf::solver
