#include "nsf/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace nsf::thermo {

namespace {

double fd_step(double x) { return 1e-6 * std::max(1.0, std::abs(x)); }

StateFn fd_drho(StateFn f) {
    return [f](double rho, double theta) {
        const double h = std::min(fd_step(rho), 0.5 * rho);
        return (f(rho + h, theta) - f(rho - h, theta)) / (2.0 * h);
    };
}

StateFn fd_dtheta(StateFn f) {
    return [f](double rho, double theta) {
        const double h = std::min(fd_step(theta), 0.5 * theta);
        return (f(rho, theta + h) - f(rho, theta - h)) / (2.0 * h);
    };
}

// 15-point Gauss-Legendre on [a, b]; exact through degree 29, ample for the
// smooth integrands on the narrow (log-uniform) subintervals used here.
double gauss15(const std::function<double(double)>& f, double a, double b) {
    static const double xk[8] = {0.0,
                                 0.2011940939974345,
                                 0.3941513470775634,
                                 0.5709721726085388,
                                 0.7244177313601700,
                                 0.8482065834104272,
                                 0.9372733924007060,
                                 0.9879925180204854};
    static const double wk[8] = {0.2025782419255613, 0.1984314853271116, 0.1861610000155622,
                                 0.1662692058169939, 0.1395706779261543, 0.1071592204671719,
                                 0.0703660474881081, 0.0307532419961173};
    const double c = 0.5 * (a + b), hh = 0.5 * (b - a);
    double s = wk[0] * f(c);
    for (int k = 1; k < 8; ++k) s += wk[k] * (f(c - hh * xk[k]) + f(c + hh * xk[k]));
    return s * hh;
}

// Composite Gauss-Legendre with log-uniform panels, for quadrature between
// arbitrary positive endpoints.
double integrate_1d(const std::function<double(double)>& f, double a, double b) {
    if (a == b) return 0.0;
    double sign = 1.0;
    if (a > b) {
        std::swap(a, b);
        sign = -1.0;
    }
    const int panels = std::max(2, static_cast<int>(std::ceil(24.0 * std::log10(b / a))));
    double s = 0.0;
    double lo = a;
    const double r = std::pow(b / a, 1.0 / panels);
    for (int i = 0; i < panels; ++i) {
        const double hi = (i == panels - 1) ? b : lo * r;
        s += gauss15(f, lo, hi);
        lo = hi;
    }
    return sign * s;
}

// Tabulated entropy structure function S(q) for the monoatomic family.
// Nodes carry exact values of S' so evaluation uses cubic Hermite pieces.
struct SEntropyTable {
    std::vector<double> q, S, dS;
    double q_min = 0.0, q_max = 0.0;
    double tail_beta = 0.0;  // local power-law exponent of (5/3)P - P'q at q_max
    std::function<double(double)> sprime;

    double eval(double qv) const {
        if (qv <= 0.0) throw std::domain_error("monoatomic entropy: q must be positive");
        if (qv < q_min) return S.front() + integrate_1d(sprime, q_min, qv);
        if (qv > q_max) return S.back() + integrate_1d(sprime, q_max, qv);
        // log-uniform grid: locate by index arithmetic, then Hermite.
        const double u = std::log(qv / q_min) / std::log(q_max / q_min) *
                         static_cast<double>(q.size() - 1);
        std::size_t i = std::min(static_cast<std::size_t>(std::max(0.0, u)), q.size() - 2);
        while (i + 1 < q.size() - 1 && q[i + 1] <= qv) ++i;
        while (i > 0 && q[i] > qv) --i;
        const double h = q[i + 1] - q[i];
        const double t = (qv - q[i]) / h;
        const double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * S[i] + (t3 - 2 * t2 + t) * h * dS[i] +
               (-2 * t3 + 3 * t2) * S[i + 1] + (t3 - t2) * h * dS[i + 1];
    }
};

std::shared_ptr<const SEntropyTable> build_entropy_table(
    const std::function<double(double)>& P, const std::function<double(double)>& dP) {
    auto tab = std::make_shared<SEntropyTable>();
    tab->q_min = 1e-9;
    tab->q_max = 1e9;
    const int n = 1537;
    auto g = [&](double qv) { return (5.0 / 3.0) * P(qv) - dP(qv) * qv; };
    tab->sprime = [P, dP](double qv) {
        return -1.5 * ((5.0 / 3.0) * P(qv) - dP(qv) * qv) / (qv * qv);
    };

    tab->q.resize(n);
    const double lr = std::log(tab->q_max / tab->q_min);
    for (int i = 0; i < n; ++i)
        tab->q[static_cast<std::size_t>(i)] =
            tab->q_min * std::exp(lr * static_cast<double>(i) / (n - 1));
    tab->q.back() = tab->q_max;

    // Tail beyond q_max from the local power law g(q) ~ g(q_max) (q/q_max)^beta,
    // whose integral against 1/q^2 converges iff beta < 1.  A non-integrable
    // tail (e.g. the pure ideal gas P(q) = q, for which the third law cannot
    // hold) pins the normalisation at q_max instead.  g is a difference of
    // large terms, so beta is fitted over a factor-2 window; the cancellation
    // noise of g also grows linearly in q, which rules out pushing the
    // quadrature further out instead.
    const double g1 = g(0.5 * tab->q_max), g2 = g(tab->q_max);
    double beta = 0.0;
    if (g1 > 0.0 && g2 > 0.0) beta = std::log(g2 / g1) / std::log(2.0);
    tab->tail_beta = beta;
    double tail = 0.0;
    if (beta < 1.0 - 1e-6) tail = 1.5 * g2 / ((1.0 - beta) * tab->q_max);

    tab->S.assign(static_cast<std::size_t>(n), 0.0);
    tab->dS.resize(static_cast<std::size_t>(n));
    tab->S[static_cast<std::size_t>(n - 1)] = tail;
    for (int i = 0; i < n; ++i)
        tab->dS[static_cast<std::size_t>(i)] = tab->sprime(tab->q[static_cast<std::size_t>(i)]);
    for (int i = n - 2; i >= 0; --i) {
        const std::size_t k = static_cast<std::size_t>(i);
        const double piece = gauss15(tab->sprime, tab->q[k], tab->q[k + 1]);
        tab->S[k] = tab->S[k + 1] - piece;
    }
    return tab;
}

}  // namespace

double EquationOfState::eval(const StateFn& f, double rho, double theta) {
    if (!(rho > 0.0) || !(theta > 0.0))
        throw std::domain_error("EquationOfState: rho and theta must be positive");
    return f(rho, theta);
}

void EquationOfState::fill_missing_derivatives() {
    if (!dp_drho_) dp_drho_ = fd_drho(p_);
    if (!dp_dtheta_) dp_dtheta_ = fd_dtheta(p_);
    if (!de_drho_) de_drho_ = fd_drho(e_);
    if (!de_dtheta_) de_dtheta_ = fd_dtheta(e_);
    if (!ds_drho_) ds_drho_ = fd_drho(s_);
    if (!ds_dtheta_) ds_dtheta_ = fd_dtheta(s_);
}

EquationOfState EquationOfState::perfect_gas(double c_v) {
    if (!(c_v > 1.0)) throw std::invalid_argument("perfect_gas: c_v must exceed 1");
    EquationOfState eos;
    eos.kind_ = EosKind::perfect_gas;
    eos.name_ = "perfect_gas";
    eos.p_ = [](double r, double t) { return r * t; };
    eos.e_ = [c_v](double, double t) { return c_v * t; };
    eos.s_ = [c_v](double r, double t) { return c_v * std::log(t) - std::log(r); };
    eos.dp_drho_ = [](double, double t) { return t; };
    eos.dp_dtheta_ = [](double r, double) { return r; };
    eos.de_drho_ = [](double, double) { return 0.0; };
    eos.de_dtheta_ = [c_v](double, double) { return c_v; };
    eos.ds_drho_ = [](double r, double) { return -1.0 / r; };
    eos.ds_dtheta_ = [c_v](double, double t) { return c_v / t; };
    return eos;
}

EquationOfState EquationOfState::monoatomic(std::function<double(double)> P,
                                            std::function<double(double)> dP) {
    if (!P || !dP) throw std::invalid_argument("monoatomic: P and P' are required");

    // Structural validation on a log-uniform sample grid.
    if (std::abs(P(0.0)) > 1e-12) {
        std::ostringstream os;
        os << "monoatomic: P(0) = " << P(0.0) << ", expected 0";
        throw StructuralError(os.str());
    }
    for (int i = 0; i <= 128; ++i) {
        const double q = 1e-6 * std::pow(1e12, i / 128.0);
        if (!(dP(q) > 0.0)) {
            std::ostringstream os;
            os << "monoatomic: P'(q) <= 0 at q = " << q;
            throw StructuralError(os.str());
        }
        if (!((5.0 / 3.0) * P(q) - dP(q) * q > 0.0)) {
            std::ostringstream os;
            os << "monoatomic: (5/3)P(q) - P'(q) q <= 0 at q = " << q;
            throw StructuralError(os.str());
        }
    }

    auto table = build_entropy_table(P, dP);

    EquationOfState eos;
    eos.kind_ = EosKind::monoatomic;
    eos.name_ = "monoatomic";
    auto q_of = [](double r, double t) { return r * std::pow(t, -1.5); };
    eos.p_ = [P, q_of](double r, double t) { return std::pow(t, 2.5) * P(q_of(r, t)); };
    eos.e_ = [P, q_of](double r, double t) { return 1.5 * std::pow(t, 2.5) / r * P(q_of(r, t)); };
    eos.s_ = [table, q_of](double r, double t) { return table->eval(q_of(r, t)); };
    eos.dp_drho_ = [dP, q_of](double r, double t) { return t * dP(q_of(r, t)); };
    eos.dp_dtheta_ = [P, dP, q_of](double r, double t) {
        const double q = q_of(r, t);
        return 2.5 * std::pow(t, 1.5) * P(q) - 1.5 * r * dP(q);
    };
    eos.de_drho_ = [P, dP, q_of](double r, double t) {
        const double q = q_of(r, t);
        return 1.5 * t / r * dP(q) - 1.5 * std::pow(t, 2.5) / (r * r) * P(q);
    };
    eos.de_dtheta_ = [P, dP, q_of](double r, double t) {
        const double q = q_of(r, t);
        return 3.75 * std::pow(t, 1.5) / r * P(q) - 2.25 * dP(q);
    };
    eos.ds_drho_ = [table, q_of](double r, double t) {
        return table->sprime(q_of(r, t)) * std::pow(t, -1.5);
    };
    eos.ds_dtheta_ = [table, q_of](double r, double t) {
        return table->sprime(q_of(r, t)) * (-1.5 * r * std::pow(t, -2.5));
    };
    return eos;
}

EquationOfState EquationOfState::radiative(const EquationOfState& base, double a, int exponent) {
    if (!(a >= 0.0)) throw std::invalid_argument("radiative: coefficient a must be nonnegative");
    if (exponent != 2 && exponent != 4)
        throw std::invalid_argument("radiative: exponent must be 2 or 4");

    EquationOfState eos = base;
    eos.kind_ = base.kind() == EosKind::monoatomic ? EosKind::monoatomic_plus_radiation
                                                   : EosKind::custom;
    eos.name_ = base.name() + (exponent == 2 ? "+radiation2" : "+radiation4");

    auto add = [](StateFn f, StateFn g) {
        return [f, g](double r, double t) { return f(r, t) + g(r, t); };
    };
    if (exponent == 2) {
        eos.p_ = add(base.p_, [a](double, double t) { return a * t * t; });
        eos.e_ = add(base.e_, [a](double r, double t) { return a * t * t / r; });
        eos.s_ = add(base.s_, [a](double r, double t) { return 2.0 * a * t / r; });
        eos.dp_drho_ = base.dp_drho_;
        eos.dp_dtheta_ = add(base.dp_dtheta_, [a](double, double t) { return 2.0 * a * t; });
        eos.de_drho_ =
            add(base.de_drho_, [a](double r, double t) { return -a * t * t / (r * r); });
        eos.de_dtheta_ = add(base.de_dtheta_, [a](double r, double t) { return 2.0 * a * t / r; });
        eos.ds_drho_ =
            add(base.ds_drho_, [a](double r, double t) { return -2.0 * a * t / (r * r); });
        eos.ds_dtheta_ = add(base.ds_dtheta_, [a](double r, double) { return 2.0 * a / r; });
    } else {
        eos.p_ = add(base.p_, [a](double, double t) { return a / 3.0 * t * t * t * t; });
        eos.e_ = add(base.e_, [a](double r, double t) { return a * t * t * t * t / r; });
        eos.s_ = add(base.s_, [a](double r, double t) { return 4.0 / 3.0 * a * t * t * t / r; });
        eos.dp_drho_ = base.dp_drho_;
        eos.dp_dtheta_ =
            add(base.dp_dtheta_, [a](double, double t) { return 4.0 / 3.0 * a * t * t * t; });
        eos.de_drho_ =
            add(base.de_drho_, [a](double r, double t) { return -a * t * t * t * t / (r * r); });
        eos.de_dtheta_ =
            add(base.de_dtheta_, [a](double r, double t) { return 4.0 * a * t * t * t / r; });
        eos.ds_drho_ = add(base.ds_drho_,
                           [a](double r, double t) { return -4.0 / 3.0 * a * t * t * t / (r * r); });
        eos.ds_dtheta_ =
            add(base.ds_dtheta_, [a](double r, double t) { return 4.0 * a * t * t / r; });
    }
    return eos;
}

EquationOfState EquationOfState::custom(CustomSpec spec) {
    if (!spec.p || !spec.e || !spec.s)
        throw std::invalid_argument("custom EOS: p, e, s are required");
    EquationOfState eos;
    eos.kind_ = EosKind::custom;
    eos.name_ = spec.name;
    eos.p_ = std::move(spec.p);
    eos.e_ = std::move(spec.e);
    eos.s_ = std::move(spec.s);
    eos.dp_drho_ = std::move(spec.dp_drho);
    eos.dp_dtheta_ = std::move(spec.dp_dtheta);
    eos.de_drho_ = std::move(spec.de_drho);
    eos.de_dtheta_ = std::move(spec.de_dtheta);
    eos.ds_drho_ = std::move(spec.ds_drho);
    eos.ds_dtheta_ = std::move(spec.ds_dtheta);
    eos.fill_missing_derivatives();
    return eos;
}

TransportCoefficients TransportCoefficients::constant(double mu0, double lambda0, double kappa0) {
    if (!(mu0 > 0.0)) throw std::invalid_argument("transport: mu0 must be positive");
    if (!(lambda0 >= 0.0)) throw std::invalid_argument("transport: lambda0 must be nonnegative");
    if (!(kappa0 > 0.0)) throw std::invalid_argument("transport: kappa0 must be positive");
    TransportCoefficients tc;
    tc.kind_ = TransportKind::constant;
    tc.mu0_ = mu0;
    tc.mu_ = [mu0](double, double) { return mu0; };
    tc.lambda_ = [lambda0](double, double) { return lambda0; };
    tc.kappa_ = [kappa0](double, double) { return kappa0; };
    return tc;
}

TransportCoefficients TransportCoefficients::affine_theta(double mu0, double mu1, double kappa0) {
    if (!(mu0 > 0.0)) throw std::invalid_argument("transport: mu0 must be positive");
    if (!(mu1 >= 0.0)) throw std::invalid_argument("transport: mu1 must be nonnegative");
    if (!(kappa0 > 0.0)) throw std::invalid_argument("transport: kappa0 must be positive");
    TransportCoefficients tc;
    tc.kind_ = TransportKind::affine_theta;
    tc.mu0_ = mu0;
    tc.mu1_ = mu1;
    tc.mu_ = [mu0, mu1](double, double t) { return mu0 + mu1 * t; };
    tc.lambda_ = [](double, double) { return 0.0; };
    tc.kappa_ = [kappa0](double, double) { return kappa0; };
    return tc;
}

TransportCoefficients TransportCoefficients::custom(StateFn mu, StateFn lambda, StateFn kappa) {
    if (!mu || !lambda || !kappa)
        throw std::invalid_argument("transport: mu, lambda, kappa are required");
    TransportCoefficients tc;
    tc.kind_ = TransportKind::custom;
    tc.mu_ = std::move(mu);
    tc.lambda_ = std::move(lambda);
    tc.kappa_ = std::move(kappa);
    return tc;
}

GibbsResidual gibbs_residual(const EquationOfState& eos, double rho, double theta) {
    const double r_rho = theta * eos.ds_drho(rho, theta) -
                         (eos.de_drho(rho, theta) - eos.p(rho, theta) / (rho * rho));
    const double r_theta = theta * eos.ds_dtheta(rho, theta) - eos.de_dtheta(rho, theta);
    return {r_rho, r_theta};
}

GibbsResidual gibbs_residual_normalized(const EquationOfState& eos, double rho, double theta) {
    const double a_rho = theta * eos.ds_drho(rho, theta);
    const double b_rho = eos.de_drho(rho, theta) - eos.p(rho, theta) / (rho * rho);
    const double a_theta = theta * eos.ds_dtheta(rho, theta);
    const double b_theta = eos.de_dtheta(rho, theta);
    const double s_rho = std::max({1.0, std::abs(a_rho), std::abs(b_rho)});
    const double s_theta = std::max({1.0, std::abs(a_theta), std::abs(b_theta)});
    return {(a_rho - b_rho) / s_rho, (a_theta - b_theta) / s_theta};
}

StabilityResult stability_check(const EquationOfState& eos, double rho, double theta) {
    const double dpdr = eos.dp_drho(rho, theta);
    const double dedt = eos.de_dtheta(rho, theta);
    return {dpdr, dedt, dpdr > 0.0 && dedt > 0.0};
}

double ballistic_free_energy(const EquationOfState& eos, double rho, double theta,
                             double theta_ref) {
    if (!(theta_ref > 0.0))
        throw std::domain_error("ballistic_free_energy: reference temperature must be positive");
    return rho * (eos.e(rho, theta) - theta_ref * eos.s(rho, theta));
}

Mat newton_stress(const TransportCoefficients& tc, double rho, double theta, const Mat& grad_u) {
    const int n = grad_u.dim();
    Mat s = traceless_part(grad_u);
    s *= tc.mu(rho, theta);
    const double lt = tc.lambda(rho, theta) * grad_u.trace();
    for (int i = 0; i < n; ++i) s(i, i) += lt;
    return s;
}

Vec fourier_flux(const TransportCoefficients& tc, double rho, double theta,
                 const Vec& grad_theta) {
    return -tc.kappa(rho, theta) * grad_theta;
}

double entropy_production_density(const TransportCoefficients& tc, const EquationOfState&,
                                  double rho, double theta, const Mat& D_u, const Vec& D_theta,
                                  double theta_floor) {
    if (!(rho > 0.0)) throw std::domain_error("entropy_production_density: rho must be positive");
    if (theta < 0.0)
        throw std::domain_error("entropy_production_density: theta must be nonnegative");
    const Mat s = newton_stress(tc, rho, std::max(theta, theta_floor), D_u);
    const double mech = ddot(s, D_u);
    const double kappa = tc.kappa(rho, std::max(theta, theta_floor));
    const double heat_num = kappa * D_theta.norm2();
    if (theta == 0.0)
        return (mech + heat_num > 0.0) ? std::numeric_limits<double>::infinity() : 0.0;
    const double th = std::max(theta, theta_floor);
    return (mech + heat_num / th) / th;
}

ConsistencyReport verify_consistency(const EquationOfState& eos, double lo, double hi, int n,
                                     unsigned seed, double tol) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double llo = std::log(lo), lhi = std::log(hi);

    ConsistencyReport rep;
    rep.min_dp_drho = std::numeric_limits<double>::infinity();
    rep.min_de_dtheta = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        const double rho = std::exp(llo + (lhi - llo) * unit(rng));
        const double theta = std::exp(llo + (lhi - llo) * unit(rng));
        const GibbsResidual g = gibbs_residual_normalized(eos, rho, theta);
        const double gm = std::max(std::abs(g.r_rho), std::abs(g.r_theta));
        if (gm > rep.max_gibbs) {
            rep.max_gibbs = gm;
            rep.worst_rho = rho;
            rep.worst_theta = theta;
        }
        const StabilityResult st = stability_check(eos, rho, theta);
        rep.min_dp_drho = std::min(rep.min_dp_drho, st.dp_drho);
        rep.min_de_dtheta = std::min(rep.min_de_dtheta, st.de_dtheta);
    }
    rep.pass = rep.max_gibbs < tol && rep.min_dp_drho > 0.0 && rep.min_de_dtheta > 0.0;
    return rep;
}

}  // namespace nsf::thermo
