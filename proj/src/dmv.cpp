#include "nsf/dmv.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace nsf::dmv {

using field::Extension;
using field::Grid;

namespace {
constexpr double pi = std::numbers::pi;

double clamp_theta(double theta, double floor) { return std::max(theta, floor); }
}  // namespace

double rho_energy(const thermo::EquationOfState& eos, const PhasePoint& a, double theta_floor) {
    if (a.rho <= 0.0) return 0.0;
    return 0.5 * a.rho * a.u.norm2() + a.rho * eos.e(a.rho, clamp_theta(a.theta, theta_floor));
}

double rho_entropy(const thermo::EquationOfState& eos, const PhasePoint& a, double theta_floor) {
    if (a.rho <= 0.0) return 0.0;
    return a.rho * eos.s(a.rho, clamp_theta(a.theta, theta_floor));
}

double dissipation_density(const thermo::TransportCoefficients& tc, const PhasePoint& a,
                           double theta_floor) {
    const double th = clamp_theta(a.theta, theta_floor);
    const Mat s = thermo::newton_stress(tc, std::max(a.rho, theta_floor), th, a.Du);
    return (ddot(s, a.Du) + tc.kappa(std::max(a.rho, theta_floor), th) * a.Dtheta.norm2() / th) /
           th;
}

DiscreteMeasure::DiscreteMeasure(std::vector<PhasePoint> atoms, std::vector<double> weights)
    : atoms_(std::move(atoms)), weights_(std::move(weights)) {
    if (atoms_.empty() || atoms_.size() != weights_.size())
        throw std::invalid_argument("DiscreteMeasure: atoms and weights must match and be nonempty");
    double sum = 0.0;
    for (double w : weights_) {
        if (w < 0.0) throw std::invalid_argument("DiscreteMeasure: negative weight");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("DiscreteMeasure: weights must sum to 1");
}

MeasureField::MeasureField(Grid grid, std::vector<double> times, int atoms_per_cell)
    : grid_(grid), times_(std::move(times)), atoms_per_cell_(atoms_per_cell) {
    if (times_.empty() || times_.front() != 0.0)
        throw std::invalid_argument("MeasureField: times must start at 0");
    for (std::size_t i = 1; i < times_.size(); ++i)
        if (!(times_[i] > times_[i - 1]))
            throw std::invalid_argument("MeasureField: times must increase");
    if (atoms_per_cell_ < 1) throw std::invalid_argument("MeasureField: need at least one atom");
    const std::size_t n = times_.size() * static_cast<std::size_t>(grid_.cell_count()) *
                          static_cast<std::size_t>(atoms_per_cell_);
    atoms_.resize(n);
    weights_.assign(n, 1.0 / atoms_per_cell_);
}

DiscreteMeasure MeasureField::measure_at(int t, int cell) const {
    std::vector<PhasePoint> a;
    std::vector<double> w;
    a.reserve(static_cast<std::size_t>(atoms_per_cell_));
    for (int k = 0; k < atoms_per_cell_; ++k) {
        a.push_back(atom(t, cell, k));
        w.push_back(weight(t, cell, k));
    }
    return DiscreteMeasure(std::move(a), std::move(w));
}

void MeasureField::validate() const {
    for (int t = 0; t < time_count(); ++t)
        for (int c = 0; c < grid_.cell_count(); ++c) {
            double sum = 0.0;
            for (int k = 0; k < atoms_per_cell_; ++k) {
                if (weight(t, c, k) < 0.0)
                    throw std::invalid_argument("MeasureField: negative weight");
                sum += weight(t, c, k);
            }
            if (std::abs(sum - 1.0) > 1e-12) {
                std::ostringstream os;
                os << "MeasureField: weights sum to " << sum << " at (t=" << t << ", cell=" << c
                   << ")";
                throw std::invalid_argument(os.str());
            }
        }
}

MeasureField from_ensemble(const std::vector<solver::Trajectory>& runs) {
    if (runs.empty()) throw std::invalid_argument("from_ensemble: need at least one run");
    const Grid& g = runs.front().states.values.front().grid();
    const std::vector<double>& times = runs.front().states.times;
    for (const auto& r : runs) {
        if (!(r.states.values.front().grid() == g))
            throw std::invalid_argument("from_ensemble: runs live on different grids");
        if (r.states.times != times)
            throw std::invalid_argument("from_ensemble: runs have different snapshot times");
    }

    const int K = static_cast<int>(runs.size());
    MeasureField V(g, times, K);
    for (int k = 0; k < K; ++k) {
        for (std::size_t t = 0; t < times.size(); ++t) {
            const solver::State& s = runs[static_cast<std::size_t>(k)].states.values[t];
            field::TensorField Du = field::symmetric_gradient(s.u, Extension::odd);
            field::VectorField Dth = field::gradient(s.theta, Extension::even);
            for (int c = 0; c < g.cell_count(); ++c) {
                PhasePoint& a = V.atom(static_cast<int>(t), c, k);
                a.rho = s.rho[c];
                a.theta = s.theta[c];
                a.u = s.u.at(c);
                a.Du = Du.at(c);
                a.Dtheta = Dth.at(c);
            }
        }
    }
    return V;
}

MeasureField from_strong(const solver::ManufacturedSolution& ms, const Grid& g,
                         const std::vector<double>& times) {
    MeasureField V(g, times, 1);
    for (std::size_t t = 0; t < times.size(); ++t) {
        for (int c = 0; c < g.cell_count(); ++c) {
            const Vec x = g.center(c);
            PhasePoint& a = V.atom(static_cast<int>(t), c, 0);
            a.rho = ms.rho(times[t], x);
            a.theta = ms.theta(times[t], x);
            a.u = ms.velocity(times[t], x);
            a.Du = sym(ms.grad_u(times[t], x));
            a.Dtheta = ms.grad_theta(times[t], x);
        }
    }
    return V;
}

// ---------------------------------------------------------------------------
// Test functions
// ---------------------------------------------------------------------------

AxisFactor AxisFactor::sinw(double w_, double amp_) {
    return cosw(w_, -0.5 * pi, amp_);  // sin(wx) = cos(wx - pi/2)
}

AxisFactor AxisFactor::poly(double c0, double c1, double c2, double c3) {
    AxisFactor f;
    f.kind = Kind::poly;
    f.c = {c0, c1, c2, c3};
    return f;
}

double AxisFactor::value(double x) const {
    if (kind == Kind::trig) return amp * std::cos(w * x + phase);
    return c[0] + x * (c[1] + x * (c[2] + x * c[3]));
}

double AxisFactor::deriv(double x) const {
    if (kind == Kind::trig) return -amp * w * std::sin(w * x + phase);
    return c[1] + x * (2.0 * c[2] + x * 3.0 * c[3]);
}

namespace {

double term_value(const ScalarTerm& s, int dim, double t, const Vec& x) {
    double v = s.tp.value(t) * s.fx.value(x[0]);
    if (dim == 2) v *= s.fy.value(x[1]);
    return v;
}

double term_dt(const ScalarTerm& s, int dim, double t, const Vec& x) {
    double v = s.tp.deriv(t) * s.fx.value(x[0]);
    if (dim == 2) v *= s.fy.value(x[1]);
    return v;
}

Vec term_grad(const ScalarTerm& s, int dim, double t, const Vec& x) {
    Vec g(dim);
    if (dim == 1) {
        g[0] = s.tp.value(t) * s.fx.deriv(x[0]);
    } else {
        g[0] = s.tp.value(t) * s.fx.deriv(x[0]) * s.fy.value(x[1]);
        g[1] = s.tp.value(t) * s.fx.value(x[0]) * s.fy.deriv(x[1]);
    }
    return g;
}

double terms_value(const std::vector<ScalarTerm>& ts, int dim, double t, const Vec& x) {
    double v = 0.0;
    for (const auto& s : ts) v += term_value(s, dim, t, x);
    return v;
}

double terms_dt(const std::vector<ScalarTerm>& ts, int dim, double t, const Vec& x) {
    double v = 0.0;
    for (const auto& s : ts) v += term_dt(s, dim, t, x);
    return v;
}

Vec terms_grad(const std::vector<ScalarTerm>& ts, int dim, double t, const Vec& x) {
    Vec g(dim);
    for (const auto& s : ts) g += term_grad(s, dim, t, x);
    return g;
}

}  // namespace

double ScalarTestFn::value(double t, const Vec& x) const { return terms_value(terms, dim, t, x); }
double ScalarTestFn::dt(double t, const Vec& x) const { return terms_dt(terms, dim, t, x); }
Vec ScalarTestFn::grad(double t, const Vec& x) const { return terms_grad(terms, dim, t, x); }

Vec VectorTestFn::value(double t, const Vec& x) const {
    Vec v(dim);
    for (int i = 0; i < dim; ++i) v[i] = terms_value(comp[static_cast<std::size_t>(i)], dim, t, x);
    return v;
}

Vec VectorTestFn::dt(double t, const Vec& x) const {
    Vec v(dim);
    for (int i = 0; i < dim; ++i) v[i] = terms_dt(comp[static_cast<std::size_t>(i)], dim, t, x);
    return v;
}

Mat VectorTestFn::grad(double t, const Vec& x) const {
    Mat m(dim);
    for (int i = 0; i < dim; ++i) {
        const Vec gi = terms_grad(comp[static_cast<std::size_t>(i)], dim, t, x);
        for (int j = 0; j < dim; ++j) m(i, j) = gi[j];
    }
    return m;
}

Mat TensorTestFn::value(double t, const Vec& x) const {
    Mat m(dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
            m(i, j) = terms_value(comp[static_cast<std::size_t>(i * dim + j)], dim, t, x);
    return m;
}

Vec TensorTestFn::div(double t, const Vec& x) const {
    Vec v(dim);
    for (int i = 0; i < dim; ++i) {
        double s = 0.0;
        for (int j = 0; j < dim; ++j)
            s += terms_grad(comp[static_cast<std::size_t>(i * dim + j)], dim, t, x)[j];
        v[i] = s;
    }
    return v;
}

TestFunctionDictionary TestFunctionDictionary::standard(const Grid& g, double t_end) {
    TestFunctionDictionary d;
    const int dim = g.dim();
    const bool periodic = g.boundary() == field::BoundaryKind::periodic;
    const double Lx = g.extent(0);
    const double Ly = dim == 2 ? g.extent(1) : 1.0;

    const TimePoly T0{1.0, 0.0, 0.0, t_end};
    const TimePoly T1{1.0, -1.0, 0.0, t_end};  // 1 - t/T
    const TimePoly T2{0.0, 1.0, -1.0, t_end};  // (t/T)(1 - t/T)

    auto one = AxisFactor::one();
    auto S = [&](const std::string& id, bool nn, std::vector<ScalarTerm> ts) {
        ScalarTestFn f;
        f.id = id;
        f.nonneg = nn;
        f.dim = dim;
        f.terms = std::move(ts);
        return f;
    };
    auto V1 = [&](const std::string& id, std::vector<ScalarTerm> c0) {
        VectorTestFn f;
        f.id = id;
        f.dim = dim;
        f.comp[0] = std::move(c0);
        return f;
    };
    auto V2 = [&](const std::string& id, std::vector<ScalarTerm> c0, std::vector<ScalarTerm> c1) {
        VectorTestFn f;
        f.id = id;
        f.dim = dim;
        f.comp[0] = std::move(c0);
        f.comp[1] = std::move(c1);
        return f;
    };

    if (periodic && dim == 1) {
        const double w1 = 2.0 * pi / Lx, w2 = 4.0 * pi / Lx;
        d.scalar = {
            S("s_ramp", false, {{T1, one, one}}),
            S("s_cos1", false, {{T0, AxisFactor::cosw(w1), one}}),
            S("s_cos1_ramp", false, {{T1, AxisFactor::cosw(w1), one}}),
            S("s_sin1_bump", false, {{T2, AxisFactor::sinw(w1), one}}),
            S("s_cos2_ramp", false, {{T1, AxisFactor::cosw(w2), one}}),
        };
        d.nonneg = {
            S("n_one", true, {{T0, one, one}}),
            S("n_ramp", true, {{T1, one, one}}),
            S("n_cos_lift", true, {{T0, one, one}, {T0, AxisFactor::cosw(w1, 0.0, 0.5), one}}),
            S("n_cos_lift_ramp", true,
              {{T1, one, one}, {T1, AxisFactor::cosw(w1, 0.0, 0.5), one}}),
        };
        d.vector_flux = {
            V1("vf_sin1", {{T0, AxisFactor::sinw(w1), one}}),
            V1("vf_cos1_ramp", {{T1, AxisFactor::cosw(w1), one}}),
            V1("vf_sin2_bump", {{T2, AxisFactor::sinw(w2), one}}),
        };
        d.vector_bulk = {
            V1("vb_sin1", {{T0, AxisFactor::sinw(w1), one}}),
            V1("vb_cos1_ramp", {{T1, AxisFactor::cosw(w1), one}}),
            V1("vb_sin2_bump", {{T2, AxisFactor::sinw(w2), one}}),
            V1("vb_mix",
               {{T1, AxisFactor::sinw(w1), one}, {T2, AxisFactor::cosw(w2, 0.0, 0.5), one}}),
        };
        TensorTestFn t1;
        t1.id = "T_cos1";
        t1.dim = 1;
        t1.comp[0] = {{T0, AxisFactor::cosw(w1), one}};
        TensorTestFn t2;
        t2.id = "T_sin1_ramp";
        t2.dim = 1;
        t2.comp[0] = {{T1, AxisFactor::sinw(w1), one}};
        TensorTestFn t3;
        t3.id = "T_const_ramp";
        t3.dim = 1;
        t3.comp[0] = {{T1, one, one}};
        d.tensor = {t1, t2, t3};
        return d;
    }

    if (periodic && dim == 2) {
        const double wx = 2.0 * pi / Lx, wy = 2.0 * pi / Ly;
        d.scalar = {
            S("s_ramp", false, {{T1, one, one}}),
            S("s_cx", false, {{T0, AxisFactor::cosw(wx), one}}),
            S("s_cy_ramp", false, {{T1, one, AxisFactor::cosw(wy)}}),
            S("s_cxy", false, {{T1, AxisFactor::cosw(wx), AxisFactor::cosw(wy)}}),
            S("s_sxcy_bump", false, {{T2, AxisFactor::sinw(wx), AxisFactor::cosw(wy)}}),
        };
        d.nonneg = {
            S("n_one", true, {{T0, one, one}}),
            S("n_ramp", true, {{T1, one, one}}),
            S("n_cos_lift", true,
              {{T0, one, one}, {T0, AxisFactor::cosw(wx, 0.0, 0.5), AxisFactor::cosw(wy)}}),
        };
        d.vector_flux = {
            V2("vf_a", {{T0, AxisFactor::sinw(wx), one}}, {{T0, one, AxisFactor::sinw(wy)}}),
            V2("vf_b", {{T1, AxisFactor::cosw(wx), AxisFactor::cosw(wy)}},
               {{T1, AxisFactor::sinw(wx), AxisFactor::sinw(wy)}}),
            V2("vf_c", {{T2, one, AxisFactor::cosw(wy)}}, {{T2, AxisFactor::cosw(wx), one}}),
        };
        d.vector_bulk = {
            V2("vb_a", {{T0, AxisFactor::sinw(wx), one}}, {{T0, one, AxisFactor::sinw(wy)}}),
            V2("vb_b", {{T1, AxisFactor::cosw(wx), AxisFactor::cosw(wy)}},
               {{T1, AxisFactor::sinw(wx), AxisFactor::sinw(wy)}}),
            V2("vb_c", {{T2, AxisFactor::sinw(wx), AxisFactor::cosw(wy)}},
               {{T2, one, AxisFactor::sinw(wy)}}),
        };
        TensorTestFn t1;
        t1.id = "T_a";
        t1.dim = 2;
        t1.comp[0] = {{T0, AxisFactor::cosw(wx), one}};
        t1.comp[1] = {{T0, one, AxisFactor::cosw(wy, 0.0, 0.5)}};
        t1.comp[2] = t1.comp[1];
        t1.comp[3] = {{T0, AxisFactor::sinw(wx), AxisFactor::sinw(wy)}};
        TensorTestFn t2;
        t2.id = "T_b_ramp";
        t2.dim = 2;
        t2.comp[0] = {{T1, AxisFactor::sinw(wx), AxisFactor::cosw(wy)}};
        t2.comp[1] = {{T1, AxisFactor::cosw(wx, 0.0, 0.4), one}};
        t2.comp[2] = t2.comp[1];
        t2.comp[3] = {{T1, one, AxisFactor::cosw(wy, 0.0, -1.0)}};
        d.tensor = {t1, t2};
        return d;
    }

    if (dim == 1) {  // no-slip line
        const double a1 = pi / Lx, a2 = 2.0 * pi / Lx;
        d.scalar = {
            S("s_ramp", false, {{T1, one, one}}),
            S("s_lin", false, {{T0, AxisFactor::poly(0.0, 1.0 / Lx), one}}),
            S("s_cubic_ramp", false,
              {{T1, AxisFactor::poly(0.2, -1.0 / Lx, 0.0, 0.5 / (Lx * Lx * Lx)), one}}),
            S("s_c1", false, {{T0, AxisFactor::cosw(a1), one}}),
            S("s_c2_bump", false, {{T2, AxisFactor::cosw(a2), one}}),
        };
        d.nonneg = {
            S("n_one", true, {{T0, one, one}}),
            S("n_ramp", true, {{T1, one, one}}),
            S("n_cos_lift", true, {{T0, one, one}, {T0, AxisFactor::cosw(a1, 0.0, 0.5), one}}),
            S("n_sin_sq", true,
              {{T0, one, one}, {T0, AxisFactor::cosw(a2, 0.0, -1.0), one}}),  // 1 - cos(2pix/L)
        };
        d.vector_flux = {
            V1("vf_s1", {{T0, AxisFactor::sinw(a1), one}}),
            V1("vf_s2_ramp", {{T1, AxisFactor::sinw(a2), one}}),
        };
        d.vector_bulk = {
            V1("vb_s1", {{T0, AxisFactor::sinw(a1), one}}),
            V1("vb_s1_ramp", {{T1, AxisFactor::sinw(a1), one}}),
            V1("vb_s2_bump", {{T2, AxisFactor::sinw(a2), one}}),
        };
        TensorTestFn t1;
        t1.id = "T_c1";
        t1.dim = 1;
        t1.comp[0] = {{T0, AxisFactor::cosw(a1), one}};
        TensorTestFn t2;
        t2.id = "T_poly_ramp";
        t2.dim = 1;
        t2.comp[0] = {{T1, AxisFactor::poly(1.0, -0.8 / Lx, 0.3 / (Lx * Lx)), one}};
        d.tensor = {t1, t2};
        return d;
    }

    // no-slip box
    const double ax = pi / Lx, ay = pi / Ly;
    d.scalar = {
        S("s_ramp", false, {{T1, one, one}}),
        S("s_poly", false,
          {{T0, AxisFactor::poly(0.0, 1.0 / Lx), AxisFactor::poly(1.0, 0.5 / Ly)}}),
        S("s_cx", false, {{T0, AxisFactor::cosw(ax), one}}),
        S("s_cxy_ramp", false, {{T1, AxisFactor::cosw(ax), AxisFactor::cosw(ay)}}),
        S("s_c2x_bump", false, {{T2, AxisFactor::cosw(2.0 * ax), AxisFactor::cosw(ay)}}),
    };
    d.nonneg = {
        S("n_one", true, {{T0, one, one}}),
        S("n_ramp", true, {{T1, one, one}}),
        S("n_cos_lift", true,
          {{T0, one, one}, {T0, AxisFactor::cosw(ax, 0.0, 0.5), AxisFactor::cosw(ay)}}),
    };
    d.vector_flux = {
        V2("vf_a", {{T0, AxisFactor::sinw(ax), AxisFactor::cosw(ay)}},
           {{T0, AxisFactor::cosw(ax), AxisFactor::sinw(ay)}}),
        V2("vf_b", {{T1, AxisFactor::sinw(2.0 * ax), one}},
           {{T1, one, AxisFactor::sinw(2.0 * ay)}}),
    };
    d.vector_bulk = {
        V2("vb_a", {{T0, AxisFactor::sinw(ax), AxisFactor::sinw(ay)}},
           {{T0, AxisFactor::sinw(ax), AxisFactor::sinw(ay, -0.5)}}),
        V2("vb_b", {{T1, AxisFactor::sinw(2.0 * ax), AxisFactor::sinw(ay)}},
           {{T1, AxisFactor::sinw(ax), AxisFactor::sinw(2.0 * ay, 0.7)}}),
        V2("vb_c", {{T2, AxisFactor::sinw(ax), AxisFactor::sinw(ay)}}, {}),
    };
    TensorTestFn t1;
    t1.id = "T_a";
    t1.dim = 2;
    t1.comp[0] = {{T0, AxisFactor::cosw(ax), one}};
    t1.comp[1] = {{T0, one, AxisFactor::cosw(ay, 0.0, 0.3)}};
    t1.comp[2] = t1.comp[1];
    t1.comp[3] = {{T0, AxisFactor::poly(1.0, -0.5 / Lx), one}};
    TensorTestFn t2;
    t2.id = "T_b_ramp";
    t2.dim = 2;
    t2.comp[0] = {{T1, AxisFactor::cosw(ax), AxisFactor::cosw(ay)}};
    t2.comp[1] = {{T1, AxisFactor::sinw(ax, 0.4), AxisFactor::sinw(ay)}};
    t2.comp[2] = t2.comp[1];
    t2.comp[3] = {{T1, one, AxisFactor::cosw(ay, 0.0, -0.6)}};
    d.tensor = {t1, t2};
    return d;
}

// ---------------------------------------------------------------------------
// Residual evaluators
// ---------------------------------------------------------------------------

double max_abs(const std::vector<ResidualEntry>& entries) {
    double m = 0.0;
    for (const auto& e : entries) m = std::max(m, std::abs(e.value));
    return m;
}

std::vector<ResidualEntry> compatibility_residual(const MeasureField& V,
                                                  const TestFunctionDictionary& dict) {
    const Grid& g = V.grid();
    const int nt = V.time_count();
    const double vol = g.cell_volume();
    std::vector<ResidualEntry> out;

    for (const auto& T : dict.tensor) {
        std::vector<double> integrand(static_cast<std::size_t>(nt), 0.0);
        for (int t = 0; t < nt; ++t) {
            const double tt = V.times()[static_cast<std::size_t>(t)];
            double s = 0.0;
            for (int c = 0; c < g.cell_count(); ++c) {
                Vec mu(g.dim());
                Mat mDu(g.dim());
                for (int k = 0; k < V.atom_count(); ++k) {
                    const PhasePoint& a = V.atom(t, c, k);
                    const double w = V.weight(t, c, k);
                    mu += w * a.u;
                    mDu += w * a.Du;
                }
                const Vec x = g.center(c);
                s += dot(mu, T.div(tt, x)) + ddot(mDu, T.value(tt, x));
            }
            integrand[static_cast<std::size_t>(t)] = s * vol;
        }
        out.push_back({T.id, V.times().back(),
                       field::integrate_time_upto(V.times(), integrand,
                                                  static_cast<std::size_t>(nt - 1))});
    }

    for (const auto& phi : dict.vector_flux) {
        std::vector<double> integrand(static_cast<std::size_t>(nt), 0.0);
        for (int t = 0; t < nt; ++t) {
            const double tt = V.times()[static_cast<std::size_t>(t)];
            double s = 0.0;
            for (int c = 0; c < g.cell_count(); ++c) {
                double mth = 0.0;
                Vec mDth(g.dim());
                for (int k = 0; k < V.atom_count(); ++k) {
                    const PhasePoint& a = V.atom(t, c, k);
                    const double w = V.weight(t, c, k);
                    mth += w * a.theta;
                    mDth += w * a.Dtheta;
                }
                const Vec x = g.center(c);
                s += mth * phi.div(tt, x) + dot(mDth, phi.value(tt, x));
            }
            integrand[static_cast<std::size_t>(t)] = s * vol;
        }
        out.push_back({phi.id, V.times().back(),
                       field::integrate_time_upto(V.times(), integrand,
                                                  static_cast<std::size_t>(nt - 1))});
    }
    return out;
}

std::vector<ResidualEntry> continuity_residual(const MeasureField& V,
                                               const TestFunctionDictionary& dict) {
    const Grid& g = V.grid();
    const int nt = V.time_count();
    const double vol = g.cell_volume();
    std::vector<ResidualEntry> out;

    for (const auto& phi : dict.scalar) {
        std::vector<double> bracket(static_cast<std::size_t>(nt), 0.0);
        std::vector<double> rate(static_cast<std::size_t>(nt), 0.0);
        for (int t = 0; t < nt; ++t) {
            const double tt = V.times()[static_cast<std::size_t>(t)];
            double b = 0.0, r = 0.0;
            for (int c = 0; c < g.cell_count(); ++c) {
                double mrho = 0.0;
                Vec mrhou(g.dim());
                for (int k = 0; k < V.atom_count(); ++k) {
                    const PhasePoint& a = V.atom(t, c, k);
                    const double w = V.weight(t, c, k);
                    mrho += w * a.rho;
                    mrhou += (w * a.rho) * a.u;
                }
                const Vec x = g.center(c);
                b += mrho * phi.value(tt, x);
                r += mrho * phi.dt(tt, x) + dot(mrhou, phi.grad(tt, x));
            }
            bracket[static_cast<std::size_t>(t)] = b * vol;
            rate[static_cast<std::size_t>(t)] = r * vol;
        }
        for (int j = 1; j < nt; ++j) {
            const double val =
                (bracket[static_cast<std::size_t>(j)] - bracket[0]) -
                field::integrate_time_upto(V.times(), rate, static_cast<std::size_t>(j));
            out.push_back({phi.id, V.times()[static_cast<std::size_t>(j)], val});
        }
    }
    return out;
}

std::vector<ResidualEntry> momentum_residual(const MeasureField& V, const DefectData& defect,
                                             const thermo::EquationOfState& eos,
                                             const thermo::TransportCoefficients& tc,
                                             const TestFunctionDictionary& dict,
                                             const solver::Forcing* forcing) {
    const Grid& g = V.grid();
    const int nt = V.time_count();
    const double vol = g.cell_volume();
    const double floor = 1e-10;
    std::vector<ResidualEntry> out;

    for (const auto& phi : dict.vector_bulk) {
        std::vector<double> bracket(static_cast<std::size_t>(nt), 0.0);
        std::vector<double> rate(static_cast<std::size_t>(nt), 0.0);
        for (int t = 0; t < nt; ++t) {
            const double tt = V.times()[static_cast<std::size_t>(t)];
            double b = 0.0, r = 0.0;
            for (int c = 0; c < g.cell_count(); ++c) {
                double mrho = 0.0, mp = 0.0;
                Vec mrhou(g.dim());
                Mat mrhouu(g.dim()), mS(g.dim());
                for (int k = 0; k < V.atom_count(); ++k) {
                    const PhasePoint& a = V.atom(t, c, k);
                    const double w = V.weight(t, c, k);
                    mrho += w * a.rho;
                    mrhou += (w * a.rho) * a.u;
                    mrhouu += (w * a.rho) * Mat::outer(a.u, a.u);
                    if (a.rho > 0.0 && a.theta > 0.0) mp += w * eos.p(a.rho, a.theta);
                    mS += w * thermo::newton_stress(tc, std::max(a.rho, floor),
                                                    std::max(a.theta, floor), a.Du);
                }
                const Vec x = g.center(c);
                b += dot(mrhou, phi.value(tt, x));
                const Mat gphi = phi.grad(tt, x);
                r += dot(mrhou, phi.dt(tt, x)) + ddot(mrhouu, gphi) + mp * gphi.trace() -
                     ddot(mS, gphi);
                if (forcing && forcing->f_u)
                    r += mrho * dot(forcing->f_u(tt, x), phi.value(tt, x));
            }
            bracket[static_cast<std::size_t>(t)] = b * vol;
            rate[static_cast<std::size_t>(t)] = r * vol;
        }
        for (int j = 1; j < nt; ++j) {
            double pairing = 0.0;
            for (const auto& atom : defect.nu_c) {
                if (atom.time_index > j) continue;
                const double ta = V.times()[static_cast<std::size_t>(atom.time_index)];
                pairing += ddot(phi.grad(ta, g.center(atom.cell)), atom.mass);
            }
            const double val =
                (bracket[static_cast<std::size_t>(j)] - bracket[0]) -
                field::integrate_time_upto(V.times(), rate, static_cast<std::size_t>(j)) -
                pairing;
            out.push_back({phi.id, V.times()[static_cast<std::size_t>(j)], val});
        }
    }
    return out;
}

EnergyCheck energy_check(const MeasureField& V, const thermo::EquationOfState& eos,
                         const solver::Forcing* forcing, double tol) {
    const Grid& g = V.grid();
    const int nt = V.time_count();
    const double vol = g.cell_volume();

    std::vector<double> energy(static_cast<std::size_t>(nt), 0.0);
    std::vector<double> work_rate(static_cast<std::size_t>(nt), 0.0);
    for (int t = 0; t < nt; ++t) {
        const double tt = V.times()[static_cast<std::size_t>(t)];
        double e = 0.0, w = 0.0;
        for (int c = 0; c < g.cell_count(); ++c) {
            double mrho = 0.0;
            Vec mrhou(g.dim());
            for (int k = 0; k < V.atom_count(); ++k) {
                const PhasePoint& a = V.atom(t, c, k);
                const double wk = V.weight(t, c, k);
                e += wk * rho_energy(eos, a);
                mrho += wk * a.rho;
                mrhou += (wk * a.rho) * a.u;
            }
            if (forcing) {
                const Vec x = g.center(c);
                if (forcing->f_u) w += dot(mrhou, forcing->f_u(tt, x));
                if (forcing->f_e) w += mrho * forcing->f_e(tt, x);
            }
        }
        energy[static_cast<std::size_t>(t)] = e * vol;
        work_rate[static_cast<std::size_t>(t)] = w * vol;
    }

    EnergyCheck out;
    out.min_D = 0.0;
    out.D.append(0.0, 0.0);
    for (int j = 1; j < nt; ++j) {
        const double W =
            field::integrate_time_upto(V.times(), work_rate, static_cast<std::size_t>(j));
        const double D = energy[0] - energy[static_cast<std::size_t>(j)] + W;
        out.D.append(V.times()[static_cast<std::size_t>(j)], D);
        out.min_D = std::min(out.min_D, D);
    }
    out.pass = out.min_D >= -tol;
    return out;
}

std::vector<ResidualEntry> entropy_inequality_residual(const MeasureField& V,
                                                       const thermo::EquationOfState& eos,
                                                       const thermo::TransportCoefficients& tc,
                                                       const TestFunctionDictionary& dict,
                                                       const solver::Forcing* forcing,
                                                       double theta_floor) {
    const Grid& g = V.grid();
    const int nt = V.time_count();
    const double vol = g.cell_volume();
    std::vector<ResidualEntry> out;

    for (const auto& phi : dict.nonneg) {
        std::vector<double> bracket(static_cast<std::size_t>(nt), 0.0);
        std::vector<double> rate(static_cast<std::size_t>(nt), 0.0);
        std::vector<double> diss(static_cast<std::size_t>(nt), 0.0);
        for (int t = 0; t < nt; ++t) {
            const double tt = V.times()[static_cast<std::size_t>(t)];
            double b = 0.0, r = 0.0, dd = 0.0;
            for (int c = 0; c < g.cell_count(); ++c) {
                double mrs = 0.0, mdiss = 0.0, mfe = 0.0;
                Vec mflux(g.dim());
                for (int k = 0; k < V.atom_count(); ++k) {
                    const PhasePoint& a = V.atom(t, c, k);
                    const double w = V.weight(t, c, k);
                    const double rs = rho_entropy(eos, a, theta_floor);
                    const double th = std::max(a.theta, theta_floor);
                    mrs += w * rs;
                    mflux += w * (rs * a.u -
                                  (tc.kappa(std::max(a.rho, theta_floor), th) / th) * a.Dtheta);
                    mdiss += w * dissipation_density(tc, a, theta_floor);
                    if (forcing && forcing->f_e) mfe += w * a.rho / th;
                }
                const Vec x = g.center(c);
                b += mrs * phi.value(tt, x);
                r += mrs * phi.dt(tt, x) + dot(mflux, phi.grad(tt, x));
                dd += mdiss * phi.value(tt, x);
                if (forcing && forcing->f_e) dd += mfe * forcing->f_e(tt, x) * phi.value(tt, x);
            }
            bracket[static_cast<std::size_t>(t)] = b * vol;
            rate[static_cast<std::size_t>(t)] = r * vol;
            diss[static_cast<std::size_t>(t)] = dd * vol;
        }
        for (int j = 1; j < nt; ++j) {
            const double val =
                (bracket[static_cast<std::size_t>(j)] - bracket[0]) -
                field::integrate_time_upto(V.times(), rate, static_cast<std::size_t>(j)) -
                field::integrate_time_upto(V.times(), diss, static_cast<std::size_t>(j));
            out.push_back({phi.id, V.times()[static_cast<std::size_t>(j)], val});
        }
    }
    return out;
}

ConcentrationBound concentration_bound_check(const DefectData& defect, double tol_defect) {
    ConcentrationBound out;
    std::vector<std::pair<int, double>> tv;  // total variation per stored time
    for (const auto& a : defect.nu_c) {
        bool found = false;
        for (auto& [t, v] : tv)
            if (t == a.time_index) {
                v += std::sqrt(a.mass.norm2());
                found = true;
            }
        if (!found) tv.push_back({a.time_index, std::sqrt(a.mass.norm2())});
    }
    out.pass = true;
    out.C = 0.0;
    for (const auto& [t, v] : tv) {
        if (v <= 0.0) continue;
        double D = 0.0;
        if (t >= 0 && static_cast<std::size_t>(t) < defect.D_series.values.size())
            D = defect.D_series.values[static_cast<std::size_t>(t)];
        if (D <= tol_defect) {
            out.pass = false;
            std::ostringstream os;
            os << "concentration mass " << v << " at time index " << t
               << " where the energy defect vanishes (D = " << D << ")";
            out.witness = os.str();
            return out;
        }
        out.C = std::max(out.C, v / D);
    }
    return out;
}

KornMeasureResult korn_poincare_measure_check(const MeasureField& V,
                                              const solver::ManufacturedSolution& reference) {
    const Grid& g = V.grid();
    const int nt = V.time_count();
    const double vol = g.cell_volume();

    std::vector<double> lhs(static_cast<std::size_t>(nt), 0.0),
        rhs(static_cast<std::size_t>(nt), 0.0), lhsa(static_cast<std::size_t>(nt), 0.0),
        rhsa(static_cast<std::size_t>(nt), 0.0), meank(static_cast<std::size_t>(nt), 0.0);
    double chain_err = 0.0;

    for (int t = 0; t < nt; ++t) {
        const double tt = V.times()[static_cast<std::size_t>(t)];
        double l = 0.0, r = 0.0, la = 0.0, ra = 0.0, mk = 0.0;
        for (int c = 0; c < g.cell_count(); ++c) {
            const Vec x = g.center(c);
            const Vec uref = reference.velocity(tt, x);
            const Mat Tref = traceless_part(reference.grad_u(tt, x));

            Vec ubar(g.dim());
            Mat Tbar(g.dim());
            for (int k = 0; k < V.atom_count(); ++k) {
                const double w = V.weight(t, c, k);
                ubar += w * V.atom(t, c, k).u;
                Tbar += w * traceless_part(V.atom(t, c, k).Du);
            }
            double e12 = 0.0, e12r = 0.0, ea = 0.0, ear = 0.0;
            for (int k = 0; k < V.atom_count(); ++k) {
                const double w = V.weight(t, c, k);
                const PhasePoint& a = V.atom(t, c, k);
                const Mat TDu = traceless_part(a.Du);
                e12 += w * (a.u - uref).norm2();
                e12r += w * (TDu - Tref).norm2();
                ea += w * (a.u - ubar).norm2();
                ear += w * (TDu - Tbar).norm2();
            }
            l += e12;
            r += e12r;
            la += ea;
            ra += ear;
            mk += (ubar - uref).norm2();
            chain_err = std::max(chain_err, std::abs(e12r - (ear + (Tbar - Tref).norm2())));
        }
        lhs[static_cast<std::size_t>(t)] = l * vol;
        rhs[static_cast<std::size_t>(t)] = r * vol;
        lhsa[static_cast<std::size_t>(t)] = la * vol;
        rhsa[static_cast<std::size_t>(t)] = ra * vol;
        meank[static_cast<std::size_t>(t)] = mk * vol;
    }

    const std::size_t last = static_cast<std::size_t>(nt - 1);
    KornMeasureResult out;
    out.lhs_g12 = field::integrate_time_upto(V.times(), lhs, last);
    out.rhs_g12 = field::integrate_time_upto(V.times(), rhs, last);
    out.lhs_g12a = field::integrate_time_upto(V.times(), lhsa, last);
    out.rhs_g12a = field::integrate_time_upto(V.times(), rhsa, last);
    out.mean_korn_term = field::integrate_time_upto(V.times(), meank, last);
    out.ratio_g12 = out.rhs_g12 > 0.0 ? out.lhs_g12 / out.rhs_g12 : 0.0;
    out.ratio_g12a = out.rhs_g12a > 0.0 ? out.lhs_g12a / out.rhs_g12a : 0.0;
    out.chain_identity_error = chain_err;
    return out;
}

UniformBoundReport uniform_bound_report(const std::vector<solver::Trajectory>& runs,
                                        const thermo::EquationOfState& eos,
                                        const thermo::TransportCoefficients& tc,
                                        double theta_floor) {
    UniformBoundReport out;
    for (const auto& traj : runs) {
        const Grid& g = traj.states.values.front().grid();
        const double vol = g.cell_volume();
        const int nt = static_cast<int>(traj.states.size());
        std::vector<double> visc(static_cast<std::size_t>(nt), 0.0),
            heat(static_cast<std::size_t>(nt), 0.0);
        double sup_state = 0.0;
        for (int t = 0; t < nt; ++t) {
            const solver::State& s = traj.states.values[static_cast<std::size_t>(t)];
            field::TensorField gu = field::gradient_vector(s.u, Extension::odd);
            field::VectorField gth = field::gradient(s.theta, Extension::even);
            double st = 0.0, vi = 0.0, he = 0.0;
            for (int c = 0; c < g.cell_count(); ++c) {
                const double rho = s.rho[c];
                const double th = std::max(s.theta[c], theta_floor);
                st += rho + rho * s.u.at(c).norm2() + rho * eos.e(rho, th) +
                      rho * std::abs(eos.s(rho, th));
                const Mat T = traceless_part(gu.at(c));
                vi += tc.mu(rho, th) / (2.0 * th) * T.norm2() +
                      tc.lambda(rho, th) / th * gu.at(c).trace() * gu.at(c).trace();
                he += tc.kappa(rho, th) * gth.at(c).norm2() / (th * th);
            }
            sup_state = std::max(sup_state, st * vol);
            visc[static_cast<std::size_t>(t)] = vi * vol;
            heat[static_cast<std::size_t>(t)] = he * vol;
        }
        out.sup_state_integral = std::max(out.sup_state_integral, sup_state);
        out.visc_dissipation = std::max(
            out.visc_dissipation, field::integrate_time_upto(traj.states.times, visc,
                                                             static_cast<std::size_t>(nt - 1)));
        out.heat_dissipation = std::max(
            out.heat_dissipation, field::integrate_time_upto(traj.states.times, heat,
                                                             static_cast<std::size_t>(nt - 1)));
    }
    return out;
}

}  // namespace nsf::dmv
