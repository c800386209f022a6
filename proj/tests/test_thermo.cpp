#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "nsf/thermo.hpp"

using namespace nsf;
using namespace nsf::thermo;

namespace {

// Ideal monoatomic structure function and a degenerate-tail variant
// P(q) = q (1+q)^{2/3}, which approaches p_bar q^{5/3} at large q.
double P_ideal(double q) { return q; }
double dP_ideal(double) { return 1.0; }
double P_deg(double q) { return q * std::pow(1.0 + q, 2.0 / 3.0); }
double dP_deg(double q) {
    return std::pow(1.0 + q, 2.0 / 3.0) + (2.0 / 3.0) * q * std::pow(1.0 + q, -1.0 / 3.0);
}

}  // namespace

TEST_CASE("perfect gas closed forms") {
    auto eos = EquationOfState::perfect_gas(1.5);
    CHECK(eos.p(2, 3) == doctest::Approx(6.0));
    CHECK(eos.e(2, 3) == doctest::Approx(4.5));
    CHECK(eos.s(1, 1) == doctest::Approx(0.0));
    CHECK(eos.s(2, 1) == doctest::Approx(-std::log(2.0)));
    CHECK(eos.ds_drho(2, 1) == doctest::Approx(-0.5));
    CHECK_THROWS_AS(EquationOfState::perfect_gas(1.0), std::invalid_argument);
    CHECK_THROWS_AS(eos.p(-1.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(eos.e(1.0, 0.0), std::domain_error);
}

TEST_CASE("gibbs residual") {
    auto pg = EquationOfState::perfect_gas(1.5);
    auto g = gibbs_residual(pg, 2, 3);
    CHECK(std::abs(g.r_rho) < 1e-14);
    CHECK(std::abs(g.r_theta) < 1e-14);

    // Monoatomic ideal instance, derivatives evaluated by finite differences:
    // the cancellation must survive the FD route, not just the closed forms.
    auto mono = EquationOfState::monoatomic(P_ideal, dP_ideal);
    auto fd = EquationOfState::custom({[&](double r, double t) { return mono.p(r, t); },
                                       [&](double r, double t) { return mono.e(r, t); },
                                       [&](double r, double t) { return mono.s(r, t); },
                                       {}, {}, {}, {}, {}, {},
                                       "mono_fd"});
    auto gfd = gibbs_residual(fd, 1, 1);
    CHECK(std::abs(gfd.r_rho) < 1e-8);
    CHECK(std::abs(gfd.r_theta) < 1e-8);

    // Deliberately broken EOS: s doubled leaves r_theta = c_v.
    auto broken = EquationOfState::custom({[](double r, double t) { return r * t; },
                                           [](double, double t) { return 1.5 * t; },
                                           [](double r, double t) {
                                               return 2.0 * (1.5 * std::log(t) - std::log(r));
                                           },
                                           {}, {}, {}, {}, {}, {},
                                           "broken"});
    auto gb = gibbs_residual(broken, 1, 1);
    CHECK(gb.r_theta == doctest::Approx(1.5).epsilon(1e-4));
}

TEST_CASE("stability check") {
    auto pg = EquationOfState::perfect_gas(1.5);
    auto st = stability_check(pg, 2, 3);
    CHECK(st.dp_drho == doctest::Approx(3.0));
    CHECK(st.de_dtheta == doctest::Approx(1.5));
    CHECK(st.stable);

    auto deg = EquationOfState::monoatomic(P_deg, dP_deg);
    CHECK(stability_check(deg, 50.0, 1.0).stable);  // large q: degenerate tail

    auto bad = EquationOfState::custom({[](double r, double t) { return -r * t; },
                                        [](double, double t) { return 1.5 * t; },
                                        [](double r, double t) {
                                            return 1.5 * std::log(t) - std::log(r);
                                        },
                                        {}, {}, {}, {}, {}, {},
                                        "anti"});
    CHECK_FALSE(stability_check(bad, 1, 1).stable);
}

TEST_CASE("monoatomic structure") {
    auto mono = EquationOfState::monoatomic(P_ideal, dP_ideal);
    CHECK(mono.p(2, 3) == doctest::Approx(6.0));
    CHECK(mono.e(2, 3) == doctest::Approx(4.5));

    // p_M = (2/3) rho e_M for any admissible P.
    auto deg = EquationOfState::monoatomic(P_deg, dP_deg);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i < 50; ++i) {
        const double r = std::pow(10.0, u(rng)), t = std::pow(10.0, u(rng));
        CHECK(deg.p(r, t) == doctest::Approx((2.0 / 3.0) * r * deg.e(r, t)).epsilon(1e-12));
        CHECK(mono.p(r, t) == doctest::Approx(r * t).epsilon(1e-12));
    }

    // S'(q) = -1/q for the ideal instance: S(q0) - S(q1) = log(q1/q0).
    const double s1 = mono.s(1.0, 1.0);        // q = 1
    const double s2 = mono.s(std::exp(1.0), 1.0);  // q = e
    CHECK(s1 - s2 == doctest::Approx(1.0).epsilon(1e-7));

    // Strictly decreasing in q, and -> 0 at the top of the quadrature grid.
    double prev = mono.s(1e-3, 1.0);
    for (double q = 1e-2; q <= 1e6; q *= 10.0) {
        const double cur = mono.s(q, 1.0);
        CHECK(cur < prev);
        prev = cur;
    }

    // Third-law normalisation for the integrable tail, frozen against
    // 30-digit quadrature of  S(q) = int_q^inf dr / (r (1+r)^{1/3}).
    CHECK(deg.s(1.0, 1.0) == doctest::Approx(2.81312097171).epsilon(2e-6));
    CHECK(deg.s(100.0, 1.0) == doctest::Approx(0.645793839069).epsilon(2e-6));
    CHECK(deg.s(1e8, 1.0) == doctest::Approx(0.00646330405366).epsilon(1e-4));
    CHECK(deg.s(1e-3, 1.0) == doctest::Approx(9.46290661637).epsilon(2e-6));

    CHECK_THROWS_AS(EquationOfState::monoatomic([](double q) { return q + 1.0; },
                                                [](double) { return 1.0; }),
                    StructuralError);
    CHECK_THROWS_AS(EquationOfState::monoatomic([](double q) { return q * q; },
                                                [](double q) { return 2.0 * q; }),
                    StructuralError);  // (5/3)P - P'q = -q^2/3 < 0
}

TEST_CASE("radiative components") {
    auto pg = EquationOfState::perfect_gas(1.5);
    auto rad2 = EquationOfState::radiative(pg, 1.0, 2);
    CHECK(rad2.p(1, 2) - pg.p(1, 2) == doctest::Approx(4.0));
    CHECK(rad2.e(1, 2) - pg.e(1, 2) == doctest::Approx(4.0));
    CHECK(rad2.s(1, 2) - pg.s(1, 2) == doctest::Approx(4.0));

    auto g = gibbs_residual(rad2, 1, 1);
    CHECK(std::abs(g.r_rho) < 1e-10);
    CHECK(std::abs(g.r_theta) < 1e-10);

    auto rad4 = EquationOfState::radiative(pg, 0.3, 4);
    auto g4 = gibbs_residual(rad4, 0.7, 1.3);
    CHECK(std::abs(g4.r_rho) < 1e-10);
    CHECK(std::abs(g4.r_theta) < 1e-10);

    auto rad0 = EquationOfState::radiative(pg, 0.0, 2);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.1, 10.0);
    for (int i = 0; i < 5; ++i) {
        const double r = u(rng), t = u(rng);
        CHECK(rad0.p(r, t) == doctest::Approx(pg.p(r, t)));
        CHECK(rad0.e(r, t) == doctest::Approx(pg.e(r, t)));
        CHECK(rad0.s(r, t) == doctest::Approx(pg.s(r, t)));
    }
    CHECK_THROWS_AS(EquationOfState::radiative(pg, 1.0, 3), std::invalid_argument);
}

TEST_CASE("ballistic free energy") {
    auto pg = EquationOfState::perfect_gas(1.5);
    CHECK(ballistic_free_energy(pg, 1, 1, 1) == doctest::Approx(1.5));
    CHECK(ballistic_free_energy(pg, 2, 1, 1) == doctest::Approx(3.0 + 2.0 * std::log(2.0)));
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.2, 5.0);
    for (int i = 0; i < 10; ++i) {
        const double r = u(rng), t = u(rng);
        CHECK(ballistic_free_energy(pg, r, t, t) ==
              doctest::Approx(r * (pg.e(r, t) - t * pg.s(r, t))));
    }
    CHECK_THROWS_AS(ballistic_free_energy(pg, 1, 1, 0.0), std::domain_error);
}

TEST_CASE("newton stress and fourier flux") {
    auto tc = TransportCoefficients::constant(1.0, 1.0, 2.0);
    CHECK(newton_stress(tc, 1, 1, Mat::zero(2)).norm2() == doctest::Approx(0.0));

    auto tc_mu = TransportCoefficients::constant(1.0, 1e-300, 1.0);
    Mat s_id = newton_stress(tc_mu, 1, 1, Mat::identity(2));
    CHECK(s_id.norm2() < 1e-250);  // traceless part of I vanishes in 2D

    Mat s = newton_stress(tc, 1, 1, Mat::diag(1.0, 0.0));
    CHECK(s(0, 0) == doctest::Approx(2.0));
    CHECK(s(1, 1) == doctest::Approx(0.0));
    CHECK(s(0, 1) == doctest::Approx(0.0));

    CHECK(fourier_flux(tc, 1, 1, Vec::of(0.0, 0.0)).norm() == doctest::Approx(0.0));
    Vec q = fourier_flux(tc, 1, 1, Vec::of(1.0, -1.0));
    CHECK(q[0] == doctest::Approx(-2.0));
    CHECK(q[1] == doctest::Approx(2.0));

    auto tc_theta = TransportCoefficients::custom(
        [](double, double) { return 1.0; }, [](double, double) { return 0.0; },
        [](double, double t) { return t; });
    Vec q3 = fourier_flux(tc_theta, 1, 3, Vec::of(1.0, 0.0));
    CHECK(q3[0] == doctest::Approx(-3.0));

    // symmetric, and traceless whenever lambda = 0
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    auto tc0 = TransportCoefficients::affine_theta(0.7, 0.3, 1.0);
    for (int i = 0; i < 100; ++i) {
        Mat g = Mat::of2(u(rng), u(rng), u(rng), u(rng));
        Mat st = newton_stress(tc0, 1.0, 2.0, g);
        CHECK(st(0, 1) == doctest::Approx(st(1, 0)));
        CHECK(std::abs(st.trace()) < 1e-12);
    }
}

TEST_CASE("entropy production density") {
    auto pg = EquationOfState::perfect_gas(1.5);
    auto tc = TransportCoefficients::constant(1.0, 1e-12, 1.0);
    CHECK(entropy_production_density(tc, pg, 1, 1, Mat::zero(2), Vec::zero(2)) ==
          doctest::Approx(0.0));

    Mat du = Mat::diag(1.0, -1.0);
    auto tc1 = TransportCoefficients::affine_theta(1.0, 0.0, 1.0);
    CHECK(entropy_production_density(tc1, pg, 1, 1, du, Vec::zero(2)) == doctest::Approx(4.0));

    const double inf = entropy_production_density(tc1, pg, 1, 0.0, Mat::zero(2), Vec::of(1.0, 0.0));
    CHECK(std::isinf(inf));
    CHECK(entropy_production_density(tc1, pg, 1, 0.0, Mat::zero(2), Vec::zero(2)) ==
          doctest::Approx(0.0));
    CHECK_THROWS_AS(entropy_production_density(tc1, pg, -1, 1, du, Vec::zero(2)),
                    std::domain_error);

    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::uniform_real_distribution<double> pos(0.01, 10.0);
    for (int i = 0; i < 200; ++i) {
        Mat g = sym(Mat::of2(u(rng), u(rng), u(rng), u(rng)));
        Vec dth = Vec::of(u(rng), u(rng));
        CHECK(entropy_production_density(tc, pg, pos(rng), pos(rng), g, dth) >= 0.0);
    }
}

TEST_CASE("consistency sweep over built-in EOS family") {
    const double lo = 1e-3, hi = 1e3;
    auto check = [&](const EquationOfState& eos) {
        auto rep = verify_consistency(eos, lo, hi, 1000, 12345u);
        CAPTURE(eos.name());
        CAPTURE(rep.max_gibbs);
        CAPTURE(rep.worst_rho);
        CAPTURE(rep.worst_theta);
        CHECK(rep.pass);
    };
    check(EquationOfState::perfect_gas(1.5));
    check(EquationOfState::perfect_gas(2.5));
    check(EquationOfState::monoatomic(P_ideal, dP_ideal));
    check(EquationOfState::monoatomic(P_deg, dP_deg));
    check(EquationOfState::radiative(EquationOfState::perfect_gas(1.5), 1.0, 2));
    check(EquationOfState::radiative(EquationOfState::perfect_gas(1.5), 1.0, 4));
    check(EquationOfState::radiative(EquationOfState::monoatomic(P_ideal, dP_ideal), 0.5, 2));
}
