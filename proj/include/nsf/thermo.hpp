#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "nsf/tensor.hpp"

// Equations of state, transport coefficients and pointwise thermodynamic
// functionals.  An EquationOfState is an immutable bundle of p, e, s and
// their partial derivatives on {rho > 0, theta > 0}; consistency of the
// bundle is checked by gibbs_residual / stability_check rather than assumed.

namespace nsf::thermo {

enum class EosKind { perfect_gas, monoatomic, monoatomic_plus_radiation, custom };

class StructuralError : public std::runtime_error {
public:
    explicit StructuralError(const std::string& what) : std::runtime_error(what) {}
};

/// Scalar function of (rho, theta).
using StateFn = std::function<double(double, double)>;

class EquationOfState {
public:
    double p(double rho, double theta) const { return eval(p_, rho, theta); }
    double e(double rho, double theta) const { return eval(e_, rho, theta); }
    double s(double rho, double theta) const { return eval(s_, rho, theta); }

    double dp_drho(double rho, double theta) const { return eval(dp_drho_, rho, theta); }
    double dp_dtheta(double rho, double theta) const { return eval(dp_dtheta_, rho, theta); }
    double de_drho(double rho, double theta) const { return eval(de_drho_, rho, theta); }
    double de_dtheta(double rho, double theta) const { return eval(de_dtheta_, rho, theta); }
    double ds_drho(double rho, double theta) const { return eval(ds_drho_, rho, theta); }
    double ds_dtheta(double rho, double theta) const { return eval(ds_dtheta_, rho, theta); }

    EosKind kind() const { return kind_; }
    const std::string& name() const { return name_; }

    /// p = rho theta, e = c_v theta, s = log(theta^{c_v} / rho); requires c_v > 1.
    static EquationOfState perfect_gas(double c_v);

    /// Monoatomic gas built from the scalar structure function P on [0, inf):
    ///   p = theta^{5/2} P(q),  e = (3/2) (theta^{5/2} / rho) P(q),  s = S(q),
    /// with q = rho theta^{-3/2} and S obtained by integrating
    ///   S'(q) = -(3/2) [ (5/3) P(q) - P'(q) q ] / q^2
    /// normalised so that S vanishes at the upper end of the quadrature grid
    /// (third-law normalisation whenever the tail integral converges).
    /// Throws StructuralError if P(0) != 0, P' <= 0, or (5/3)P - P'q <= 0
    /// anywhere on the validation grid.
    static EquationOfState monoatomic(std::function<double(double)> P,
                                      std::function<double(double)> dP);

    /// Adds a radiation component on top of an existing EOS.
    /// exponent 2:   p_R = a theta^2,     e_R = a theta^2 / rho,  s_R = 2 a theta / rho
    /// exponent 4:   p_R = (a/3) theta^4, e_R = a theta^4 / rho,  s_R = (4/3) a theta^3 / rho
    static EquationOfState radiative(const EquationOfState& base, double a, int exponent);

    struct CustomSpec {
        StateFn p, e, s;
        // Optional closed-form partials; missing entries fall back to central
        // finite differences with step 1e-6 * max(1, |x|).
        StateFn dp_drho, dp_dtheta, de_drho, de_dtheta, ds_drho, ds_dtheta;
        std::string name = "custom";
    };
    static EquationOfState custom(CustomSpec spec);

private:
    EquationOfState() = default;
    static double eval(const StateFn& f, double rho, double theta);
    void fill_missing_derivatives();

    EosKind kind_ = EosKind::custom;
    std::string name_;
    StateFn p_, e_, s_;
    StateFn dp_drho_, dp_dtheta_, de_drho_, de_dtheta_, ds_drho_, ds_dtheta_;
};

enum class TransportKind { constant, affine_theta, custom };

class TransportCoefficients {
public:
    double mu(double rho, double theta) const { return mu_(rho, theta); }
    double lambda(double rho, double theta) const { return lambda_(rho, theta); }
    double kappa(double rho, double theta) const { return kappa_(rho, theta); }
    TransportKind kind() const { return kind_; }

    double mu0() const { return mu0_; }
    double mu1() const { return mu1_; }

    static TransportCoefficients constant(double mu0, double lambda0, double kappa0);
    /// mu(theta) = mu0 + mu1 theta with mu0 > 0, mu1 >= 0; lambda = 0; kappa constant.
    static TransportCoefficients affine_theta(double mu0, double mu1, double kappa0);
    static TransportCoefficients custom(StateFn mu, StateFn lambda, StateFn kappa);

private:
    TransportCoefficients() = default;
    TransportKind kind_ = TransportKind::custom;
    double mu0_ = 0.0, mu1_ = 0.0;
    StateFn mu_, lambda_, kappa_;
};

struct GibbsResidual {
    double r_rho;    // theta ds/drho - (de/drho - p / rho^2)
    double r_theta;  // theta ds/dtheta - de/dtheta
};

/// Raw Gibbs-relation residual at one state point.  Both components vanish
/// for a consistent EOS.
GibbsResidual gibbs_residual(const EquationOfState& eos, double rho, double theta);

/// Residual scaled by the magnitude of the participating terms, for
/// tolerance checks across many orders of magnitude of (rho, theta).
GibbsResidual gibbs_residual_normalized(const EquationOfState& eos, double rho, double theta);

struct StabilityResult {
    double dp_drho;
    double de_dtheta;
    bool stable;  // both partials strictly positive
};

StabilityResult stability_check(const EquationOfState& eos, double rho, double theta);

/// H_ref = rho [ e(rho, theta) - theta_ref s(rho, theta) ].
double ballistic_free_energy(const EquationOfState& eos, double rho, double theta,
                             double theta_ref);

/// S = mu (G + G^t - (2/N) tr(G) I) + lambda tr(G) I for a velocity gradient G.
Mat newton_stress(const TransportCoefficients& tc, double rho, double theta, const Mat& grad_u);

/// q = -kappa grad(theta).
Vec fourier_flux(const TransportCoefficients& tc, double rho, double theta,
                 const Vec& grad_theta);

/// (1/theta) ( S(rho,theta,D_u) : D_u + kappa |D_theta|^2 / theta ), with the
/// 1/theta factors clamped below by theta_floor; at theta == 0 returns +inf
/// when the numerator is positive and 0 otherwise.
double entropy_production_density(const TransportCoefficients& tc, const EquationOfState&,
                                  double rho, double theta, const Mat& D_u, const Vec& D_theta,
                                  double theta_floor = 1e-10);

struct ConsistencyReport {
    double max_gibbs = 0.0;       // max normalized residual over the samples
    double min_dp_drho = 0.0;
    double min_de_dtheta = 0.0;
    bool pass = false;
    double worst_rho = 0.0, worst_theta = 0.0;
};

/// Gibbs + stability sweep over n log-uniform samples of (rho, theta) in
/// [lo, hi]^2.  Deterministic for a fixed seed.
ConsistencyReport verify_consistency(const EquationOfState& eos, double lo, double hi, int n,
                                     unsigned seed, double tol = 1e-8);

}  // namespace nsf::thermo
