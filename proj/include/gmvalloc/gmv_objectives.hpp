#pragma once

#include <Eigen/Dense>

#include "gmvalloc/market_model.hpp"
#include "gmvalloc/moments.hpp"

namespace gmv {

// Pointwise utility.  Kind selection is explicit; `a` is absolute risk
// aversion (Cara), `gamma` relative risk aversion (Crra, gamma != 1).
struct UtilitySpec {
    enum class Kind { Linear, Log, Cara, Crra };
    Kind kind = Kind::Cara;
    double a = 1.0;
    double gamma = 2.0;

    static UtilitySpec linear() { return {Kind::Linear, 0.0, 0.0}; }
    static UtilitySpec log_wealth() { return {Kind::Log, 0.0, 1.0}; }
    static UtilitySpec cara(double a) { return {Kind::Cara, a, 0.0}; }
    static UtilitySpec crra(double gamma) { return {Kind::Crra, 0.0, gamma}; }

    double operator()(double x) const;
};

struct GmvParams {
    double lambda = 1.0;  // variance penalty; 0 recovers plain expected utility
};

// Generalized mean-variance score E[U] - (lambda/2) Var[U].
double gmv_score(const MomentPair& m, double lambda);

// Univariate return view: r ~ base(mu0, sigma2) with optional uncertainty
// layers.  sigma0_2 > 0 means the mean itself is Gaussian-uncertain; a finite
// alpha means the variance is Gamma-distributed with mean sigma2 and
// dispersion falling as alpha grows.
struct UnivariateView {
    double mu0 = 0.0;
    double sigma2 = 0.0;
    double sigma0_2 = 0.0;
    double alpha = kInf;
};

// Closed-form (E[U_a], Var[U_a]) of the position payoff x = w * r under the
// view.  a = 0 degrades to linear utility.  The Gamma-variance branch needs
// alpha > 4 a^2 w^2 sigma2 for the second moment to exist; outside that it
// throws LogDomainError carrying the offending factor.
MomentPair cara_moments_uni(const UnivariateView& view, double a, double w);

// Multivariate CARA objective in certainty-equivalent form, including the
// cash leg (1 - sum w) r0.   Monotone transform of E[U_a], so maximizing it
// maximizes expected utility.  Family dispatch:
//   Gaussian:        (1-sum w) r0 + mu0.w - (a/2) w'(sigma+sigma0)w
//   GaussianWishart: ... - (a/2) w'sigma0 w + (alpha/2a) ln(1 - (a^2/alpha) w'sigma w)
//   Ald:             ... - (a/2) w'sigma0 w + (1/a) ln(1 - (a^2/2) w'sigma w + a mu_a.w)
// Throws LogDomainError when a log argument is <= 0.
double cara_objective_multi(const ReturnModel& model, double a,
                            const Eigen::VectorXd& w);

// Analytic gradient and Hessian of cara_objective_multi.
Eigen::VectorXd cara_gradient_multi(const ReturnModel& model, double a,
                                    const Eigen::VectorXd& w);
Eigen::MatrixXd cara_hessian_multi(const ReturnModel& model, double a,
                                   const Eigen::VectorXd& w);

// (E[U_a], Var[U_a]) of the full portfolio outcome (cash leg included),
// recovered from the moment generating function evaluated at a and 2a.
// Var is reported for diagnostics only; the multivariate solvers maximize
// expected utility and never optimize this variance (it is not concave in w).
MomentPair cara_moments_multi(const ReturnModel& model, double a,
                              const Eigen::VectorXd& w);

// Log utility of a lognormal outcome: E = mu_ln, Var = sigma_ln2 + sigma0_ln2.
// Both moments are invariant under Gamma mixing of the variance.
MomentPair log_utility_moments(double mu_ln, double sigma_ln2,
                               double sigma0_ln2 = 0.0);

// CRRA moments of a lognormal outcome with optionally uncertain log-mean.
// E[U] is closed form; with sigma0_ln2 > 0 the variance is evaluated by
// Gauss-Hermite quadrature over the uncertain mean (the closed conditional
// moments are exact, so the quadrature converges fast).  gamma = 1 delegates
// to log_utility_moments.
MomentPair crra_moments(double mu_ln, double sigma_ln2, double gamma,
                        double sigma0_ln2 = 0.0);

// Second-order delta approximation of the GMV score of U(x), x ~ (mu, Sigma):
//   [U(mu) + tr(H Sigma)/2] - (lambda/2) [g'Sigma g + tr((H Sigma)^2)/2]
// Exact for quadratic U under Gaussian x.
double taylor_gmv(double value_at_mean, const Eigen::VectorXd& gradient,
                  const Eigen::MatrixXd& hessian, const Eigen::MatrixXd& sigma,
                  double lambda);

// A finite gamble used to elicit risk aversion from a certainty equivalent.
struct Gamble {
    Eigen::VectorXd outcomes;
    Eigen::VectorXd probs;
    double ce = 0.0;        // stated certainty equivalent
    double sigma0_2 = 0.0;  // extra variance from mean uncertainty, if any
};

struct CalibrationFamily {
    enum class Kind { Gaussian, Ald, GammaVariance };
    Kind kind = Kind::Gaussian;
    double mu_a = 0.0;   // Ald asymmetry (location-form; 0 = symmetric)
    double alpha = kInf; // GammaVariance dof
};

struct CalibrationResult {
    double a = 0.0;
    double mu_c = 0.0;
    double sigma_c2 = 0.0;
    double residual = 0.0;  // CE equation residual at the returned a
    int iterations = 0;
};

// Solve U_a(ce) = E[U_a(gamble)] for a.  Gaussian is closed form
// a = 2 (mu_c - ce)/(sigma_c2 + sigma0_2); the other families root-solve
// their CE equation with safeguarded Newton (residual 1e-10, <= 200
// iterations, bisection fallback).  Throws std::invalid_argument for
// risk-seeking gambles (ce not below the effective mean) and SolverError on
// non-convergence.
CalibrationResult calibrate_risk_aversion(const Gamble& gamble,
                                          const CalibrationFamily& family);

}  // namespace gmv
