#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "gmvalloc/market_model.hpp"

namespace gmv {

// Portfolio weights plus the moments of the portfolio excess return they
// imply.  mu_p and sigma_p2 are model-consistent: sigma_p2 = w'(Sigma +
// Sigma0)w, and for the skewed family the asymmetry adds mu_a'w to the mean
// and (mu_a'w)^2 to the variance.  sigma0_p2 is the parameter-uncertainty
// part w' Sigma0 w alone, so sigma_p2 >= sigma0_p2 always.
struct AllocationResult {
    Eigen::VectorXd w;
    double cash = 0.0;
    double mu_p = 0.0;
    double sigma_p2 = 0.0;
    double sigma0_p2 = 0.0;
    double sharpe = 0.0;
    std::string method;
};

struct SolverConfig {
    double grad_tol = 1e-10;
    int max_iter = 500;
    double backtrack_factor = 0.5;
    double kkt_tol = 1e-8;
};

struct Constraints {
    bool long_only = false;
    bool full_investment = false;  // weights sum to one (no cash leg)
};

// Effective-variance weight for the Gaussian family,
//   w = (1/a) (Sigma + Sigma0)^{-1} (mu0 - r0 1).
AllocationResult solve_gaussian_closed(const ReturnModel& model, double a);

// Shrinkage factors applied to the Gaussian weight by the heavier-tailed
// families, in square-root form so they stay accurate for small q:
//   q = (mu0 - r0 1)' Sigma^{-1} (mu0 - r0 1),  v = mu_a' Sigma^{-1} mu_a.
double scaling_ald(double q, double v);
double scaling_wishart(double q, double alpha);

// Closed-form optimum for any family.  The skewed and variance-uncertain
// families require Sigma0 = 0 (their closed forms do not absorb a prior
// covariance; use solve_numeric for that).
AllocationResult solve_closed(const ReturnModel& model, double a);

// Maximize the exponential-utility objective numerically: damped Newton with
// backtracking when unconstrained (line search also retreats from the log
// domain boundary), projected gradient with Barzilai-Borwein steps under
// constraints.  Throws SolverError with the best iterate on non-convergence.
AllocationResult solve_numeric(const ReturnModel& model, double a,
                               const SolverConfig& config = {},
                               const Constraints& constraints = {});

// Scale the tangency direction Sigma^{-1}(mu0 - r0 1) to a target portfolio
// volatility instead of picking a risk aversion.  The Sharpe ratio is
// sqrt(q) either way.
AllocationResult risk_budget(const ReturnModel& model, double sigma_target);

// Two-regime Gaussian mixture: normal regime with probability p, stress
// regime otherwise.  Drifts are excess returns (cash earns zero).
struct RegimeSpec {
    double p = 1.0;
    Eigen::VectorXd mu_n, mu_s;
    Eigen::MatrixXd sigma_n, sigma_s;
};

// Exponential-utility optimum under the regime mixture.  The objective is a
// log-sum-exp of per-regime quadratics (convex), solved by Newton.  Reported
// moments are under the mixture distribution, including the jump term
// p(1-p)(mu_n - mu_s)(mu_n - mu_s)' in the variance.
AllocationResult two_state_allocate(const RegimeSpec& spec, double a,
                                    const SolverConfig& config = {});

// Variance of an equal-weight basket of N residuals with common variance
// sigma_s2 and common pairwise correlation rho_s.  Valid for
// rho_s in (-1/(N-1), 1]; the floor is where the matrix stops being PSD.
double equicorr_residual_risk(int N, double sigma_s2, double rho_s);

// Fully-invested weights with equal risk contributions w_i (Sigma w)_i,
// by cyclic coordinate descent (each update is the positive root of a
// scalar quadratic, so the sweep is monotone).
Eigen::VectorXd risk_parity(const Eigen::MatrixXd& sigma, double tol = 1e-12,
                            int max_sweeps = 10000);

// min over the simplex of 0.5 w'Qw - b'w + c max_i(w_i).  The max term is
// how an adversary who hits the largest position enters the problem.
struct MinimaxSpec {
    Eigen::MatrixXd Q;
    Eigen::VectorXd b;
    double c = 0.0;
};

struct MinimaxResult {
    Eigen::VectorXd w;
    double value = 0.0;
    std::vector<int> max_set;  // indices tied at the maximum weight
    std::string method;        // "uniform", "splitting+kkt", or "splitting"
    int iterations = 0;
    double kkt_residual = 0.0;
};

// Three-operator splitting over the simplex (the max term is proxed through
// its Moreau identity, another simplex projection), then an active-set
// refinement that solves the tied-block KKT system exactly.  When c clears
// N max_i(r_i) - sum_i(r_i) with r = Q 1/N - b, the uniform portfolio is
// returned directly: past that charge every deviation from 1/N loses.
MinimaxResult minimax_core(const MinimaxSpec& spec, const SolverConfig& config = {});

// Concentration-penalized minimum variance: Q = Sigma, b = 0.
MinimaxResult minimax_penalty(const Eigen::MatrixXd& sigma, double c,
                              const SolverConfig& config = {});

// Worst-case drift form: the adversary can knock min_shock (< 0) off the
// drift of the most concentrated asset, so Q = a Sigma, b = mu0_excess,
// c = -min_shock.
MinimaxResult minimax_worst_drift(const Eigen::MatrixXd& sigma,
                                  const Eigen::VectorXd& mu0_excess, double a,
                                  double min_shock, const SolverConfig& config = {});

// Closed-form limits used to pin down the single-asset solvers in tests.
namespace reference {

// Asymmetry location giving a downside/upside standard-deviation ratio kappa.
inline double kappa_to_mu_a(double kappa, double sigma) {
    return sigma * (1.0 / kappa - kappa) / std::sqrt(2.0);
}

// Skewed-family weight saturates as the drift grows: the downside tail, not
// the drift, caps the position.
inline double ald_weight_asymptote(double a, double sigma, double mu_a) {
    const double s = mu_a / sigma;
    return (std::sqrt(2.0 + s * s) + s) / (a * sigma);
}

// First-order effect of mild asymmetry on the single-asset weight.
inline double ald_weight_small_skew(double a, double mu0_excess, double sigma, double kappa) {
    return mu0_excess / (a * sigma * sigma) - std::sqrt(2.0) * (kappa - 1.0) / (a * sigma);
}

// Variance-uncertainty corrections: mild for large alpha, and weight
// collapsing like sqrt(alpha) when the variance is nearly unpinned.
inline double wishart_weight_large_alpha(double a, double mu0_excess, double sigma,
                                         double alpha) {
    const double s2 = sigma * sigma;
    return mu0_excess / (a * s2) -
           mu0_excess * mu0_excess * mu0_excess / (a * alpha * s2 * s2);
}

inline double wishart_weight_small_alpha(double a, double mu0_excess, double sigma,
                                         double alpha) {
    return std::sqrt(alpha) / (a * sigma) - alpha / (2.0 * a * mu0_excess);
}

}  // namespace reference

}  // namespace gmv
