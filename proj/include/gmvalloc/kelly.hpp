#pragma once

#include <Eigen/Dense>
#include <limits>
#include <string>

#include "gmvalloc/market_model.hpp"
#include "gmvalloc/moments.hpp"

namespace gmv {

// Inputs for leverage of a single risky portfolio under geometric compounding.
//   mu_r      arithmetic drift of the risky return
//   sigma_r2  its variance per unit time
//   r0        risk-free rate
//   sigma0_2  variance of the drift estimate (0 = drift known)
//   alpha     finite: sigma_r2 is the mean of a Gamma-distributed variance
//   T         horizon
//   lambda    variance penalty on log wealth (0 = full Kelly, 1 = half Kelly)
struct LeverageInputs {
    double mu_r = 0.0;
    double sigma_r2 = 0.0;
    double r0 = 0.0;
    double sigma0_2 = 0.0;
    double alpha = kInf;
    double T = 1.0;
    double lambda = 1.0;
};

// One-shot binary bet: win b per unit staked with probability p, lose a_loss
// per unit staked otherwise.  Leverage domain is -1/b < f < 1/a_loss.
struct BinaryBet {
    double p = 0.5;
    double b = 1.0;
    double a_loss = 1.0;
    double lambda = 1.0;
};

// Repeated binary bet with a Beta-updated win probability: y1 wins observed
// in n1 trials, Beta(prior_alpha, prior_beta) prior, N future rounds at
// fixed fraction f.
struct BayesBinaryBet {
    double y1 = 0.0;
    double n1 = 0.0;
    double prior_alpha = 1.0;
    double prior_beta = 1.0;
    long long N = 1;
    double b = 1.0;
    double a_loss = 1.0;
    double lambda = 1.0;
};

struct LeverageResult {
    double f_star = 0.0;
    double objective = 0.0;   // value of the criterion maximized at f_star
    double mean_logw = 0.0;   // E[ln X_T / X_0] at f_star
    double var_logw = 0.0;    // Var[ln X_T / X_0] at f_star
    std::string method;       // "closed", "root", or "golden"
    std::string flag;         // empty, or why f_star was pinned at 0
    // Binary-bet diagnostics (NaN when not applicable):
    double f_kelly = std::numeric_limits<double>::quiet_NaN();
    double f_linearized = std::numeric_limits<double>::quiet_NaN();
    double delta = std::numeric_limits<double>::quiet_NaN();
};

// Exact log-wealth moments at leverage f:
//   mean = (r0 + f(mu_r - r0) - f^2 sigma_r2 / 2) T
//   var  = f^2 sigma_r2 T + f^2 sigma0_2 T^2
// The T^2 term is the horizon cost of not knowing the drift.
MomentPair gbm_log_moments(const LeverageInputs& in, double f);

// Log-wealth moments when the squared volatility is Gamma(alpha/2) mixed
// with mean sigma_r2 (requires sigma0_2 = 0):
//   mean unchanged, var = f^2 sigma_r2 T + f^4 sigma_r2^2 T^2 / (2 alpha).
MomentPair gbm_log_moments_uncertain_variance(const LeverageInputs& in, double f);

// Optimal leverage of the variance-penalized growth rate
//   f* = (mu_r - r0) / ((1 + lambda)(sigma_r2 + sigma0_2 T)).
// Drift uncertainty widens the effective variance by sigma0_2 T, so longer
// horizons mean smaller leverage.  Negative f* (shorting) is returned as-is.
LeverageResult kelly_gmv(const LeverageInputs& in);

// Same criterion when the variance is Gamma-uncertain (finite alpha): the
// stationarity condition is the cubic
//   lambda sigma_r2^2 T / alpha f^3 + (1+lambda) sigma_r2 f = mu_r - r0,
// solved exactly; alpha -> inf recovers kelly_gmv with sigma0_2 = 0.  If no
// positive stationary point exists, returns f*=0 with a flag.
LeverageResult kelly_gmv_uncertain_variance(const LeverageInputs& in);

// Lognormal parameters reproducing a per-period simple-return mean E and
// variance V exactly: sigma_d2 = ln(1 + V/(1+E)^2), mu_d = ln(1+E) - sigma_d2/2.
// Returned as {mean: mu_d, var: sigma_d2}.
MomentPair discrete_calibration(double E, double V);

// Classic Kelly fraction p/a_loss - q/b, floored at 0 for unfavorable games
// (p b <= q a_loss).
double binary_kelly_exact(const BinaryBet& bet);

// Variance-penalized binary bet.  Solves the stationarity condition
//   b p (a f - 1) + a q (b f + 1) + lambda p q (a+b) ln((1+bf)/(1-af)) = 0
// by safeguarded Newton (monotone in f, so the root is unique).  Also reports
// the small-f linearization f_lin = (bp - aq)/(lambda p q (a+b)^2 + ab) and
// the Kelly multiplier delta = ab/(lambda p q (a+b)^2 + ab).  Unfavorable
// games return f*=0 with a flag.
LeverageResult binary_gmv(const BinaryBet& bet);

// Predictive moments of the number of wins K over N future rounds under the
// Beta posterior (Beta-Binomial).
MomentPair bayes_success_count_moments(const BayesBinaryBet& bet);

// Log-wealth moments of the Bayesian repeated bet at fraction f:
//   ln X_N/X_0 = N ln(1-af) + K ln((1+bf)/(1-af)), K Beta-Binomial.
MomentPair bayes_binary_moments(const BayesBinaryBet& bet, double f);

// Maximize the variance-penalized log wealth of the Bayesian bet over
// f in [0, 1/a_loss) by golden-section (1e-8 bracket) plus two Newton polish
// steps.  Returns f*=0 with a flag when the predictive odds are unfavorable.
LeverageResult bayes_binary_optimal(const BayesBinaryBet& bet);

// Power-utility leverage.  gamma = 1 delegates to kelly_gmv (log utility).
// With lambda = 0 the maximizer is closed form f* = (mu_r - r0)/(sigma_r2 *
// gamma); with lambda > 0 the penalized expected utility is maximized
// numerically.  Requires sigma0_2 = 0 (drift uncertainty is only treated for
// the log-utility criterion).
LeverageResult crra_leverage(double gamma, const LeverageInputs& in);

// Invert the certainty equivalent ce = exp(mu_ln + sigma_ln2 (1-gamma)/2)
// for gamma.  Linear in gamma, so the inversion is exact.
double crra_gamma_from_ce(double ce, double mu_ln, double sigma_ln2);

// Final risky exposure: leverage times the diversification weights.
Eigen::VectorXd combine_allocation(const Eigen::VectorXd& w, double f);

// Mode-to-mean ratio of terminal lognormal wealth, exp(-1.5 sigma2 T):
// the typical outcome sits well below the expected one.
double wealth_mode_mean_ratio(double sigma2, double T);

}  // namespace gmv
