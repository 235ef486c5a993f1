#pragma once

#include <Eigen/Dense>
#include <limits>
#include <string>
#include <vector>

#include "gmvalloc/moments.hpp"

namespace gmv {

// Return distribution family.  Selection is always explicit: the solver never
// infers the family from which parameters happen to be set.
enum class Family {
    Gaussian,         // Gaussian returns, Gaussian-uncertain mean
    GaussianWishart,  // Gaussian returns, Gamma/Wishart-uncertain covariance
    Ald,              // asymmetric Laplace returns
};

constexpr double kInf = std::numeric_limits<double>::infinity();

// An "uninformative" prior is represented by this variance rather than by a
// true infinity, keeping the update formulas finite.
constexpr double kFlatPriorVariance = 1e12;

// One-period return model: observation distribution plus parameter beliefs.
//   mu0    belief mean of the return vector
//   sigma  observation covariance (the distribution's own noise)
//   sigma0 belief covariance of the mean (zero when the mean is known)
//   mu_a   asymmetry vector (Ald only; zero means symmetric)
//   alpha  tail-thickness dof of the covariance belief (GaussianWishart only)
//   r0     one-period risk-free rate paid on un-invested weight
struct ReturnModel {
    Family family = Family::Gaussian;
    Eigen::VectorXd mu0;
    Eigen::MatrixXd sigma;
    Eigen::MatrixXd sigma0;  // empty means zero
    Eigen::VectorXd mu_a;    // empty means zero
    double alpha = kInf;
    double r0 = 0.0;
    std::vector<std::string> assets;  // optional labels for reports

    int size() const { return static_cast<int>(mu0.size()); }

    // Dimension/family consistency checks; throws std::invalid_argument.
    void validate() const;

    // sigma0 with empty treated as the zero matrix.
    Eigen::MatrixXd sigma0_or_zero() const;
    // mu_a with empty treated as the zero vector.
    Eigen::VectorXd mu_a_or_zero() const;
};

// Belief state about a univariate drift after conjugate updating.
//   mu_pd      posterior mean of the drift
//   sigma_pd2  posterior variance of the drift
//   sigma_mu2  per-unit-time variance of the drift's own random walk
//   n_eff      effective number of observations behind the posterior
struct PosteriorBelief {
    double mu_pd = 0.0;
    double sigma_pd2 = 0.0;
    double sigma_mu2 = 0.0;
    double n_eff = 0.0;
};

// Time grid for horizon laws and path simulation.
//   T   length of the window the statistics describe
//   dt  simulation step
//   t0  time already elapsed before the window starts (0 = from the start)
struct HorizonSpec {
    double T = 1.0;
    double dt = 1.0 / 256.0;
    double t0 = 0.0;
};

struct MultivariatePosterior {
    Eigen::VectorXd mu_pd;
    Eigen::MatrixXd sigma_pd;
    double n_eff = 0.0;
};

// Conjugate Gaussian update of a univariate mean belief from n observations
// with sample mean r_bar and known observation variance sigma2.
// Posterior precision adds: 1/sigma_pd2 = 1/sigma_prior2 + n/sigma2.
// A prior variance of +inf (flat prior) is capped at kFlatPriorVariance.
PosteriorBelief posterior_update_uni(double mu_prior, double sigma_prior2,
                                     double r_bar, double sigma2, double n);

// Multivariate analogue: Sigma_pd^{-1} = Sigma_prior^{-1} + n Sigma^{-1},
// mu_pd = Sigma_pd (Sigma_prior^{-1} mu_prior + n Sigma^{-1} r_bar).
// All inverses go through Cholesky (see linalg.hpp); a matrix that is still
// singular after one jitter raises NumericalError with its condition number.
MultivariatePosterior posterior_update_multi(const Eigen::VectorXd& mu_prior,
                                             const Eigen::MatrixXd& sigma_prior,
                                             const Eigen::VectorXd& r_bar,
                                             const Eigen::MatrixXd& sigma,
                                             double n);

// Variance of the arithmetic return increment over (t, t+delta) when the
// drift was estimated at time 0 (variance sigma_pd2) and then random-walks
// with rate sigma_mu2:
//   sigma2*delta + sigma_pd2*delta^2 + sigma_mu2*(t*delta^2 + delta^3/3).
double abm_increment_variance(const PosteriorBelief& belief, double sigma2,
                              double t, double delta);

// Mean and variance of the return over [t0, t0+T]:
//   mean = mu_pd * T, var = abm_increment_variance(belief, sigma2, t0, T).
// With t0 = 0 the variance is sigma2*T + sigma_pd2*T^2 + sigma_mu2*T^3/3.
MomentPair horizon_return_moments(const PosteriorBelief& belief, double sigma2,
                                  const HorizonSpec& horizon);

// Exact variance of the discretely sampled increment over n steps of size dt
// starting n0 steps after the drift estimate:
//   sigma2*n*dt + (n*dt)^2*sigma_pd2
//     + sigma_mu2*dt^3*(n^2*n0 + n(n-1)(2n-1)/6).
// Converges to the continuous law above as dt -> 0.
double abm_discrete_variance(const PosteriorBelief& belief, double sigma2,
                             long long n, double dt, long long n0 = 0);

// Mean-variance weight for one risky asset over horizon T when the drift is
// uncertain and drifting: w = (mu_pd - r0) / (a * (sigma2 + sigma_pd2*T +
// sigma_mu2*T^2/3)).  Longer horizons shrink the weight.
double mv_weight_nonstationary(const PosteriorBelief& belief, double sigma2,
                               double r0, double a, double T);

}  // namespace gmv
