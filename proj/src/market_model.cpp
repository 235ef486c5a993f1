#include "gmvalloc/market_model.hpp"

#include <cmath>
#include <sstream>

#include "gmvalloc/errors.hpp"
#include "gmvalloc/linalg.hpp"

namespace gmv {

namespace linalg {

namespace {
std::string condition_report(const Eigen::MatrixXd& s) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s, Eigen::EigenvaluesOnly);
    std::ostringstream os;
    if (es.info() == Eigen::Success) {
        const double lo = es.eigenvalues().minCoeff();
        const double hi = es.eigenvalues().maxCoeff();
        os << "min eigenvalue " << lo << ", max " << hi;
        if (lo > 0) os << ", condition " << hi / lo;
    } else {
        os << "eigenvalue probe failed";
    }
    return os.str();
}
}  // namespace

Eigen::LLT<Eigen::MatrixXd> chol(const Eigen::MatrixXd& s, const char* context) {
    Eigen::MatrixXd sym = symmetrized(s);
    Eigen::LLT<Eigen::MatrixXd> llt(sym);
    if (llt.info() == Eigen::Success) return llt;
    // One jitter retry, scaled to the matrix.
    const double delta = 1e-10 * sym.trace() / sym.rows();
    sym.diagonal().array() += delta;
    llt.compute(sym);
    if (llt.info() == Eigen::Success) return llt;
    throw NumericalError(std::string(context) +
                         ": matrix not positive definite after jitter (" +
                         condition_report(sym) + ")");
}

Eigen::VectorXd chol_solve(const Eigen::MatrixXd& s, const Eigen::VectorXd& b,
                           const char* context) {
    return chol(s, context).solve(b);
}

}  // namespace linalg

void ReturnModel::validate() const {
    const int n = size();
    if (n == 0) throw std::invalid_argument("ReturnModel: empty mu0");
    if (sigma.rows() != n || sigma.cols() != n)
        throw std::invalid_argument("ReturnModel: sigma must be " +
                                    std::to_string(n) + "x" + std::to_string(n));
    if (sigma0.size() != 0 && (sigma0.rows() != n || sigma0.cols() != n))
        throw std::invalid_argument("ReturnModel: sigma0 dimension mismatch");
    if (mu_a.size() != 0 && mu_a.size() != n)
        throw std::invalid_argument("ReturnModel: mu_a dimension mismatch");
    if (!assets.empty() && static_cast<int>(assets.size()) != n)
        throw std::invalid_argument("ReturnModel: asset label count mismatch");
    if (family == Family::GaussianWishart) {
        if (!(alpha > 0) || std::isinf(alpha))
            throw std::invalid_argument(
                "ReturnModel: GaussianWishart requires finite alpha > 0");
    } else if (std::isfinite(alpha)) {
        throw std::invalid_argument(
            "ReturnModel: alpha is only meaningful for GaussianWishart");
    }
    if (family != Family::Ald && mu_a.size() != 0 && !mu_a.isZero(0.0))
        throw std::invalid_argument("ReturnModel: mu_a is only meaningful for Ald");
}

Eigen::MatrixXd ReturnModel::sigma0_or_zero() const {
    if (sigma0.size() != 0) return sigma0;
    return Eigen::MatrixXd::Zero(size(), size());
}

Eigen::VectorXd ReturnModel::mu_a_or_zero() const {
    if (mu_a.size() != 0) return mu_a;
    return Eigen::VectorXd::Zero(size());
}

PosteriorBelief posterior_update_uni(double mu_prior, double sigma_prior2,
                                     double r_bar, double sigma2, double n) {
    if (!(sigma2 > 0)) throw std::invalid_argument("posterior_update_uni: sigma2 must be > 0");
    if (!(sigma_prior2 > 0))
        throw std::invalid_argument("posterior_update_uni: prior variance must be > 0");
    if (n < 0) throw std::invalid_argument("posterior_update_uni: n must be >= 0");
    const double prior_var = std::min(sigma_prior2, kFlatPriorVariance);
    const double precision = 1.0 / prior_var + n / sigma2;
    PosteriorBelief b;
    b.sigma_pd2 = 1.0 / precision;
    b.mu_pd = b.sigma_pd2 * (mu_prior / prior_var + n * r_bar / sigma2);
    b.n_eff = n;
    return b;
}

MultivariatePosterior posterior_update_multi(const Eigen::VectorXd& mu_prior,
                                             const Eigen::MatrixXd& sigma_prior,
                                             const Eigen::VectorXd& r_bar,
                                             const Eigen::MatrixXd& sigma,
                                             double n) {
    const auto dim = mu_prior.size();
    if (r_bar.size() != dim || sigma_prior.rows() != dim ||
        sigma_prior.cols() != dim || sigma.rows() != dim || sigma.cols() != dim)
        throw std::invalid_argument("posterior_update_multi: dimension mismatch");
    if (n < 0) throw std::invalid_argument("posterior_update_multi: n must be >= 0");

    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(dim, dim);
    const Eigen::MatrixXd prior_inv =
        linalg::chol(sigma_prior, "posterior_update_multi(prior)").solve(id);
    const Eigen::MatrixXd obs_inv =
        linalg::chol(sigma, "posterior_update_multi(observation)").solve(id);

    const Eigen::MatrixXd post_precision = prior_inv + n * obs_inv;
    const auto llt = linalg::chol(post_precision, "posterior_update_multi(posterior)");

    MultivariatePosterior p;
    p.sigma_pd = linalg::symmetrized(llt.solve(id));
    p.mu_pd = llt.solve(prior_inv * mu_prior + n * (obs_inv * r_bar));
    p.n_eff = n;
    return p;
}

double abm_increment_variance(const PosteriorBelief& belief, double sigma2,
                              double t, double delta) {
    if (!(delta > 0)) throw std::invalid_argument("abm_increment_variance: delta must be > 0");
    if (t < 0) throw std::invalid_argument("abm_increment_variance: t must be >= 0");
    return sigma2 * delta + belief.sigma_pd2 * delta * delta +
           belief.sigma_mu2 * (t * delta * delta + delta * delta * delta / 3.0);
}

MomentPair horizon_return_moments(const PosteriorBelief& belief, double sigma2,
                                  const HorizonSpec& horizon) {
    return {belief.mu_pd * horizon.T,
            abm_increment_variance(belief, sigma2, horizon.t0, horizon.T)};
}

double abm_discrete_variance(const PosteriorBelief& belief, double sigma2,
                             long long n, double dt, long long n0) {
    if (n < 1 || n0 < 0 || !(dt > 0))
        throw std::invalid_argument("abm_discrete_variance: need n >= 1, n0 >= 0, dt > 0");
    const double nd = static_cast<double>(n);
    const double T = nd * dt;
    // sum_{k,l in [n0, n0+n)} min(k, l) = n^2 n0 + n(n-1)(2n-1)/6
    const double min_sum =
        nd * nd * static_cast<double>(n0) + nd * (nd - 1.0) * (2.0 * nd - 1.0) / 6.0;
    return sigma2 * T + T * T * belief.sigma_pd2 +
           belief.sigma_mu2 * dt * dt * dt * min_sum;
}

double mv_weight_nonstationary(const PosteriorBelief& belief, double sigma2,
                               double r0, double a, double T) {
    if (!(a > 0)) throw std::invalid_argument("mv_weight_nonstationary: a must be > 0");
    if (!(T > 0)) throw std::invalid_argument("mv_weight_nonstationary: T must be > 0");
    const double denom =
        sigma2 + belief.sigma_pd2 * T + belief.sigma_mu2 * T * T / 3.0;
    if (!(denom > 0))
        throw std::invalid_argument("mv_weight_nonstationary: zero risk denominator");
    return (belief.mu_pd - r0) / (a * denom);
}

}  // namespace gmv
