#include "gmvalloc/gmv_objectives.hpp"

#include <cmath>

#include "gmvalloc/errors.hpp"
#include "gmvalloc/quadrature.hpp"

namespace gmv {

double UtilitySpec::operator()(double x) const {
    switch (kind) {
        case Kind::Linear:
            return x;
        case Kind::Log:
            if (!(x > 0)) throw std::domain_error("log utility needs x > 0");
            return std::log(x);
        case Kind::Cara:
            if (a == 0.0) return x;
            return -std::expm1(-a * x) / a;
        case Kind::Crra:
            if (!(x > 0)) throw std::domain_error("crra utility needs x > 0");
            if (gamma == 1.0) return std::log(x);
            return std::expm1((1.0 - gamma) * std::log(x)) / (1.0 - gamma);
    }
    throw std::logic_error("unreachable");
}

double gmv_score(const MomentPair& m, double lambda) {
    if (lambda < 0) throw std::invalid_argument("gmv_score: lambda must be >= 0");
    return m.mean - 0.5 * lambda * m.var;
}

MomentPair cara_moments_uni(const UnivariateView& view, double a, double w) {
    if (a < 0) throw std::invalid_argument("cara_moments_uni: a must be >= 0");
    if (view.sigma2 < 0 || view.sigma0_2 < 0)
        throw std::invalid_argument("cara_moments_uni: negative variance");
    const double mu = view.mu0;
    if (a == 0.0)  // linear utility of w*r
        return {w * mu, w * w * (view.sigma2 + view.sigma0_2)};

    if (std::isfinite(view.alpha)) {
        // Variance Gamma-distributed with mean sigma2, dof alpha; mean belief
        // Gaussian with variance sigma0_2.
        const double alpha = view.alpha;
        if (!(alpha > 0)) throw std::invalid_argument("cara_moments_uni: alpha must be > 0");
        const double x = a * a * w * w * view.sigma2;
        if (!(alpha - 4.0 * x > 0))
            throw LogDomainError("cara_moments_uni: Gamma-variance second moment "
                                 "needs alpha > 4 a^2 w^2 sigma2",
                                 (alpha - 4.0 * x) / alpha);
        const double base = a * w * (-2.0 * mu + a * w * view.sigma0_2);
        // (alpha/(alpha-kx))^{alpha/2} = exp(-(alpha/2) log1p(-kx/alpha))
        const double p1 = -(alpha / 2.0) * std::log1p(-x / alpha);
        const double p4 = -(alpha / 2.0) * std::log1p(-4.0 * x / alpha);
        MomentPair m;
        m.mean = -std::expm1(0.5 * base + p1) / a;
        m.var = (std::exp(base + a * a * w * w * view.sigma0_2 + p4) -
                 std::exp(base + 2.0 * p1)) /
                (a * a);
        return m;
    }

    // Known or Gaussian-uncertain mean: only the total variance enters.
    const double st2 = view.sigma2 + view.sigma0_2;
    const double base = a * w * (-2.0 * mu + a * w * st2);
    MomentPair m;
    m.mean = -std::expm1(0.5 * base) / a;
    m.var = std::exp(base) * std::expm1(a * a * w * w * st2) / (a * a);
    return m;
}

namespace {

// Shared pieces of the multivariate CARA objective.  `log_arg` is the
// argument of the family's log term (1.0 for Gaussian, which has none).
struct MultiParts {
    double quad;       // w' sigma w
    double log_arg;    // must stay > 0
    Eigen::VectorXd sw;  // sym(sigma) w
};

MultiParts multi_parts(const ReturnModel& model, double a,
                       const Eigen::VectorXd& w) {
    MultiParts p;
    p.sw = 0.5 * (model.sigma * w + model.sigma.transpose() * w);
    p.quad = w.dot(p.sw);
    switch (model.family) {
        case Family::Gaussian:
            p.log_arg = 1.0;
            break;
        case Family::GaussianWishart:
            p.log_arg = 1.0 - (a * a / model.alpha) * p.quad;
            break;
        case Family::Ald:
            p.log_arg = 1.0 - 0.5 * a * a * p.quad + a * model.mu_a_or_zero().dot(w);
            break;
    }
    return p;
}

void check_log_arg(const MultiParts& p, const char* what) {
    if (!(p.log_arg > 0))
        throw LogDomainError(std::string(what) + ": log argument not positive",
                             p.log_arg);
}

}  // namespace

double cara_objective_multi(const ReturnModel& model, double a,
                            const Eigen::VectorXd& w) {
    model.validate();
    if (w.size() != model.size())
        throw std::invalid_argument("cara_objective_multi: weight dimension mismatch");
    if (!(a > 0)) throw std::invalid_argument("cara_objective_multi: a must be > 0");

    const Eigen::MatrixXd s0 = model.sigma0_or_zero();
    const double cash = (1.0 - w.sum()) * model.r0;
    const double drift = model.mu0.dot(w);
    const double belief_quad = w.dot(0.5 * (s0 * w + s0.transpose() * w));
    const MultiParts p = multi_parts(model, a, w);

    switch (model.family) {
        case Family::Gaussian:
            return cash + drift - 0.5 * a * (p.quad + belief_quad);
        case Family::GaussianWishart:
            check_log_arg(p, "cara_objective_multi");
            return cash + drift - 0.5 * a * belief_quad +
                   model.alpha / (2.0 * a) * std::log(p.log_arg);
        case Family::Ald:
            check_log_arg(p, "cara_objective_multi");
            return cash + drift - 0.5 * a * belief_quad +
                   std::log(p.log_arg) / a;
    }
    throw std::logic_error("unreachable");
}

Eigen::VectorXd cara_gradient_multi(const ReturnModel& model, double a,
                                    const Eigen::VectorXd& w) {
    model.validate();
    if (!(a > 0)) throw std::invalid_argument("cara_gradient_multi: a must be > 0");
    const Eigen::MatrixXd s0 = model.sigma0_or_zero();
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(model.size());
    const Eigen::VectorXd s0w = 0.5 * (s0 * w + s0.transpose() * w);
    const Eigen::VectorXd excess = model.mu0 - model.r0 * ones;
    const MultiParts p = multi_parts(model, a, w);

    switch (model.family) {
        case Family::Gaussian:
            return excess - a * (p.sw + s0w);
        case Family::GaussianWishart:
            check_log_arg(p, "cara_gradient_multi");
            return excess - a * s0w - a * p.sw / p.log_arg;
        case Family::Ald: {
            check_log_arg(p, "cara_gradient_multi");
            const Eigen::VectorXd v = model.mu_a_or_zero() - a * p.sw;
            return excess - a * s0w + v / p.log_arg;
        }
    }
    throw std::logic_error("unreachable");
}

Eigen::MatrixXd cara_hessian_multi(const ReturnModel& model, double a,
                                   const Eigen::VectorXd& w) {
    model.validate();
    if (!(a > 0)) throw std::invalid_argument("cara_hessian_multi: a must be > 0");
    using Eigen::MatrixXd;
    const MatrixXd s = 0.5 * (model.sigma + model.sigma.transpose());
    const MatrixXd s0raw = model.sigma0_or_zero();
    const MatrixXd s0 = 0.5 * (s0raw + s0raw.transpose());
    const MultiParts p = multi_parts(model, a, w);

    switch (model.family) {
        case Family::Gaussian:
            return -a * (s + s0);
        case Family::GaussianWishart: {
            check_log_arg(p, "cara_hessian_multi");
            const double B = p.log_arg;
            return -a * s0 - a * s / B -
                   (2.0 * a * a * a / model.alpha) * (p.sw * p.sw.transpose()) / (B * B);
        }
        case Family::Ald: {
            check_log_arg(p, "cara_hessian_multi");
            const double B = p.log_arg;
            const Eigen::VectorXd v = model.mu_a_or_zero() - a * p.sw;
            return -a * s0 - a * s / B - a * (v * v.transpose()) / (B * B);
        }
    }
    throw std::logic_error("unreachable");
}

MomentPair cara_moments_multi(const ReturnModel& model, double a,
                              const Eigen::VectorXd& w) {
    // f(t) = E[-exp(-t X)] = -exp(-t * objective_t) for the family's
    // certainty-equivalent objective evaluated at risk aversion t; then
    //   E[U_a]    = (1 + f(a)) / a
    //   Var[U_a]  = (exp(g(2a)) - exp(2 g(a))) / a^2,  g(t) = -t * objective_t.
    const double g_a = -a * cara_objective_multi(model, a, w);
    const double g_2a = -2.0 * a * cara_objective_multi(model, 2.0 * a, w);
    MomentPair m;
    m.mean = -std::expm1(g_a) / a;
    m.var = (std::exp(g_2a) - std::exp(2.0 * g_a)) / (a * a);
    return m;
}

MomentPair log_utility_moments(double mu_ln, double sigma_ln2, double sigma0_ln2) {
    if (sigma_ln2 < 0 || sigma0_ln2 < 0)
        throw std::invalid_argument("log_utility_moments: negative variance");
    return {mu_ln, sigma_ln2 + sigma0_ln2};
}

MomentPair crra_moments(double mu_ln, double sigma_ln2, double gamma,
                        double sigma0_ln2) {
    if (sigma_ln2 < 0 || sigma0_ln2 < 0)
        throw std::invalid_argument("crra_moments: negative variance");
    if (gamma == 1.0) return log_utility_moments(mu_ln, sigma_ln2, sigma0_ln2);

    const double k = 1.0 - gamma;
    const double st2 = sigma_ln2 + sigma0_ln2;
    MomentPair m;
    m.mean = std::expm1(k * mu_ln + 0.5 * k * k * st2) / k;

    if (sigma0_ln2 == 0.0) {
        // Var = exp(2 k mu + k^2 s2) (exp(k^2 s2) - 1) / k^2
        m.var = std::exp(2.0 * k * mu_ln + k * k * sigma_ln2) *
                std::expm1(k * k * sigma_ln2) / (k * k);
        return m;
    }

    // Uncertain log-mean: integrate the closed conditional second moment over
    // mu ~ N(mu_ln, sigma0_ln2).  E[U^2 | mu] is exact, so low orders suffice;
    // the order still doubles until two estimates agree.
    auto second_moment = [&](double mu) {
        return (std::exp(2.0 * k * mu + 2.0 * k * k * sigma_ln2) -
                2.0 * std::exp(k * mu + 0.5 * k * k * sigma_ln2) + 1.0) /
               (k * k);
    };
    double prev = quad::normal_expect(second_moment, mu_ln, sigma0_ln2, 40);
    for (int order : {80, 160, 320}) {
        const double cur = quad::normal_expect(second_moment, mu_ln, sigma0_ln2, order);
        if (std::abs(cur - prev) <= 1e-12 * std::max(1.0, std::abs(cur))) {
            prev = cur;
            break;
        }
        prev = cur;
    }
    m.var = prev - m.mean * m.mean;
    return m;
}

double taylor_gmv(double value_at_mean, const Eigen::VectorXd& gradient,
                  const Eigen::MatrixXd& hessian, const Eigen::MatrixXd& sigma,
                  double lambda) {
    if (lambda < 0) throw std::invalid_argument("taylor_gmv: lambda must be >= 0");
    const Eigen::MatrixXd hs = hessian * sigma;
    const double mean = value_at_mean + 0.5 * hs.trace();
    const double var = gradient.dot(sigma * gradient) + 0.5 * (hs * hs).trace();
    return mean - 0.5 * lambda * var;
}

namespace {

// CE of the gamble under the chosen family at risk aversion a, minus the
// stated CE.  Root in a solves the calibration.
struct CeEquation {
    const CalibrationFamily& fam;
    double mu_c, sigma_c2, sigma0_2, ce;

    double log_arg(double a) const {
        if (fam.kind == CalibrationFamily::Kind::Ald)
            return 1.0 - 0.5 * a * a * sigma_c2 + a * fam.mu_a;
        return 1.0 - (a * a / fam.alpha) * sigma_c2;
    }
    double value(double a) const {
        const double B = log_arg(a);
        const double scale =
            fam.kind == CalibrationFamily::Kind::Ald ? 1.0 / a : fam.alpha / (2.0 * a);
        return mu_c - 0.5 * a * sigma0_2 + scale * std::log(B) - ce;
    }
    double slope(double a) const {
        const double B = log_arg(a);
        if (fam.kind == CalibrationFamily::Kind::Ald) {
            const double dB = -a * sigma_c2 + fam.mu_a;
            return -0.5 * sigma0_2 - std::log(B) / (a * a) + dB / (a * B);
        }
        const double dB = -2.0 * a * sigma_c2 / fam.alpha;
        return -0.5 * sigma0_2 - fam.alpha * std::log(B) / (2.0 * a * a) +
               fam.alpha * dB / (2.0 * a * B);
    }
};

}  // namespace

CalibrationResult calibrate_risk_aversion(const Gamble& gamble,
                                          const CalibrationFamily& family) {
    const auto n = gamble.outcomes.size();
    if (n == 0 || gamble.probs.size() != n)
        throw std::invalid_argument("calibrate_risk_aversion: outcomes/probs mismatch");
    if ((gamble.probs.array() < 0).any())
        throw std::invalid_argument("calibrate_risk_aversion: negative probability");
    if (std::abs(gamble.probs.sum() - 1.0) > 1e-9)
        throw std::invalid_argument("calibrate_risk_aversion: probabilities must sum to 1");
    if (gamble.sigma0_2 < 0)
        throw std::invalid_argument("calibrate_risk_aversion: negative sigma0_2");

    CalibrationResult res;
    res.mu_c = gamble.probs.dot(gamble.outcomes);
    res.sigma_c2 =
        gamble.probs.dot((gamble.outcomes.array() - res.mu_c).square().matrix());
    const double total_var = res.sigma_c2 + gamble.sigma0_2;
    if (!(total_var > 0))
        throw std::invalid_argument("calibrate_risk_aversion: gamble has no risk");

    if (family.kind == CalibrationFamily::Kind::Gaussian) {
        if (!(gamble.ce < res.mu_c))
            throw std::invalid_argument(
                "calibrate_risk_aversion: risk-seeking gamble (ce >= mean)");
        res.a = 2.0 * (res.mu_c - gamble.ce) / total_var;
        res.residual = 0.0;
        return res;
    }
    if (family.kind == CalibrationFamily::Kind::GammaVariance &&
        !(std::isfinite(family.alpha) && family.alpha > 0))
        throw std::invalid_argument("calibrate_risk_aversion: GammaVariance needs alpha > 0");

    CeEquation eq{family, res.mu_c, res.sigma_c2, gamble.sigma0_2, gamble.ce};

    // Risk-neutral limit of the CE: mu_c (+ mu_a for the asymmetric family).
    const double neutral_ce =
        res.mu_c + (family.kind == CalibrationFamily::Kind::Ald ? family.mu_a : 0.0);
    if (!(gamble.ce < neutral_ce))
        throw std::invalid_argument(
            "calibrate_risk_aversion: risk-seeking gamble (ce >= risk-neutral value)");

    // Largest a keeping the log argument positive.
    double a_max;
    if (family.kind == CalibrationFamily::Kind::Ald) {
        a_max = (family.mu_a + std::sqrt(family.mu_a * family.mu_a + 2.0 * res.sigma_c2)) /
                res.sigma_c2;
    } else {
        a_max = std::sqrt(family.alpha / res.sigma_c2);
    }

    double lo = 1e-12 * a_max, hi = a_max * (1.0 - 1e-12);
    // value(lo) > 0 by the risk-seeking check; value(hi) -> -inf at the log wall.
    while (!(eq.value(hi) < 0)) hi = lo + (hi - lo) * (1.0 - 1e-3);

    double a = 0.5 * (lo + hi);
    double f = eq.value(a);
    int it = 0;
    for (; it < 200 && std::abs(f) > 1e-10; ++it) {
        const double df = eq.slope(a);
        double next = (df != 0.0) ? a - f / df : a;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);  // bisection fallback
        a = next;
        f = eq.value(a);
        (f > 0 ? lo : hi) = a;
    }
    if (std::abs(f) > 1e-10)
        throw SolverError("calibrate_risk_aversion: no convergence in 200 iterations",
                          Eigen::VectorXd::Constant(1, a), std::abs(f));
    res.a = a;
    res.residual = f;
    res.iterations = it;
    return res;
}

}  // namespace gmv
