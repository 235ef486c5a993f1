#include "gmvalloc/kelly.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "gmvalloc/errors.hpp"
#include "gmvalloc/gmv_objectives.hpp"

namespace gmv {

namespace {

void check_inputs(const LeverageInputs& in) {
    if (!(in.sigma_r2 > 0.0)) throw std::invalid_argument("leverage: sigma_r2 must be > 0");
    if (!(in.T > 0.0)) throw std::invalid_argument("leverage: T must be > 0");
    if (in.sigma0_2 < 0.0) throw std::invalid_argument("leverage: sigma0_2 must be >= 0");
    if (in.lambda < 0.0) throw std::invalid_argument("leverage: lambda must be >= 0");
    if (!(in.alpha > 0.0)) throw std::invalid_argument("leverage: alpha must be > 0");
}

void check_bet(double p, double b, double a) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("bet: p must be in [0, 1]");
    if (!(b > 0.0)) throw std::invalid_argument("bet: win payoff b must be > 0");
    if (!(a > 0.0 && a <= 1.0)) throw std::invalid_argument("bet: loss fraction must be in (0, 1]");
}

// Maximize a unimodal function on [lo, hi] by golden section.
double golden_max(const std::function<double(double)>& g, double lo, double hi, double tol) {
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - phi * (hi - lo);
    double x2 = lo + phi * (hi - lo);
    double g1 = g(x1), g2 = g(x2);
    while (hi - lo > tol) {
        if (g1 < g2) {
            lo = x1;
            x1 = x2;
            g1 = g2;
            x2 = lo + phi * (hi - lo);
            g2 = g(x2);
        } else {
            hi = x2;
            x2 = x1;
            g2 = g1;
            x1 = hi - phi * (hi - lo);
            g1 = g(x1);
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

MomentPair gbm_log_moments(const LeverageInputs& in, double f) {
    check_inputs(in);
    const double m = (in.r0 + f * (in.mu_r - in.r0) - 0.5 * f * f * in.sigma_r2) * in.T;
    const double v = f * f * in.sigma_r2 * in.T + f * f * in.sigma0_2 * in.T * in.T;
    return {m, v};
}

MomentPair gbm_log_moments_uncertain_variance(const LeverageInputs& in, double f) {
    check_inputs(in);
    if (!std::isfinite(in.alpha))
        throw std::invalid_argument("uncertain variance: alpha must be finite");
    if (in.sigma0_2 != 0.0)
        throw std::invalid_argument("uncertain variance: sigma0_2 must be 0 (one layer at a time)");
    const double m = (in.r0 + f * (in.mu_r - in.r0) - 0.5 * f * f * in.sigma_r2) * in.T;
    const double f2s = f * f * in.sigma_r2;
    const double v = f2s * in.T + 0.5 * f2s * f2s * in.T * in.T / in.alpha;
    return {m, v};
}

LeverageResult kelly_gmv(const LeverageInputs& in) {
    check_inputs(in);
    const double veff = in.sigma_r2 + in.sigma0_2 * in.T;
    const double f = (in.mu_r - in.r0) / ((1.0 + in.lambda) * veff);
    LeverageResult res;
    res.f_star = f;
    res.method = "closed";
    const MomentPair mp = gbm_log_moments(in, f);
    res.mean_logw = mp.mean;
    res.var_logw = mp.var;
    // Growth rate with the uncertainty-widened variance; coincides with
    // mean - (lambda/2) var of the log exactly when sigma0_2 = 0.
    res.objective =
        (in.r0 + f * (in.mu_r - in.r0)) * in.T - 0.5 * (1.0 + in.lambda) * f * f * veff * in.T;
    return res;
}

LeverageResult kelly_gmv_uncertain_variance(const LeverageInputs& in) {
    check_inputs(in);
    if (!std::isfinite(in.alpha))
        throw std::invalid_argument("uncertain variance: alpha must be finite");
    if (in.sigma0_2 != 0.0)
        throw std::invalid_argument("uncertain variance: sigma0_2 must be 0 (one layer at a time)");
    LeverageResult res;
    res.method = "root";
    const double m = in.mu_r - in.r0;
    const double c3 = in.lambda * in.sigma_r2 * in.sigma_r2 * in.T / in.alpha;
    const double c1 = (1.0 + in.lambda) * in.sigma_r2;
    if (m <= 0.0) {
        res.f_star = 0.0;
        res.flag = "no favorable leverage";
    } else {
        // g(f) = c3 f^3 + c1 f - m is strictly increasing with g(0) < 0 and
        // g(m/c1) > 0, so Newton from the linear solution stays bracketed.
        double lo = 0.0, hi = m / c1, f = hi;
        for (int it = 0; it < 100; ++it) {
            const double g = c3 * f * f * f + c1 * f - m;
            if (g > 0.0) hi = f;
            else lo = f;
            const double step = g / (3.0 * c3 * f * f + c1);
            double next = f - step;
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
            if (std::abs(next - f) <= 1e-15 * std::max(1.0, std::abs(f))) {
                f = next;
                break;
            }
            f = next;
        }
        res.f_star = f;
    }
    const MomentPair mp = gbm_log_moments_uncertain_variance(in, res.f_star);
    res.mean_logw = mp.mean;
    res.var_logw = mp.var;
    res.objective = gmv_score(mp, in.lambda);
    return res;
}

MomentPair discrete_calibration(double E, double V) {
    if (!(1.0 + E > 0.0)) throw std::invalid_argument("discrete calibration: need 1 + E > 0");
    if (!(V > 0.0)) throw std::invalid_argument("discrete calibration: need V > 0");
    const double g = 1.0 + E;
    const double sigma_d2 = std::log1p(V / (g * g));
    const double mu_d = std::log(g) - 0.5 * sigma_d2;
    return {mu_d, sigma_d2};
}

double binary_kelly_exact(const BinaryBet& bet) {
    check_bet(bet.p, bet.b, bet.a_loss);
    const double q = 1.0 - bet.p;
    if (bet.p * bet.b <= q * bet.a_loss) return 0.0;
    return bet.p / bet.a_loss - q / bet.b;
}

LeverageResult binary_gmv(const BinaryBet& bet) {
    check_bet(bet.p, bet.b, bet.a_loss);
    if (bet.lambda < 0.0) throw std::invalid_argument("bet: lambda must be >= 0");
    const double p = bet.p, q = 1.0 - bet.p, b = bet.b, a = bet.a_loss, lam = bet.lambda;

    LeverageResult res;
    res.f_kelly = (p * b > q * a) ? p / a - q / b : 0.0;
    res.delta = a * b / (lam * p * q * (a + b) * (a + b) + a * b);
    res.f_linearized = (b * p - a * q) * res.delta / (a * b);

    const auto moments = [&](double f) -> MomentPair {
        const double spread = std::log1p(b * f) - std::log1p(-a * f);
        const double mean = p * std::log1p(b * f) + q * std::log1p(-a * f);
        return {mean, p * q * spread * spread};
    };

    if (b * p - a * q <= 0.0) {
        // Stationarity value at f = 0 is a q - b p >= 0, so the optimum on
        // f >= 0 is the boundary.
        res.f_star = 0.0;
        res.flag = "unfavorable game";
        res.method = "root";
        res.objective = 0.0;
        return res;
    }

    if (lam == 0.0) {
        res.f_star = res.f_kelly;
        res.method = "closed";
    } else {
        // g(f) = bp(af-1) + aq(bf+1) + lam p q (a+b) ln((1+bf)/(1-af)) is
        // strictly increasing on (-1/b, 1/a) and g(0) = aq - bp < 0 here.
        const auto g = [&](double f) {
            return b * p * (a * f - 1.0) + a * q * (b * f + 1.0) +
                   lam * p * q * (a + b) * (std::log1p(b * f) - std::log1p(-a * f));
        };
        const auto gp = [&](double f) {
            return a * b + lam * p * q * (a + b) * (b / (1.0 + b * f) + a / (1.0 - a * f));
        };
        double lo = 0.0, hi = (1.0 - 1e-12) / a;
        double f = std::min(res.f_linearized, 0.5 * (lo + hi));
        for (int it = 0; it < 200; ++it) {
            const double gv = g(f);
            if (gv > 0.0) hi = f;
            else lo = f;
            if (std::abs(gv) <= 1e-14) break;
            double next = f - gv / gp(f);
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
            if (std::abs(next - f) <= 1e-16 * std::max(1.0, std::abs(f)) && std::abs(gv) < 1e-10) {
                f = next;
                break;
            }
            f = next;
        }
        res.f_star = f;
        res.method = "root";
    }
    const MomentPair mp = moments(res.f_star);
    res.mean_logw = mp.mean;
    res.var_logw = mp.var;
    res.objective = gmv_score(mp, lam);
    return res;
}

namespace {

void check_bayes(const BayesBinaryBet& bet) {
    check_bet(0.5, bet.b, bet.a_loss);
    if (!(bet.prior_alpha > 0.0) || !(bet.prior_beta > 0.0))
        throw std::invalid_argument("bayes bet: prior pseudo-counts must be > 0");
    if (bet.y1 < 0.0 || bet.n1 < bet.y1)
        throw std::invalid_argument("bayes bet: need 0 <= y1 <= n1");
    if (bet.N < 1) throw std::invalid_argument("bayes bet: N must be >= 1");
    if (bet.lambda < 0.0) throw std::invalid_argument("bayes bet: lambda must be >= 0");
}

}  // namespace

MomentPair bayes_success_count_moments(const BayesBinaryBet& bet) {
    check_bayes(bet);
    const double A = bet.y1 + bet.prior_alpha;
    const double B = bet.n1 - bet.y1 + bet.prior_beta;
    const double S = A + B;
    const double N = static_cast<double>(bet.N);
    const double mean = N * A / S;
    const double var = N * A * B * (S + N) / (S * S * (S + 1.0));
    return {mean, var};
}

MomentPair bayes_binary_moments(const BayesBinaryBet& bet, double f) {
    check_bayes(bet);
    if (!(f * bet.a_loss < 1.0 && f * bet.b > -1.0))
        throw std::invalid_argument("bayes bet: f outside the solvency domain");
    const MomentPair k = bayes_success_count_moments(bet);
    const double base = std::log1p(-bet.a_loss * f);
    const double spread = std::log1p(bet.b * f) - base;
    const double N = static_cast<double>(bet.N);
    return {N * base + spread * k.mean, spread * spread * k.var};
}

LeverageResult bayes_binary_optimal(const BayesBinaryBet& bet) {
    check_bayes(bet);
    const double a = bet.a_loss, b = bet.b, lam = bet.lambda;
    const double N = static_cast<double>(bet.N);
    const MomentPair k = bayes_success_count_moments(bet);

    LeverageResult res;
    res.method = "golden";

    // G'(0) = -aN + (a+b) E[K]: favorable iff the predictive win rate beats
    // the fair-odds threshold a/(a+b).
    if (-a * N + (a + b) * k.mean <= 0.0) {
        res.f_star = 0.0;
        res.flag = "unfavorable predictive odds";
        return res;
    }

    const auto score = [&](double f) {
        return gmv_score(bayes_binary_moments(bet, f), lam);
    };
    const double hi = (1.0 - 1e-9) / a;
    double f = golden_max(score, 0.0, hi, 1e-8);

    // Two Newton steps on the analytic gradient sharpen the bracket midpoint.
    for (int it = 0; it < 2; ++it) {
        const double base_p = -a / (1.0 - a * f);
        const double spread = std::log1p(b * f) - std::log1p(-a * f);
        const double spread_p = b / (1.0 + b * f) + a / (1.0 - a * f);
        const double spread_pp = -b * b / ((1.0 + b * f) * (1.0 + b * f)) +
                                 a * a / ((1.0 - a * f) * (1.0 - a * f));
        const double base_pp = -a * a / ((1.0 - a * f) * (1.0 - a * f));
        const double g1 = N * base_p + spread_p * k.mean -
                          lam * spread * spread_p * k.var;
        const double g2 = N * base_pp + spread_pp * k.mean -
                          lam * (spread_p * spread_p + spread * spread_pp) * k.var;
        if (g2 >= 0.0) break;
        const double next = f - g1 / g2;
        if (next <= 0.0 || next >= hi) break;
        f = next;
    }
    res.f_star = f;
    const MomentPair mp = bayes_binary_moments(bet, f);
    res.mean_logw = mp.mean;
    res.var_logw = mp.var;
    res.objective = gmv_score(mp, lam);
    return res;
}

LeverageResult crra_leverage(double gamma, const LeverageInputs& in) {
    if (!(gamma > 0.0)) throw std::invalid_argument("crra leverage: gamma must be > 0");
    if (gamma == 1.0) return kelly_gmv(in);
    check_inputs(in);
    if (in.sigma0_2 != 0.0)
        throw std::invalid_argument(
            "crra leverage: drift uncertainty is only supported for gamma = 1");

    LeverageResult res;
    if (in.lambda == 0.0) {
        res.f_star = (in.mu_r - in.r0) / (in.sigma_r2 * gamma);
        res.method = "closed";
        const MomentPair lw = gbm_log_moments(in, res.f_star);
        res.mean_logw = lw.mean;
        res.var_logw = lw.var;
        res.objective = crra_moments(lw.mean, lw.var, gamma).mean;
        return res;
    }

    const auto score = [&](double f) {
        const MomentPair lw = gbm_log_moments(in, f);
        return gmv_score(crra_moments(lw.mean, lw.var, gamma), in.lambda);
    };
    // The penalized optimum sits below the unpenalized one; bracket from 0.
    double hi = std::max(1.0, 2.0 * (in.mu_r - in.r0) / (in.sigma_r2 * gamma));
    const double f = golden_max(score, 0.0, hi, 1e-10 * hi);
    res.f_star = f;
    res.method = "golden";
    const MomentPair lw = gbm_log_moments(in, f);
    res.mean_logw = lw.mean;
    res.var_logw = lw.var;
    res.objective = score(f);
    return res;
}

double crra_gamma_from_ce(double ce, double mu_ln, double sigma_ln2) {
    if (!(ce > 0.0)) throw std::invalid_argument("gamma from ce: ce must be > 0");
    if (!(sigma_ln2 > 0.0)) throw std::invalid_argument("gamma from ce: sigma_ln2 must be > 0");
    return 1.0 - 2.0 * (std::log(ce) - mu_ln) / sigma_ln2;
}

Eigen::VectorXd combine_allocation(const Eigen::VectorXd& w, double f) {
    return f * w;
}

double wealth_mode_mean_ratio(double sigma2, double T) {
    if (sigma2 < 0.0 || T < 0.0)
        throw std::invalid_argument("mode/mean ratio: sigma2 and T must be >= 0");
    return std::exp(-1.5 * sigma2 * T);
}

}  // namespace gmv
