#include "gmvalloc/mc_oracle.hpp"

#include <omp.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "gmvalloc/errors.hpp"
#include "gmvalloc/quadrature.hpp"

namespace gmv::mc {

namespace {

// ---------------------------------------------------------------------------
// Counter-based randomness.  Each path owns a SplitMix64 stream seeded from
// (seed, path index); no state is shared between paths, so scheduling cannot
// change the numbers.

std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

struct SplitMix64 {
    std::uint64_t state;
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
};

std::uint64_t path_seed(std::uint64_t seed, long long idx) {
    return mix64(mix64(seed) ^ (0x9e3779b97f4a7c15ull * static_cast<std::uint64_t>(idx + 1)));
}

// Normal/uniform stream with optional mirroring: the antithetic partner of a
// path negates every normal and reflects every uniform.
struct DrawStream {
    SplitMix64 rng;
    bool negate = false;
    bool have_spare = false;
    double spare = 0.0;

    // strictly inside (0, 1)
    double unit_open() {
        const double u = (static_cast<double>(rng.next() >> 12) + 0.5) * 0x1.0p-52;
        return negate ? 1.0 - u : u;
    }

    double normal() {
        if (have_spare) {
            have_spare = false;
            return negate ? -spare : spare;
        }
        const double u1 = 1.0 - static_cast<double>(rng.next() >> 11) * 0x1.0p-53;  // (0,1]
        const double u2 = static_cast<double>(rng.next() >> 11) * 0x1.0p-53;        // [0,1)
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        spare = r * std::sin(theta);
        have_spare = true;
        const double z = r * std::cos(theta);
        return negate ? -z : z;
    }
};

// Marsaglia-Tsang; shapes below one go through the boost G(a) = G(a+1) U^{1/a}.
double gamma_draw(DrawStream& ds, double shape) {
    if (shape < 1.0)
        return gamma_draw(ds, shape + 1.0) * std::pow(ds.unit_open(), 1.0 / shape);
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / (3.0 * std::sqrt(d));
    for (;;) {
        double x, v;
        do {
            x = ds.normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = ds.unit_open();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

double beta_draw(DrawStream& ds, double a, double b) {
    const double x = gamma_draw(ds, a);
    const double y = gamma_draw(ds, b);
    return x / (x + y);
}

int resolve_threads() {
    if (const char* env = std::getenv("GMV_ALLOC_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    return omp_get_max_threads();
}

// Run the per-path kernel over all paths.  Both drivers fill preallocated
// arrays and the statistics are always reduced in index order afterwards,
// so Serial and Parallel agree bitwise.
template <class Fn>
void run_paths(long long n, ExecMode mode, std::vector<double>& stat,
               std::vector<double>& mode_sample, Fn&& per_path) {
    stat.resize(static_cast<std::size_t>(n));
    mode_sample.resize(static_cast<std::size_t>(n));
    if (mode == ExecMode::Serial) {
        for (long long i = 0; i < n; ++i) per_path(i, stat[i], mode_sample[i]);
    } else {
        const int threads = resolve_threads();
#pragma omp parallel for schedule(static) num_threads(threads)
        for (long long i = 0; i < n; ++i) per_path(i, stat[i], mode_sample[i]);
    }
}

double kde_mode(const std::vector<double>& v) {
    const std::size_t n = v.size();
    const auto [mn_it, mx_it] = std::minmax_element(v.begin(), v.end());
    const double lo = *mn_it, hi = *mx_it;
    if (hi <= lo) return lo;

    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));

    std::vector<double> tmp(v);
    const std::size_t q1 = n / 4, q3 = (3 * n) / 4;
    std::nth_element(tmp.begin(), tmp.begin() + q1, tmp.end());
    const double lo_q = tmp[q1];
    std::nth_element(tmp.begin(), tmp.begin() + q3, tmp.end());
    const double hi_q = tmp[q3];
    const double iqr = hi_q - lo_q;

    double spread = sd;
    if (iqr > 0.0) spread = std::min(sd, iqr / 1.34);
    double h = 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
    const int bins = 4096;
    const double width = (hi - lo) / bins;
    if (h <= 0.0) h = width;

    std::vector<double> count(bins, 0.0);
    for (double x : v) {
        int j = static_cast<int>((x - lo) / width);
        j = std::clamp(j, 0, bins - 1);
        count[j] += 1.0;
    }
    const int reach = std::min(bins, static_cast<int>(8.0 * h / width) + 1);
    std::vector<double> kernel(reach + 1);
    for (int d = 0; d <= reach; ++d) {
        const double z = d * width / h;
        kernel[d] = std::exp(-0.5 * z * z);
    }
    int best = 0;
    double best_density = -1.0;
    for (int j = 0; j < bins; ++j) {
        double dens = count[j] * kernel[0];
        for (int d = 1; d <= reach; ++d) {
            if (j - d >= 0) dens += count[j - d] * kernel[d];
            if (j + d < bins) dens += count[j + d] * kernel[d];
        }
        if (dens > best_density) {
            best_density = dens;
            best = j;
        }
    }
    return lo + (best + 0.5) * width;
}

PathStats finish_stats(const std::vector<double>& stat,
                       const std::vector<double>& mode_sample, bool antithetic) {
    const long long n = static_cast<long long>(stat.size());
    PathStats ps;
    ps.n_paths = n;
    double sum = 0.0;
    for (double x : stat) sum += x;
    const double mean = sum / static_cast<double>(n);
    double m2 = 0.0, m4 = 0.0;
    for (double x : stat) {
        const double d = x - mean;
        const double d2 = d * d;
        m2 += d2;
        m4 += d2 * d2;
    }
    ps.sample_mean = mean;
    ps.sample_var = m2 / static_cast<double>(n - 1);
    const double mu2 = m2 / static_cast<double>(n);
    const double mu4 = m4 / static_cast<double>(n);
    const double var_of_var =
        (mu4 - mu2 * mu2 * static_cast<double>(n - 3) / static_cast<double>(n - 1)) /
        static_cast<double>(n);
    ps.se_var = std::sqrt(std::max(0.0, var_of_var));
    if (antithetic) {
        // Pairs are the independent unit; within-pair correlation is the
        // whole point, so the plain se would be wrong.
        const long long pairs = n / 2;
        double psum = 0.0;
        for (long long k = 0; k < pairs; ++k)
            psum += 0.5 * (stat[2 * k] + stat[2 * k + 1]);
        const double pmean = psum / static_cast<double>(pairs);
        double pss = 0.0;
        for (long long k = 0; k < pairs; ++k) {
            const double d = 0.5 * (stat[2 * k] + stat[2 * k + 1]) - pmean;
            pss += d * d;
        }
        ps.se_mean = pairs > 1 ? std::sqrt(pss / static_cast<double>(pairs - 1) /
                                           static_cast<double>(pairs))
                               : 0.0;
    } else {
        ps.se_mean = std::sqrt(ps.sample_var / static_cast<double>(n));
    }
    ps.sample_mode_kde = kde_mode(mode_sample);
    return ps;
}

struct StepGrid {
    long long n0 = 0;  // steps before the measurement window
    long long nT = 0;  // steps inside it
};

StepGrid resolve_grid(const HorizonSpec& horizon) {
    if (!(horizon.dt > 0.0)) throw std::invalid_argument("simulate: dt must be > 0");
    if (horizon.t0 < 0.0) throw std::invalid_argument("simulate: t0 must be >= 0");
    if (!(horizon.T > 0.0)) throw std::invalid_argument("simulate: T must be > 0");
    StepGrid g;
    g.n0 = std::llround(horizon.t0 / horizon.dt);
    g.nT = std::llround(horizon.T / horizon.dt);
    if (std::abs(g.n0 * horizon.dt - horizon.t0) > 1e-9 * std::max(1.0, horizon.t0) ||
        std::abs(g.nT * horizon.dt - horizon.T) > 1e-9 * std::max(1.0, horizon.T) ||
        g.nT < 1)
        throw std::invalid_argument("simulate: dt must divide both t0 and T");
    return g;
}

long long effective_paths(const SimConfig& config) {
    if (config.n_paths < 2) throw std::invalid_argument("simulate: need at least 2 paths");
    // Antithetic pairs need an even count; round up rather than fail.
    if (config.antithetic && (config.n_paths % 2) != 0) return config.n_paths + 1;
    return config.n_paths;
}

struct PathIdentity {
    std::uint64_t stream_seed;
    bool negate;
};

PathIdentity identify(const SimConfig& config, long long idx) {
    if (!config.antithetic) return {path_seed(config.seed, idx), false};
    return {path_seed(config.seed, idx / 2), (idx % 2) != 0};
}

PathStats simulate_diffusion(double x0, const PosteriorBelief& belief, double sigma2,
                             const HorizonSpec& horizon, const SimConfig& config,
                             ExecMode mode, bool geometric) {
    if (!(sigma2 >= 0.0)) throw std::invalid_argument("simulate: sigma2 must be >= 0");
    if (belief.sigma_pd2 < 0.0 || belief.sigma_mu2 < 0.0)
        throw std::invalid_argument("simulate: belief variances must be >= 0");
    const StepGrid grid = resolve_grid(horizon);
    const long long n = effective_paths(config);
    const double dt = horizon.dt;
    const double sqrt_dt = std::sqrt(dt);
    const double s_vol = std::sqrt(sigma2) * sqrt_dt;
    const double s_mu0 = std::sqrt(belief.sigma_pd2);
    const double s_walk = std::sqrt(belief.sigma_mu2) * sqrt_dt;
    const double drift_adj = geometric ? -0.5 * sigma2 : 0.0;
    const long long total = grid.n0 + grid.nT;

    std::vector<double> stat, mode_sample;
    run_paths(n, mode, stat, mode_sample, [&](long long idx, double& s, double& m) {
        const PathIdentity id = identify(config, idx);
        DrawStream ds{SplitMix64{id.stream_seed}, id.negate, false, 0.0};
        double mu = belief.mu_pd + s_mu0 * ds.normal();
        double path = 0.0, mark = 0.0;
        for (long long k = 0; k < total; ++k) {
            if (k == grid.n0) mark = path;
            path += (mu + drift_adj) * dt + s_vol * ds.normal();
            if (s_walk > 0.0) mu += s_walk * ds.normal();
        }
        s = path - mark;
        m = geometric ? x0 * std::exp(path) : x0 + path;
    });
    return finish_stats(stat, mode_sample, config.antithetic);
}

}  // namespace

PathStats simulate_abm(double x0, const PosteriorBelief& belief, double sigma2,
                       const HorizonSpec& horizon, const SimConfig& config,
                       ExecMode mode) {
    return simulate_diffusion(x0, belief, sigma2, horizon, config, mode, false);
}

PathStats simulate_gbm(double x0, const PosteriorBelief& belief, double sigma2,
                       const HorizonSpec& horizon, const SimConfig& config,
                       ExecMode mode) {
    if (!(x0 > 0.0)) throw std::invalid_argument("simulate: gbm needs x0 > 0");
    return simulate_diffusion(x0, belief, sigma2, horizon, config, mode, true);
}

PathStats simulate_binary(const BinaryBet& bet, double f, long long n_rounds,
                          const SimConfig& config, ExecMode mode) {
    if (n_rounds < 1) throw std::invalid_argument("simulate: n_rounds must be >= 1");
    if (!(f * bet.a_loss < 1.0 && f * bet.b > -1.0))
        throw std::invalid_argument("simulate: f outside the solvency domain");
    const double win = std::log1p(bet.b * f);
    const double loss = std::log1p(-bet.a_loss * f);
    const long long n = effective_paths(config);
    std::vector<double> stat, mode_sample;
    run_paths(n, mode, stat, mode_sample, [&](long long idx, double& s, double& m) {
        const PathIdentity id = identify(config, idx);
        DrawStream ds{SplitMix64{id.stream_seed}, id.negate, false, 0.0};
        long long wins = 0;
        for (long long k = 0; k < n_rounds; ++k)
            if (ds.unit_open() < bet.p) ++wins;
        s = static_cast<double>(wins) * win +
            static_cast<double>(n_rounds - wins) * loss;
        m = s;
    });
    return finish_stats(stat, mode_sample, config.antithetic);
}

PathStats simulate_bayes_binary(const BayesBinaryBet& bet, double f,
                                const SimConfig& config, ExecMode mode) {
    if (!(f * bet.a_loss < 1.0 && f * bet.b > -1.0))
        throw std::invalid_argument("simulate: f outside the solvency domain");
    const double A = bet.y1 + bet.prior_alpha;
    const double B = bet.n1 - bet.y1 + bet.prior_beta;
    if (!(A > 0.0 && B > 0.0))
        throw std::invalid_argument("simulate: posterior pseudo-counts must be > 0");
    const double win = std::log1p(bet.b * f);
    const double loss = std::log1p(-bet.a_loss * f);
    const long long n = effective_paths(config);
    std::vector<double> stat, mode_sample;
    run_paths(n, mode, stat, mode_sample, [&](long long idx, double& s, double& m) {
        const PathIdentity id = identify(config, idx);
        DrawStream ds{SplitMix64{id.stream_seed}, id.negate, false, 0.0};
        const double p = beta_draw(ds, A, B);
        long long wins = 0;
        for (long long k = 0; k < bet.N; ++k)
            if (ds.unit_open() < p) ++wins;
        s = static_cast<double>(wins) * win + static_cast<double>(bet.N - wins) * loss;
        m = s;
    });
    return finish_stats(stat, mode_sample, config.antithetic);
}

// ---------------------------------------------------------------------------
// Quadrature oracle.

namespace {

using Pair = std::array<double, 2>;  // accumulates E[U] and E[U^2]

template <class G>
Pair gh_pair(double m, double s2, int order, G&& g) {
    if (s2 <= 0.0) return g(m);
    const quad::Rule& rule = quad::gauss_hermite(order);
    const double scale = std::sqrt(2.0 * s2);
    Pair acc{0.0, 0.0};
    for (std::size_t i = 0; i < rule.x.size(); ++i) {
        const Pair val = g(m + scale * rule.x[i]);
        acc[0] += rule.w[i] * val[0];
        acc[1] += rule.w[i] * val[1];
    }
    const double norm = 1.0 / std::sqrt(std::numbers::pi);
    return {acc[0] * norm, acc[1] * norm};
}

template <class G>
Pair gamma_pair(double shape, double scale, int order, G&& g) {
    const quad::Rule& rule = quad::gauss_laguerre(order, shape - 1.0);
    Pair acc{0.0, 0.0};
    double wsum = 0.0;
    for (std::size_t i = 0; i < rule.x.size(); ++i) {
        const Pair val = g(scale * rule.x[i]);
        acc[0] += rule.w[i] * val[0];
        acc[1] += rule.w[i] * val[1];
        wsum += rule.w[i];
    }
    // The rule is already normalized; dividing by the computed sum removes
    // the residual roundoff in the weights as well.
    return {acc[0] / wsum, acc[1] / wsum};
}

double student_pdf(double x, double mu, double scale, double nu) {
    const double t = (x - mu) / scale;
    const double logc = std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
                        0.5 * std::log(nu * std::numbers::pi) - std::log(scale);
    return std::exp(logc - 0.5 * (nu + 1.0) * std::log1p(t * t / nu));
}

}  // namespace

QuadResult expected_utility_quadrature(const DensitySpec& density,
                                       const UtilitySpec& utility,
                                       const AffineMap& map) {
    if (!(density.sigma2 >= 0.0))
        throw std::invalid_argument("quadrature oracle: sigma2 must be >= 0");
    if (density.sigma0_2 < 0.0)
        throw std::invalid_argument("quadrature oracle: sigma0_2 must be >= 0");
    const auto apply = [&](double x) {
        const double port = (1.0 - map.w) * map.r0 + map.w * x;
        const double u = utility(port);
        return Pair{u, u * u};
    };

    if (density.base == DensitySpec::Base::StudentT) {
        if (!(density.nu > 0.0) || !std::isfinite(density.nu))
            throw std::invalid_argument("quadrature oracle: StudentT needs finite nu > 0");
        if (density.sigma0_2 > 0.0 || std::isfinite(density.alpha))
            throw std::invalid_argument(
                "quadrature oracle: StudentT supports no mixing layers");
        const double scale = std::sqrt(density.sigma2);
        const double width =
            scale * (density.nu > 2.0 ? std::sqrt(density.nu / (density.nu - 2.0)) : 3.0);
        const auto integrand = [&](int k) {
            return [&, k](double x) {
                return apply(x)[k] * student_pdf(x, density.mu, scale, density.nu);
            };
        };
        const quad::Estimate e1 = quad::real_line(integrand(0), density.mu, width, 1e-11);
        if (!e1.converged)
            throw QuadratureError("expected utility does not converge on this tail",
                                  e1.abs_error);
        const quad::Estimate e2 = quad::real_line(integrand(1), density.mu, width, 1e-11);
        if (!e2.converged)
            throw QuadratureError("second utility moment does not converge on this tail",
                                  e2.abs_error);
        QuadResult out;
        out.moments.mean = e1.value;
        out.moments.var = std::max(0.0, e2.value - e1.value * e1.value);
        out.abs_error = e1.abs_error + e2.abs_error;
        return out;
    }

    const bool lognormal = density.base == DensitySpec::Base::Lognormal;
    const auto nested = [&](int order) {
        const auto base_layer = [&](double m, double s2) {
            if (lognormal)
                return gh_pair(m, s2, order, [&](double l) { return apply(std::exp(l)); });
            return gh_pair(m, s2, order, apply);
        };
        const auto mean_layer = [&](double s2) {
            if (density.sigma0_2 > 0.0)
                return gh_pair(density.mu, density.sigma0_2, order,
                               [&](double mp) { return base_layer(mp, s2); });
            return base_layer(density.mu, s2);
        };
        if (std::isfinite(density.alpha)) {
            if (!(density.alpha > 0.0))
                throw std::invalid_argument("quadrature oracle: alpha must be > 0");
            return gamma_pair(0.5 * density.alpha, 2.0 * density.sigma2 / density.alpha,
                              order, mean_layer);
        }
        return mean_layer(density.sigma2);
    };

    Pair prev{0.0, 0.0};
    bool have_prev = false;
    double err = kInf;
    for (const int order : {24, 48, 96, 192, 384}) {
        const Pair cur = nested(order);
        if (have_prev) {
            err = std::max(std::abs(cur[0] - prev[0]), std::abs(cur[1] - prev[1]));
            const double scale =
                std::max({1.0, std::abs(cur[0]), std::abs(cur[1])});
            if (err <= 1e-11 * scale) {
                QuadResult out;
                out.moments.mean = cur[0];
                out.moments.var = std::max(0.0, cur[1] - cur[0] * cur[0]);
                out.abs_error = err;
                return out;
            }
        }
        prev = cur;
        have_prev = true;
    }
    throw QuadratureError("utility quadrature did not settle", err);
}

DensityMoments log_wealth_density_moments(double mu, double sigma2, double alpha,
                                          double T) {
    if (!(sigma2 > 0.0)) throw std::invalid_argument("density oracle: sigma2 must be > 0");
    if (!(T > 0.0)) throw std::invalid_argument("density oracle: T must be > 0");
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw std::invalid_argument("density oracle: alpha must be finite and > 0");

    const double sigma = std::sqrt(sigma2);
    const double y0 = T * mu;
    const double c = std::sqrt(4.0 * alpha + sigma2 * T) / (2.0 * std::sqrt(T) * sigma);
    const double order = 0.5 * (alpha - 1.0);
    const double log_norm = 0.5 * alpha * std::log(alpha) + 0.5 * mu * T +
                            0.25 * (1.0 - alpha) * std::log(4.0 * alpha + sigma2 * T) -
                            0.5 * std::log(std::numbers::pi) - std::lgamma(0.5 * alpha) -
                            0.5 * (1.0 + alpha) * std::log(sigma * std::sqrt(T));

    const auto pdf = [&](double y) {
        const double z = std::abs(y0 - y);
        const double bessel = std::cyl_bessel_k(std::abs(order), c * z);
        return std::exp(log_norm - 0.5 * y + order * std::log(z)) * bessel;
    };

    // exp(-y/2) sharpens the right tail to rate c + 1/2 and thins the left
    // one to c - 1/2; c > 1/2 always holds, so both integrals truncate.
    const double span_left = (800.0 + 20.0 * std::abs(order)) / (c - 0.5);
    const double span_right = (800.0 + 20.0 * std::abs(order)) / (c + 0.5);

    const auto piece = [&](int k, double lo, double hi) {
        const auto f = [&](double y) {
            double val = pdf(y);
            for (int j = 0; j < k; ++j) val *= y;
            return val;
        };
        const quad::Estimate est = quad::tanh_sinh(f, lo, hi, 1e-13, 14);
        if (!est.converged)
            throw QuadratureError("density oracle integral did not settle", est.abs_error);
        return est.value;
    };

    const double m0 = piece(0, y0 - span_left, y0) + piece(0, y0, y0 + span_right);
    const double m1 = piece(1, y0 - span_left, y0) + piece(1, y0, y0 + span_right);
    const double m2 = piece(2, y0 - span_left, y0) + piece(2, y0, y0 + span_right);

    DensityMoments out;
    out.mass = m0;
    out.mean = m1 / m0;
    out.var = m2 / m0 - out.mean * out.mean;
    return out;
}

}  // namespace gmv::mc
