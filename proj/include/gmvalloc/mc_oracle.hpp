#pragma once

#include <cstdint>

#include "gmvalloc/gmv_objectives.hpp"
#include "gmvalloc/kelly.hpp"
#include "gmvalloc/market_model.hpp"
#include "gmvalloc/moments.hpp"

// Simulation and quadrature oracles.  These exist to check the closed forms,
// so they are written against the model definitions directly and never call
// into the solvers.  Path generation is counter-based: each path seeds its
// own generator from (seed, path index), which makes results a deterministic
// function of the config regardless of thread count, and lets the OpenMP and
// serial drivers share the per-path kernel.
namespace gmv::mc {

struct SimConfig {
    long long n_paths = 100000;
    std::uint64_t seed = 1;
    bool antithetic = false;  // pairs (2k, 2k+1) with mirrored draws
};

// Parallel runs the per-path kernel under OpenMP (thread count from
// GMV_ALLOC_THREADS when set); Serial is the plain reference loop kept for
// testing and benchmarking against it.
enum class ExecMode { Parallel, Serial };

struct PathStats {
    double sample_mean = 0.0;
    double sample_var = 0.0;
    double sample_mode_kde = 0.0;  // argmax of a binned Gaussian KDE
    double se_mean = 0.0;          // pair-based when antithetic
    double se_var = 0.0;
    long long n_paths = 0;
};

// Arithmetic Brownian wealth with a drift that is itself uncertain: one
// persistent draw mu ~ N(mu_pd, sigma_pd2) per path, plus an optional drift
// random walk with rate sigma_mu2.  Statistics are over the increment
// X(t0+T) - X(t0); the KDE mode is over the terminal level.  dt must divide
// both t0 and T.  When sigma_mu2 = 0 the drift-walk innovations are not
// drawn at all, so the draw sequence depends on the model config.
PathStats simulate_abm(double x0, const PosteriorBelief& belief, double sigma2,
                       const HorizonSpec& horizon, const SimConfig& config,
                       ExecMode mode = ExecMode::Parallel);

// Geometric version: the same drift hierarchy applies to the arithmetic
// drift mu, the log increment per step is (mu - sigma2/2) dt + sigma dW.
// Statistics are over ln X(t0+T) - ln X(t0); the mode is over terminal
// wealth itself, where the lognormal mean/mode gap shows up.
PathStats simulate_gbm(double x0, const PosteriorBelief& belief, double sigma2,
                       const HorizonSpec& horizon, const SimConfig& config,
                       ExecMode mode = ExecMode::Parallel);

// Log wealth after n_rounds independent plays of the bet at fraction f.
PathStats simulate_binary(const BinaryBet& bet, double f, long long n_rounds,
                          const SimConfig& config, ExecMode mode = ExecMode::Parallel);

// Same, but the win probability is drawn once per path from the Beta
// posterior before the N rounds are played.
PathStats simulate_bayes_binary(const BayesBinaryBet& bet, double f,
                                const SimConfig& config,
                                ExecMode mode = ExecMode::Parallel);

// One-period return distribution for the quadrature oracle.  sigma2 is the
// variance of the Gaussian base (the squared scale for StudentT, the
// log-variance for Lognormal).  sigma0_2 > 0 mixes the (log-)location with
// a Gaussian layer; finite alpha mixes the variance with a Gamma(alpha/2)
// layer of mean sigma2.  StudentT supports neither layer.
struct DensitySpec {
    enum class Base { Gaussian, Lognormal, StudentT };
    Base base = Base::Gaussian;
    double mu = 0.0;
    double sigma2 = 1.0;
    double sigma0_2 = 0.0;
    double alpha = kInf;
    double nu = kInf;
};

// Portfolio wrapper x -> (1 - w) r0 + w x applied before the utility.
struct AffineMap {
    double w = 1.0;
    double r0 = 0.0;
};

struct QuadResult {
    MomentPair moments;  // mean and variance of U(x)
    double abs_error = 0.0;
};

// E[U] and Var[U] by nested adaptive quadrature, the independent check for
// every closed utility moment.  Gauss-Hermite handles the Gaussian layers,
// Gauss-Laguerre the Gamma variance layer, and StudentT integrates over a
// doubling truncation of the real line.  Throws QuadratureError when the
// integral fails to settle, which for exponential utility on a power tail
// is the mathematically honest answer.
QuadResult expected_utility_quadrature(const DensitySpec& density,
                                       const UtilitySpec& utility,
                                       const AffineMap& map = {});

struct DensityMoments {
    double mass = 0.0;
    double mean = 0.0;
    double var = 0.0;
};

// Moments of y = ln(X_T/X_0) under a Gamma(alpha/2)-mixed squared volatility
// with mean sigma2 and arithmetic drift mu, integrated directly against the
// explicit mixture density (a Bessel-K form with a kink at y = mu T).  This
// is the oracle for the uncertain-variance leverage moments; mass should
// come back as 1.
DensityMoments log_wealth_density_moments(double mu, double sigma2, double alpha,
                                          double T);

}  // namespace gmv::mc
