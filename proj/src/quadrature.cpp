#include "gmvalloc/quadrature.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace gmv::quad {

namespace {

// Golub-Welsch: nodes are eigenvalues of the symmetric Jacobi matrix, weights
// are mu0 * (first eigenvector component)^2.
Rule golub_welsch(const std::vector<double>& diag, const std::vector<double>& off,
                  double mu0) {
    const int n = static_cast<int>(diag.size());
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) J(i, i) = diag[i];
    for (int i = 0; i + 1 < n; ++i) J(i, i + 1) = J(i + 1, i) = off[i];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("quadrature: Jacobi eigensolve failed");
    Rule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < n; ++i) {
        r.x[i] = es.eigenvalues()(i);
        const double v0 = es.eigenvectors()(0, i);
        r.w[i] = mu0 * v0 * v0;
    }
    return r;
}

std::mutex cache_mutex;

}  // namespace

const Rule& gauss_hermite(int n) {
    if (n < 1) throw std::invalid_argument("gauss_hermite: order must be >= 1");
    static std::map<int, Rule> cache;
    std::lock_guard<std::mutex> lock(cache_mutex);
    auto it = cache.find(n);
    if (it == cache.end()) {
        std::vector<double> diag(n, 0.0), off(n - 1);
        for (int i = 0; i + 1 < n; ++i) off[i] = std::sqrt((i + 1) / 2.0);
        it = cache.emplace(n, golub_welsch(diag, off, std::sqrt(std::numbers::pi))).first;
    }
    return it->second;
}

const Rule& gauss_laguerre(int n, double a) {
    if (n < 1) throw std::invalid_argument("gauss_laguerre: order must be >= 1");
    if (a <= -1.0) throw std::invalid_argument("gauss_laguerre: exponent must be > -1");
    static std::map<std::pair<int, double>, Rule> cache;
    std::lock_guard<std::mutex> lock(cache_mutex);
    auto it = cache.find({n, a});
    if (it == cache.end()) {
        std::vector<double> diag(n), off(n - 1);
        for (int i = 0; i < n; ++i) diag[i] = 2.0 * i + 1.0 + a;
        for (int i = 0; i + 1 < n; ++i)
            off[i] = std::sqrt((i + 1.0) * (i + 1.0 + a));
        // Probability normalization: the raw weight mass Gamma(a + 1)
        // overflows for a beyond ~170, which large-dof variance mixtures hit.
        it = cache.emplace(std::make_pair(n, a), golub_welsch(diag, off, 1.0)).first;
    }
    return it->second;
}

double normal_expect(const std::function<double(double)>& f, double mu,
                     double sigma2, int order) {
    if (sigma2 < 0) throw std::invalid_argument("normal_expect: negative variance");
    if (sigma2 == 0) return f(mu);
    const Rule& r = gauss_hermite(order);
    const double s = std::sqrt(2.0 * sigma2);
    double acc = 0.0;
    for (size_t i = 0; i < r.x.size(); ++i) acc += r.w[i] * f(mu + s * r.x[i]);
    return acc / std::sqrt(std::numbers::pi);
}

double gamma_expect(const std::function<double(double)>& f, double shape,
                    double scale, int order) {
    if (shape <= 0 || scale <= 0)
        throw std::invalid_argument("gamma_expect: shape and scale must be > 0");
    const Rule& r = gauss_laguerre(order, shape - 1.0);
    double acc = 0.0;
    for (size_t i = 0; i < r.x.size(); ++i) acc += r.w[i] * f(scale * r.x[i]);
    return acc;
}

Estimate tanh_sinh(const std::function<double(double)>& f, double a, double b,
                   double tol, int max_level) {
    if (!(b > a)) throw std::invalid_argument("tanh_sinh: requires b > a");
    const double half = 0.5 * (b - a);
    const double t_max = 4.0;  // weights underflow well before this
    const double pi_2 = std::numbers::pi / 2.0;

    auto node_sum = [&](double h, bool odd_only) {
        double acc = 0.0;
        for (int k = odd_only ? 1 : 0;; k += odd_only ? 2 : 1) {
            const double t = k * h;
            if (t > t_max) break;
            const double sh = pi_2 * std::sinh(t);
            const double wt = pi_2 * std::cosh(t) / (std::cosh(sh) * std::cosh(sh));
            // Distance to the nearer endpoint, half * (1 - tanh(sh)) kept in
            // quotient form: forming the abscissa as c + half * tanh(sh)
            // cannot get closer to an endpoint than machine epsilon, which
            // alone costs ~1e-8 of mass on an inverse-square-root singularity.
            const double d = 2.0 * half / (std::exp(2.0 * sh) + 1.0);
            for (int sgn : {+1, -1}) {
                const double x = sgn > 0 ? b - d : a + d;
                const double fx = f(x);
                if (std::isfinite(fx)) acc += wt * fx;
                if (k == 0) break;  // centre node counted once
            }
            if (k == 0 && odd_only) break;
        }
        return acc;
    };

    double h = 1.0;
    double sum = node_sum(h, false);
    double prev = half * h * sum;
    Estimate est{prev, std::abs(prev), false};
    for (int level = 1; level <= max_level; ++level) {
        h *= 0.5;
        sum += node_sum(h, true);
        const double cur = half * h * sum;
        est.abs_error = std::abs(cur - prev);
        est.value = cur;
        if (level >= 2 && est.abs_error <= tol * std::max(1.0, std::abs(cur))) {
            est.converged = true;
            return est;
        }
        prev = cur;
    }
    return est;
}

Estimate real_line(const std::function<double(double)>& f, double loc,
                   double scale, double tol) {
    if (!(scale > 0)) throw std::invalid_argument("real_line: scale must be > 0");
    double L = 8.0 * scale;
    Estimate inner = tanh_sinh(f, loc - L, loc + L, tol * 1e-2, 12);
    double value = inner.value;
    double prev_corr = std::numeric_limits<double>::infinity();
    int growth_streak = 0;

    // Polynomial tails shed only a constant factor per doubling, so the
    // truncation radius must be allowed to grow by many orders of magnitude;
    // shells where the integrand has died out cost almost nothing.
    for (int step = 0; step < 24; ++step) {
        const double L2 = 2.0 * L;
        Estimate left = tanh_sinh(f, loc - L2, loc - L, tol * 1e-2, 12);
        Estimate right = tanh_sinh(f, loc + L, loc + L2, tol * 1e-2, 12);
        const double corr = left.value + right.value;
        value += corr;
        L = L2;
        if (!std::isfinite(value))
            return {value, std::abs(corr), false};
        const double mag = std::abs(corr);
        if (mag <= tol * std::max(1.0, std::abs(value)))
            return {value, mag + inner.abs_error, true};
        growth_streak = (mag > prev_corr) ? growth_streak + 1 : 0;
        if (growth_streak >= 2)
            return {value, mag, false};  // tail corrections growing: divergent
        prev_corr = mag;
    }
    return {value, prev_corr, false};
}

}  // namespace gmv::quad
