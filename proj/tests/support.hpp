#pragma once

// Shared helpers for the test binaries.  The oracle-style pieces here
// (finite differences, grid searches, enumeration pmfs) deliberately avoid
// the library code paths they are used to check.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace testsup {

// Random SPD matrix with eigenvalues bounded away from zero.  The 0.25 I
// ridge keeps condition numbers moderate so 1e-7 weight comparisons are fair.
inline Eigen::MatrixXd random_spd(int n, std::mt19937& gen, double scale = 0.04) {
    std::normal_distribution<double> z(0.0, 1.0);
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = z(gen);
    Eigen::MatrixXd s = a * a.transpose() / n + 0.25 * Eigen::MatrixXd::Identity(n, n);
    return scale * s;
}

inline Eigen::VectorXd random_vector(int n, std::mt19937& gen, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = u(gen);
    return v;
}

// Central-difference gradient, step scaled per coordinate.
inline Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& x, double h = 1e-6) {
    Eigen::VectorXd g(x.size());
    for (int i = 0; i < x.size(); ++i) {
        const double hi = h * (1.0 + std::abs(x(i)));
        Eigen::VectorXd xp = x, xm = x;
        xp(i) += hi;
        xm(i) -= hi;
        g(i) = (f(xp) - f(xm)) / (2.0 * hi);
    }
    return g;
}

inline Eigen::MatrixXd fd_hessian(const std::function<double(const Eigen::VectorXd&)>& f,
                                  const Eigen::VectorXd& x, double h = 1e-4) {
    const int n = static_cast<int>(x.size());
    Eigen::MatrixXd h2(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double hi = h * (1.0 + std::abs(x(i)));
            const double hj = h * (1.0 + std::abs(x(j)));
            Eigen::VectorXd xpp = x, xpm = x, xmp = x, xmm = x;
            xpp(i) += hi; xpp(j) += hj;
            xpm(i) += hi; xpm(j) -= hj;
            xmp(i) -= hi; xmp(j) += hj;
            xmm(i) -= hi; xmm(j) -= hj;
            h2(i, j) = (f(xpp) - f(xpm) - f(xmp) + f(xmm)) / (4.0 * hi * hj);
        }
    }
    return 0.5 * (h2 + h2.transpose());
}

// Golden-section maximization of a unimodal scalar function on [lo, hi].
inline double golden_max(const std::function<double(double)>& f, double lo, double hi,
                         double tol = 1e-10) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc > fd) {
            b = d; d = c; fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return (a + b) / 2.0;
}

// Evaluate f on every point of a barycentric grid over the m-simplex with
// `steps` subdivisions and return the best point.  Brute-force oracle for
// the constrained solvers; only sane for m <= 4.
inline Eigen::VectorXd simplex_grid_argmin(const std::function<double(const Eigen::VectorXd&)>& f,
                                           int m, int steps) {
    Eigen::VectorXd best = Eigen::VectorXd::Constant(m, 1.0 / m);
    double best_val = f(best);
    std::vector<int> k(m, 0);
    std::function<void(int, int)> rec = [&](int idx, int left) {
        if (idx == m - 1) {
            k[idx] = left;
            Eigen::VectorXd w(m);
            for (int i = 0; i < m; ++i) w(i) = static_cast<double>(k[i]) / steps;
            const double v = f(w);
            if (v < best_val) {
                best_val = v;
                best = w;
            }
            return;
        }
        for (int j = 0; j <= left; ++j) {
            k[idx] = j;
            rec(idx + 1, left - j);
        }
    };
    rec(0, steps);
    return best;
}

// Beta-Binomial pmf via incremental rational products; no lgamma, so it is
// exact to roundoff for the small N the enumeration tests use.
//   P(K=k) = C(N,k) * prod_{j<k}(A+j) * prod_{j<N-k}(B+j) / prod_{j<N}(A+B+j)
inline double beta_binomial_pmf(long long N, long long k, double A, double B) {
    double p = 1.0;
    // C(N,k) built alongside the numerator terms to keep intermediates tame.
    for (long long j = 0; j < k; ++j)
        p *= static_cast<double>(N - j) / static_cast<double>(j + 1) * (A + j);
    for (long long j = 0; j < N - k; ++j) p *= B + j;
    for (long long j = 0; j < N; ++j) p /= A + B + j;
    return p;
}

}  // namespace testsup
