#pragma once

#include <functional>
#include <vector>

namespace gmv::quad {

// Shared deterministic quadrature engine.  These rules back the independent
// numeric checks of every closed form in the library, so they must not reuse
// any of the closed-form code paths they are used to verify.

struct Rule {
    std::vector<double> x;
    std::vector<double> w;
};

// Nodes and weights for integrals against exp(-x^2) on the real line.
// Computed by eigendecomposition of the Jacobi matrix and cached per order.
const Rule& gauss_hermite(int n);

// Nodes and weights for expectations under the Gamma(a + 1, 1) law, i.e. the
// x^a exp(-x) rule with the weights normalized to sum to one.  The raw mass
// Gamma(a + 1) is not representable for large a, so it is never formed.
const Rule& gauss_laguerre(int n, double a);

// E[f(X)] with X ~ Normal(mu, sigma2), fixed-order Gauss-Hermite.
double normal_expect(const std::function<double(double)>& f, double mu,
                     double sigma2, int order);

// E[f(S)] with S ~ Gamma(shape, scale), fixed-order generalized Gauss-Laguerre.
double gamma_expect(const std::function<double(double)>& f, double shape,
                    double scale, int order);

struct Estimate {
    double value = 0.0;
    double abs_error = 0.0;
    bool converged = false;
};

// Tanh-sinh (double-exponential) rule on [a, b].  Tolerates integrable
// endpoint singularities; non-finite integrand samples at the extreme nodes
// are dropped.
Estimate tanh_sinh(const std::function<double(double)>& f, double a, double b,
                   double tol = 1e-12, int max_level = 12);

// Whole-line integral via truncation at loc +- L*scale with L doubling until
// the estimate stabilises.  A sequence of growing corrections (the signature
// of an exponentially divergent tail) is reported as converged=false rather
// than silently returning the truncated value.
Estimate real_line(const std::function<double(double)>& f, double loc,
                   double scale, double tol = 1e-10);

}  // namespace gmv::quad
