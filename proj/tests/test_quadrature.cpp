#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "gmvalloc/quadrature.hpp"

using namespace gmv;

TEST_CASE("gauss hermite reproduces normal moments") {
    const auto& r = quad::gauss_hermite(32);
    double wsum = 0.0;
    for (double w : r.w) wsum += w;
    CHECK(std::abs(wsum - std::sqrt(std::numbers::pi)) < 1e-13);

    const double mu = 0.07, s2 = 0.03;
    CHECK(std::abs(quad::normal_expect([](double x) { return x; }, mu, s2, 32) - mu) < 1e-14);
    CHECK(std::abs(quad::normal_expect([](double x) { return x * x; }, mu, s2, 32) -
                   (mu * mu + s2)) < 1e-14);
    // Lognormal mean E[e^X] = exp(mu + s2/2): entire integrand, GH is exact fast.
    const double ln_mean = std::exp(mu + s2 / 2.0);
    CHECK(std::abs(quad::normal_expect([](double x) { return std::exp(x); }, mu, s2, 32) -
                   ln_mean) < 1e-13 * ln_mean);
    // Degenerate variance short-circuits to a point evaluation.
    CHECK(quad::normal_expect([](double x) { return x * x; }, 2.0, 0.0, 32) == 4.0);
}

TEST_CASE("gauss laguerre reproduces gamma moments and mgf") {
    const double a = 1.5;
    const auto& r = quad::gauss_laguerre(24, a);
    double wsum = 0.0;
    for (double w : r.w) wsum += w;
    CHECK(std::abs(wsum - 1.0) < 1e-13);

    const double shape = 3.0, scale = 0.5;
    CHECK(std::abs(quad::gamma_expect([](double s) { return s; }, shape, scale, 48) -
                   shape * scale) < 1e-13);
    CHECK(std::abs(quad::gamma_expect([](double s) { return s * s; }, shape, scale, 48) -
                   shape * (shape + 1.0) * scale * scale) < 1e-12);
    // E[e^{-tS}] = (1 + t scale)^{-shape}
    const double t = 0.7;
    const double mgf = std::pow(1.0 + t * scale, -shape);
    CHECK(std::abs(quad::gamma_expect([t](double s) { return std::exp(-t * s); }, shape,
                                      scale, 48) -
                   mgf) < 1e-11);
}

TEST_CASE("tanh-sinh handles endpoint singularities") {
    auto est = quad::tanh_sinh([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0);
    CHECK(est.converged);
    CHECK(std::abs(est.value - 2.0) < 1e-10);

    est = quad::tanh_sinh([](double x) { return std::log(x); }, 0.0, 1.0);
    CHECK(est.converged);
    CHECK(std::abs(est.value + 1.0) < 1e-10);

    est = quad::tanh_sinh([](double x) { return std::sin(x); }, 0.0, std::numbers::pi);
    CHECK(est.converged);
    CHECK(std::abs(est.value - 2.0) < 1e-12);
}

TEST_CASE("real-line quadrature converges on integrable tails") {
    const double s2 = 2.3;
    auto gauss = [s2](double x) {
        return std::exp(-x * x / (2.0 * s2)) / std::sqrt(2.0 * std::numbers::pi * s2);
    };
    auto est = quad::real_line(gauss, 0.0, std::sqrt(s2));
    CHECK(est.converged);
    CHECK(std::abs(est.value - 1.0) < 1e-9);

    // Polynomial tail (Cauchy): slow but integrable.
    auto cauchy = [](double x) { return 1.0 / (std::numbers::pi * (1.0 + x * x)); };
    est = quad::real_line(cauchy, 0.0, 1.0, 1e-6);
    CHECK(est.converged);
    CHECK(std::abs(est.value - 1.0) < 1e-4);
}

TEST_CASE("real-line quadrature flags exponentially divergent tails") {
    // e^x against a power-law tail: the CARA-versus-Student-t pathology.
    auto diverging = [](double x) {
        return std::exp(x) / std::pow(1.0 + x * x, 2.0);
    };
    auto est = quad::real_line(diverging, 0.0, 1.0);
    CHECK(!est.converged);
}

TEST_CASE("quadrature input validation") {
    CHECK_THROWS_AS(quad::gauss_hermite(0), std::invalid_argument);
    CHECK_THROWS_AS(quad::gauss_laguerre(8, -1.5), std::invalid_argument);
    CHECK_THROWS_AS(quad::normal_expect([](double) { return 0.0; }, 0.0, -1.0, 8),
                    std::invalid_argument);
    CHECK_THROWS_AS(quad::tanh_sinh([](double) { return 0.0; }, 1.0, 1.0),
                    std::invalid_argument);
}
