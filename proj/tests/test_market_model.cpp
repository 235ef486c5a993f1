#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "gmvalloc/errors.hpp"
#include "gmvalloc/market_model.hpp"
#include "support.hpp"

using namespace gmv;

TEST_CASE("flat prior collapses to the sample mean") {
    const auto b = posterior_update_uni(0.0, kInf, 0.08, 0.0225, 100.0);
    CHECK(std::abs(b.mu_pd - 0.08) < 1e-10);
    CHECK(std::abs(b.sigma_pd2 - 2.25e-4) < 1e-12);
    CHECK(b.n_eff == 100.0);
}

TEST_CASE("prior equal to data leaves the mean untouched") {
    const auto b = posterior_update_uni(0.05, 0.01, 0.05, 0.04, 7.0);
    CHECK(std::abs(b.mu_pd - 0.05) < 1e-15);
    // Posterior is still sharper than either source alone.
    CHECK(b.sigma_pd2 < 0.01);
    CHECK(b.sigma_pd2 < 0.04 / 7.0);
}

TEST_CASE("univariate posterior matches a dense grid over the drift") {
    const double mu_prior = 0.02, var_prior = 0.0004;
    const double r_bar = 0.10, sigma2 = 0.04, n = 20.0;
    const auto b = posterior_update_uni(mu_prior, var_prior, r_bar, sigma2, n);

    // Normalize exp(log prior + log likelihood) on a fine grid and take raw
    // moments; no conjugacy shortcut anywhere in this block.
    const long grid_n = 1000000;
    const double lo = b.mu_pd - 10.0 * std::sqrt(b.sigma_pd2);
    const double hi = b.mu_pd + 10.0 * std::sqrt(b.sigma_pd2);
    const double h = (hi - lo) / grid_n;
    double mass = 0.0, m1 = 0.0, m2 = 0.0;
    for (long i = 0; i < grid_n; ++i) {
        const double mu = lo + (i + 0.5) * h;
        const double logp = -(mu - mu_prior) * (mu - mu_prior) / (2.0 * var_prior) -
                            n * (mu - r_bar) * (mu - r_bar) / (2.0 * sigma2);
        const double p = std::exp(logp);
        mass += p;
        m1 += p * mu;
        m2 += p * mu * mu;
    }
    m1 /= mass;
    m2 /= mass;
    CHECK(std::abs(m1 - b.mu_pd) <= 1e-6);
    CHECK(std::abs((m2 - m1 * m1) - b.sigma_pd2) <= 1e-6);
}

TEST_CASE("multivariate update reduces to the univariate one at N=1") {
    Eigen::VectorXd mu_prior(1), r_bar(1);
    Eigen::MatrixXd var_prior(1, 1), sigma(1, 1);
    mu_prior << 0.03;
    r_bar << 0.09;
    var_prior << 0.0008;
    sigma << 0.05;
    const auto multi = posterior_update_multi(mu_prior, var_prior, r_bar, sigma, 12.0);
    const auto uni = posterior_update_uni(0.03, 0.0008, 0.09, 0.05, 12.0);
    CHECK(std::abs(multi.mu_pd(0) - uni.mu_pd) < 1e-14);
    CHECK(std::abs(multi.sigma_pd(0, 0) - uni.sigma_pd2) < 1e-14);
}

TEST_CASE("equal prior and data precision lands on the midpoint") {
    std::mt19937 gen(42);
    const int n_assets = 3;
    const double n = 25.0;
    const Eigen::MatrixXd sigma = testsup::random_spd(n_assets, gen);
    const Eigen::VectorXd mu_prior = testsup::random_vector(n_assets, gen, -0.05, 0.1);
    const Eigen::VectorXd r_bar = testsup::random_vector(n_assets, gen, -0.05, 0.1);
    const auto post = posterior_update_multi(mu_prior, sigma / n, r_bar, sigma, n);
    const Eigen::VectorXd mid = 0.5 * (mu_prior + r_bar);
    CHECK((post.mu_pd - mid).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("3x3 posterior matches an adjugate-inverse oracle") {
    std::mt19937 gen(7);
    const Eigen::MatrixXd var_prior = testsup::random_spd(3, gen);
    const Eigen::MatrixXd sigma = testsup::random_spd(3, gen);
    const Eigen::VectorXd mu_prior = testsup::random_vector(3, gen, -0.1, 0.1);
    const Eigen::VectorXd r_bar = testsup::random_vector(3, gen, -0.1, 0.1);
    const double n = 14.0;

    // Cofactor-expansion inverse, no shared code with the Cholesky path.
    auto adj_inverse = [](const Eigen::MatrixXd& m) {
        Eigen::MatrixXd c(3, 3);
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                const int r0 = (i + 1) % 3, r1 = (i + 2) % 3;
                const int c0 = (j + 1) % 3, c1 = (j + 2) % 3;
                c(j, i) = m(r0, c0) * m(r1, c1) - m(r0, c1) * m(r1, c0);
            }
        }
        const double det = m(0, 0) * c(0, 0) + m(0, 1) * c(1, 0) + m(0, 2) * c(2, 0);
        return Eigen::MatrixXd(c / det);
    };

    const Eigen::MatrixXd prior_inv = adj_inverse(var_prior);
    const Eigen::MatrixXd obs_inv = adj_inverse(sigma);
    const Eigen::MatrixXd post_var = adj_inverse(prior_inv + n * obs_inv);
    const Eigen::VectorXd post_mean = post_var * (prior_inv * mu_prior + n * obs_inv * r_bar);

    const auto post = posterior_update_multi(mu_prior, var_prior, r_bar, sigma, n);
    CHECK((post.mu_pd - post_mean).lpNorm<Eigen::Infinity>() < 1e-10);
    CHECK((post.sigma_pd - post_var).lpNorm<Eigen::Infinity>() < 1e-10);
}

TEST_CASE("posterior precision is the sum of the input precisions") {
    std::mt19937 gen(11);
    const Eigen::MatrixXd var_prior = testsup::random_spd(4, gen);
    const Eigen::MatrixXd sigma = testsup::random_spd(4, gen);
    const Eigen::VectorXd mu_prior = testsup::random_vector(4, gen, -0.1, 0.1);
    const Eigen::VectorXd r_bar = testsup::random_vector(4, gen, -0.1, 0.1);
    const double n = 9.0;
    const auto post = posterior_update_multi(mu_prior, var_prior, r_bar, sigma, n);
    const Eigen::MatrixXd lhs = post.sigma_pd.inverse();
    const Eigen::MatrixXd rhs = var_prior.inverse() + n * sigma.inverse();
    CHECK((lhs - rhs).lpNorm<Eigen::Infinity>() < 1e-10 * rhs.lpNorm<Eigen::Infinity>());
}

TEST_CASE("indefinite covariance is rejected with a diagnosis") {
    Eigen::VectorXd v(2);
    v << 0.0, 0.0;
    Eigen::MatrixXd bad(2, 2), ok(2, 2);
    bad << 1.0, 2.0, 2.0, 1.0;  // eigenvalues 3 and -1
    ok << 1.0, 0.0, 0.0, 1.0;
    CHECK_THROWS_AS(posterior_update_multi(v, bad, v, ok, 5.0), NumericalError);
}

TEST_CASE("horizon variance accumulates estimation error and drift wander") {
    PosteriorBelief b;
    b.mu_pd = 0.08;
    b.sigma_pd2 = 0.0025;
    b.sigma_mu2 = 0.01;
    HorizonSpec h;
    h.T = 2.0;
    const auto m = horizon_return_moments(b, 0.04, h);
    CHECK(std::abs(m.mean - 0.16) < 1e-15);
    // 0.04*2 + 0.0025*4 + 0.01*8/3
    CHECK(std::abs(m.var - (0.08 + 0.01 + 0.08 / 3.0)) < 1e-15);

    // Increment starting at t=1: the drift walk has already accumulated.
    const double inc = abm_increment_variance(b, 0.04, 1.0, 0.5);
    const double expect =
        0.04 * 0.5 + 0.0025 * 0.25 + 0.01 * (1.0 * 0.25 + 0.125 / 3.0);
    CHECK(std::abs(inc - expect) < 1e-15);
}

TEST_CASE("horizon variance is strictly increasing in every risk parameter") {
    const double base_s2 = 0.04, base_pd = 0.0025, base_mu = 0.01;
    HorizonSpec h;
    h.T = 1.5;
    auto var_at = [&](double s2, double pd, double mw) {
        PosteriorBelief b;
        b.sigma_pd2 = pd;
        b.sigma_mu2 = mw;
        return horizon_return_moments(b, s2, h).var;
    };
    double prev = var_at(base_s2, base_pd, base_mu);
    for (int i = 1; i <= 10; ++i) {
        const double cur = var_at(base_s2 + 0.01 * i, base_pd, base_mu);
        CHECK(cur > prev);
        prev = cur;
    }
    prev = var_at(base_s2, base_pd, base_mu);
    for (int i = 1; i <= 10; ++i) {
        const double cur = var_at(base_s2, base_pd + 0.001 * i, base_mu);
        CHECK(cur > prev);
        prev = cur;
    }
    prev = var_at(base_s2, base_pd, base_mu);
    for (int i = 1; i <= 10; ++i) {
        const double cur = var_at(base_s2, base_pd, base_mu + 0.002 * i);
        CHECK(cur > prev);
        prev = cur;
    }
}

TEST_CASE("discrete sampling variance matches a brute-force covariance sum") {
    PosteriorBelief b;
    b.sigma_pd2 = 0.003;
    b.sigma_mu2 = 0.02;
    const double sigma2 = 0.05, dt = 0.25;
    for (long long n0 : {0LL, 3LL, 11LL}) {
        for (long long n : {1LL, 2LL, 7LL, 32LL}) {
            // The drift walk contributes sigma_mu2 dt^3 min(k,l) to every
            // step pair (k,l); sum it outright.
            double min_sum = 0.0;
            for (long long k = n0; k < n0 + n; ++k)
                for (long long l = n0; l < n0 + n; ++l)
                    min_sum += static_cast<double>(std::min(k, l));
            const double want = sigma2 * n * dt + (n * dt) * (n * dt) * b.sigma_pd2 +
                                b.sigma_mu2 * dt * dt * dt * min_sum;
            const double got = abm_discrete_variance(b, sigma2, n, dt, n0);
            CHECK(std::abs(got - want) < 1e-12 * want);
        }
    }
}

TEST_CASE("discrete variance converges first order to the continuous law") {
    PosteriorBelief b;
    b.sigma_pd2 = 0.0025;
    b.sigma_mu2 = 0.01;
    const double sigma2 = 0.04, T = 2.0;
    HorizonSpec h;
    h.T = T;
    const double continuum = horizon_return_moments(b, sigma2, h).var;
    double prev_err = -1.0;
    for (int denom : {4, 16, 64}) {
        const double dt = T / denom;
        const double err = std::abs(abm_discrete_variance(b, sigma2, denom, dt) - continuum);
        if (prev_err > 0) CHECK(err / prev_err <= 0.5);
        prev_err = err;
    }
}

TEST_CASE("nonstationary mean-variance weight shrinks with horizon") {
    PosteriorBelief b;
    b.mu_pd = 0.08;
    b.sigma_pd2 = 0.0025;
    b.sigma_mu2 = 0.0;
    const double w = mv_weight_nonstationary(b, 0.0225, 0.02, 3.4, 1.0);
    // 0.06 / (3.4 * 0.025)
    CHECK(std::abs(w - 0.70588) < 1e-5);

    b.sigma_mu2 = 0.004;
    double prev = mv_weight_nonstationary(b, 0.0225, 0.02, 3.4, 0.25);
    for (int i = 1; i < 20; ++i) {
        const double T = 0.25 + 0.5 * i;
        const double cur = mv_weight_nonstationary(b, 0.0225, 0.02, 3.4, T);
        CHECK(cur < prev);
        prev = cur;
    }
}

TEST_CASE("return model validation catches shape and family mistakes") {
    ReturnModel m;
    m.mu0 = Eigen::VectorXd::Constant(2, 0.05);
    m.sigma = Eigen::MatrixXd::Identity(2, 2) * 0.04;
    CHECK_NOTHROW(m.validate());

    ReturnModel wrong_dim = m;
    wrong_dim.sigma = Eigen::MatrixXd::Identity(3, 3);
    CHECK_THROWS_AS(wrong_dim.validate(), std::invalid_argument);

    ReturnModel stray_alpha = m;
    stray_alpha.alpha = 5.0;  // only meaningful for the Wishart family
    CHECK_THROWS_AS(stray_alpha.validate(), std::invalid_argument);

    ReturnModel stray_skew = m;
    stray_skew.mu_a = Eigen::VectorXd::Constant(2, 0.01);
    CHECK_THROWS_AS(stray_skew.validate(), std::invalid_argument);

    ReturnModel wishart = m;
    wishart.family = Family::GaussianWishart;
    CHECK_THROWS_AS(wishart.validate(), std::invalid_argument);  // alpha still inf
    wishart.alpha = 8.0;
    CHECK_NOTHROW(wishart.validate());
}

TEST_CASE("update input validation") {
    CHECK_THROWS_AS(posterior_update_uni(0.0, 0.01, 0.05, -1.0, 3.0), std::invalid_argument);
    CHECK_THROWS_AS(posterior_update_uni(0.0, -0.01, 0.05, 1.0, 3.0), std::invalid_argument);
    CHECK_THROWS_AS(posterior_update_uni(0.0, 0.01, 0.05, 1.0, -3.0), std::invalid_argument);
    CHECK_THROWS_AS(abm_increment_variance(PosteriorBelief{}, 0.04, -1.0, 0.5),
                    std::invalid_argument);
    CHECK_THROWS_AS(abm_discrete_variance(PosteriorBelief{}, 0.04, 0, 0.1),
                    std::invalid_argument);
    CHECK_THROWS_AS(mv_weight_nonstationary(PosteriorBelief{}, 0.04, 0.0, -1.0, 1.0),
                    std::invalid_argument);
}
