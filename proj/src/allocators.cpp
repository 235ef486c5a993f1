#include "gmvalloc/allocators.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "gmvalloc/errors.hpp"
#include "gmvalloc/gmv_objectives.hpp"
#include "gmvalloc/linalg.hpp"

namespace gmv {

namespace {

AllocationResult make_result(const ReturnModel& model, const Eigen::VectorXd& w,
                             std::string method) {
    AllocationResult res;
    res.w = w;
    res.cash = 1.0 - w.sum();
    res.method = std::move(method);
    const Eigen::MatrixXd S = linalg::symmetrized(model.sigma);
    const Eigen::VectorXd excess = model.mu0.array() - model.r0;
    res.mu_p = excess.dot(w);
    if (model.sigma0.size() > 0)
        res.sigma0_p2 = w.dot(linalg::symmetrized(model.sigma0) * w);
    // Total forecast variance: observation noise plus parameter uncertainty.
    res.sigma_p2 = w.dot(S * w) + res.sigma0_p2;
    if (model.family == Family::Ald) {
        const Eigen::VectorXd ma = model.mu_a_or_zero();
        const double skew = ma.dot(w);
        res.mu_p += skew;
        res.sigma_p2 += skew * skew;
    }
    res.sharpe = res.sigma_p2 > 0.0 ? res.mu_p / std::sqrt(res.sigma_p2) : 0.0;
    return res;
}

void require_zero_prior(const ReturnModel& model, const char* family) {
    if (model.sigma0.size() > 0 && model.sigma0.norm() > 0.0)
        throw std::invalid_argument(std::string(family) +
                                    ": closed form requires Sigma0 = 0; use solve_numeric");
}

void check_aversion(double a) {
    if (!(a > 0.0)) throw std::invalid_argument("allocator: risk aversion a must be > 0");
}

double objective_or_ninf(const ReturnModel& model, double a, const Eigen::VectorXd& w,
                         bool& ok) {
    try {
        ok = true;
        return cara_objective_multi(model, a, w);
    } catch (const LogDomainError&) {
        ok = false;
        return -kInf;
    }
}

Eigen::VectorXd project_simplex(const Eigen::VectorXd& v) {
    const int n = static_cast<int>(v.size());
    std::vector<double> u(v.data(), v.data() + n);
    std::sort(u.begin(), u.end(), std::greater<>());
    double css = 0.0, tau = 0.0;
    for (int i = 0; i < n; ++i) {
        css += u[i];
        const double t = (css - 1.0) / (i + 1);
        if (u[i] - t > 0.0) tau = t;
    }
    return (v.array() - tau).max(0.0).matrix();
}

Eigen::VectorXd project_feasible(const Eigen::VectorXd& v, const Constraints& cons) {
    if (cons.long_only && cons.full_investment) return project_simplex(v);
    if (cons.long_only) return v.cwiseMax(0.0);
    if (cons.full_investment)
        return v.array() - (v.sum() - 1.0) / static_cast<double>(v.size());
    return v;
}

AllocationResult solve_newton_unconstrained(const ReturnModel& model, double a,
                                            const SolverConfig& config) {
    const int n = model.size();
    Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
    double fw = cara_objective_multi(model, a, w);
    for (int it = 0; it < config.max_iter; ++it) {
        const Eigen::VectorXd g = cara_gradient_multi(model, a, w);
        if (g.lpNorm<Eigen::Infinity>() <= config.grad_tol)
            return make_result(model, w, "newton");
        const Eigen::MatrixXd H = cara_hessian_multi(model, a, w);
        Eigen::VectorXd d;
        Eigen::LDLT<Eigen::MatrixXd> ldlt((-H).eval());
        bool newton_dir = false;
        if (ldlt.info() == Eigen::Success) {
            d = ldlt.solve(g);
            newton_dir = true;
        }
        if (d.size() != n || !d.allFinite() || g.dot(d) <= 0.0) {
            d = g;
            newton_dir = false;
        }
        // Near the optimum the per-step improvement drops below the roundoff
        // of the objective value, turning the sufficient-decrease test into
        // noise.  In that regime the bare Newton step is the right move; the
        // only thing left to guard is the utility domain.
        if (newton_dir && g.lpNorm<Eigen::Infinity>() <= 1e-6) {
            bool ok = false;
            const double ft = objective_or_ninf(model, a, (w + d).eval(), ok);
            if (ok) {
                w += d;
                fw = ft;
                continue;
            }
        }
        const double slope = g.dot(d);
        bool accepted = false;
        for (double step = 1.0; step >= 1e-18; step *= config.backtrack_factor) {
            bool ok = false;
            const Eigen::VectorXd trial = w + step * d;
            const double ft = objective_or_ninf(model, a, trial, ok);
            if (ok && ft >= fw + 1e-4 * step * slope) {
                w = trial;
                fw = ft;
                accepted = true;
                break;
            }
        }
        if (!accepted)
            throw SolverError("newton line search stalled", w,
                              g.lpNorm<Eigen::Infinity>());
    }
    const double res = cara_gradient_multi(model, a, w).lpNorm<Eigen::Infinity>();
    if (res <= config.grad_tol) return make_result(model, w, "newton");
    throw SolverError("newton did not converge", w, res);
}

AllocationResult solve_projected(const ReturnModel& model, double a,
                                 const SolverConfig& config, const Constraints& cons) {
    const int n = model.size();
    Eigen::VectorXd w = project_feasible(Eigen::VectorXd::Zero(n), cons);
    double fw = cara_objective_multi(model, a, w);
    Eigen::VectorXd g = cara_gradient_multi(model, a, w);
    double t = 1.0 / (1.0 + a * model.sigma.norm());
    for (int it = 0; it < config.max_iter; ++it) {
        const double kkt = (w - project_feasible(w + g, cons)).lpNorm<Eigen::Infinity>();
        if (kkt <= config.kkt_tol) return make_result(model, w, "projected");
        const Eigen::VectorXd target = project_feasible(w + t * g, cons);
        const Eigen::VectorXd d = target - w;
        if (d.lpNorm<Eigen::Infinity>() < 1e-16)
            throw SolverError("projected gradient pinned before reaching tolerance", w, kkt);
        bool accepted = false;
        Eigen::VectorXd w_new;
        double f_new = fw;
        for (double beta = 1.0; beta >= 1e-16; beta *= config.backtrack_factor) {
            bool ok = false;
            const Eigen::VectorXd trial = w + beta * d;
            const double ft = objective_or_ninf(model, a, trial, ok);
            if (ok && ft >= fw + 1e-4 * beta * g.dot(d)) {
                w_new = trial;
                f_new = ft;
                accepted = true;
                break;
            }
        }
        if (!accepted)
            throw SolverError("projected line search stalled", w, kkt);
        const Eigen::VectorXd g_new = cara_gradient_multi(model, a, w_new);
        const Eigen::VectorXd s = w_new - w;
        const Eigen::VectorXd y = g_new - g;
        const double sy = std::abs(s.dot(y));
        t = (sy > 1e-18) ? std::clamp(s.dot(s) / sy, 1e-12, 1e12) : 1.0;
        w = w_new;
        fw = f_new;
        g = g_new;
    }
    const double kkt = (w - project_feasible(w + g, cons)).lpNorm<Eigen::Infinity>();
    if (kkt <= config.kkt_tol) return make_result(model, w, "projected");
    throw SolverError("projected gradient did not converge", w, kkt);
}

}  // namespace

AllocationResult solve_gaussian_closed(const ReturnModel& model, double a) {
    model.validate();
    check_aversion(a);
    if (model.family != Family::Gaussian)
        throw std::invalid_argument("solve_gaussian_closed: model family must be Gaussian");
    const Eigen::VectorXd excess = model.mu0.array() - model.r0;
    Eigen::MatrixXd total = linalg::symmetrized(model.sigma);
    if (model.sigma0.size() > 0) total += linalg::symmetrized(model.sigma0);
    const Eigen::VectorXd w =
        linalg::chol_solve(total, excess, "gaussian closed form") / a;
    return make_result(model, w, "closed");
}

double scaling_ald(double q, double v) {
    if (q < 0.0 || v < 0.0)
        throw std::invalid_argument("scaling_ald: quadratic forms must be >= 0");
    return 2.0 * (1.0 + 0.5 * v) / (1.0 + std::sqrt(1.0 + 2.0 * q + q * v));
}

double scaling_wishart(double q, double alpha) {
    if (q < 0.0) throw std::invalid_argument("scaling_wishart: q must be >= 0");
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw std::invalid_argument("scaling_wishart: alpha must be finite and > 0");
    return 2.0 / (std::sqrt(1.0 + 4.0 * q / alpha) + 1.0);
}

AllocationResult solve_closed(const ReturnModel& model, double a) {
    model.validate();
    check_aversion(a);
    if (model.family == Family::Gaussian) return solve_gaussian_closed(model, a);
    const Eigen::VectorXd excess = model.mu0.array() - model.r0;
    const Eigen::MatrixXd S = linalg::symmetrized(model.sigma);
    if (model.family == Family::GaussianWishart) {
        require_zero_prior(model, "variance-uncertain family");
        const Eigen::VectorXd dir = linalg::chol_solve(S, excess, "wishart closed form");
        const double q = excess.dot(dir);
        const double g = scaling_wishart(q, model.alpha);
        return make_result(model, (g / a) * dir, "closed");
    }
    require_zero_prior(model, "skewed family");
    const Eigen::VectorXd dir = linalg::chol_solve(S, excess, "ald closed form");
    const Eigen::VectorXd ma = model.mu_a_or_zero();
    const Eigen::VectorXd skew_dir = linalg::chol_solve(S, ma, "ald closed form");
    const double q = excess.dot(dir);
    const double v = ma.dot(skew_dir);
    const double g = scaling_ald(q, v);
    return make_result(model, (g / a) * dir + skew_dir / a, "closed");
}

AllocationResult solve_numeric(const ReturnModel& model, double a,
                               const SolverConfig& config, const Constraints& constraints) {
    model.validate();
    check_aversion(a);
    if (!constraints.long_only && !constraints.full_investment)
        return solve_newton_unconstrained(model, a, config);
    return solve_projected(model, a, config, constraints);
}

AllocationResult risk_budget(const ReturnModel& model, double sigma_target) {
    model.validate();
    if (!(sigma_target > 0.0))
        throw std::invalid_argument("risk budget: sigma_target must be > 0");
    const Eigen::VectorXd excess = model.mu0.array() - model.r0;
    const Eigen::MatrixXd S = linalg::symmetrized(model.sigma);
    const Eigen::VectorXd dir = linalg::chol_solve(S, excess, "risk budget");
    const double q = excess.dot(dir);
    if (!(q > 0.0))
        throw std::invalid_argument("risk budget: drift equals cash everywhere, nothing to scale");
    return make_result(model, (sigma_target / std::sqrt(q)) * dir, "closed");
}

AllocationResult two_state_allocate(const RegimeSpec& spec, double a,
                                    const SolverConfig& config) {
    check_aversion(a);
    const int n = static_cast<int>(spec.mu_n.size());
    if (n < 1 || spec.mu_s.size() != n || spec.sigma_n.rows() != n ||
        spec.sigma_n.cols() != n || spec.sigma_s.rows() != n || spec.sigma_s.cols() != n)
        throw std::invalid_argument("two-state: inconsistent dimensions");
    if (!(spec.p >= 0.0 && spec.p <= 1.0))
        throw std::invalid_argument("two-state: p must be in [0, 1]");
    const Eigen::MatrixXd Sn = linalg::symmetrized(spec.sigma_n);
    const Eigen::MatrixXd Ss = linalg::symmetrized(spec.sigma_s);

    const auto finish = [&](const Eigen::VectorXd& w, const char* method) {
        AllocationResult res;
        res.w = w;
        res.cash = 1.0 - w.sum();
        res.method = method;
        const Eigen::VectorXd dmu = spec.mu_n - spec.mu_s;
        const Eigen::VectorXd mu_mix = spec.p * spec.mu_n + (1.0 - spec.p) * spec.mu_s;
        const Eigen::MatrixXd S_mix = spec.p * Sn + (1.0 - spec.p) * Ss +
                                      spec.p * (1.0 - spec.p) * dmu * dmu.transpose();
        res.mu_p = mu_mix.dot(w);
        res.sigma_p2 = w.dot(S_mix * w);
        res.sigma0_p2 = 0.0;
        res.sharpe = res.sigma_p2 > 0.0 ? res.mu_p / std::sqrt(res.sigma_p2) : 0.0;
        return res;
    };

    if (spec.p == 1.0 || spec.p == 0.0) {
        const Eigen::MatrixXd& S = spec.p == 1.0 ? Sn : Ss;
        const Eigen::VectorXd& mu = spec.p == 1.0 ? spec.mu_n : spec.mu_s;
        return finish(linalg::chol_solve(S, mu, "two-state single regime") / a, "closed");
    }

    // Minimize F(w) = ln( p e^{u_n} + (1-p) e^{u_s} ) with
    // u_i = (a^2/2) w'S_i w - a mu_i'w.  F is convex (log-sum-exp of convex
    // quadratics), finite everywhere, so plain damped Newton from 0 works.
    struct Parts {
        double F;
        Eigen::VectorXd grad;
        double s_n;  // softmax weight of the normal regime
    };
    const double lpn = std::log(spec.p), lps = std::log1p(-spec.p);
    const auto eval = [&](const Eigen::VectorXd& w) {
        const double tn = lpn + 0.5 * a * a * w.dot(Sn * w) - a * spec.mu_n.dot(w);
        const double ts = lps + 0.5 * a * a * w.dot(Ss * w) - a * spec.mu_s.dot(w);
        const double M = std::max(tn, ts);
        const double en = std::exp(tn - M), es = std::exp(ts - M);
        Parts parts;
        parts.F = M + std::log(en + es);
        parts.s_n = en / (en + es);
        const Eigen::VectorXd gn = a * a * (Sn * w) - a * spec.mu_n;
        const Eigen::VectorXd gs = a * a * (Ss * w) - a * spec.mu_s;
        parts.grad = parts.s_n * gn + (1.0 - parts.s_n) * gs;
        return parts;
    };

    Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
    Parts cur = eval(w);
    for (int it = 0; it < config.max_iter; ++it) {
        if (cur.grad.lpNorm<Eigen::Infinity>() <= config.grad_tol)
            return finish(w, "newton");
        const Eigen::VectorXd gn = a * a * (Sn * w) - a * spec.mu_n;
        const Eigen::VectorXd gs = a * a * (Ss * w) - a * spec.mu_s;
        const double sn = cur.s_n, ss = 1.0 - cur.s_n;
        Eigen::MatrixXd H = a * a * (sn * Sn + ss * Ss);
        H += sn * gn * gn.transpose() + ss * gs * gs.transpose();
        H -= cur.grad * cur.grad.transpose();
        Eigen::VectorXd d;
        Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
        bool newton_dir = false;
        if (ldlt.info() == Eigen::Success) {
            d = -ldlt.solve(cur.grad);
            newton_dir = true;
        }
        if (d.size() != n || !d.allFinite() || cur.grad.dot(d) >= 0.0) {
            d = -cur.grad;
            newton_dir = false;
        }
        // Same quadratic-regime escape as the utility solver: once the
        // decrease is below objective roundoff, take the bare Newton step.
        if (newton_dir && cur.grad.lpNorm<Eigen::Infinity>() <= 1e-6) {
            const Parts trial = eval(w + d);
            if (std::isfinite(trial.F)) {
                w += d;
                cur = trial;
                continue;
            }
        }
        const double slope = cur.grad.dot(d);
        bool accepted = false;
        for (double step = 1.0; step >= 1e-18; step *= config.backtrack_factor) {
            const Parts trial = eval(w + step * d);
            if (trial.F <= cur.F + 1e-4 * step * slope) {
                w += step * d;
                cur = trial;
                accepted = true;
                break;
            }
        }
        if (!accepted)
            throw SolverError("two-state line search stalled", w,
                              cur.grad.lpNorm<Eigen::Infinity>());
    }
    if (cur.grad.lpNorm<Eigen::Infinity>() <= config.grad_tol) return finish(w, "newton");
    throw SolverError("two-state newton did not converge", w,
                      cur.grad.lpNorm<Eigen::Infinity>());
}

double equicorr_residual_risk(int N, double sigma_s2, double rho_s) {
    if (N < 1) throw std::invalid_argument("equicorr: N must be >= 1");
    if (!(sigma_s2 >= 0.0)) throw std::invalid_argument("equicorr: sigma_s2 must be >= 0");
    if (N > 1 && !(rho_s > -1.0 / (N - 1) && rho_s <= 1.0))
        throw std::invalid_argument("equicorr: rho_s outside (-1/(N-1), 1]");
    if (N == 1) return sigma_s2;
    return sigma_s2 / N * (1.0 + rho_s * (N - 1));
}

Eigen::VectorXd risk_parity(const Eigen::MatrixXd& sigma, double tol, int max_sweeps) {
    const int n = static_cast<int>(sigma.rows());
    if (sigma.cols() != n || n < 1)
        throw std::invalid_argument("risk parity: covariance must be square");
    const Eigen::MatrixXd S = linalg::symmetrized(sigma);
    linalg::chol(S, "risk parity");  // SPD gate

    // Unnormalized fixed point: x_i (S x)_i = 1 for all i.  Each coordinate
    // update is the positive root of S_ii x^2 + c x - 1 = 0.
    Eigen::VectorXd x = Eigen::VectorXd::Ones(n);
    Eigen::VectorXd Sx = S * x;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double max_rel = 0.0;
        for (int i = 0; i < n; ++i) {
            const double c = Sx(i) - S(i, i) * x(i);
            const double xi = (-c + std::sqrt(c * c + 4.0 * S(i, i))) / (2.0 * S(i, i));
            const double delta = xi - x(i);
            if (delta != 0.0) {
                Sx += delta * S.col(i);
                max_rel = std::max(max_rel, std::abs(delta) / std::max(1e-300, xi));
                x(i) = xi;
            }
        }
        if (max_rel <= tol) return x / x.sum();
    }
    throw SolverError("risk parity sweeps did not converge", x / x.sum(), tol);
}

namespace {

struct KktOutcome {
    bool valid = false;
    Eigen::VectorXd w;
    std::vector<int> max_set;
    double residual = 0.0;
};

// Solve the tied-block stationarity system exactly, given a guessed
// partition: S tied at the max weight m, A interior, Z at zero.
// Unknowns are (w_A, m, nu, theta_S) with theta the subgradient split of
// the max term.
KktOutcome kkt_polish(const MinimaxSpec& spec, const Eigen::VectorXd& x) {
    const int n = static_cast<int>(x.size());
    const double m_guess = x.maxCoeff();
    std::vector<int> S, A, Z;
    for (int i = 0; i < n; ++i) {
        if (x(i) >= m_guess - 1e-5) S.push_back(i);
        else if (x(i) > 1e-9) A.push_back(i);
        else Z.push_back(i);
    }
    const int na = static_cast<int>(A.size()), ns = static_cast<int>(S.size());
    const int dim = na + ns + 2;  // w_A, m, nu, theta_S
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim);
    const int im = na, inu = na + 1, ith = na + 2;
    const auto fill_row = [&](int row, int i) {
        for (int k = 0; k < na; ++k) M(row, k) = spec.Q(i, A[k]);
        double qs = 0.0;
        for (int j : S) qs += spec.Q(i, j);
        M(row, im) = qs;
        M(row, inu) = -1.0;
        rhs(row) = spec.b(i);
    };
    for (int k = 0; k < na; ++k) fill_row(k, A[k]);
    for (int k = 0; k < ns; ++k) {
        const int row = na + 2 + k;
        fill_row(row, S[k]);
        M(row, ith + k) += spec.c;
    }
    for (int k = 0; k < na; ++k) M(im, k) = 1.0;
    M(im, im) = static_cast<double>(ns);
    rhs(im) = 1.0;
    for (int k = 0; k < ns; ++k) M(inu, ith + k) = 1.0;
    rhs(inu) = 1.0;

    Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
    KktOutcome out;
    if (!lu.isInvertible()) return out;
    const Eigen::VectorXd u = lu.solve(rhs);
    if (!u.allFinite()) return out;

    Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
    const double m = u(im), nu = u(inu);
    for (int k = 0; k < na; ++k) w(A[k]) = u(k);
    for (int i : S) w(i) = m;
    if (!(m > 0.0)) return out;
    double viol = 0.0;
    for (int k = 0; k < na; ++k) {
        viol = std::max(viol, -u(k));          // interior weights positive
        viol = std::max(viol, u(k) - m);       // and below the tied level
    }
    for (int k = 0; k < ns; ++k) viol = std::max(viol, -u(ith + k));  // theta >= 0
    const Eigen::VectorXd grad = spec.Q * w - spec.b;
    for (int i : Z) viol = std::max(viol, nu - grad(i));  // zero block slack
    if (viol > 1e-7) return out;
    out.valid = true;
    out.w = w;
    out.max_set = S;
    out.residual = viol;
    return out;
}

}  // namespace

MinimaxResult minimax_core(const MinimaxSpec& spec, const SolverConfig& config) {
    const int n = static_cast<int>(spec.Q.rows());
    if (spec.Q.cols() != n || spec.b.size() != n || n < 1)
        throw std::invalid_argument("minimax: inconsistent dimensions");
    if (!(spec.c >= 0.0)) throw std::invalid_argument("minimax: c must be >= 0");
    MinimaxSpec sym{linalg::symmetrized(spec.Q), spec.b, spec.c};

    const auto value_at = [&](const Eigen::VectorXd& w) {
        return 0.5 * w.dot(sym.Q * w) - sym.b.dot(w) + sym.c * w.maxCoeff();
    };

    MinimaxResult res;
    const Eigen::VectorXd uniform = Eigen::VectorXd::Constant(n, 1.0 / n);
    const Eigen::VectorXd r = sym.Q * uniform - sym.b;
    // Past this charge every move away from 1/N raises the objective, so the
    // uniform portfolio is exactly optimal.
    if (sym.c >= static_cast<double>(n) * r.maxCoeff() - r.sum()) {
        res.w = uniform;
        res.value = value_at(uniform);
        res.max_set.resize(n);
        for (int i = 0; i < n; ++i) res.max_set[i] = i;
        res.method = "uniform";
        return res;
    }

    double L = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sym.Q)
                   .eigenvalues()
                   .cwiseAbs()
                   .maxCoeff();
    const double gamma = 1.0 / std::max(L, 1e-12);

    // Three-operator splitting: f = indicator of the simplex, h = c max(.)
    // (prox via Moreau and another simplex projection), smooth part w'Qw/2 - b'w.
    Eigen::VectorXd z = uniform;
    Eigen::VectorXd x = uniform;
    int iters = 0;
    const int max_iters = std::max(config.max_iter, 200000);
    for (; iters < max_iters; ++iters) {
        x = project_simplex(z);
        const Eigen::VectorXd v = 2.0 * x - z - gamma * (sym.Q * x - sym.b);
        Eigen::VectorXd y = v;
        if (sym.c > 0.0)
            y = v - gamma * sym.c * project_simplex(v / (gamma * sym.c));
        const Eigen::VectorXd delta = y - x;
        z += delta;
        if (delta.lpNorm<Eigen::Infinity>() <= 1e-13) break;
    }
    x = project_simplex(z);
    res.iterations = iters;

    const KktOutcome polish = kkt_polish(sym, x);
    if (polish.valid) {
        res.w = polish.w;
        res.max_set = polish.max_set;
        res.method = "splitting+kkt";
        res.kkt_residual = polish.residual;
    } else {
        res.w = x;
        res.method = "splitting";
        const double m = x.maxCoeff();
        for (int i = 0; i < n; ++i)
            if (x(i) >= m - 1e-9) res.max_set.push_back(i);
        res.kkt_residual = (project_simplex(z) - x).lpNorm<Eigen::Infinity>();
    }
    res.value = value_at(res.w);
    return res;
}

MinimaxResult minimax_penalty(const Eigen::MatrixXd& sigma, double c,
                              const SolverConfig& config) {
    MinimaxSpec spec;
    spec.Q = sigma;
    spec.b = Eigen::VectorXd::Zero(sigma.rows());
    spec.c = c;
    return minimax_core(spec, config);
}

MinimaxResult minimax_worst_drift(const Eigen::MatrixXd& sigma,
                                  const Eigen::VectorXd& mu0_excess, double a,
                                  double min_shock, const SolverConfig& config) {
    check_aversion(a);
    if (min_shock > 0.0)
        throw std::invalid_argument("minimax: min_shock is the adverse move, must be <= 0");
    MinimaxSpec spec;
    spec.Q = a * sigma;
    spec.b = mu0_excess;
    spec.c = -min_shock;
    return minimax_core(spec, config);
}

}  // namespace gmv
