#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace gmv {

// Objective left the domain of its log term.  `log_arg` is the offending
// argument (must be > 0 for the objective to be defined).
class LogDomainError : public std::domain_error {
public:
    LogDomainError(const std::string& what, double log_arg)
        : std::domain_error(what), log_arg_(log_arg) {}
    double log_arg() const { return log_arg_; }

private:
    double log_arg_;
};

// Iterative solver hit its iteration cap.  Carries the best iterate seen and
// its residual so callers can decide whether the answer is still usable.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, Eigen::VectorXd best, double residual)
        : std::runtime_error(what), best_(std::move(best)), residual_(residual) {}
    const Eigen::VectorXd& best_iterate() const { return best_; }
    double residual() const { return residual_; }

private:
    Eigen::VectorXd best_;
    double residual_;
};

// Adaptive quadrature failed to converge (often a genuinely divergent
// integral, e.g. exponential utility against a polynomial tail).
class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, double error_estimate)
        : std::runtime_error(what), estimate_(error_estimate) {}
    double error_estimate() const { return estimate_; }

private:
    double estimate_;
};

// Linear-algebra failure (e.g. posterior update on a singular covariance).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace gmv
