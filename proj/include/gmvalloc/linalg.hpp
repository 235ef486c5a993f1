#pragma once

#include <Eigen/Dense>

namespace gmv::linalg {

// (S + S^T)/2.  All covariance inputs pass through this before use.
inline Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& s) {
    return 0.5 * (s + s.transpose());
}

// Cholesky factorization with a single retry after adding
// 1e-10 * trace/N on the diagonal.  Throws NumericalError (with a condition
// number in the message) if the matrix is still not positive definite.
// This is the only SPD factorization path in the library.
Eigen::LLT<Eigen::MatrixXd> chol(const Eigen::MatrixXd& s, const char* context);

// Solve S x = b through chol().
Eigen::VectorXd chol_solve(const Eigen::MatrixXd& s, const Eigen::VectorXd& b,
                           const char* context);

}  // namespace gmv::linalg
