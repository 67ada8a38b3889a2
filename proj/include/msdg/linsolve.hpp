#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <stdexcept>

namespace msdg {

struct IndefiniteSystemError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SpdSolveResult {
  Eigen::VectorXd x;
  double relative_residual = 0.0;  // |Kx - b| / |b|, 0 when b = 0
};

// Direct sparse solve of an SPD system via Cholesky (LDLT) with one step of
// iterative refinement. Verifies the residual: the solve must reach
// 1e-10 relative to |b|, up to the double-precision evaluation floor
// eps * || |K| |x| || that high-contrast operators impose. Throws
// IndefiniteSystemError when the factorization reveals a nonpositive pivot,
// NumericalError when the residual check fails.
SpdSolveResult spd_solve(const Eigen::SparseMatrix<double>& K, const Eigen::VectorXd& b);

// Eigenpairs of the symmetric pencil (A, B) with B symmetric positive
// definite. values are ascending; vectors are B-orthonormal columns.
struct EigenPairs {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

// Dense generalized symmetric eigensolve: B is reduced by Cholesky and the
// standard symmetric problem is solved by tridiagonal QL. Residuals
// |A psi - lambda B psi| and B-orthonormality are verified to 1e-8 scaled;
// violations throw NumericalError, a non-PD B throws IndefiniteSystemError.
EigenPairs generalized_eig(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);

}  // namespace msdg
