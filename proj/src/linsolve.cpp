#include "msdg/linsolve.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace msdg {

SpdSolveResult spd_solve(const Eigen::SparseMatrix<double>& K, const Eigen::VectorXd& b) {
  if (K.rows() != K.cols() || K.rows() != b.size())
    throw std::invalid_argument("spd_solve: dimension mismatch");

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(K);
  if (ldlt.info() != Eigen::Success)
    throw IndefiniteSystemError("spd_solve: factorization failed (operator not SPD?)");
  if ((ldlt.vectorD().array() <= 0.0).any())
    throw IndefiniteSystemError("spd_solve: nonpositive pivot, operator is not positive definite");

  SpdSolveResult r;
  r.x = ldlt.solve(b);
  r.x += ldlt.solve(b - K * r.x);  // one refinement step

  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    r.x.setZero();
    r.relative_residual = 0.0;
    return r;
  }
  const double resid = (K * r.x - b).norm();
  r.relative_residual = resid / bnorm;

  // Residuals of a solution stored in doubles cannot fall below the
  // evaluation noise of K*x itself; allow for it on top of the target.
  const double floor =
      std::numeric_limits<double>::epsilon() * (K.cwiseAbs() * r.x.cwiseAbs()).norm();
  if (!(resid <= 1e-10 * bnorm + 8.0 * floor))
    throw NumericalError("spd_solve: residual check failed");
  return r;
}

EigenPairs generalized_eig(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  if (A.rows() != A.cols() || B.rows() != B.cols() || A.rows() != B.rows())
    throw std::invalid_argument("generalized_eig: dimension mismatch");

  // The generalized solver does not surface a failed Cholesky of B.
  const Eigen::LLT<Eigen::MatrixXd> llt(B);
  if (llt.info() != Eigen::Success)
    throw IndefiniteSystemError("generalized_eig: B is not positive definite");

  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(A, B,
                                                                   Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (solver.info() != Eigen::Success)
    throw IndefiniteSystemError("generalized_eig: B is not positive definite");

  EigenPairs out{solver.eigenvalues(), solver.eigenvectors()};
  if (!out.values.allFinite() || !out.vectors.allFinite())
    throw IndefiniteSystemError("generalized_eig: B is not positive definite");

  const double anorm = A.norm();
  const double bnorm = B.norm();
  const Eigen::MatrixXd AV = A * out.vectors;
  const Eigen::MatrixXd BV = B * out.vectors;
  for (Eigen::Index j = 0; j < out.values.size(); ++j) {
    const double lam = out.values[j];
    const double scale = anorm + std::abs(lam) * bnorm;
    if ((AV.col(j) - lam * BV.col(j)).norm() > 1e-8 * scale)
      throw NumericalError("generalized_eig: eigen residual too large");
  }
  const Eigen::MatrixXd gram = out.vectors.transpose() * BV;
  if ((gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() > 1e-8)
    throw NumericalError("generalized_eig: eigenvectors are not B-orthonormal");
  return out;
}

}  // namespace msdg
