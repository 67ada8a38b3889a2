#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "msdg/fe_core.hpp"
#include "msdg/linsolve.hpp"
#include "test_util.hpp"

using namespace msdg;

namespace {

SparseMat to_sparse(const Eigen::MatrixXd& D) {
  SparseMat S(D.rows(), D.cols());
  for (Eigen::Index j = 0; j < D.cols(); ++j)
    for (Eigen::Index i = 0; i < D.rows(); ++i)
      if (D(i, j) != 0.0) S.insert(i, j) = D(i, j);
  S.makeCompressed();
  return S;
}

double det3(const Eigen::Matrix3d& M) {
  return M(0, 0) * (M(1, 1) * M(2, 2) - M(1, 2) * M(2, 1)) -
         M(0, 1) * (M(1, 0) * M(2, 2) - M(1, 2) * M(2, 0)) +
         M(0, 2) * (M(1, 0) * M(2, 1) - M(1, 1) * M(2, 0));
}

// Roots of det(A - lambda B) for a symmetric definite 3x3 pencil, computed
// from the cubic's coefficients with the trigonometric formula. Shares no
// code with the solver under test.
std::vector<double> pencil_roots_3x3(const Eigen::Matrix3d& A, const Eigen::Matrix3d& B) {
  auto p = [&](double lam) { return det3(Eigen::Matrix3d(A - lam * B)); };
  const double p0 = p(0.0), p1 = p(1.0), pm1 = p(-1.0), p2 = p(2.0);
  const double d = p0;
  const double b = 0.5 * (p1 + pm1) - d;
  const double a_plus_c = 0.5 * (p1 - pm1);
  const double a = (p2 - d - 4.0 * b - 2.0 * a_plus_c) / 6.0;
  const double c = a_plus_c - a;

  // Depressed cubic t^3 + pp t + qq with lambda = t - b/(3a).
  const double pp = (3.0 * a * c - b * b) / (3.0 * a * a);
  const double qq = (2.0 * b * b * b - 9.0 * a * b * c + 27.0 * a * a * d) / (27.0 * a * a * a);
  const double shift = -b / (3.0 * a);
  std::vector<double> roots;
  const double r = std::sqrt(-pp / 3.0);
  double arg = 3.0 * qq / (2.0 * pp * r);
  arg = std::clamp(arg, -1.0, 1.0);
  const double theta = std::acos(arg) / 3.0;
  for (int k = 0; k < 3; ++k)
    roots.push_back(2.0 * r * std::cos(theta - 2.0 * M_PI * k / 3.0) + shift);
  std::sort(roots.begin(), roots.end());
  return roots;
}

}  // namespace

TEST_SUITE("linsolve") {

TEST_CASE("spd_solve recovers a hand-computed solution") {
  Eigen::MatrixXd K(2, 2);
  K << 4.0, 1.0, 1.0, 3.0;
  Eigen::VectorXd b(2);
  b << 1.0, 2.0;
  const SpdSolveResult r = spd_solve(to_sparse(K), b);
  CHECK(r.x[0] == doctest::Approx(1.0 / 11.0).epsilon(1e-14));
  CHECK(r.x[1] == doctest::Approx(7.0 / 11.0).epsilon(1e-14));
  CHECK(r.relative_residual <= 1e-14);
}

TEST_CASE("spd_solve handles an assembled high-contrast operator") {
  auto [mesh, field] = testutil::synthetic_setup(3, 3, 1e6, 2);
  const DGSystem sys = assemble_dg_system(mesh, field, 4.0, 1.0);
  const SpdSolveResult r = spd_solve(sys.K, sys.b);
  CHECK(r.x.allFinite());
  CHECK(r.relative_residual < 1e-9);
  CHECK((sys.K * r.x - sys.b).norm() < 1e-9 * sys.b.norm());
}

TEST_CASE("spd_solve returns zero for a zero right-hand side") {
  Eigen::MatrixXd K(2, 2);
  K << 2.0, 0.5, 0.5, 2.0;
  const SpdSolveResult r = spd_solve(to_sparse(K), Eigen::VectorXd::Zero(2));
  CHECK(r.x.norm() == 0.0);
  CHECK(r.relative_residual == 0.0);
}

TEST_CASE("spd_solve rejects operators that are not positive definite") {
  Eigen::MatrixXd indef(2, 2);
  indef << 1.0, 0.0, 0.0, -1.0;
  Eigen::VectorXd b(2);
  b << 1.0, 1.0;
  CHECK_THROWS_AS(spd_solve(to_sparse(indef), b), IndefiniteSystemError);

  Eigen::MatrixXd sing(2, 2);
  sing << 1.0, 1.0, 1.0, 1.0;
  CHECK_THROWS_AS(spd_solve(to_sparse(sing), b), IndefiniteSystemError);

  CHECK_THROWS_AS(spd_solve(to_sparse(indef), Eigen::VectorXd::Zero(3)), std::invalid_argument);
}

TEST_CASE("generalized eigenvalues match the characteristic polynomial") {
  Eigen::Matrix3d A, B;
  A << 2.0, 1.0, 0.0,
       1.0, 3.0, 1.0,
       0.0, 1.0, 4.0;
  B = Eigen::Vector3d(1.0, 2.0, 3.0).asDiagonal();
  const EigenPairs ep = generalized_eig(A, B);
  const std::vector<double> oracle = pencil_roots_3x3(A, B);
  REQUIRE(ep.values.size() == 3);
  for (int k = 0; k < 3; ++k)
    CHECK(ep.values[k] == doctest::Approx(oracle[k]).epsilon(1e-8));
  // Ascending order, unit B-norm columns, small defect per pair.
  CHECK(ep.values[0] <= ep.values[1]);
  CHECK(ep.values[1] <= ep.values[2]);
  for (int k = 0; k < 3; ++k) {
    const Eigen::Vector3d v = ep.vectors.col(k);
    CHECK((A * v - ep.values[k] * (B * v)).norm() < 1e-10);
    CHECK(v.dot(B * v) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("a second pencil cross-checks the oracle itself") {
  Eigen::Matrix3d A, B;
  A << 5.0, -1.0, 0.5,
      -1.0, 2.0, 0.0,
       0.5, 0.0, 1.0;
  B << 2.0, 0.3, 0.0,
       0.3, 1.0, 0.1,
       0.0, 0.1, 0.5;
  const EigenPairs ep = generalized_eig(A, B);
  const std::vector<double> oracle = pencil_roots_3x3(A, B);
  for (int k = 0; k < 3; ++k)
    CHECK(ep.values[k] == doctest::Approx(oracle[k]).epsilon(1e-8));
}

TEST_CASE("eigenpairs satisfy the Rayleigh identity on a random pencil") {
  const int n = 12;
  Eigen::MatrixXd R(n, n), Q(n, n);
  for (int j = 0; j < n; ++j) {
    R.col(j) = testutil::random_vec(n, 10 + static_cast<unsigned>(j));
    Q.col(j) = testutil::random_vec(n, 200 + static_cast<unsigned>(j));
  }
  const Eigen::MatrixXd A = R.transpose() * R + Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd B = Q.transpose() * Q + Eigen::MatrixXd::Identity(n, n);
  const EigenPairs ep = generalized_eig(A, B);
  for (int k = 0; k < n; ++k) {
    const Eigen::VectorXd v = ep.vectors.col(k);
    const double rayleigh = v.dot(A * v) / v.dot(B * v);
    CHECK(ep.values[k] == doctest::Approx(rayleigh).epsilon(1e-10));
  }
  // B-orthonormal across all pairs.
  const Eigen::MatrixXd gram = ep.vectors.transpose() * B * ep.vectors;
  CHECK((gram - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("generalized_eig rejects invalid mass matrices") {
  Eigen::Matrix3d A = Eigen::Matrix3d::Identity();
  Eigen::Matrix3d Bneg = -Eigen::Matrix3d::Identity();
  CHECK_THROWS_AS(generalized_eig(A, Bneg), IndefiniteSystemError);
  Eigen::MatrixXd small = Eigen::MatrixXd::Identity(2, 2);
  CHECK_THROWS_AS(generalized_eig(A, small), std::invalid_argument);
}

}  // TEST_SUITE
