#pragma once

#include <Eigen/Dense>

#include "msdg/broken_vector.hpp"
#include "msdg/coefficient.hpp"
#include "msdg/fe_core.hpp"
#include "msdg/mesh.hpp"

namespace msdg {

// Error decomposition between a fine reference and a coarse solution. All
// norm-like fields are squared quantities.
struct ErrorReport {
  double interior = 0.0;    // e^T A e, broken energy seminorm squared
  double interface = 0.0;   // e^T P1 e, jump term at unit delta scaling
  double total = 0.0;       // interior + interface
  double energy = 0.0;      // e^T K e, DG bilinear form of the error
  double relative = 0.0;    // total / broken norm squared of the reference
  double lambda_min = 0.0;  // smallest left-out eigenvalue of the space used
  double ref_norm_sq = 0.0; // broken norm squared of the reference
};

class ErrorMetrics {
 public:
  ErrorMetrics(const PartitionedMesh& mesh, const CoefficientField& field);

  // K is the operator whose quadratic form defines the energy column.
  ErrorReport report(const SparseMat& K, const BrokenVector& u_ref, const BrokenVector& u_H,
                     double lambda_min) const;

  // v^T (A + P1) v, the squared broken norm with unit jump scaling.
  double broken_norm_sq(const Eigen::VectorXd& v) const;

  const SparseMat& energy_matrix() const { return A_; }
  const SparseMat& jump_matrix() const { return P1_; }

 private:
  SparseMat A_;
  SparseMat P1_;
};

}  // namespace msdg
