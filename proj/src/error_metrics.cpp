#include "msdg/error_metrics.hpp"

#include <limits>
#include <stdexcept>

namespace msdg {

ErrorMetrics::ErrorMetrics(const PartitionedMesh& mesh, const CoefficientField& field)
    : A_(assemble_energy(mesh, field)),
      P1_(assemble_penalty(mesh, field, EdgeScaling::fine(1.0))) {}

double ErrorMetrics::broken_norm_sq(const Eigen::VectorXd& v) const {
  return quad_form(A_, v) + quad_form(P1_, v);
}

ErrorReport ErrorMetrics::report(const SparseMat& K, const BrokenVector& u_ref,
                                 const BrokenVector& u_H, double lambda_min) const {
  if (u_ref.flat().size() != u_H.flat().size() || u_ref.flat().size() != A_.rows())
    throw std::invalid_argument("error report: vector sizes do not match the mesh");
  const Eigen::VectorXd e = u_ref.flat() - u_H.flat();
  ErrorReport r;
  r.interior = quad_form(A_, e);
  r.interface = quad_form(P1_, e);
  r.total = r.interior + r.interface;
  r.energy = quad_form(K, e);
  r.lambda_min = lambda_min;
  r.ref_norm_sq = broken_norm_sq(u_ref.flat());
  if (r.ref_norm_sq > 0.0)
    r.relative = r.total / r.ref_norm_sq;
  else
    r.relative = r.total > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  return r;
}

}  // namespace msdg
