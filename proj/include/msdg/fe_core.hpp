#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>

#include "msdg/broken_vector.hpp"
#include "msdg/coefficient.hpp"
#include "msdg/mesh.hpp"

namespace msdg {

using SparseMat = Eigen::SparseMatrix<double>;

// Weight applied to the jump penalty on a fine interface segment. The system
// operator uses delta / h_avg; the penalty study replaces it by a constant
// coefficient, and the interface error norm uses 1 / h_avg.
class EdgeScaling {
 public:
  static EdgeScaling fine(double delta) { return EdgeScaling{delta, false}; }
  static EdgeScaling constant(double value) { return EdgeScaling{value, true}; }

  double operator()(const InterfaceSegment& s) const { return constant_ ? value_ : value_ / s.h_avg; }
  bool is_constant() const { return constant_; }
  double parameter() const { return value_; }

 private:
  EdgeScaling(double value, bool constant) : value_(value), constant_(constant) {}
  double value_;
  bool constant_;
};

// All matrices are over the broken space (block offsets from the mesh) and
// symmetric. Per-block matrices are the diagonal blocks; dense_block extracts
// one of them.

// Weighted stiffness, block-diagonal: sum_i of integrals kappa grad u . grad v
// over the block. Annihilates per-block constants.
SparseMat assemble_energy(const PartitionedMesh& mesh, const CoefficientField& field);

// Weighted mass, block-diagonal: sum_i of integrals kappa u v.
SparseMat assemble_mass(const PartitionedMesh& mesh, const CoefficientField& field);

// Symmetric interface flux coupling. Per owner side of each edge, with l the
// edge multiplicity (2 interior, 1 boundary) and n the owner's outward normal:
//   (1/l) * integral over the edge of
//     kappa_avg * (dn u_own (v_nbr - v_own) + dn v_own (u_nbr - u_own)),
// with the neighbor trace taken as zero on the domain boundary.
SparseMat assemble_consistency(const PartitionedMesh& mesh, const CoefficientField& field);

// Jump penalty with the given per-segment scaling sigma:
//   (1/l) * sigma(s) * integral of kappa_avg (u_nbr - u_own)(v_nbr - v_own).
// Throws if the scaling is not positive on some segment.
SparseMat assemble_penalty(const PartitionedMesh& mesh, const CoefficientField& field,
                           const EdgeScaling& scaling);

// Block-diagonal boundary mass on block-edge traces:
//   (1/l) * (delta / h_avg) * integral over each edge of kappa_avg u_own v_own.
SparseMat assemble_boundary_mass(const PartitionedMesh& mesh, const CoefficientField& field,
                                 double delta);

// Right-hand side for a volume load f, integrated per triangle with the
// edge-midpoint rule (exact through quadratic integrands).
Eigen::VectorXd assemble_load(const PartitionedMesh& mesh, const std::function<double(double, double)>& f);
Eigen::VectorXd assemble_load(const PartitionedMesh& mesh, double constant);

// Assembled discrete operator K = A + S + P at penalty weight delta / h_avg,
// plus the pieces the spectral constructions need.
struct DGSystem {
  SparseMat A;       // energy
  SparseMat S;       // interface flux coupling
  SparseMat P;       // jump penalty at delta / h_avg
  SparseMat M;       // weighted mass
  SparseMat Mdelta;  // boundary mass at delta / h_avg
  SparseMat K;       // A + S + P
  Eigen::VectorXd b;
  double delta = 0.0;
};

DGSystem assemble_dg_system(const PartitionedMesh& mesh, const CoefficientField& field, double delta,
                            const std::function<double(double, double)>& f);
DGSystem assemble_dg_system(const PartitionedMesh& mesh, const CoefficientField& field, double delta,
                            double constant_load);

Eigen::MatrixXd dense_block(const SparseMat& G, const PartitionedMesh& mesh, int block);

inline double quad_form(const SparseMat& G, const Eigen::VectorXd& v) { return v.dot(G * v); }

}  // namespace msdg
