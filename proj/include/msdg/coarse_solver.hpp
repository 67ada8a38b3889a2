#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "msdg/broken_vector.hpp"
#include "msdg/coefficient.hpp"
#include "msdg/fe_core.hpp"
#include "msdg/mesh.hpp"
#include "msdg/spectral_spaces.hpp"

namespace msdg {

// Galerkin solution on a coarse space, kept both as coarse coefficients and
// as its fine-grid representation u_H = R c.
struct CoarseSolution {
  Eigen::VectorXd coarse;
  BrokenVector u_H;
  CoarseMethod method = CoarseMethod::kWeighted;
  double penalty_scaling = 0.0;   // constant jump scaling of the coarse operator
  double relative_residual = 0.0; // of the coarse linear system
  int dim = 0;
};

// Block-diagonal restriction: column group i holds the basis of block i as
// fine coefficient vectors. Size total_dim x space.total_dim().
SparseMat block_restriction(const PartitionedMesh& mesh, const CoarseSpace& space);

// Solve (R^T K R) c = R^T b for an arbitrary symmetric positive definite
// operator K. penalty_scaling_tag is recorded on the result only.
CoarseSolution coarse_solve_operator(const SparseMat& K, const Eigen::VectorXd& b,
                                     const PartitionedMesh& mesh, const CoarseSpace& space,
                                     double penalty_scaling_tag);

// Coarse Galerkin solve of the assembled system. When penalty_scaling is
// given, the jump-penalty part of the coarse operator is reassembled with
// that constant scaling; the fine reference operator is untouched.
CoarseSolution coarse_solve(const DGSystem& system, const PartitionedMesh& mesh,
                            const CoefficientField& field, const CoarseSpace& space,
                            std::optional<double> penalty_scaling = std::nullopt);

// Galerkin solution in the full snapshot span, the natural reference for the
// snapshot-reduced coarse spaces.
BrokenVector snapshot_reference(const DGSystem& system, const PartitionedMesh& mesh,
                                const SnapshotSpace& snapshots);

// Blockwise projection of u onto the retained modes in the inner product that
// made the eigenvectors orthonormal (mass + boundary mass at the given delta).
// Requires an amended-mass space.
BrokenVector spectral_interpolant(const PartitionedMesh& mesh, const CoefficientField& field,
                                  const CoarseSpace& space, const BrokenVector& u, double delta);

// Expansion of u in the full per-block eigenbasis: coefficients, eigenvalues,
// per-block energy sums and the tail over the modes left out of the space.
struct EnergyExpansion {
  std::vector<Eigen::VectorXd> coefficients;
  std::vector<Eigen::VectorXd> values;
  std::vector<double> block_energy; // sum of lambda * c^2 over all modes
  double tail = 0.0;                // sum of lambda * c^2 over left-out modes
};

EnergyExpansion energy_expansion(const PartitionedMesh& mesh, const CoefficientField& field,
                                 const CoarseSpace& space, const BrokenVector& u, double delta);

}  // namespace msdg
