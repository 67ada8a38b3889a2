#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "msdg/fe_core.hpp"

namespace msdg {

// The three coarse-space constructions, named I/II/III on the command line.
//   kWeighted      (I)    : stiffness against the weighted mass.
//   kAmended       (II)   : stiffness against mass plus boundary mass.
//   kSnapshot      (III)  : the same pencil reduced to the harmonic snapshot
//                           space, boundary mass only by default.
//   kSnapshotMass  (III-m): snapshot variant with the interior mass instead.
enum class CoarseMethod { kWeighted, kAmended, kSnapshot, kSnapshotMass };

std::string method_name(CoarseMethod method);      // "I", "II", "III", "III-m"
CoarseMethod parse_method(const std::string& name);

// Mass side of the snapshot pencil.
enum class SnapshotMass { kBoundary, kInteriorPlusBoundary, kInterior };

std::string snapshot_mass_name(SnapshotMass mass);
SnapshotMass parse_snapshot_mass(const std::string& name);

// Retained modes per block: the detected (or overridden) small count plus
// l_add extra modes. l_add_per_block, when nonempty, replaces the uniform
// l_add; l_small_override, when nonempty, replaces the detector.
struct ModeCounts {
  int l_add = 0;
  std::vector<int> l_add_per_block;
  std::vector<int> l_small_override;
};

// Number of leading eigenvalues that vanish with growing contrast, located by
// the largest relative gap among the first ten modes. At least 1: the zero
// mode is always counted.
int count_small_eigenvalues(const Eigen::VectorXd& ascending_values);

// One block's full eigendecomposition, vectors as fine P1 coefficients.
struct BlockEigenBasis {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

struct CoarseSpace {
  CoarseMethod method = CoarseMethod::kWeighted;
  std::vector<Eigen::MatrixXd> basis;            // retained columns per block
  std::vector<Eigen::VectorXd> retained_values;  // matching eigenvalues
  std::vector<int> small_counts;
  std::vector<int> total_counts;
  // Smallest eigenvalue left out over all blocks; +inf if every block kept
  // its whole spectrum.
  double lambda_min_left_out = 0.0;
  // Full decompositions, kept so tables can retruncate and expansions can
  // reach the tail modes.
  std::vector<BlockEigenBasis> full;

  int total_dim() const;
  CoarseSpace truncated(int l_add) const;
};

CoarseSpace method_I_space(const PartitionedMesh& mesh, const CoefficientField& field,
                           const ModeCounts& counts, int threads = 1);
CoarseSpace method_II_space(const PartitionedMesh& mesh, const CoefficientField& field,
                            double delta, const ModeCounts& counts, int threads = 1);

// Discrete harmonic snapshots: per block, one column per boundary node,
// equal to the nodal indicator on the block edge and stiffness-harmonic
// inside. Columns sum to the constant 1. The Gram matrices carry the three
// candidate mass weightings for the reduced pencil.
struct SnapshotSpace {
  std::vector<Eigen::MatrixXd> basis;          // (m+1)^2 x 4m per block
  std::vector<Eigen::MatrixXd> energy_gram;    // basis' A basis
  std::vector<Eigen::MatrixXd> boundary_gram;  // basis' Mdelta basis
  std::vector<Eigen::MatrixXd> mass_gram;      // basis' M basis
  double delta = 0.0;
};

SnapshotSpace harmonic_snapshots(const PartitionedMesh& mesh, const CoefficientField& field,
                                 double delta, int threads = 1);

CoarseSpace method_III_space(const SnapshotSpace& snapshots, const ModeCounts& counts,
                             SnapshotMass mass = SnapshotMass::kBoundary, int threads = 1);

}  // namespace msdg
