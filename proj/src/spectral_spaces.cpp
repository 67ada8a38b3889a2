#include "msdg/spectral_spaces.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "msdg/linsolve.hpp"
#include "msdg/parallel.hpp"

namespace msdg {

std::string method_name(CoarseMethod method) {
  switch (method) {
    case CoarseMethod::kWeighted: return "I";
    case CoarseMethod::kAmended: return "II";
    case CoarseMethod::kSnapshot: return "III";
    case CoarseMethod::kSnapshotMass: return "III-m";
  }
  return "?";
}

CoarseMethod parse_method(const std::string& name) {
  if (name == "I") return CoarseMethod::kWeighted;
  if (name == "II") return CoarseMethod::kAmended;
  if (name == "III") return CoarseMethod::kSnapshot;
  if (name == "III-m") return CoarseMethod::kSnapshotMass;
  throw std::invalid_argument("unknown method '" + name + "' (expected I, II, III or III-m)");
}

std::string snapshot_mass_name(SnapshotMass mass) {
  switch (mass) {
    case SnapshotMass::kBoundary: return "boundary";
    case SnapshotMass::kInteriorPlusBoundary: return "mass+boundary";
    case SnapshotMass::kInterior: return "mass";
  }
  return "?";
}

SnapshotMass parse_snapshot_mass(const std::string& name) {
  if (name == "boundary") return SnapshotMass::kBoundary;
  if (name == "mass+boundary") return SnapshotMass::kInteriorPlusBoundary;
  if (name == "mass") return SnapshotMass::kInterior;
  throw std::invalid_argument("unknown snapshot mass '" + name +
                              "' (expected boundary, mass+boundary or mass)");
}

int count_small_eigenvalues(const Eigen::VectorXd& v) {
  const int n = static_cast<int>(v.size());
  if (n <= 1) return 1;
  constexpr double eps = 1e-14;
  int best = 1;
  double best_ratio = -std::numeric_limits<double>::infinity();
  const int last = std::min(10, n - 1);
  for (int l = 1; l <= last; ++l) {
    const double ratio = v[l] / std::max(v[l - 1], eps);
    if (ratio > best_ratio) {
      best_ratio = ratio;
      best = l;
    }
  }
  return best;
}

int CoarseSpace::total_dim() const {
  int d = 0;
  for (int c : total_counts) d += c;
  return d;
}

namespace {

// Shared assembly of a coarse space from per-block pencils. pencil(i) returns
// the (A, B) pair for block i (in snapshot coordinates for the reduced
// variants); to_fine maps eigenvector columns to fine P1 coefficients.
template <typename Pencil, typename ToFine>
CoarseSpace build_space(CoarseMethod method, int block_count, Pencil&& pencil, ToFine&& to_fine,
                        const ModeCounts& counts, int threads) {
  if (!counts.l_add_per_block.empty() &&
      static_cast<int>(counts.l_add_per_block.size()) != block_count)
    throw std::invalid_argument("ModeCounts: per-block l_add list does not match block count");
  if (!counts.l_small_override.empty() &&
      static_cast<int>(counts.l_small_override.size()) != block_count)
    throw std::invalid_argument("ModeCounts: l_small override does not match block count");

  CoarseSpace space;
  space.method = method;
  space.full.resize(block_count);
  parallel_for(block_count, threads, [&](int i) {
    auto [A, B] = pencil(i);
    EigenPairs ep = generalized_eig(A, B);
    // Eigenvalues within solver roundoff of zero are reported as exact zeros.
    const double lmax = std::max(ep.values.cwiseAbs().maxCoeff(), 1e-300);
    for (Eigen::Index k = 0; k < ep.values.size(); ++k)
      if (std::abs(ep.values[k]) < 1e-12 * lmax) ep.values[k] = 0.0;
    space.full[i].values = std::move(ep.values);
    space.full[i].vectors = to_fine(i, ep.vectors);
  });

  space.small_counts.resize(block_count);
  space.total_counts.resize(block_count);
  space.basis.resize(block_count);
  space.retained_values.resize(block_count);
  space.lambda_min_left_out = std::numeric_limits<double>::infinity();
  for (int i = 0; i < block_count; ++i) {
    const Eigen::VectorXd& values = space.full[i].values;
    const int modes = static_cast<int>(values.size());
    const int l_small = counts.l_small_override.empty() ? count_small_eigenvalues(values)
                                                        : counts.l_small_override[i];
    const int l_add = counts.l_add_per_block.empty() ? counts.l_add : counts.l_add_per_block[i];
    if (l_small < 1 || l_add < 0)
      throw std::invalid_argument("ModeCounts: l_small must be >= 1 and l_add >= 0");
    const int l_total = l_small + l_add;
    if (l_total > modes)
      throw std::invalid_argument("ModeCounts: retained modes exceed the block space dimension");
    space.small_counts[i] = l_small;
    space.total_counts[i] = l_total;
    space.basis[i] = space.full[i].vectors.leftCols(l_total);
    space.retained_values[i] = values.head(l_total);
    if (l_total < modes)
      space.lambda_min_left_out = std::min(space.lambda_min_left_out, values[l_total]);
  }
  return space;
}

Eigen::MatrixXd identity_to_fine(int, const Eigen::MatrixXd& vectors) { return vectors; }

}  // namespace

CoarseSpace CoarseSpace::truncated(int l_add) const {
  if (full.empty()) throw std::logic_error("CoarseSpace::truncated needs the full decomposition");
  const int blocks = static_cast<int>(full.size());
  CoarseSpace out;
  out.method = method;
  out.full = full;
  out.small_counts = small_counts;
  out.total_counts.resize(blocks);
  out.basis.resize(blocks);
  out.retained_values.resize(blocks);
  out.lambda_min_left_out = std::numeric_limits<double>::infinity();
  for (int i = 0; i < blocks; ++i) {
    const int modes = static_cast<int>(full[i].values.size());
    const int l_total = small_counts[i] + l_add;
    if (l_add < 0 || l_total > modes)
      throw std::invalid_argument("CoarseSpace::truncated: retained modes exceed block dimension");
    out.total_counts[i] = l_total;
    out.basis[i] = full[i].vectors.leftCols(l_total);
    out.retained_values[i] = full[i].values.head(l_total);
    if (l_total < modes)
      out.lambda_min_left_out = std::min(out.lambda_min_left_out, full[i].values[l_total]);
  }
  return out;
}

CoarseSpace method_I_space(const PartitionedMesh& mesh, const CoefficientField& field,
                           const ModeCounts& counts, int threads) {
  const SparseMat A = assemble_energy(mesh, field);
  const SparseMat M = assemble_mass(mesh, field);
  return build_space(
      CoarseMethod::kWeighted, mesh.block_count(),
      [&](int i) { return std::make_pair(dense_block(A, mesh, i), dense_block(M, mesh, i)); },
      identity_to_fine, counts, threads);
}

CoarseSpace method_II_space(const PartitionedMesh& mesh, const CoefficientField& field,
                            double delta, const ModeCounts& counts, int threads) {
  const SparseMat A = assemble_energy(mesh, field);
  const SparseMat B = assemble_mass(mesh, field) + assemble_boundary_mass(mesh, field, delta);
  return build_space(
      CoarseMethod::kAmended, mesh.block_count(),
      [&](int i) { return std::make_pair(dense_block(A, mesh, i), dense_block(B, mesh, i)); },
      identity_to_fine, counts, threads);
}

SnapshotSpace harmonic_snapshots(const PartitionedMesh& mesh, const CoefficientField& field,
                                 double delta, int threads) {
  const SparseMat A = assemble_energy(mesh, field);
  const SparseMat M = assemble_mass(mesh, field);
  const SparseMat Md = assemble_boundary_mass(mesh, field, delta);

  SnapshotSpace snap;
  snap.delta = delta;
  const int blocks = mesh.block_count();
  snap.basis.resize(blocks);
  snap.energy_gram.resize(blocks);
  snap.boundary_gram.resize(blocks);
  snap.mass_gram.resize(blocks);

  parallel_for(blocks, threads, [&](int i) {
    const SubdomainMesh& b = mesh.blocks[i];
    const Eigen::MatrixXd Ai = dense_block(A, mesh, i);
    const int n = b.fe_dim;
    const std::vector<int>& bnodes = b.boundary_nodes;
    const int nb = static_cast<int>(bnodes.size());

    std::vector<int> interior;
    interior.reserve(n - nb);
    {
      std::vector<char> is_bnd(n, 0);
      for (int k : bnodes) is_bnd[k] = 1;
      for (int k = 0; k < n; ++k)
        if (!is_bnd[k]) interior.push_back(k);
    }
    const int ni = static_cast<int>(interior.size());

    // Columns: boundary-node indicators, extended harmonically inside.
    Eigen::MatrixXd Phi = Eigen::MatrixXd::Zero(n, nb);
    for (int c = 0; c < nb; ++c) Phi(bnodes[c], c) = 1.0;

    if (ni > 0) {
      Eigen::MatrixXd Aii(ni, ni);
      Eigen::MatrixXd Aib(ni, nb);
      for (int r = 0; r < ni; ++r) {
        for (int c = 0; c < ni; ++c) Aii(r, c) = Ai(interior[r], interior[c]);
        for (int c = 0; c < nb; ++c) Aib(r, c) = Ai(interior[r], bnodes[c]);
      }
      // Diagonal equilibration keeps the Cholesky factor accurate at high
      // contrast; one refinement step recovers the rest.
      Eigen::VectorXd d = Aii.diagonal().cwiseSqrt();
      Eigen::VectorXd dinv = d.cwiseInverse();
      Eigen::MatrixXd As = dinv.asDiagonal() * Aii * dinv.asDiagonal();
      Eigen::LLT<Eigen::MatrixXd> llt(As);
      if (llt.info() != Eigen::Success)
        throw IndefiniteSystemError("snapshot extension: interior block is not positive definite");
      Eigen::MatrixXd Rhs = -(Aib);
      Eigen::MatrixXd X = dinv.asDiagonal() *
                          llt.solve(Eigen::MatrixXd(dinv.asDiagonal() * Rhs));
      X += dinv.asDiagonal() * llt.solve(Eigen::MatrixXd(dinv.asDiagonal() * (Rhs - Aii * X)));
      for (int r = 0; r < ni; ++r) Phi.row(interior[r]) = X.row(r);
    }

    const Eigen::MatrixXd Mi = dense_block(M, mesh, i);
    const Eigen::MatrixXd Mdi = dense_block(Md, mesh, i);
    snap.energy_gram[i] = Phi.transpose() * Ai * Phi;
    snap.boundary_gram[i] = Phi.transpose() * Mdi * Phi;
    snap.mass_gram[i] = Phi.transpose() * Mi * Phi;
    snap.basis[i] = std::move(Phi);
  });
  return snap;
}

CoarseSpace method_III_space(const SnapshotSpace& snapshots, const ModeCounts& counts,
                             SnapshotMass mass, int threads) {
  const int blocks = static_cast<int>(snapshots.basis.size());
  const CoarseMethod method =
      mass == SnapshotMass::kInterior ? CoarseMethod::kSnapshotMass : CoarseMethod::kSnapshot;
  return build_space(
      method, blocks,
      [&](int i) {
        Eigen::MatrixXd B;
        switch (mass) {
          case SnapshotMass::kBoundary: B = snapshots.boundary_gram[i]; break;
          case SnapshotMass::kInteriorPlusBoundary:
            B = snapshots.mass_gram[i] + snapshots.boundary_gram[i];
            break;
          case SnapshotMass::kInterior: B = snapshots.mass_gram[i]; break;
        }
        return std::make_pair(snapshots.energy_gram[i], std::move(B));
      },
      [&](int i, const Eigen::MatrixXd& vectors) -> Eigen::MatrixXd {
        return snapshots.basis[i] * vectors;
      },
      counts, threads);
}

}  // namespace msdg
