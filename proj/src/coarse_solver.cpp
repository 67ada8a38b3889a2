#include "msdg/coarse_solver.hpp"

#include <stdexcept>
#include <vector>

#include "msdg/linsolve.hpp"

namespace msdg {

namespace {

SparseMat stack_blocks(const PartitionedMesh& mesh, const std::vector<Eigen::MatrixXd>& blocks) {
  const int n = mesh.total_dim();
  int dim = 0;
  for (const auto& b : blocks) dim += static_cast<int>(b.cols());

  std::vector<Eigen::Triplet<double>> trips;
  std::size_t nnz = 0;
  for (const auto& b : blocks) nnz += static_cast<std::size_t>(b.size());
  trips.reserve(nnz);

  int col0 = 0;
  for (int i = 0; i < static_cast<int>(blocks.size()); ++i) {
    const Eigen::MatrixXd& b = blocks[i];
    const int row0 = mesh.block_offset(i);
    for (int c = 0; c < b.cols(); ++c)
      for (int r = 0; r < b.rows(); ++r)
        if (b(r, c) != 0.0) trips.emplace_back(row0 + r, col0 + c, b(r, c));
    col0 += static_cast<int>(b.cols());
  }
  SparseMat R(n, dim);
  R.setFromTriplets(trips.begin(), trips.end());
  return R;
}

BrokenVector galerkin_solve(const SparseMat& K, const Eigen::VectorXd& b, const SparseMat& R,
                            const PartitionedMesh& mesh, Eigen::VectorXd* coarse_out,
                            double* resid_out) {
  SparseMat Kc = (R.transpose() * (K * R).eval()).pruned();
  Kc.makeCompressed();
  const Eigen::VectorXd bc = R.transpose() * b;
  SpdSolveResult sol = spd_solve(Kc, bc);
  if (coarse_out) *coarse_out = sol.x;
  if (resid_out) *resid_out = sol.relative_residual;
  return BrokenVector(mesh, R * sol.x);
}

}  // namespace

SparseMat block_restriction(const PartitionedMesh& mesh, const CoarseSpace& space) {
  if (static_cast<int>(space.basis.size()) != mesh.block_count())
    throw std::invalid_argument("block_restriction: space does not match the mesh");
  for (int i = 0; i < mesh.block_count(); ++i)
    if (space.basis[i].rows() != mesh.block_dim())
      throw std::invalid_argument("block_restriction: basis rows do not match the block dimension");
  return stack_blocks(mesh, space.basis);
}

CoarseSolution coarse_solve_operator(const SparseMat& K, const Eigen::VectorXd& b,
                                     const PartitionedMesh& mesh, const CoarseSpace& space,
                                     double penalty_scaling_tag) {
  const SparseMat R = block_restriction(mesh, space);
  CoarseSolution out;
  out.method = space.method;
  out.penalty_scaling = penalty_scaling_tag;
  out.dim = static_cast<int>(R.cols());
  out.u_H = galerkin_solve(K, b, R, mesh, &out.coarse, &out.relative_residual);
  return out;
}

CoarseSolution coarse_solve(const DGSystem& system, const PartitionedMesh& mesh,
                            const CoefficientField& field, const CoarseSpace& space,
                            std::optional<double> penalty_scaling) {
  if (!penalty_scaling)
    return coarse_solve_operator(system.K, system.b, mesh, space,
                                 system.delta * mesh.M * mesh.m);
  const SparseMat P = assemble_penalty(mesh, field, EdgeScaling::constant(*penalty_scaling));
  SparseMat K = system.A + system.S + P;
  K.makeCompressed();
  return coarse_solve_operator(K, system.b, mesh, space, *penalty_scaling);
}

BrokenVector snapshot_reference(const DGSystem& system, const PartitionedMesh& mesh,
                                const SnapshotSpace& snapshots) {
  const SparseMat R = stack_blocks(mesh, snapshots.basis);
  return galerkin_solve(system.K, system.b, R, mesh, nullptr, nullptr);
}

BrokenVector spectral_interpolant(const PartitionedMesh& mesh, const CoefficientField& field,
                                  const CoarseSpace& space, const BrokenVector& u, double delta) {
  if (space.method != CoarseMethod::kAmended)
    throw std::invalid_argument("spectral_interpolant: needs an amended-mass coarse space");
  const SparseMat B =
      assemble_mass(mesh, field) + assemble_boundary_mass(mesh, field, delta);
  BrokenVector out(mesh);
  for (int i = 0; i < mesh.block_count(); ++i) {
    const Eigen::MatrixXd Bi = dense_block(B, mesh, i);
    const Eigen::VectorXd c = space.basis[i].transpose() * (Bi * u.block(i));
    out.block(i) = space.basis[i] * c;
  }
  return out;
}

EnergyExpansion energy_expansion(const PartitionedMesh& mesh, const CoefficientField& field,
                                 const CoarseSpace& space, const BrokenVector& u, double delta) {
  if (space.method != CoarseMethod::kAmended)
    throw std::invalid_argument("energy_expansion: needs an amended-mass coarse space");
  if (space.full.empty())
    throw std::logic_error("energy_expansion: needs the full per-block decomposition");
  const SparseMat B =
      assemble_mass(mesh, field) + assemble_boundary_mass(mesh, field, delta);

  EnergyExpansion ex;
  const int blocks = mesh.block_count();
  ex.coefficients.resize(blocks);
  ex.values.resize(blocks);
  ex.block_energy.assign(blocks, 0.0);
  for (int i = 0; i < blocks; ++i) {
    const Eigen::MatrixXd Bi = dense_block(B, mesh, i);
    const Eigen::VectorXd c = space.full[i].vectors.transpose() * (Bi * u.block(i));
    const Eigen::VectorXd& lam = space.full[i].values;
    ex.coefficients[i] = c;
    ex.values[i] = lam;
    ex.block_energy[i] = (lam.array() * c.array().square()).sum();
    for (int l = space.total_counts[i]; l < lam.size(); ++l) ex.tail += lam[l] * c[l] * c[l];
  }
  return ex;
}

}  // namespace msdg
