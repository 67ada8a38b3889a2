#pragma once

#include <Eigen/Dense>

#include "msdg/mesh.hpp"

namespace msdg {

// Coefficients of a function in the broken P1 space: one dense segment of
// length (m+1)^2 per block, blocks in mesh order. A node shared geometrically
// by several blocks has one entry per block.
class BrokenVector {
 public:
  BrokenVector() = default;
  BrokenVector(int block_count, int block_dim)
      : block_dim_(block_dim), data_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(block_count) * block_dim)) {}
  explicit BrokenVector(const PartitionedMesh& mesh) : BrokenVector(mesh.block_count(), mesh.block_dim()) {}
  BrokenVector(const PartitionedMesh& mesh, Eigen::VectorXd flat)
      : block_dim_(mesh.block_dim()), data_(std::move(flat)) {
    if (data_.size() != mesh.total_dim())
      throw std::invalid_argument("BrokenVector: size does not match mesh");
  }

  int block_count() const { return block_dim_ ? static_cast<int>(data_.size()) / block_dim_ : 0; }
  int block_dim() const { return block_dim_; }

  Eigen::VectorXd& flat() { return data_; }
  const Eigen::VectorXd& flat() const { return data_; }

  auto block(int i) { return data_.segment(static_cast<Eigen::Index>(i) * block_dim_, block_dim_); }
  auto block(int i) const { return data_.segment(static_cast<Eigen::Index>(i) * block_dim_, block_dim_); }

 private:
  int block_dim_ = 0;
  Eigen::VectorXd data_;
};

// Nodal sampling of a smooth function into the broken space.
template <typename F>
BrokenVector sample_broken(const PartitionedMesh& mesh, F&& f) {
  BrokenVector v(mesh);
  for (int b = 0; b < mesh.block_count(); ++b) {
    auto seg = v.block(b);
    const auto& verts = mesh.blocks[b].vertices;
    for (int k = 0; k < mesh.block_dim(); ++k) seg[k] = f(verts[k].x, verts[k].y);
  }
  return v;
}

}  // namespace msdg
