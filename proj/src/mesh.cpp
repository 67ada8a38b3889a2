#include "msdg/mesh.hpp"

#include <cmath>
#include <stdexcept>

#include "msdg/coefficient.hpp"

namespace msdg {

Vec2 outward_normal(Side side) {
  switch (side) {
    case Side::kSouth: return {0.0, -1.0};
    case Side::kEast: return {1.0, 0.0};
    case Side::kNorth: return {0.0, 1.0};
    case Side::kWest: return {-1.0, 0.0};
  }
  return {0.0, 0.0};
}

Side opposite(Side side) {
  switch (side) {
    case Side::kSouth: return Side::kNorth;
    case Side::kEast: return Side::kWest;
    case Side::kNorth: return Side::kSouth;
    case Side::kWest: return Side::kEast;
  }
  return Side::kSouth;
}

namespace {

SubdomainMesh build_block(int index, int bx, int by, int m, double H) {
  SubdomainMesh b;
  b.index = index;
  b.bx = bx;
  b.by = by;
  b.x0 = bx * H;
  b.y0 = by * H;
  b.fe_dim = (m + 1) * (m + 1);

  const double h = H / m;
  b.vertices.reserve(b.fe_dim);
  for (int iy = 0; iy <= m; ++iy)
    for (int ix = 0; ix <= m; ++ix)
      b.vertices.push_back({b.x0 + ix * h, b.y0 + iy * h});

  b.triangles.reserve(2 * m * m);
  auto node = [m](int ix, int iy) { return iy * (m + 1) + ix; };
  for (int cy = 0; cy < m; ++cy) {
    for (int cx = 0; cx < m; ++cx) {
      Triangle lower;
      lower.v = {node(cx, cy), node(cx + 1, cy), node(cx + 1, cy + 1)};
      lower.cell_x = cx;
      lower.cell_y = cy;
      Triangle upper;
      upper.v = {node(cx, cy), node(cx + 1, cy + 1), node(cx, cy + 1)};
      upper.cell_x = cx;
      upper.cell_y = cy;
      b.triangles.push_back(lower);
      b.triangles.push_back(upper);
    }
  }

  for (int iy = 0; iy <= m; ++iy)
    for (int ix = 0; ix <= m; ++ix)
      if (ix == 0 || ix == m || iy == 0 || iy == m)
        b.boundary_nodes.push_back(node(ix, iy));

  return b;
}

// Builds the m fine segments of one coarse edge, seen from the owner block.
// Both sides are structured the same way, so neighbor data follows from the
// owner's side by mirroring the touched lattice line.
std::vector<InterfaceSegment> build_segments(const PartitionedMesh& mesh, int own, Side side, int nbr) {
  const int m = mesh.m;
  const double h = mesh.h;
  const SubdomainMesh& b = mesh.blocks[own];
  auto node = [m](int ix, int iy) { return iy * (m + 1) + ix; };
  auto lower_tri = [m](int cx, int cy) { return 2 * (cy * m + cx); };
  auto upper_tri = [m](int cx, int cy) { return 2 * (cy * m + cx) + 1; };

  std::vector<InterfaceSegment> segs(m);
  for (int k = 0; k < m; ++k) {
    InterfaceSegment& s = segs[k];
    s.length = h;
    switch (side) {
      case Side::kSouth:
        s.a = {b.x0 + k * h, b.y0};
        s.b = {b.x0 + (k + 1) * h, b.y0};
        s.tri_own = lower_tri(k, 0);
        s.node_own = {node(k, 0), node(k + 1, 0)};
        if (nbr != kBoundary) {
          s.tri_nbr = upper_tri(k, m - 1);
          s.node_nbr = {node(k, m), node(k + 1, m)};
        }
        break;
      case Side::kEast:
        s.a = {b.x0 + m * h, b.y0 + k * h};
        s.b = {b.x0 + m * h, b.y0 + (k + 1) * h};
        s.tri_own = lower_tri(m - 1, k);
        s.node_own = {node(m, k), node(m, k + 1)};
        if (nbr != kBoundary) {
          s.tri_nbr = upper_tri(0, k);
          s.node_nbr = {node(0, k), node(0, k + 1)};
        }
        break;
      case Side::kNorth:
        s.a = {b.x0 + k * h, b.y0 + m * h};
        s.b = {b.x0 + (k + 1) * h, b.y0 + m * h};
        s.tri_own = upper_tri(k, m - 1);
        s.node_own = {node(k, m), node(k + 1, m)};
        if (nbr != kBoundary) {
          s.tri_nbr = lower_tri(k, 0);
          s.node_nbr = {node(k, 0), node(k + 1, 0)};
        }
        break;
      case Side::kWest:
        s.a = {b.x0, b.y0 + k * h};
        s.b = {b.x0, b.y0 + (k + 1) * h};
        s.tri_own = upper_tri(0, k);
        s.node_own = {node(0, k), node(0, k + 1)};
        if (nbr != kBoundary) {
          s.tri_nbr = lower_tri(m - 1, k);
          s.node_nbr = {node(m, k), node(m, k + 1)};
        }
        break;
    }
  }
  return segs;
}

}  // namespace

PartitionedMesh build_partition(int M, int m) {
  if (M < 1 || m < 1) throw std::invalid_argument("build_partition: M and m must be >= 1");

  PartitionedMesh mesh;
  mesh.M = M;
  mesh.m = m;
  mesh.H = 1.0 / M;
  mesh.h = mesh.H / m;

  mesh.blocks.reserve(M * M);
  for (int by = 0; by < M; ++by)
    for (int bx = 0; bx < M; ++bx)
      mesh.blocks.push_back(build_block(by * M + bx, bx, by, m, mesh.H));

  // Row-major block sweep, south/east/north/west per block; an interior edge
  // is recorded the first time it is reached, so its owner has the smaller
  // block index.
  for (int by = 0; by < M; ++by) {
    for (int bx = 0; bx < M; ++bx) {
      const int i = mesh.block_index(bx, by);
      const std::array<std::pair<Side, int>, 4> sides = {{
          {Side::kSouth, by > 0 ? i - M : kBoundary},
          {Side::kEast, bx < M - 1 ? i + 1 : kBoundary},
          {Side::kNorth, by < M - 1 ? i + M : kBoundary},
          {Side::kWest, bx > 0 ? i - 1 : kBoundary},
      }};
      for (const auto& [side, nbr] : sides) {
        if (nbr != kBoundary && nbr < i) continue;  // already recorded by the neighbor
        InterfaceEdge e;
        e.block_own = i;
        e.block_nbr = nbr;
        e.side_own = side;
        e.jump_weight = nbr == kBoundary ? 1 : 2;
        e.segments = build_segments(mesh, i, side, nbr);
        mesh.interfaces.push_back(std::move(e));
      }
    }
  }

  for (const InterfaceEdge& e : mesh.interfaces) {
    mesh.blocks[e.block_own].coarse_edge_count++;
    if (!e.boundary()) mesh.blocks[e.block_nbr].coarse_edge_count++;
  }
  return mesh;
}

void interface_weights(PartitionedMesh& mesh, const CoefficientField& field) {
  for (InterfaceEdge& e : mesh.interfaces) {
    for (InterfaceSegment& s : e.segments) {
      s.kappa_own = field.value(mesh, e.block_own, s.tri_own);
      if (s.kappa_own <= 0.0) throw std::invalid_argument("interface_weights: nonpositive kappa");
      if (e.boundary()) {
        s.kappa_nbr = 0.0;
        s.kappa_avg = s.kappa_own;  // own-side value on the boundary
        s.h_avg = mesh.h;
      } else {
        s.kappa_nbr = field.value(mesh, e.block_nbr, s.tri_nbr);
        if (s.kappa_nbr <= 0.0) throw std::invalid_argument("interface_weights: nonpositive kappa");
        s.kappa_avg = 2.0 * s.kappa_own * s.kappa_nbr / (s.kappa_own + s.kappa_nbr);
        s.h_avg = mesh.h;  // matching grids: 2 h h / (h + h)
      }
    }
  }
  mesh.weights_ready = true;
}

}  // namespace msdg
