#pragma once

#include <array>
#include <vector>

namespace msdg {

class CoefficientField;

// Neighbor id for interface edges that lie on the domain boundary.
inline constexpr int kBoundary = -1;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

// One triangle of a block-local structured triangulation. Vertex indices are
// block-local and counterclockwise; (cell_x, cell_y) is the square cell the
// triangle was cut from. Every cell is split along the same diagonal
// (lower-left to upper-right), so triangle 2*(cell_y*m + cell_x) is the lower
// right half and the next index the upper left half.
struct Triangle {
  std::array<int, 3> v{};
  int cell_x = 0;
  int cell_y = 0;
};

enum class Side { kSouth = 0, kEast = 1, kNorth = 2, kWest = 3 };

Vec2 outward_normal(Side side);
Side opposite(Side side);

// One coarse block with its own conforming P1 triangulation. There is no
// continuity between blocks; the global discrete space is the product of the
// per-block spaces.
struct SubdomainMesh {
  int index = 0;
  int bx = 0;
  int by = 0;
  double x0 = 0.0;  // lower-left corner
  double y0 = 0.0;
  std::vector<Vec2> vertices;       // (m+1)^2 lattice nodes, x fastest
  std::vector<Triangle> triangles;  // 2 m^2
  std::vector<int> boundary_nodes;  // ascending local indices on the block edge
  int fe_dim = 0;                   // (m+1)^2
  int coarse_edge_count = 0;        // interface edges touching this block
};

// One fine segment of a coarse interface edge. Endpoints are stored in
// canonical order (ascending x for horizontal edges, ascending y for vertical
// ones); node_own/node_nbr are the block-local P1 nodes sitting on a and b.
// The grids match across the interface, so both sides share the segment
// partition. kappa_* and h_avg are filled in by interface_weights.
struct InterfaceSegment {
  Vec2 a, b;
  double length = 0.0;
  int tri_own = -1;  // triangle of the owner block touching the segment
  int tri_nbr = -1;  // same for the neighbor, -1 on the boundary
  std::array<int, 2> node_own{-1, -1};
  std::array<int, 2> node_nbr{-1, -1};
  double kappa_own = 0.0;
  double kappa_nbr = 0.0;
  double kappa_avg = 0.0;  // harmonic average; equals kappa_own on the boundary
  double h_avg = 0.0;      // harmonic average of the side mesh sizes
};

// A coarse edge shared by two blocks, or one block's face on the domain
// boundary. jump_weight is the multiplicity convention of the interface
// forms: interior edges are visited from both sides and carry weight 2,
// boundary edges are visited once and carry weight 1.
struct InterfaceEdge {
  int block_own = 0;
  int block_nbr = kBoundary;
  Side side_own = Side::kSouth;
  int jump_weight = 2;
  std::vector<InterfaceSegment> segments;

  bool boundary() const { return block_nbr == kBoundary; }
};

// M x M coarse blocks covering the unit square, each carrying a structured
// m x m cell triangulation. Interface edges are enumerated deterministically:
// blocks in row-major order, sides in south/east/north/west order, each edge
// recorded once (owner = first block that reaches it).
struct PartitionedMesh {
  int M = 0;
  int m = 0;
  double H = 0.0;
  double h = 0.0;
  std::vector<SubdomainMesh> blocks;
  std::vector<InterfaceEdge> interfaces;
  bool weights_ready = false;

  int block_count() const { return static_cast<int>(blocks.size()); }
  int block_dim() const { return (m + 1) * (m + 1); }
  int total_dim() const { return block_count() * block_dim(); }
  int block_offset(int i) const { return i * block_dim(); }
  int block_index(int bx, int by) const { return by * M + bx; }
};

PartitionedMesh build_partition(int M, int m);

// Populates kappa_own/kappa_nbr/kappa_avg/h_avg on every interface segment
// from the adjacent fine elements. Harmonic averages:
//   kappa_avg = 2 k_own k_nbr / (k_own + k_nbr),  h_avg likewise.
// On the boundary the block's own values are used (kappa_avg = kappa_own,
// h_avg = h). Throws std::invalid_argument on nonpositive kappa.
void interface_weights(PartitionedMesh& mesh, const CoefficientField& field);

}  // namespace msdg
