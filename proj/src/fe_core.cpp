#include "msdg/fe_core.hpp"

#include <stdexcept>
#include <vector>

namespace msdg {

namespace {

using Triplet = Eigen::Triplet<double>;

struct TriGeom {
  double area;
  double gx[3];  // P1 basis gradients
  double gy[3];
};

TriGeom tri_geom(const SubdomainMesh& b, const Triangle& t) {
  const Vec2& p0 = b.vertices[t.v[0]];
  const Vec2& p1 = b.vertices[t.v[1]];
  const Vec2& p2 = b.vertices[t.v[2]];
  const double det = (p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y);
  TriGeom g;
  g.area = 0.5 * det;
  g.gx[0] = (p1.y - p2.y) / det;
  g.gx[1] = (p2.y - p0.y) / det;
  g.gx[2] = (p0.y - p1.y) / det;
  g.gy[0] = (p2.x - p1.x) / det;
  g.gy[1] = (p0.x - p2.x) / det;
  g.gy[2] = (p1.x - p0.x) / det;
  return g;
}

void require_weights(const PartitionedMesh& mesh) {
  if (!mesh.weights_ready)
    throw std::logic_error("assembly requires interface_weights to have run");
}

// One side of a fine interface segment: the block whose trace and normal
// derivative are "own" here, and the facing node pair (absent on the domain
// boundary, where the facing trace is zero).
struct SideView {
  int block_own;
  int tri_own;
  Vec2 normal;
  std::array<int, 2> node_own;
  int block_nbr;  // kBoundary on the domain boundary
  std::array<int, 2> node_nbr;
};

template <typename F>
void for_each_side(const PartitionedMesh& mesh, F&& fn) {
  for (const InterfaceEdge& e : mesh.interfaces) {
    for (const InterfaceSegment& s : e.segments) {
      fn(e, s, SideView{e.block_own, s.tri_own, outward_normal(e.side_own), s.node_own,
                        e.block_nbr, s.node_nbr});
      if (!e.boundary())
        fn(e, s, SideView{e.block_nbr, s.tri_nbr, outward_normal(opposite(e.side_own)),
                          s.node_nbr, e.block_own, s.node_own});
    }
  }
}

SparseMat from_triplets(const PartitionedMesh& mesh, const std::vector<Triplet>& trips) {
  SparseMat G(mesh.total_dim(), mesh.total_dim());
  G.setFromTriplets(trips.begin(), trips.end());
  G.makeCompressed();
  return G;
}

}  // namespace

SparseMat assemble_energy(const PartitionedMesh& mesh, const CoefficientField& field) {
  std::vector<Triplet> trips;
  trips.reserve(static_cast<size_t>(mesh.block_count()) * mesh.m * mesh.m * 18);
  for (int bi = 0; bi < mesh.block_count(); ++bi) {
    const SubdomainMesh& b = mesh.blocks[bi];
    const int off = mesh.block_offset(bi);
    for (int ti = 0; ti < static_cast<int>(b.triangles.size()); ++ti) {
      const Triangle& t = b.triangles[ti];
      const TriGeom g = tri_geom(b, t);
      const double k = field.value(mesh, bi, ti);
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
          trips.emplace_back(off + t.v[r], off + t.v[c],
                             k * g.area * (g.gx[r] * g.gx[c] + g.gy[r] * g.gy[c]));
    }
  }
  return from_triplets(mesh, trips);
}

SparseMat assemble_mass(const PartitionedMesh& mesh, const CoefficientField& field) {
  std::vector<Triplet> trips;
  trips.reserve(static_cast<size_t>(mesh.block_count()) * mesh.m * mesh.m * 18);
  for (int bi = 0; bi < mesh.block_count(); ++bi) {
    const SubdomainMesh& b = mesh.blocks[bi];
    const int off = mesh.block_offset(bi);
    for (int ti = 0; ti < static_cast<int>(b.triangles.size()); ++ti) {
      const Triangle& t = b.triangles[ti];
      const double w = field.value(mesh, bi, ti) * tri_geom(b, t).area / 12.0;
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
          trips.emplace_back(off + t.v[r], off + t.v[c], w * (r == c ? 2.0 : 1.0));
    }
  }
  return from_triplets(mesh, trips);
}

SparseMat assemble_consistency(const PartitionedMesh& mesh, const CoefficientField& field) {
  require_weights(mesh);
  (void)field;
  std::vector<Triplet> trips;
  for_each_side(mesh, [&](const InterfaceEdge& e, const InterfaceSegment& s, const SideView& side) {
    const SubdomainMesh& b = mesh.blocks[side.block_own];
    const Triangle& t = b.triangles[side.tri_own];
    const TriGeom g = tri_geom(b, t);
    const int off_own = mesh.block_offset(side.block_own);
    const int off_nbr = side.block_nbr == kBoundary ? -1 : mesh.block_offset(side.block_nbr);
    const double c = s.kappa_avg / e.jump_weight;
    const double half = 0.5 * s.length;
    for (int k = 0; k < 3; ++k) {
      const double gn = side.normal.x * g.gx[k] + side.normal.y * g.gy[k];
      const double w = c * half * gn;
      if (w == 0.0) continue;
      const int col = off_own + t.v[k];
      for (int tp = 0; tp < 2; ++tp) {
        if (off_nbr >= 0) {
          const int row = off_nbr + side.node_nbr[tp];
          trips.emplace_back(row, col, w);
          trips.emplace_back(col, row, w);
        }
        const int row = off_own + side.node_own[tp];
        trips.emplace_back(row, col, -w);
        trips.emplace_back(col, row, -w);
      }
    }
  });
  return from_triplets(mesh, trips);
}

SparseMat assemble_penalty(const PartitionedMesh& mesh, const CoefficientField& field,
                           const EdgeScaling& scaling) {
  require_weights(mesh);
  (void)field;
  std::vector<Triplet> trips;
  for_each_side(mesh, [&](const InterfaceEdge& e, const InterfaceSegment& s, const SideView& side) {
    const double sigma = scaling(s);
    if (!(sigma > 0.0)) throw std::invalid_argument("assemble_penalty: scaling must be positive");
    const double c = sigma * s.kappa_avg / e.jump_weight;
    const int off_own = mesh.block_offset(side.block_own);
    const int off_nbr = side.block_nbr == kBoundary ? -1 : mesh.block_offset(side.block_nbr);
    for (int sp = 0; sp < 2; ++sp) {
      for (int tp = 0; tp < 2; ++tp) {
        const double w = c * s.length * (sp == tp ? 1.0 / 3.0 : 1.0 / 6.0);
        const int io = off_own + side.node_own[sp];
        const int jo = off_own + side.node_own[tp];
        trips.emplace_back(io, jo, w);
        if (off_nbr >= 0) {
          const int in = off_nbr + side.node_nbr[sp];
          const int jn = off_nbr + side.node_nbr[tp];
          trips.emplace_back(in, jn, w);
          trips.emplace_back(io, jn, -w);
          trips.emplace_back(in, jo, -w);
        }
      }
    }
  });
  return from_triplets(mesh, trips);
}

SparseMat assemble_boundary_mass(const PartitionedMesh& mesh, const CoefficientField& field,
                                 double delta) {
  require_weights(mesh);
  (void)field;
  if (!(delta > 0.0)) throw std::invalid_argument("assemble_boundary_mass: delta must be positive");
  std::vector<Triplet> trips;
  for_each_side(mesh, [&](const InterfaceEdge& e, const InterfaceSegment& s, const SideView& side) {
    const double c = (delta / s.h_avg) * s.kappa_avg / e.jump_weight;
    const int off = mesh.block_offset(side.block_own);
    for (int sp = 0; sp < 2; ++sp)
      for (int tp = 0; tp < 2; ++tp)
        trips.emplace_back(off + side.node_own[sp], off + side.node_own[tp],
                           c * s.length * (sp == tp ? 1.0 / 3.0 : 1.0 / 6.0));
  });
  return from_triplets(mesh, trips);
}

Eigen::VectorXd assemble_load(const PartitionedMesh& mesh,
                              const std::function<double(double, double)>& f) {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(mesh.total_dim());
  for (int bi = 0; bi < mesh.block_count(); ++bi) {
    const SubdomainMesh& blk = mesh.blocks[bi];
    const int off = mesh.block_offset(bi);
    for (const Triangle& t : blk.triangles) {
      const double third = tri_geom(blk, t).area / 3.0;
      for (int ea = 0; ea < 3; ++ea) {
        const int eb = (ea + 1) % 3;
        const Vec2& pa = blk.vertices[t.v[ea]];
        const Vec2& pb = blk.vertices[t.v[eb]];
        const double fm = f(0.5 * (pa.x + pb.x), 0.5 * (pa.y + pb.y));
        b[off + t.v[ea]] += third * 0.5 * fm;
        b[off + t.v[eb]] += third * 0.5 * fm;
      }
    }
  }
  return b;
}

Eigen::VectorXd assemble_load(const PartitionedMesh& mesh, double constant) {
  return assemble_load(mesh, [constant](double, double) { return constant; });
}

DGSystem assemble_dg_system(const PartitionedMesh& mesh, const CoefficientField& field, double delta,
                            const std::function<double(double, double)>& f) {
  if (!(delta > 0.0)) throw std::invalid_argument("assemble_dg_system: delta must be positive");
  DGSystem sys;
  sys.delta = delta;
  sys.A = assemble_energy(mesh, field);
  sys.S = assemble_consistency(mesh, field);
  sys.P = assemble_penalty(mesh, field, EdgeScaling::fine(delta));
  sys.M = assemble_mass(mesh, field);
  sys.Mdelta = assemble_boundary_mass(mesh, field, delta);
  sys.K = sys.A + sys.S + sys.P;
  sys.K.makeCompressed();
  sys.b = assemble_load(mesh, f);
  return sys;
}

DGSystem assemble_dg_system(const PartitionedMesh& mesh, const CoefficientField& field, double delta,
                            double constant_load) {
  return assemble_dg_system(mesh, field, delta,
                            [constant_load](double, double) { return constant_load; });
}

Eigen::MatrixXd dense_block(const SparseMat& G, const PartitionedMesh& mesh, int block) {
  const int off = mesh.block_offset(block);
  const int dim = mesh.block_dim();
  return Eigen::MatrixXd(G.block(off, off, dim, dim));
}

}  // namespace msdg
