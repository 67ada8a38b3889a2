#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "msdg/broken_vector.hpp"
#include "msdg/fe_core.hpp"
#include "test_util.hpp"

using namespace msdg;

namespace {

constexpr double kPi = 3.14159265358979323846;

double sym_defect(const SparseMat& G) {
  const SparseMat D = SparseMat(G.transpose()) - G;
  return D.norm() / (G.norm() + 1e-300);
}

// Entries of G that couple different blocks.
double off_block_mass(const SparseMat& G, const PartitionedMesh& mesh) {
  double sum = 0.0;
  const int nd = mesh.block_dim();
  for (int k = 0; k < G.outerSize(); ++k)
    for (SparseMat::InnerIterator it(G, k); it; ++it)
      if (it.row() / nd != it.col() / nd) sum += std::abs(it.value());
  return sum;
}

}  // namespace

TEST_SUITE("fe_core") {

TEST_CASE("stiffness of the unit block matches the hand matrix") {
  auto [mesh, field] = testutil::uniform_setup(1, 1, 3.0);
  const Eigen::MatrixXd A = dense_block(assemble_energy(mesh, field), mesh, 0);
  Eigen::MatrixXd expect(4, 4);
  // Nodes (0,0) (1,0) (0,1) (1,1); two triangles cut along the diagonal.
  expect << 1.0, -0.5, -0.5, 0.0,
           -0.5, 1.0, 0.0, -0.5,
           -0.5, 0.0, 1.0, -0.5,
            0.0, -0.5, -0.5, 1.0;
  expect *= 3.0;
  CHECK((A - expect).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("stiffness quadratic forms reproduce weighted gradients") {
  // The P1 interpolant of a linear field has unit gradient, so the energy is
  // the kappa-weighted cell area.
  auto [mesh, field] = testutil::cells_setup(1, 2, {2.0, 3.0, 5.0, 7.0});
  const SparseMat A = assemble_energy(mesh, field);
  const double weighted_area = (2.0 + 3.0 + 5.0 + 7.0) * 0.25;
  const BrokenVector ux = sample_broken(mesh, [](double x, double) { return x; });
  const BrokenVector uy = sample_broken(mesh, [](double, double y) { return y; });
  const BrokenVector uc = sample_broken(mesh, [](double, double) { return 4.0; });
  CHECK(quad_form(A, ux.flat()) == doctest::Approx(weighted_area).epsilon(1e-13));
  CHECK(quad_form(A, uy.flat()) == doctest::Approx(weighted_area).epsilon(1e-13));
  CHECK(std::abs(quad_form(A, uc.flat())) < 1e-12);
  CHECK(sym_defect(A) < 1e-15);
  CHECK(off_block_mass(A, mesh) == 0.0);
}

TEST_CASE("mass matrix of the unit block matches the hand matrix") {
  auto [mesh, field] = testutil::uniform_setup(1, 1, 1.0);
  const Eigen::MatrixXd M = dense_block(assemble_mass(mesh, field), mesh, 0);
  Eigen::MatrixXd expect(4, 4);
  const double d = 1.0 / 6.0, o = 1.0 / 24.0, q = 1.0 / 12.0;
  expect << d, o, o, q,
            o, q, 0.0, o,
            o, 0.0, q, o,
            q, o, o, d;
  CHECK((M - expect).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("mass integrates low-order polynomials exactly") {
  auto [mesh, field] = testutil::uniform_setup(1, 1, 3.0);
  const SparseMat M = assemble_mass(mesh, field);
  const BrokenVector one = sample_broken(mesh, [](double, double) { return 1.0; });
  const BrokenVector ux = sample_broken(mesh, [](double x, double) { return x; });
  CHECK(quad_form(M, one.flat()) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(quad_form(M, ux.flat()) == doctest::Approx(1.0).epsilon(1e-14));  // kappa * int x^2
  CHECK(one.flat().dot(M * ux.flat()) == doctest::Approx(1.5).epsilon(1e-14));
}

TEST_CASE("load vector uses a quadrature exact through quadratics") {
  const PartitionedMesh mesh = build_partition(2, 3);
  auto total = [&](const Eigen::VectorXd& b) { return b.sum(); };
  CHECK(total(assemble_load(mesh, 1.0)) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(total(assemble_load(mesh, [](double x, double y) { return x * x + y * y; })) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-13));
  CHECK(total(assemble_load(mesh, [](double x, double y) { return x * y; })) ==
        doctest::Approx(0.25).epsilon(1e-13));
  // Pairing with a sampled linear field is an exact cubic-free integral too.
  const BrokenVector ux = sample_broken(mesh, [](double x, double) { return x; });
  const Eigen::VectorXd bx = assemble_load(mesh, [](double x, double) { return x; });
  CHECK(ux.flat().dot(bx) == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("flux coupling has the frozen cross-block value") {
  // Two blocks wide, u = x on the left block, v = 1 on the right one. Only the
  // shared edge contributes: the owner-side flux of u against the jump of v.
  auto [mesh, field] = testutil::uniform_setup(2, 1, 1.0);
  const SparseMat S = assemble_consistency(mesh, field);
  BrokenVector u(mesh), v(mesh);
  const int left = mesh.block_index(0, 0), right = mesh.block_index(1, 0);
  for (int n = 0; n < mesh.block_dim(); ++n) {
    u.block(left)[n] = mesh.blocks[left].vertices[n].x;
    v.block(right)[n] = 1.0;
  }
  CHECK(v.flat().dot(S * u.flat()) == doctest::Approx(0.25).epsilon(1e-13));
  CHECK(u.flat().dot(S * v.flat()) == doctest::Approx(0.25).epsilon(1e-13));
  CHECK(sym_defect(S) < 1e-15);
}

TEST_CASE("interface forms vanish on conforming zero-trace fields") {
  auto [mesh, field] = testutil::cells_setup(2, 4, [] {
    std::vector<double> v(64);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = 1.0 + 0.1 * static_cast<double>(i % 7);
    return v;
  }());
  const SparseMat A = assemble_energy(mesh, field);
  const SparseMat S = assemble_consistency(mesh, field);
  const SparseMat P = assemble_penalty(mesh, field, EdgeScaling::fine(4.0));
  auto g = [](double x, double y) { return std::sin(kPi * x) * std::sin(kPi * y); };
  auto w = [](double x, double y) { return x * (1.0 - x) * y * (1.0 - y); };
  const BrokenVector u = sample_broken(mesh, g);
  const BrokenVector v = sample_broken(mesh, w);
  const double scale = quad_form(A, u.flat());
  CHECK(std::abs(v.flat().dot(S * u.flat())) < 1e-12 * scale);
  CHECK(quad_form(P, u.flat()) < 1e-12 * scale);
  CHECK(v.flat().dot((A + S + P) * u.flat()) ==
        doctest::Approx(v.flat().dot(A * u.flat())).epsilon(1e-12));
}

TEST_CASE("penalty carries frozen boundary and interface weights") {
  {
    // Single block: four boundary edges of unit length, weight sigma each.
    auto [mesh, field] = testutil::uniform_setup(1, 1, 1.0);
    const SparseMat P = assemble_penalty(mesh, field, EdgeScaling::constant(5.0));
    const BrokenVector one = sample_broken(mesh, [](double, double) { return 1.0; });
    CHECK(quad_form(P, one.flat()) == doctest::Approx(20.0).epsilon(1e-13));
  }
  {
    // 2x2 blocks, indicator of one block: two interior edges at full unique
    // weight plus two boundary edges, each edge of length 1/2.
    auto [mesh, field] = testutil::uniform_setup(2, 1, 1.0);
    const SparseMat P = assemble_penalty(mesh, field, EdgeScaling::constant(7.0));
    BrokenVector v(mesh);
    v.block(1).setOnes();
    CHECK(quad_form(P, v.flat()) == doctest::Approx(14.0).epsilon(1e-13));
  }
}

TEST_CASE("fine scaling equals the matching constant scaling on a uniform grid") {
  auto [mesh, field] = testutil::synthetic_setup(4, 4, 1e4, 1);
  // h = 1/16 exactly, so delta/h is the same double on every segment.
  const SparseMat Pf = assemble_penalty(mesh, field, EdgeScaling::fine(4.0));
  const SparseMat Pc = assemble_penalty(mesh, field, EdgeScaling::constant(64.0));
  CHECK((Pf - Pc).norm() == 0.0);
  CHECK(EdgeScaling::fine(4.0).is_constant() == false);
  CHECK(EdgeScaling::constant(64.0).is_constant() == true);
  CHECK(EdgeScaling::fine(4.0).parameter() == 4.0);
}

TEST_CASE("penalty jump integral matches an independent edge walk") {
  auto [mesh, field] = testutil::cells_setup(2, 2, {1.0, 9.0, 2.0, 8.0, 3.0, 7.0, 4.0, 6.0,
                                                    5.0, 1.5, 2.5, 3.5, 4.5, 5.5, 6.5, 7.5});
  const Eigen::VectorXd flat = testutil::random_vec(mesh.total_dim(), 99);
  BrokenVector v(mesh, flat);
  // Exact P1 edge integral of the squared jump, walked segment by segment.
  double expect = 0.0;
  for (const InterfaceEdge& e : mesh.interfaces) {
    for (const InterfaceSegment& s : e.segments) {
      const auto& own = v.block(e.block_own);
      double ja = -own[s.node_own[0]];
      double jb = -own[s.node_own[1]];
      if (!e.boundary()) {
        ja += v.block(e.block_nbr)[s.node_nbr[0]];
        jb += v.block(e.block_nbr)[s.node_nbr[1]];
      }
      const double jump_sq = s.length / 3.0 * (ja * ja + ja * jb + jb * jb);
      expect += (1.0 / s.h_avg) * s.kappa_avg * jump_sq;  // both sides sum to weight one
    }
  }
  const SparseMat P1 = assemble_penalty(mesh, field, EdgeScaling::fine(1.0));
  CHECK(quad_form(P1, flat) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("boundary mass has the frozen trace values") {
  {
    auto [mesh, field] = testutil::uniform_setup(1, 1, 1.0);
    const SparseMat Md = assemble_boundary_mass(mesh, field, 2.0);
    const BrokenVector one = sample_broken(mesh, [](double, double) { return 1.0; });
    const BrokenVector ux = sample_broken(mesh, [](double x, double) { return x; });
    CHECK(quad_form(Md, one.flat()) == doctest::Approx(8.0).epsilon(1e-13));
    CHECK(quad_form(Md, ux.flat()) == doctest::Approx(10.0 / 3.0).epsilon(1e-13));
    CHECK(off_block_mass(Md, mesh) == 0.0);
  }
  {
    // Interior edges contribute with multiplicity 1/2 per side.
    auto [mesh, field] = testutil::uniform_setup(2, 1, 1.0);
    const SparseMat Md = assemble_boundary_mass(mesh, field, 1.0);
    BrokenVector v(mesh);
    v.block(1).setOnes();
    CHECK(quad_form(Md, v.flat()) == doctest::Approx(3.0).epsilon(1e-13));
  }
}

TEST_CASE("system bundle combines the pieces") {
  auto [mesh, field] = testutil::synthetic_setup(3, 3, 1e4, 2);
  const DGSystem sys = assemble_dg_system(mesh, field, 4.0, 1.0);
  CHECK(sys.delta == 4.0);
  const SparseMat K2 = sys.A + sys.S + sys.P;
  CHECK((sys.K - K2).norm() <= 1e-14 * K2.norm());
  CHECK((sys.b - assemble_load(mesh, 1.0)).norm() == 0.0);
  CHECK(sym_defect(sys.K) < 1e-14);
  CHECK(off_block_mass(sys.A, mesh) == 0.0);
  CHECK(off_block_mass(sys.M, mesh) == 0.0);
  CHECK(off_block_mass(sys.Mdelta, mesh) == 0.0);
  // The coupled operator is positive on a random sample.
  for (unsigned s = 0; s < 50; ++s) {
    const Eigen::VectorXd v = testutil::random_vec(mesh.total_dim(), 1000 + s);
    CHECK(quad_form(sys.K, v) > 0.0);
  }
  CHECK_THROWS_AS(assemble_dg_system(mesh, field, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("dense_block extracts exactly the diagonal block") {
  auto [mesh, field] = testutil::synthetic_setup(2, 3, 100.0, 1);
  const DGSystem sys = assemble_dg_system(mesh, field, 4.0, 1.0);
  const int nd = mesh.block_dim();
  for (int b = 0; b < mesh.block_count(); ++b) {
    const Eigen::MatrixXd D = dense_block(sys.Mdelta, mesh, b);
    REQUIRE(D.rows() == nd);
    Eigen::MatrixXd manual = Eigen::MatrixXd::Zero(nd, nd);
    const int off = mesh.block_offset(b);
    for (int k = 0; k < sys.Mdelta.outerSize(); ++k)
      for (SparseMat::InnerIterator it(sys.Mdelta, k); it; ++it)
        if (it.row() >= off && it.row() < off + nd && it.col() >= off && it.col() < off + nd)
          manual(it.row() - off, it.col() - off) = it.value();
    CHECK((D - manual).norm() == 0.0);
  }
}

TEST_CASE("interface assembly demands prepared weights") {
  PartitionedMesh mesh = build_partition(2, 2);
  const CoefficientField field(4, std::vector<double>(16, 1.0), "plain");
  CHECK_THROWS_AS(assemble_consistency(mesh, field), std::logic_error);
  CHECK_THROWS_AS(assemble_penalty(mesh, field, EdgeScaling::constant(1.0)), std::logic_error);
  CHECK_THROWS_AS(assemble_boundary_mass(mesh, field, 4.0), std::logic_error);
  interface_weights(mesh, field);
  CHECK_NOTHROW(assemble_consistency(mesh, field));
  CHECK_THROWS_AS(assemble_penalty(mesh, field, EdgeScaling::constant(0.0)), std::invalid_argument);
  CHECK_THROWS_AS(assemble_penalty(mesh, field, EdgeScaling::fine(-1.0)), std::invalid_argument);
  CHECK_THROWS_AS(assemble_boundary_mass(mesh, field, -2.0), std::invalid_argument);
}

}  // TEST_SUITE
