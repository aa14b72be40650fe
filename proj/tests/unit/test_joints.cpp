#include "helpers.hpp"

#include <jointopt/joints.hpp>

#include <doctest.h>

#include <cmath>

using namespace jointopt;
using namespace testing_support;

namespace {

Joint make_joint(const Vec2& x, PatternKind kind, std::vector<double> radii, double k) {
  Joint j;
  j.position = x;
  j.pattern = generate_pattern(kind, radii, k);
  j.nds = {NdsMode::Ring, radii.back() + 1.0, 0.5};
  return j;
}

MultiPartMesh two_squares(int n, double shift) {
  return MultiPartMesh({build_part_mesh(n, n, 1.0, Vec2(0, 0), 0),
                        build_part_mesh(n, n, 1.0, Vec2(shift, 0), 1)});
}

}  // namespace

TEST_SUITE("joints") {

TEST_CASE("circular pattern") {
  const std::vector<double> r{4.0};
  const SpringPattern p = generate_pattern(PatternKind::Circular, r, 10.0);
  CHECK(p.count() == 25);
  CHECK(p.per_spring_stiffness == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(p.resultant() == doctest::Approx(10.0).epsilon(1e-15));
  int center = 0, half = 0, full = 0;
  for (const auto& o : p.offsets) {
    const double d = o.norm();
    if (d < 1e-12) ++center;
    else if (std::abs(d - 2.0) < 1e-12) ++half;
    else if (std::abs(d - 4.0) < 1e-12) ++full;
  }
  CHECK(center == 1);
  CHECK(half == 8);
  CHECK(full == 16);
  CHECK(p.max_radius() == doctest::Approx(4.0));
}

TEST_CASE("ring pattern") {
  const std::vector<double> r{6.0, 8.0};
  const SpringPattern p = generate_pattern(PatternKind::Ring, r, 10.0);
  CHECK(p.count() == 24);
  int inner = 0, outer = 0;
  for (const auto& o : p.offsets) {
    if (std::abs(o.norm() - 6.0) < 1e-12) ++inner;
    if (std::abs(o.norm() - 8.0) < 1e-12) ++outer;
  }
  CHECK(inner == 12);
  CHECK(outer == 12);
  CHECK(p.resultant() == doctest::Approx(10.0).epsilon(1e-15));
}

TEST_CASE("pattern offsets sum to zero") {
  const std::vector<double> c{3.3}, r{1.7, 2.9};
  for (const auto& p : {generate_pattern(PatternKind::Circular, c, 1.0),
                        generate_pattern(PatternKind::Ring, r, 1.0)}) {
    Vec2 s = Vec2::Zero();
    for (const auto& o : p.offsets) s += o;
    CHECK(s.norm() < 1e-13);
  }
}

TEST_CASE("pattern input errors") {
  const std::vector<double> bad{0.0}, one{2.0}, dec{3.0, 2.0};
  CHECK_THROWS_AS(generate_pattern(PatternKind::Circular, bad, 1.0), InputError);
  CHECK_THROWS_AS(generate_pattern(PatternKind::Circular, one, 0.0), InputError);
  CHECK_THROWS_AS(generate_pattern(PatternKind::Ring, one, 1.0), InputError);
  CHECK_THROWS_AS(generate_pattern(PatternKind::Ring, dec, 1.0), InputError);
}

TEST_CASE("NDS spec validation") {
  CHECK_NOTHROW((NdsSpec{NdsMode::Ring, 10.0, 4.0}.validate()));
  CHECK_THROWS_AS((NdsSpec{NdsMode::Ring, 4.0, 4.0}.validate()), InputError);
  CHECK_THROWS_AS((NdsSpec{NdsMode::Solid, 0.0, 0.0}.validate()), InputError);
  CHECK_THROWS_AS((NdsSpec{NdsMode::Hole, 0.0, -1.0}.validate()), InputError);
  CHECK((NdsSpec{NdsMode::Hole, 0.0, 3.0}.outer_radius()) == 3.0);
  CHECK((NdsSpec{NdsMode::Ring, 9.0, 3.0}.outer_radius()) == 9.0);
}

TEST_CASE("spring stiffness block") {
  Joint j;
  j.pattern.offsets = {Vec2::Zero()};
  j.pattern.per_spring_stiffness = 0.4;
  const std::vector<Joint> js{j};
  const Eigen::MatrixXd k(assemble_joint_block(js));
  Eigen::Matrix4d expected;
  expected << 0.4, 0, -0.4, 0,  //
      0, 0.4, 0, -0.4,          //
      -0.4, 0, 0.4, 0,          //
      0, -0.4, 0, 0.4;
  CHECK((k - expected).cwiseAbs().maxCoeff() == 0.0);

  const std::vector<double> scale{1e-6};
  const Eigen::MatrixXd kd(assemble_joint_block(js, scale));
  CHECK((kd - 1e-6 * expected).cwiseAbs().maxCoeff() < 1e-20);
}

TEST_CASE("joint block row sums and rigid translation") {
  const std::vector<double> r{1.0, 2.0}, c{1.5};
  const std::vector<Joint> js{make_joint(Vec2(4, 4), PatternKind::Ring, r, 3.0),
                              make_joint(Vec2(6, 6), PatternKind::Circular, c, 5.0)};
  const SparseMatrix k = assemble_joint_block(js);
  CHECK(k.rows() == joint_dof_count(js));
  CHECK(joint_dof_count(js) == 4 * (24 + 25));
  CHECK(joint_dof_offset(js, 1) == 96);
  const Eigen::MatrixXd dense(k);
  CHECK(dense.rowwise().sum().cwiseAbs().maxCoeff() < 1e-15);
  CHECK((dense - dense.transpose()).cwiseAbs().maxCoeff() == 0.0);
  // Same displacement on both ends of every spring.
  Vector u(k.rows());
  for (int s = 0; s < k.rows() / 4; ++s) u.segment(4 * s, 4) << 0.3, -0.7, 0.3, -0.7;
  CHECK(std::abs(u.dot(k * u)) < 1e-14);
  // Springs are positive semidefinite.
  std::mt19937_64 rng(21);
  const Vector v = random_vector(static_cast<int>(k.rows()), rng, -1, 1);
  CHECK(v.dot(k * v) > 0.0);
  CHECK_THROWS_AS(assemble_joint_block(js, std::vector<double>{1.0}), InputError);
}

TEST_CASE("interpolation weights") {
  const MultiPartMesh mm = two_squares(4, 1.0);
  Joint j;
  j.pattern.per_spring_stiffness = 1.0;
  SUBCASE("spring on a mesh node") {
    j.position = Vec2(2.0, 2.0);
    j.pattern.offsets = {Vec2::Zero()};
    const CouplingMatrix cm = build_coupling(std::vector<Joint>{j}, mm);
    for (const auto& row : cm.rows) {
      int ones = 0;
      double sum = 0.0;
      for (double w : row.weights) {
        CHECK((w == 0.0 || w == 1.0));
        ones += w == 1.0;
        sum += w;
      }
      CHECK(ones == 1);
      CHECK(sum == 1.0);
    }
  }
  SUBCASE("spring at an element centroid") {
    j.position = Vec2(2.5, 1.5);
    j.pattern.offsets = {Vec2::Zero()};
    const CouplingMatrix cm = build_coupling(std::vector<Joint>{j}, mm);
    for (const auto& row : cm.rows)
      for (double w : row.weights) CHECK(w == doctest::Approx(0.25).epsilon(1e-15));
    // dw/dx at the centroid in corner order, element size 1.
    const std::array<double, 4> ex{-0.5, 0.5, 0.5, -0.5}, ey{-0.5, -0.5, 0.5, 0.5};
    for (int a = 0; a < 4; ++a) {
      CHECK(cm.rows[0].dw_dx[a] == doctest::Approx(ex[a]).epsilon(1e-15));
      CHECK(cm.rows[0].dw_dy[a] == doctest::Approx(ey[a]).epsilon(1e-15));
    }
  }
  SUBCASE("spring at xi = (0.5, 0)") {
    j.position = Vec2(2.75, 1.5);
    j.pattern.offsets = {Vec2::Zero()};
    const CouplingMatrix cm = build_coupling(std::vector<Joint>{j}, mm);
    const auto n = shape(0.5, 0.0);
    CHECK(n[0] == 0.125);
    CHECK(n[1] == 0.375);
    for (int a = 0; a < 4; ++a) CHECK(cm.rows[0].weights[a] == doctest::Approx(n[a]).epsilon(1e-15));
  }
}

TEST_CASE("coupling structure and interpolation of a linear field") {
  const MultiPartMesh mm = two_squares(6, 1.5);
  const std::vector<double> r{0.8, 1.4};
  const std::vector<Joint> js{make_joint(Vec2(3.4, 2.9), PatternKind::Ring, r, 2.0)};
  const CouplingMatrix cm = build_coupling(js, mm);
  const int nm = mm.num_dofs(), nc = joint_dof_count(js);
  CHECK(cm.g.rows() == nc);
  CHECK(cm.g.cols() == nm + nc);
  const Eigen::MatrixXd g(cm.g);
  CHECK((g.rightCols(nc) + Eigen::MatrixXd::Identity(nc, nc)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((g.leftCols(nm).rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-14);
  // Bilinear interpolation reproduces affine displacement fields exactly.
  Vector u(nm);
  for (const auto& part : mm.parts())
    for (int n = 0; n < part.num_nodes(); ++n) {
      const Vec2& p = part.node_coords[static_cast<std::size_t>(n)];
      u[part.node_dof(n, 0)] = 0.1 + 0.2 * p.x() - 0.3 * p.y();
      u[part.node_dof(n, 1)] = -0.4 + 0.05 * p.x() + 0.6 * p.y();
    }
  const Vector uc = g.leftCols(nm) * u;
  for (const auto& row : cm.rows) {
    const Vec2 p = js[0].position + js[0].pattern.offsets[static_cast<std::size_t>(row.spring)];
    const double expected = row.component == 0 ? 0.1 + 0.2 * p.x() - 0.3 * p.y()
                                               : -0.4 + 0.05 * p.x() + 0.6 * p.y();
    CHECK(uc[row.slave] == doctest::Approx(expected).epsilon(1e-13));
    // Masters belong to the part in this slot.
    const PartMesh& part = mm.part(js[0].parts[static_cast<std::size_t>(row.part_slot)]);
    for (int m : row.masters) {
      CHECK(m >= part.dof_offset);
      CHECK(m < part.dof_offset + part.num_dofs());
    }
  }
}

TEST_CASE("position derivative of the coupling matches finite differences") {
  const MultiPartMesh mm = two_squares(8, 2.0);
  const std::vector<double> r{1.1, 1.9};
  std::vector<Joint> js{make_joint(Vec2(5.13, 4.27), PatternKind::Ring, r, 1.0),
                        make_joint(Vec2(4.61, 2.38), PatternKind::Ring, r, 1.0)};
  js[1].parts = {1, 0};
  const CouplingMatrix cm = build_coupling(js, mm);
  const double h = 1e-7;
  for (int j = 0; j < 2; ++j)
    for (int c = 0; c < 2; ++c) {
      auto p = js, q = js;
      p[static_cast<std::size_t>(j)].position[c] += h;
      q[static_cast<std::size_t>(j)].position[c] -= h;
      const Eigen::MatrixXd fd =
          (Eigen::MatrixXd(build_coupling(p, mm).g) - Eigen::MatrixXd(build_coupling(q, mm).g)) /
          (2 * h);
      const Eigen::MatrixXd an(coupling_position_derivative(cm, j, c));
      CHECK((fd - an).cwiseAbs().maxCoeff() < 1e-6);
    }
}

TEST_CASE("spring outside a part names the joint and the part") {
  const MultiPartMesh mm = two_squares(5, 2.0);
  const std::vector<double> r{1.0};
  const std::vector<Joint> js{make_joint(Vec2(3.5, 2.5), PatternKind::Circular, r, 1.0),
                              make_joint(Vec2(3.5, 0.5), PatternKind::Circular, r, 1.0)};
  try {
    build_coupling(js, mm);
    FAIL("expected an error");
  } catch (const InputError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("joint 1") != std::string::npos);
    CHECK(msg.find("part") != std::string::npos);
  }
}

TEST_CASE("overlap bounds") {
  const MultiPartMesh mm = two_squares(10, 4.0);
  const JointBounds b = overlap_bounds(mm.part(0), mm.part(1), 1.5);
  CHECK(b.x_lo == 5.5);
  CHECK(b.x_hi == 8.5);
  CHECK(b.y_lo == 1.5);
  CHECK(b.y_hi == 8.5);
  CHECK(b.contains(Vec2(7, 7)));
  CHECK_FALSE(b.contains(Vec2(9, 7)));
  CHECK_THROWS_AS(overlap_bounds(mm.part(0), mm.part(1), 3.5), InputError);
}

}  // TEST_SUITE
