#include "helpers.hpp"

#include <jointopt/masks.hpp>
#include <jointopt/mesh_fe.hpp>

#include <doctest.h>

#include <cmath>

using namespace jointopt;
using namespace testing_support;

namespace {

std::vector<Vec2> grid_centers(int n) { return build_part_mesh(n, n, 1.0, Vec2(0, 0), 0).element_centers; }

double direct_mask(const Vec2& c, const Vec2& x, double r, double alpha) {
  const double e = (c - x).squaredNorm() / (r * r) - 1.0;
  return 0.5 * (std::tanh(alpha * e) + 1.0);
}

JointMasks joint_masks(NdsMode mode, const Vec2& x, const std::vector<Vec2>& centers) {
  JointMasks jm;
  jm.mode = mode;
  if (mode != NdsMode::Hole) jm.solid = single_mask(x, {2.4, 10.0}, centers);
  if (mode != NdsMode::Solid) jm.hole = single_mask(x, {1.1, 10.0}, centers);
  return jm;
}

}  // namespace

TEST_SUITE("masks") {

TEST_CASE("mask value at the center and on the outline") {
  std::vector<Vec2> c{{3.0, 4.0}, {3.0 + 2.0, 4.0}, {3.0, 4.0 - 2.0}};
  const MaskField m = single_mask(Vec2(3, 4), {2.0, 10.0}, c);
  CHECK(m.values[0] == doctest::Approx(0.5 * (std::tanh(-10.0) + 1.0)).epsilon(1e-12));
  CHECK(m.values[0] == doctest::Approx(2.06e-9).epsilon(0.01));
  CHECK(m.values[1] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(m.values[2] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("mask matches direct evaluation and is radially symmetric") {
  const auto centers = grid_centers(16);
  const Vec2 x(8.0, 8.0);
  const MaskField m = single_mask(x, {5.0, 10.0}, centers);
  for (std::size_t j = 0; j < centers.size(); ++j) {
    CHECK(std::abs(m.values[static_cast<int>(j)] - direct_mask(centers[j], x, 5.0, 10.0)) < 1e-15);
    CHECK(m.values[static_cast<int>(j)] > 0.0);
    CHECK(m.values[static_cast<int>(j)] <= 1.0);
    // Mirror images through the reference point share the value.
    const Vec2 mirror = 2.0 * x - centers[j];
    const int k = static_cast<int>(std::floor(mirror.y())) * 16 + static_cast<int>(std::floor(mirror.x()));
    CHECK(std::abs(m.values[k] - m.values[static_cast<int>(j)]) < 1e-12);
  }
}

TEST_CASE("mask position partials match finite differences") {
  const auto centers = grid_centers(10);
  const Vec2 x(4.3, 5.1);
  const MaskSpec spec{3.0, 10.0};
  const MaskField m = single_mask(x, spec, centers);
  const double h = 1e-6;
  const Vector fdx = (single_mask(x + Vec2(h, 0), spec, centers).values -
                      single_mask(x - Vec2(h, 0), spec, centers).values) / (2 * h);
  const Vector fdy = (single_mask(x + Vec2(0, h), spec, centers).values -
                      single_mask(x - Vec2(0, h), spec, centers).values) / (2 * h);
  CHECK(rel_err(m.d_dx, fdx) < 1e-7);
  CHECK(rel_err(m.d_dy, fdy) < 1e-7);
}

TEST_CASE("translation equivariance") {
  const PartMesh a = build_part_mesh(8, 8, 1.0, Vec2(0, 0), 0);
  const PartMesh b = build_part_mesh(8, 8, 1.0, Vec2(13, -4), 0);
  const MaskField ma = single_mask(Vec2(3.3, 4.6), {2.5, 10.0}, a.element_centers);
  const MaskField mb = single_mask(Vec2(16.3, 0.6), {2.5, 10.0}, b.element_centers);
  CHECK(rel_err(ma.values, mb.values) < 1e-12);
}

TEST_CASE("restricted mask is one outside its element ranges") {
  const auto centers = grid_centers(6);
  const std::vector<std::pair<int, int>> ranges{{6, 18}};
  const MaskField m = single_mask(Vec2(3, 2), {2.0, 10.0}, centers, ranges);
  const MaskField full = single_mask(Vec2(3, 2), {2.0, 10.0}, centers);
  for (int j = 0; j < 36; ++j) {
    if (j >= 6 && j < 18) {
      CHECK(m.values[j] == full.values[j]);
    } else {
      CHECK(m.values[j] == 1.0);
      CHECK(m.d_dx[j] == 0.0);
    }
  }
}

TEST_CASE("combination") {
  const auto centers = grid_centers(5);
  const MaskField a = single_mask(Vec2(2.5, 2.5), {1.5, 10.0}, centers);
  SUBCASE("empty list is the neutral element") {
    const CombinedMask c = combine({}, 25);
    CHECK((c.values.array() == 1.0).all());
  }
  SUBCASE("single mask is itself") {
    const std::vector<MaskField> one{a};
    const CombinedMask c = combine(one, 25);
    CHECK(c.values == a.values);
    CHECK(c.d_dx[0] == a.d_dx);
  }
  SUBCASE("coincident masks square and the partial doubles") {
    const std::vector<MaskField> two{a, a};
    const CombinedMask c = combine(two, 25);
    CHECK(rel_err(c.values, a.values.cwiseProduct(a.values)) < 1e-15);
    const Vector total = c.d_dx[0] + c.d_dx[1];
    CHECK(rel_err(total, 2.0 * a.values.cwiseProduct(a.d_dx)) < 1e-14);
    // FD: move both references together.
    const double h = 1e-6;
    auto sq = [&](double dx) {
      const MaskField m = single_mask(Vec2(2.5 + dx, 2.5), {1.5, 10.0}, centers);
      return Vector(m.values.cwiseProduct(m.values));
    };
    CHECK(rel_err(total, (sq(h) - sq(-h)) / (2 * h)) < 1e-7);
  }
  SUBCASE("far-apart masks multiply by one") {
    const auto big = grid_centers(40);
    const MaskField p = single_mask(Vec2(5, 5), {2.0, 10.0}, big);
    const MaskField q = single_mask(Vec2(35, 35), {2.0, 10.0}, big);
    const std::vector<MaskField> two{p, q};
    const CombinedMask c = combine(two, 1600);
    CHECK(rel_err(c.values, p.values.cwiseMin(q.values)) < 1e-12);
  }
  CHECK(rel_err(complement(a.values) + a.values, Vector::Ones(25)) == 0.0);
}

TEST_CASE("no joints leaves densities untouched") {
  std::mt19937_64 rng(7);
  const Vector rb = random_vector(9, rng);
  const NdsResult r = apply_nds(rb, {});
  CHECK(r.rho_hat == rb);
  CHECK((r.d_rho_hat_d_rho_bar.array() == 1.0).all());
}

TEST_CASE("hole on solid material carves the hole mask") {
  const auto centers = grid_centers(8);
  const std::vector<JointMasks> jm{joint_masks(NdsMode::Hole, Vec2(4, 4), centers)};
  const NdsResult r = apply_nds(Vector::Ones(64), jm);
  CHECK(rel_err(r.rho_hat, jm[0].hole.values) < 1e-15);
  CHECK(rel_err(r.d_rho_hat_d_rho_bar, jm[0].hole.values) < 1e-15);
}

TEST_CASE("hole, disc and ring on a density ramp") {
  const int n = 32;
  const auto centers = grid_centers(n);
  Vector ramp(n * n);
  for (int j = 0; j < n * n; ++j) ramp[j] = (j % n + 0.5) / n;
  const Vec2 x(16, 16);
  auto at = [&](const NdsResult& r, double px, double py) {
    return r.rho_hat[static_cast<int>(py) * n + static_cast<int>(px)];
  };
  JointMasks hole, solid, ring;
  hole.mode = NdsMode::Hole;
  hole.hole = single_mask(x, {6.0, 10.0}, centers);
  solid.mode = NdsMode::Solid;
  solid.solid = single_mask(x, {6.0, 10.0}, centers);
  ring.mode = NdsMode::Ring;
  ring.solid = single_mask(x, {9.0, 10.0}, centers);
  ring.hole = single_mask(x, {4.0, 10.0}, centers);
  const NdsResult rh = apply_nds(ramp, std::vector<JointMasks>{hole});
  const NdsResult rs = apply_nds(ramp, std::vector<JointMasks>{solid});
  const NdsResult rr = apply_nds(ramp, std::vector<JointMasks>{ring});
  CHECK(at(rh, 16, 16) < 1e-6);
  CHECK(at(rs, 16, 16) > 1 - 1e-6);
  CHECK(at(rr, 16, 16) < 1e-6);
  CHECK(at(rr, 22.5, 16) > 1 - 1e-4);
  // Far from the feature the ramp survives.
  CHECK(at(rh, 1, 1) == doctest::Approx(ramp[1 * n + 1]).epsilon(1e-6));
  CHECK(at(rr, 30, 30) == doctest::Approx(ramp[30 * n + 30]).epsilon(1e-6));
  for (const auto* r : {&rh, &rs, &rr}) {
    CHECK(r->rho_hat.minCoeff() >= 0.0);
    CHECK(r->rho_hat.maxCoeff() <= 1.0);
  }
}

TEST_CASE("position partials of all modes match finite differences") {
  const auto centers = grid_centers(6);
  std::mt19937_64 rng(9);
  const Vector rb = random_vector(36, rng);
  const std::vector<Vec2> pos{{2.2, 2.7}, {3.9, 3.4}, {2.8, 4.1}};
  const std::vector<NdsMode> modes{NdsMode::Hole, NdsMode::Solid, NdsMode::Ring};
  auto build = [&](const std::vector<Vec2>& p) {
    std::vector<JointMasks> jm;
    for (std::size_t i = 0; i < p.size(); ++i) jm.push_back(joint_masks(modes[i], p[i], centers));
    return apply_nds(rb, jm);
  };
  const NdsResult base = build(pos);
  const double h = 1e-5;
  for (std::size_t i = 0; i < pos.size(); ++i)
    for (int c = 0; c < 2; ++c) {
      auto p = pos, q = pos;
      p[i][c] += h;
      q[i][c] -= h;
      const Vector fd = (build(p).rho_hat - build(q).rho_hat) / (2 * h);
      const Vector& an = c == 0 ? base.d_rho_hat_dx[i] : base.d_rho_hat_dy[i];
      CHECK(rel_err(an, fd) < 1e-5);
    }
  // d rho_hat / d rho_bar by FD
  Vector fd(36);
  std::vector<JointMasks> jm;
  for (std::size_t i = 0; i < pos.size(); ++i) jm.push_back(joint_masks(modes[i], pos[i], centers));
  for (int j = 0; j < 36; ++j) {
    Vector p = rb, q = rb;
    p[j] += h;
    q[j] -= h;
    fd[j] = (apply_nds(p, jm).rho_hat[j] - apply_nds(q, jm).rho_hat[j]) / (2 * h);
  }
  CHECK(rel_err(base.d_rho_hat_d_rho_bar, fd) < 1e-8);
}

TEST_CASE("ring limits") {
  const auto centers = grid_centers(12);
  std::mt19937_64 rng(10);
  const Vector rb = random_vector(144, rng);
  const Vec2 x(6.2, 5.7);
  JointMasks solid, ring;
  solid.mode = NdsMode::Solid;
  solid.solid = single_mask(x, {3.0, 10.0}, centers);
  ring.mode = NdsMode::Ring;
  ring.solid = solid.solid;
  ring.hole = single_mask(x, {1e-3, 10.0}, centers);
  CHECK(rel_err(apply_nds(rb, std::vector<JointMasks>{ring}).rho_hat,
                apply_nds(rb, std::vector<JointMasks>{solid}).rho_hat) < 1e-8);
  JointMasks hole;
  hole.mode = NdsMode::Hole;
  hole.hole = ring.hole;
  CHECK(rel_err(apply_nds(rb, std::vector<JointMasks>{hole}).rho_hat, rb) < 1e-8);
}

TEST_CASE("invalid specs and inconsistent lengths") {
  CHECK_THROWS_AS((MaskSpec{0.0, 10.0}.validate()), InputError);
  CHECK_THROWS_AS((MaskSpec{1.0, -1.0}.validate()), InputError);
  const auto centers = grid_centers(4);
  std::vector<JointMasks> jm{joint_masks(NdsMode::Solid, Vec2(2, 2), centers)};
  CHECK_THROWS_AS(apply_nds(Vector::Ones(15), jm), InputError);
}

}  // TEST_SUITE
