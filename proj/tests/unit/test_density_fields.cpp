#include "helpers.hpp"

#include <jointopt/density_fields.hpp>

#include <doctest.h>

#include <cmath>

using namespace jointopt;
using namespace testing_support;

TEST_SUITE("density_fields") {

TEST_CASE("radius below the element size gives the identity") {
  const PartMesh m = build_part_mesh(4, 3, 1.0, Vec2(0, 0), 0);
  const DensityFilter f = build_filter(m, 1.0);
  std::mt19937_64 rng(1);
  const Vector x = random_vector(12, rng);
  CHECK((f.apply(x) - x).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("rows sum to one and constants are preserved") {
  const PartMesh m = build_part_mesh(7, 5, 1.0, Vec2(0, 0), 0);
  const DensityFilter f = build_filter(m, 2.5);
  const Vector c = Vector::Constant(35, 0.37);
  CHECK((f.apply(c) - c).cwiseAbs().maxCoeff() < 1e-15);
  const Eigen::MatrixXd w(f.weights());
  CHECK((w.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-15);
}

TEST_CASE("strip filter hand value") {
  const PartMesh m = build_part_mesh(3, 1, 1.0, Vec2(0, 0), 0);
  const DensityFilter f = build_filter(m, 1.5);
  Vector x(3);
  x << 0, 1, 0;
  CHECK(f.apply(x)[1] == doctest::Approx(0.6).epsilon(1e-14));
}

TEST_CASE("filter is linear and transpose is its adjoint") {
  const MultiPartMesh mm({build_part_mesh(5, 4, 1.0, Vec2(0, 0), 0),
                          build_part_mesh(3, 4, 1.0, Vec2(2, 0), 1)});
  const DensityFilter f = build_filter(mm, 2.2);
  std::mt19937_64 rng(2);
  const Vector a = random_vector(32, rng), b = random_vector(32, rng);
  CHECK(rel_err(f.apply(0.3 * a + 1.7 * b), 0.3 * f.apply(a) + 1.7 * f.apply(b)) < 1e-14);
  CHECK(f.apply(a).dot(b) == doctest::Approx(a.dot(f.apply_transpose(b))).epsilon(1e-13));
}

TEST_CASE("filtering never mixes parts") {
  const MultiPartMesh mm({build_part_mesh(5, 4, 1.0, Vec2(0, 0), 0),
                          build_part_mesh(3, 4, 1.0, Vec2(2, 0), 1)});
  const DensityFilter f = build_filter(mm, 3.0);
  Vector x = Vector::Zero(32);
  x.head(20).setOnes();
  const Vector y = f.apply(x);
  CHECK(y.tail(12).cwiseAbs().maxCoeff() == 0.0);
  CHECK((y.head(20).array() - 1.0).abs().maxCoeff() < 1e-15);
}

TEST_CASE("projection values") {
  Vector t(3);
  t << 0.0, 0.5, 1.0;
  for (double beta : {0.5, 2.0, 8.0, 64.0}) {
    const Vector p = project(t, beta, 0.5);
    CHECK(p[0] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(p[1] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(p[2] == doctest::Approx(1.0).epsilon(1e-15));
  }
  Vector s(1);
  s << 0.6;
  const double expected = (std::tanh(4.0) + std::tanh(0.8)) / (2.0 * std::tanh(4.0));
  CHECK(project(s, 8.0, 0.5)[0] == doctest::Approx(expected).epsilon(1e-14));
  // Independent evaluation of the same expression.
  CHECK(project(s, 8.0, 0.5)[0] == doctest::Approx(0.8322412194064732).epsilon(1e-14));
}

TEST_CASE("projection is monotone with positive, symmetric derivative") {
  Vector t = Vector::LinSpaced(101, 0.0, 1.0);
  for (double beta : {1.0, 4.0, 16.0}) {
    const Vector p = project(t, beta, 0.5);
    const Vector d = projection_derivative(t, beta, 0.5);
    for (int i = 1; i < t.size(); ++i) CHECK(p[i] >= p[i - 1]);
    for (int i = 0; i < t.size(); ++i) {
      CHECK(d[i] > 0.0);
      CHECK(d[i] == doctest::Approx(d[t.size() - 1 - i]).epsilon(1e-12));
    }
    const double h = 1e-6;
    const Vector fd = (project(t.array() + h, beta, 0.5) - project(t.array() - h, beta, 0.5)) / (2 * h);
    CHECK(rel_err(fd, d) < 1e-8);
  }
}

TEST_CASE("SIMP interpolation") {
  const SimpLaw law;
  Vector r(3);
  r << 1.0, 0.0, 0.5;
  const Vector e = simp_modulus(r, law);
  CHECK(e[0] == doctest::Approx(1.0));
  CHECK(e[1] == doctest::Approx(1e-9));
  CHECK(e[2] == doctest::Approx(0.125).epsilon(1e-8));
  const Vector d = simp_modulus_derivative(r, law);
  CHECK(d[2] == doctest::Approx(3 * 0.25 * (1 - 1e-9)));
  CHECK_THROWS_AS((SimpLaw{1.0, 1e-3, 3.0}.validate()), InputError);
  CHECK_THROWS_AS((SimpLaw{1.0, 1e-9, 0.5}.validate()), InputError);
}

TEST_CASE("chain to design") {
  const PartMesh m = build_part_mesh(3, 2, 1.0, Vec2(0, 0), 0);
  SUBCASE("stale state is rejected") {
    const DensityFilter f = build_filter(m, 1.5);
    DensityState s(f);
    CHECK_THROWS(s.chain_to_design(Vector::Ones(6), Vector::Ones(6)));
  }
  SUBCASE("identity filter scales by the projection derivative only") {
    const DensityFilter f = build_filter(m, 0.5);
    DensityState s(f);
    std::mt19937_64 rng(4);
    const Vector rho = random_vector(6, rng);
    s.update(rho, 4.0);
    const Vector g = random_vector(6, rng, -1, 1);
    const Vector out = s.chain_to_design(g, Vector::Ones(6));
    CHECK(rel_err(out, g.cwiseProduct(projection_derivative(rho, 4.0, 0.5))) < 1e-15);
  }
  SUBCASE("uniform gradient keeps its total through the filter transpose") {
    const DensityFilter f = build_filter(m, 2.0);
    const Vector g = Vector::Constant(6, 0.7);
    // Sum preservation of the transposed normalized filter on equal-volume cells.
    CHECK(f.apply_transpose(g).sum() == doctest::Approx(g.sum()).epsilon(1e-14));
  }
  SUBCASE("finite differences of a smooth functional of rho_bar") {
    const PartMesh m10 = build_part_mesh(5, 2, 1.0, Vec2(0, 0), 0);
    const DensityFilter f = build_filter(m10, 1.8);
    std::mt19937_64 rng(5);
    const Vector rho = random_vector(10, rng, 0.1, 0.9);
    const Vector w = random_vector(10, rng, -1, 1);
    const Vector mask = random_vector(10, rng, 0.2, 1.0);
    // J = sum_j w_j (mask_j rho_bar_j)^2
    auto J = [&](const Vector& r) {
      DensityState s(f);
      s.update(r, 6.0);
      return (w.array() * (mask.array() * s.rho_bar().array()).square()).sum();
    };
    DensityState s(f);
    s.update(rho, 6.0);
    const Vector dj_dhat = 2.0 * w.array() * mask.array() * s.rho_bar().array();
    const Vector g = s.chain_to_design(dj_dhat, mask);
    Vector fd(10);
    const double h = 1e-6;
    for (int i = 0; i < 10; ++i) {
      Vector p = rho, q = rho;
      p[i] += h;
      q[i] -= h;
      fd[i] = (J(p) - J(q)) / (2 * h);
    }
    CHECK(rel_err(g, fd) < 1e-6);
  }
}

}  // TEST_SUITE
