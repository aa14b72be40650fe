#pragma once

#include <jointopt/config.hpp>
#include <jointopt/model.hpp>

#include <Eigen/Dense>

#include <array>
#include <random>
#include <string>

namespace testing_support {

using jointopt::Vec2;
using jointopt::Vector;

// Closed-form plane-stress Q4 stiffness of the 88-line topology code,
// corner order LL, LR, UR, UL, unit modulus and thickness.
inline Eigen::Matrix<double, 8, 8> closed_form_ke(double nu) {
  const std::array<double, 8> k{0.5 - nu / 6,        0.125 + nu / 8, -0.25 - nu / 12,
                                -0.125 + 3 * nu / 8, -0.25 + nu / 12, -0.125 - nu / 8,
                                nu / 6,              0.125 - 3 * nu / 8};
  static constexpr int idx[8][8] = {{0, 1, 2, 3, 4, 5, 6, 7}, {1, 0, 7, 6, 5, 4, 3, 2},
                                    {2, 7, 0, 5, 6, 3, 4, 1}, {3, 6, 5, 0, 7, 2, 1, 4},
                                    {4, 5, 6, 7, 0, 1, 2, 3}, {5, 4, 3, 2, 1, 0, 7, 6},
                                    {6, 3, 4, 1, 2, 7, 0, 5}, {7, 2, 1, 4, 3, 6, 5, 0}};
  Eigen::Matrix<double, 8, 8> ke;
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) ke(i, j) = k[static_cast<std::size_t>(idx[i][j])];
  return ke / (1.0 - nu * nu);
}

// Bilinear shape functions written out independently of the library.
inline std::array<double, 4> shape(double xi, double eta) {
  return {0.25 * (1 - xi) * (1 - eta), 0.25 * (1 + xi) * (1 - eta),
          0.25 * (1 + xi) * (1 + eta), 0.25 * (1 - xi) * (1 + eta)};
}

inline double max_abs(const Vector& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

inline double rel_err(const Vector& a, const Vector& b) {
  const double s = std::max(max_abs(a), max_abs(b));
  return s > 0 ? max_abs(a - b) / s : 0.0;
}

inline Vector random_vector(int n, std::mt19937_64& rng, double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = d(rng);
  return v;
}

inline std::string config_path(const std::string& name) {
  return std::string(JOINTOPT_CONFIG_DIR) + "/" + name;
}

// Two overlapping w x h parts, part 0 clamped on the left, a unit downward
// load at the right middle of part 1, joints given by (position, mode).
struct ToyJoint {
  Vec2 position;
  jointopt::NdsMode mode = jointopt::NdsMode::Ring;
};

inline jointopt::ModelDefinition toy_definition(int nx, int ny, int shift,
                                                const std::vector<ToyJoint>& joints,
                                                jointopt::VolumeScope scope =
                                                    jointopt::VolumeScope::Global) {
  using namespace jointopt;
  ProblemConfig c;
  c.parts = {{nx, ny, 1.0, Vec2(0, 0)}, {nx, ny, 1.0, Vec2(shift, 0)}};
  SupportConfig s;
  s.nodes.part = 0;
  s.nodes.edge = "left";
  c.supports.push_back(s);
  LoadConfig l;
  l.nodes.part = 1;
  l.nodes.kind = NodeSelector::Kind::Point;
  l.nodes.point = Vec2(shift + nx, 0.5 * ny);
  l.force = Vec2(0, -1);
  c.loads.push_back(l);
  c.filter_radius = 1.5;
  c.volume_scope = scope;
  c.volume_limit = 0.5;
  for (const auto& tj : joints) {
    JointConfig jc;
    jc.position = tj.position;
    jc.pattern = PatternKind::Ring;
    jc.pattern_radii = {1.2, 2.0};
    jc.nds.mode = tj.mode;
    jc.nds.solid_radius = tj.mode == NdsMode::Hole ? 0.0 : 2.5;
    jc.nds.hole_radius = tj.mode == NdsMode::Solid ? 0.0 : 1.0;
    jc.bounds = {2.6 + shift, nx - 2.6, 2.6, ny - 2.6};
    c.joints.push_back(jc);
  }
  return build_model_definition(c);
}

}  // namespace testing_support
