#pragma once

#include <jointopt/masks.hpp>
#include <jointopt/mesh_fe.hpp>

#include <array>
#include <span>
#include <vector>

namespace jointopt {

enum class PatternKind { Circular, Ring };

// Spring locations relative to the joint reference point. All springs carry
// the same stiffness; their sum is the joint's resultant stiffness.
struct SpringPattern {
  std::vector<Vec2> offsets;
  double per_spring_stiffness = 0.0;

  int count() const { return static_cast<int>(offsets.size()); }
  double resultant() const { return per_spring_stiffness * count(); }
  double max_radius() const;
};

// Circular: radii = {force_radius}; 1 spring at the center, 8 at half the
// radius and 16 on the radius (25 total).
// Ring: radii = {inner, outer}; 12 springs on each circle (24 total).
SpringPattern generate_pattern(PatternKind kind, std::span<const double> radii,
                               double resultant_stiffness);

struct NdsSpec {
  NdsMode mode = NdsMode::Ring;
  double solid_radius = 0.0;  // Solid and Ring
  double hole_radius = 0.0;   // Hole and Ring

  double outer_radius() const;
  void validate() const;
};

struct JointBounds {
  double x_lo = 0.0, x_hi = 0.0, y_lo = 0.0, y_hi = 0.0;

  bool contains(const Vec2& p) const {
    return p.x() >= x_lo && p.x() <= x_hi && p.y() >= y_lo && p.y() <= y_hi;
  }
  double width() const { return x_hi - x_lo; }
  double height() const { return y_hi - y_lo; }
};

struct Joint {
  Vec2 position = Vec2::Zero();
  SpringPattern pattern;
  NdsSpec nds;
  JointBounds bounds;
  std::array<int, 2> parts{0, 1};

  double stiffness() const { return pattern.resultant(); }
};

// Overlap rectangle of two parts inset by `inset` on every side.
JointBounds overlap_bounds(const PartMesh& a, const PartMesh& b, double inset);

// Joint DOFs: joint-major, then spring, then connected part, then x/y.
int joint_dof_count(std::span<const Joint> joints);
int joint_dof_offset(std::span<const Joint> joints, int joint);

// Block-diagonal spring stiffness. joint_scale (optional, one per joint)
// multiplies a joint's springs, used to degrade failed joints.
SparseMatrix assemble_joint_block(std::span<const Joint> joints,
                                  std::span<const double> joint_scale = {});

struct CouplingRow {
  int joint = 0;
  int spring = 0;
  int part_slot = 0;  // 0 or 1: which of the joint's parts
  int component = 0;  // 0 = x, 1 = y
  int slave = 0;      // joint DOF index (column n_m + slave in G)
  std::array<int, 4> masters{};
  std::array<double, 4> weights{};
  std::array<double, 4> dw_dx{};
  std::array<double, 4> dw_dy{};
};

// Coupling equations sum_j w_j u_m^j - u_c = 0, one row per slave DOF in
// joint DOF order, so G = [W, -I].
struct CouplingMatrix {
  SparseMatrix g;
  std::vector<CouplingRow> rows;
  int num_material_dofs = 0;
  int num_joint_dofs = 0;
};

CouplingMatrix build_coupling(std::span<const Joint> joints,
                              const MultiPartMesh& mesh);

// dG/d(x^joint) for coordinate 0 (x) or 1 (y).
SparseMatrix coupling_position_derivative(const CouplingMatrix& coupling,
                                          int joint, int coordinate);

}  // namespace jointopt
