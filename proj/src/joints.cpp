#include <jointopt/joints.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace jointopt {

double SpringPattern::max_radius() const {
  double r = 0.0;
  for (const auto& o : offsets) r = std::max(r, o.norm());
  return r;
}

namespace {

void append_circle(std::vector<Vec2>& out, double radius, int count) {
  for (int k = 0; k < count; ++k) {
    const double a = 2.0 * std::numbers::pi * k / count;
    out.emplace_back(radius * std::cos(a), radius * std::sin(a));
  }
}

}  // namespace

SpringPattern generate_pattern(PatternKind kind, std::span<const double> radii,
                               double resultant_stiffness) {
  if (!(resultant_stiffness > 0.0)) throw InputError("joint stiffness must be positive");
  for (double r : radii)
    if (!(r > 0.0)) throw InputError("spring pattern radii must be positive");
  SpringPattern p;
  switch (kind) {
    case PatternKind::Circular:
      if (radii.size() != 1) throw InputError("circular pattern takes one radius");
      p.offsets.emplace_back(0.0, 0.0);
      append_circle(p.offsets, 0.5 * radii[0], 8);
      append_circle(p.offsets, radii[0], 16);
      break;
    case PatternKind::Ring:
      if (radii.size() != 2 || !(radii[0] < radii[1]))
        throw InputError("ring pattern takes two increasing radii");
      append_circle(p.offsets, radii[0], 12);
      append_circle(p.offsets, radii[1], 12);
      break;
  }
  p.per_spring_stiffness = resultant_stiffness / p.count();
  return p;
}

double NdsSpec::outer_radius() const {
  switch (mode) {
    case NdsMode::Hole: return hole_radius;
    case NdsMode::Solid:
    case NdsMode::Ring: return solid_radius;
  }
  return 0.0;
}

void NdsSpec::validate() const {
  if (mode != NdsMode::Hole && !(solid_radius > 0.0))
    throw InputError("solid zone radius must be positive");
  if (mode != NdsMode::Solid && !(hole_radius > 0.0))
    throw InputError("hole radius must be positive");
  if (mode == NdsMode::Ring && !(hole_radius < solid_radius))
    throw InputError("ring hole radius must be smaller than its outer radius");
}

JointBounds overlap_bounds(const PartMesh& a, const PartMesh& b, double inset) {
  JointBounds r;
  r.x_lo = std::max(a.origin.x(), b.origin.x()) + inset;
  r.x_hi = std::min(a.origin.x() + a.width(), b.origin.x() + b.width()) - inset;
  r.y_lo = std::max(a.origin.y(), b.origin.y()) + inset;
  r.y_hi = std::min(a.origin.y() + a.height(), b.origin.y() + b.height()) - inset;
  if (!(r.x_lo < r.x_hi) || !(r.y_lo < r.y_hi)) {
    throw InputError("parts do not overlap enough to host the joint");
  }
  return r;
}

int joint_dof_count(std::span<const Joint> joints) {
  int n = 0;
  for (const auto& j : joints) n += 4 * j.pattern.count();
  return n;
}

int joint_dof_offset(std::span<const Joint> joints, int joint) {
  return joint_dof_count(joints.first(static_cast<std::size_t>(joint)));
}

SparseMatrix assemble_joint_block(std::span<const Joint> joints,
                                  std::span<const double> joint_scale) {
  if (!joint_scale.empty() && joint_scale.size() != joints.size())
    throw InputError("one stiffness scale per joint expected");
  const int n = joint_dof_count(joints);
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(n) * 2);
  int base = 0;
  for (std::size_t i = 0; i < joints.size(); ++i) {
    const double scale = joint_scale.empty() ? 1.0 : joint_scale[i];
    const double k = scale * joints[i].pattern.per_spring_stiffness;
    for (int s = 0; s < joints[i].pattern.count(); ++s) {
      const int d0 = base + 4 * s;  // part slot 0, then part slot 1
      for (int c = 0; c < 2; ++c) {
        const int a = d0 + c, b = d0 + 2 + c;
        t.emplace_back(a, a, k);
        t.emplace_back(b, b, k);
        t.emplace_back(a, b, -k);
        t.emplace_back(b, a, -k);
      }
    }
    base += 4 * joints[i].pattern.count();
  }
  SparseMatrix kc(n, n);
  kc.setFromTriplets(t.begin(), t.end());
  return kc;
}

CouplingMatrix build_coupling(std::span<const Joint> joints,
                              const MultiPartMesh& mesh) {
  CouplingMatrix cm;
  cm.num_material_dofs = mesh.num_dofs();
  cm.num_joint_dofs = joint_dof_count(joints);
  cm.rows.reserve(static_cast<std::size_t>(cm.num_joint_dofs));

  int slave = 0;
  for (std::size_t i = 0; i < joints.size(); ++i) {
    const Joint& joint = joints[i];
    for (int s = 0; s < joint.pattern.count(); ++s) {
      const Vec2 p = joint.position + joint.pattern.offsets[static_cast<std::size_t>(s)];
      for (int slot = 0; slot < 2; ++slot) {
        const int part_index = joint.parts[static_cast<std::size_t>(slot)];
        if (part_index < 0 || part_index >= mesh.num_parts())
          throw InputError("joint references a missing part");
        const PartMesh& part = mesh.part(part_index);
        const auto loc = locate_point(part, p);
        if (!loc) {
          std::ostringstream os;
          os << "spring " << s << " of joint " << i << " at (" << p.x() << ", "
             << p.y() << ") lies outside part " << part_index;
          throw InputError(os.str());
        }
        const auto nodes = part.element_nodes(loc->local_element);
        const auto n = bilinear_shape(loc->xi);
        const auto dn = bilinear_shape_gradient(loc->xi);
        const double dxi_dx = 2.0 / part.element_size;
        for (int c = 0; c < 2; ++c) {
          CouplingRow row;
          row.joint = static_cast<int>(i);
          row.spring = s;
          row.part_slot = slot;
          row.component = c;
          row.slave = slave++;
          for (int a = 0; a < 4; ++a) {
            row.masters[a] = part.node_dof(nodes[a], c);
            row.weights[a] = n[a];
            row.dw_dx[a] = dn[a].x() * dxi_dx;
            row.dw_dy[a] = dn[a].y() * dxi_dx;
          }
          cm.rows.push_back(row);
        }
      }
    }
  }

  std::vector<Triplet> t;
  t.reserve(cm.rows.size() * 5);
  for (std::size_t r = 0; r < cm.rows.size(); ++r) {
    const auto& row = cm.rows[r];
    for (int a = 0; a < 4; ++a)
      if (row.weights[a] != 0.0) t.emplace_back(int(r), row.masters[a], row.weights[a]);
    t.emplace_back(int(r), cm.num_material_dofs + row.slave, -1.0);
  }
  cm.g.resize(cm.num_joint_dofs, cm.num_material_dofs + cm.num_joint_dofs);
  cm.g.setFromTriplets(t.begin(), t.end());
  return cm;
}

SparseMatrix coupling_position_derivative(const CouplingMatrix& coupling,
                                          int joint, int coordinate) {
  std::vector<Triplet> t;
  for (std::size_t r = 0; r < coupling.rows.size(); ++r) {
    const auto& row = coupling.rows[r];
    if (row.joint != joint) continue;
    const auto& dw = coordinate == 0 ? row.dw_dx : row.dw_dy;
    for (int a = 0; a < 4; ++a) t.emplace_back(int(r), row.masters[a], dw[a]);
  }
  SparseMatrix d(coupling.g.rows(), coupling.g.cols());
  d.setFromTriplets(t.begin(), t.end());
  return d;
}

}  // namespace jointopt
