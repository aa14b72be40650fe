#include <jointopt/kernels.hpp>
#include <jointopt/model.hpp>

#include <algorithm>
#include <sstream>

namespace jointopt {

AssemblyModel::AssemblyModel(ModelDefinition def)
    : def_(std::move(def)),
      filter_(build_filter(def_.mesh, def_.filter_radius)),
      ke_(element_stiffness_q4(def_.nu)) {
  def_.law.validate();
  if (def_.f_m.size() != def_.mesh.num_dofs())
    throw InputError("load vector does not match the mesh");
  supported_part_.assign(static_cast<std::size_t>(def_.mesh.num_parts()), 0);
  for (int d : def_.fixed_dofs) {
    for (const auto& p : def_.mesh.parts())
      if (d >= p.dof_offset && d < p.dof_offset + p.num_dofs())
        supported_part_[static_cast<std::size_t>(&p - def_.mesh.parts().data())] = 1;
  }
  for (const auto& j : def_.joints) j.nds.validate();
}

std::vector<Vec2> AssemblyModel::initial_positions() const {
  std::vector<Vec2> out;
  for (const auto& j : def_.joints) out.push_back(j.position);
  return out;
}

std::vector<Joint> AssemblyModel::joints_at(std::span<const Vec2> positions) const {
  if (positions.size() != def_.joints.size())
    throw InputError("one position per joint expected");
  std::vector<Joint> joints = def_.joints;
  for (std::size_t i = 0; i < joints.size(); ++i) joints[i].position = positions[i];
  return joints;
}

void AssemblyModel::check_case_connectivity(const FailureCase& fc) const {
  const int np = def_.mesh.num_parts();
  std::vector<char> anchored = supported_part_;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int i = 0; i < num_joints(); ++i) {
      if (std::find(fc.failed_joints.begin(), fc.failed_joints.end(), i) !=
          fc.failed_joints.end())
        continue;
      const auto [a, b] = def_.joints[static_cast<std::size_t>(i)].parts;
      if (anchored[a] != anchored[b]) {
        anchored[a] = anchored[b] = 1;
        changed = true;
      }
    }
  }
  for (int p = 0; p < np; ++p) {
    if (!anchored[static_cast<std::size_t>(p)]) {
      std::ostringstream os;
      os << "singular system for failure case {";
      for (std::size_t k = 0; k < fc.failed_joints.size(); ++k)
        os << (k ? "," : "") << fc.failed_joints[k];
      os << "}: part " << p << " is held only by failed joints";
      throw NumericalError(os.str());
    }
  }
}

Evaluation AssemblyModel::evaluate(const Vector& rho, std::span<const Vec2> positions,
                                   double beta, const EvalOptions& options) const {
  const auto& mesh = def_.mesh;
  const int nj = num_joints();
  const std::vector<Joint> joints = joints_at(positions);

  DensityState state(filter_, def_.eta);
  state.update(rho, beta);

  std::vector<JointMasks> masks;
  masks.reserve(joints.size());
  for (const auto& j : joints) {
    std::vector<std::pair<int, int>> ranges;
    for (int p : j.parts) {
      const auto& part = mesh.part(p);
      ranges.emplace_back(part.element_offset, part.element_offset + part.num_elements());
    }
    JointMasks jm;
    jm.mode = j.nds.mode;
    if (j.nds.mode != NdsMode::Hole)
      jm.solid = single_mask(j.position, {j.nds.solid_radius, def_.alpha},
                             mesh.element_centers(), ranges);
    if (j.nds.mode != NdsMode::Solid)
      jm.hole = single_mask(j.position, {j.nds.hole_radius, def_.alpha},
                            mesh.element_centers(), ranges);
    masks.push_back(std::move(jm));
  }
  const NdsResult nds = apply_nds(state.rho_bar(), masks);
  const SparseMatrix km =
      assemble_material_block(mesh, simp_modulus(nds.rho_hat, def_.law), ke_);
  const CouplingMatrix coupling = build_coupling(joints, mesh);

  auto solve_case = [&](std::span<const double> scale) {
    CaseResult cr;
    const AugmentedSystem sys{km, assemble_joint_block(joints, scale), coupling.g};
    const AugmentedSolution sol = solve_augmented(sys, def_.f_m, def_.fixed_dofs, &cr.report);
    cr.compliance = compliance(sol, sys, mesh, joints);
    cr.external_work = def_.f_m.dot(sol.u_m);
    if (options.gradients) {
      const Vector energy = kernels::parallel::element_energies(mesh, ke_, sol.u_m);
      const Vector dc = compliance_sensitivity(energy, nds.rho_hat, def_.law);
      cr.grad_rho = state.chain_to_design(dc, nds.d_rho_hat_d_rho_bar);
      cr.grad_x = coupling_position_term(sol, coupling, nj);
      if (options.mask_position_term) cr.grad_x += mask_position_term(dc, nds);
    }
    return cr;
  };

  Evaluation ev;
  ev.rho_hat = nds.rho_hat;
  const int mode = options.failure_mode.value_or(def_.failure_mode);
  if (options.nominal || mode == 0 || options.gamma <= 0.0) {
    check_case_connectivity({});
    ev.nominal = solve_case({});
  }

  if (mode > 0) {
    ev.cases = enumerate_failures(nj, mode, def_.degradation);
    std::vector<double> values;
    for (const auto& fc : ev.cases) {
      check_case_connectivity(fc);
      std::vector<double> scale(static_cast<std::size_t>(nj), 1.0);
      for (int i : fc.failed_joints) scale[static_cast<std::size_t>(i)] = fc.degradation_factor;
      ev.failures.push_back(solve_case(scale));
      values.push_back(ev.failures.back().compliance.total);
    }
    ev.gamma = options.gamma > 0.0 ? options.gamma
                                   : options.gamma_factor / ev.nominal->compliance.total;
    ev.ks = ks_aggregate(values, ev.gamma);
    ev.objective = ev.ks.value;
    if (options.gradients) {
      ev.objective_grad_rho = Vector::Zero(mesh.num_elements());
      ev.objective_grad_x = Vector::Zero(2 * nj);
      for (std::size_t d = 0; d < ev.failures.size(); ++d) {
        ev.objective_grad_rho += ev.ks.weights[d] * ev.failures[d].grad_rho;
        ev.objective_grad_x += ev.ks.weights[d] * ev.failures[d].grad_x;
      }
    }
  } else {
    ev.objective = ev.nominal->compliance.total;
    if (options.gradients) {
      ev.objective_grad_rho = ev.nominal->grad_rho;
      ev.objective_grad_x = ev.nominal->grad_x;
    }
  }

  ev.constraints =
      volume_constraint(mesh, state, nds, def_.volume_scope, def_.volume_limit);
  if (def_.min_distance && nj >= 2) {
    const auto& md = *def_.min_distance;
    ev.constraints.push_back(min_distance_constraint(positions, md.d0, md.p, md.eps));
  }
  return ev;
}

double AssemblyModel::worst_failure_compliance(const Vector& rho,
                                               std::span<const Vec2> positions,
                                               double beta, int mode) const {
  EvalOptions o;
  o.gradients = false;
  o.nominal = false;
  o.failure_mode = mode;
  o.gamma = 1.0;
  const Evaluation ev = evaluate(rho, positions, beta, o);
  double worst = 0.0;
  for (const auto& f : ev.failures) worst = std::max(worst, f.compliance.total);
  return worst;
}

}  // namespace jointopt
