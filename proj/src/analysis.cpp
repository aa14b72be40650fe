#include <jointopt/analysis.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace jointopt {

ComplianceResult compliance(const AugmentedSolution& sol, const AugmentedSystem& sys,
                            const MultiPartMesh& mesh, std::span<const Joint> joints) {
  ComplianceResult r;
  const Vector km_u = sys.material_block * sol.u_m;
  for (const auto& part : mesh.parts()) {
    const double c = sol.u_m.segment(part.dof_offset, part.num_dofs())
                         .dot(km_u.segment(part.dof_offset, part.num_dofs()));
    r.per_part.push_back(c);
  }
  const Vector kc_u = sys.joint_block * sol.u_c;
  int base = 0;
  for (const auto& j : joints) {
    const int n = 4 * j.pattern.count();
    r.per_joint.push_back(sol.u_c.segment(base, n).dot(kc_u.segment(base, n)));
    base += n;
  }
  r.material = std::accumulate(r.per_part.begin(), r.per_part.end(), 0.0);
  r.joint = std::accumulate(r.per_joint.begin(), r.per_joint.end(), 0.0);
  r.total = r.material + r.joint;
  return r;
}

Vector compliance_sensitivity(const Vector& element_energy, const Vector& rho_hat,
                              const SimpLaw& law) {
  return -simp_modulus_derivative(rho_hat, law).cwiseProduct(element_energy);
}

Vector coupling_position_term(const AugmentedSolution& sol,
                              const CouplingMatrix& coupling, int num_joints) {
  Vector g = Vector::Zero(2 * num_joints);
  // Row r of dG only involves its masters, so the pairing is a sum over rows.
  for (std::size_t r = 0; r < coupling.rows.size(); ++r) {
    const auto& row = coupling.rows[r];
    double sx = 0.0, sy = 0.0;
    for (int a = 0; a < 4; ++a) {
      const double u = sol.u_m[row.masters[a]];
      sx += row.dw_dx[a] * u;
      sy += row.dw_dy[a] * u;
    }
    const double lam = sol.lambda[static_cast<Eigen::Index>(r)];
    g[2 * row.joint] -= 2.0 * lam * sx;
    g[2 * row.joint + 1] -= 2.0 * lam * sy;
  }
  return g;
}

Vector mask_position_term(const Vector& d_per_rho_hat, const NdsResult& nds) {
  const int nj = static_cast<int>(nds.d_rho_hat_dx.size());
  Vector g(2 * nj);
  for (int i = 0; i < nj; ++i) {
    g[2 * i] = d_per_rho_hat.dot(nds.d_rho_hat_dx[i]);
    g[2 * i + 1] = d_per_rho_hat.dot(nds.d_rho_hat_dy[i]);
  }
  return g;
}

std::vector<FailureCase> enumerate_failures(int num_joints, int mode,
                                            double degradation_factor) {
  if (mode < 1 || mode > num_joints)
    throw InputError("failure mode must lie in [1, number of joints]");
  std::vector<FailureCase> out;
  std::vector<int> idx(static_cast<std::size_t>(mode));
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    out.push_back({idx, degradation_factor});
    int k = mode - 1;
    while (k >= 0 && idx[static_cast<std::size_t>(k)] == num_joints - mode + k) --k;
    if (k < 0) break;
    ++idx[static_cast<std::size_t>(k)];
    for (int l = k + 1; l < mode; ++l)
      idx[static_cast<std::size_t>(l)] = idx[static_cast<std::size_t>(l - 1)] + 1;
  }
  return out;
}

KsResult ks_aggregate(std::span<const double> values, double gamma) {
  if (values.empty()) throw InputError("KS aggregation of an empty list");
  if (!(gamma > 0.0)) throw InputError("KS parameter must be positive");
  const double cmax = *std::max_element(values.begin(), values.end());
  double sum = 0.0;
  for (double c : values) sum += std::exp(gamma * (c - cmax));
  KsResult r;
  r.value = cmax + std::log(sum) / gamma;
  r.weights.reserve(values.size());
  for (double c : values) r.weights.push_back(std::exp(gamma * (c - cmax)) / sum);
  return r;
}

std::vector<ConstraintValue> volume_constraint(const MultiPartMesh& mesh,
                                               const DensityState& state,
                                               const NdsResult& nds,
                                               VolumeScope scope, double limit) {
  if (!(limit > 0.0 && limit <= 1.0)) throw InputError("volume fraction must lie in (0, 1]");
  const Vector v = mesh.element_volumes();
  std::vector<std::pair<int, int>> scopes;
  if (scope == VolumeScope::Global) {
    scopes.emplace_back(0, mesh.num_elements());
  } else {
    for (const auto& p : mesh.parts())
      scopes.emplace_back(p.element_offset, p.element_offset + p.num_elements());
  }
  std::vector<ConstraintValue> out;
  for (const auto& [b, e] : scopes) {
    const double v0 = v.segment(b, e - b).sum();
    Vector dh = Vector::Zero(mesh.num_elements());
    dh.segment(b, e - b) = v.segment(b, e - b) / v0;
    ConstraintValue cv;
    cv.value = dh.dot(nds.rho_hat) - limit;
    cv.grad_rho = state.chain_to_design(dh, nds.d_rho_hat_d_rho_bar);
    cv.grad_x = mask_position_term(dh, nds);
    out.push_back(std::move(cv));
  }
  return out;
}

ConstraintValue min_distance_constraint(std::span<const Vec2> positions, double d0,
                                        double p, double eps) {
  const int n = static_cast<int>(positions.size());
  if (n < 2) throw InputError("minimum distance needs at least two joints");
  if (!(p > 0.0) || !(eps > 0.0)) throw InputError("aggregation parameters must be positive");
  double sum = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j)
      sum += std::pow((positions[i] - positions[j]).squaredNorm() + eps, -p);
  ConstraintValue cv;
  cv.value = d0 - std::pow(sum, -1.0 / (2.0 * p));
  // dh/ds_ij = -(1/2) S^(-1/(2p)-1) (s_ij+eps)^(-p-1)
  const double outer = -0.5 * std::pow(sum, -1.0 / (2.0 * p) - 1.0);
  cv.grad_x = Vector::Zero(2 * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < i; ++j) {
      const Vec2 diff = positions[j] - positions[i];
      const double w = outer * std::pow(diff.squaredNorm() + eps, -p - 1.0);
      // ds/dx^i = -2 (x^j - x^i), ds/dx^j = +2 (x^j - x^i)
      cv.grad_x.segment<2>(2 * i) += w * (-2.0 * diff);
      cv.grad_x.segment<2>(2 * j) += w * (2.0 * diff);
    }
  }
  return cv;
}

}  // namespace jointopt
