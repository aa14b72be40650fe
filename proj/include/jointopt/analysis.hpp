#pragma once

#include <jointopt/density_fields.hpp>
#include <jointopt/joints.hpp>
#include <jointopt/masks.hpp>
#include <jointopt/mesh_fe.hpp>

#include <span>
#include <vector>

namespace jointopt {

struct ComplianceResult {
  double total = 0.0;
  double material = 0.0;
  double joint = 0.0;
  std::vector<double> per_part;
  std::vector<double> per_joint;
};

// c = u_m^T K_m u_m + u_c^T K_c u_c, split by part and by joint.
ComplianceResult compliance(const AugmentedSolution& sol, const AugmentedSystem& sys,
                            const MultiPartMesh& mesh, std::span<const Joint> joints);

// dc/d(rho_hat_j) = -E'(rho_hat_j) * u_e^T ke u_e.
Vector compliance_sensitivity(const Vector& element_energy, const Vector& rho_hat,
                              const SimpLaw& law);

// Direct term of dc/dx through the coupling equations:
// -u~^T dK~/dx u~ restricted to the G blocks = -2 lambda^T (dG/dx) [u_m; u_c].
// Returns 2 entries per joint (x then y).
Vector coupling_position_term(const AugmentedSolution& sol,
                              const CouplingMatrix& coupling, int num_joints);

// Indirect term: sum_j (d f / d rho_hat_j) (d rho_hat_j / d x_i).
Vector mask_position_term(const Vector& d_per_rho_hat, const NdsResult& nds);

struct FailureCase {
  std::vector<int> failed_joints;
  double degradation_factor = 1e-6;
};

// All C(n_j, m) combinations in lexicographic order.
std::vector<FailureCase> enumerate_failures(int num_joints, int mode,
                                            double degradation_factor = 1e-6);

struct KsResult {
  double value = 0.0;
  std::vector<double> weights;  // sum to one
};

// (1/gamma) log sum exp(gamma c_d), evaluated in shifted form.
KsResult ks_aggregate(std::span<const double> values, double gamma);

// grad_rho may be empty when the constraint does not depend on densities.
struct ConstraintValue {
  double value = 0.0;
  Vector grad_rho;
  Vector grad_x;
};

enum class VolumeScope { Global, PerPart };

// h = V/V0 - limit (one value, or one per part) with gradients chained
// through the joint masks, projection and filter.
std::vector<ConstraintValue> volume_constraint(const MultiPartMesh& mesh,
                                               const DensityState& state,
                                               const NdsResult& nds,
                                               VolumeScope scope, double limit);

// h = d0 - (sum_{i<j} (s_ij + eps)^-p)^(-1/(2p)) with s_ij the squared
// distance between reference points.
ConstraintValue min_distance_constraint(std::span<const Vec2> positions, double d0,
                                        double p, double eps);

}  // namespace jointopt
