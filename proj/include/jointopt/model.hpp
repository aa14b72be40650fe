#pragma once

#include <jointopt/analysis.hpp>

#include <optional>
#include <span>
#include <vector>

namespace jointopt {

struct MinDistanceSpec {
  double d0 = 20.0;
  double p = 8.0;
  double eps = 0.01;
};

// Fully resolved numerical problem: meshes, material, supports, loads,
// joints (with their initial positions) and constraint settings.
struct ModelDefinition {
  MultiPartMesh mesh;
  SimpLaw law;
  double nu = 0.3;
  double filter_radius = 4.0;
  double eta = 0.5;
  double alpha = 10.0;
  std::vector<Joint> joints;
  Vector f_m;
  std::vector<int> fixed_dofs;
  VolumeScope volume_scope = VolumeScope::Global;
  double volume_limit = 0.4;
  std::optional<MinDistanceSpec> min_distance;
  int failure_mode = 0;  // 0: nominal compliance objective
  double degradation = 1e-6;
};

struct EvalOptions {
  bool gradients = true;
  bool nominal = true;            // solve the intact assembly
  std::optional<int> failure_mode;  // overrides the definition when set
  double gamma = 0.0;             // KS parameter; <= 0 means gamma_factor / nominal c
  double gamma_factor = 20.0;
  bool mask_position_term = true;  // disabling breaks dc/dx on purpose (tests)
};

struct CaseResult {
  ComplianceResult compliance;
  double external_work = 0.0;  // f~^T u~
  Vector grad_rho;             // dc/d rho
  Vector grad_x;               // dc/d x, 2 per joint
  SolveReport report;
};

struct Evaluation {
  Vector rho_hat;
  std::optional<CaseResult> nominal;
  std::vector<FailureCase> cases;
  std::vector<CaseResult> failures;
  KsResult ks;
  double gamma = 0.0;

  double objective = 0.0;
  Vector objective_grad_rho;
  Vector objective_grad_x;
  // Volume constraints (global or one per part), then min distance if set.
  std::vector<ConstraintValue> constraints;
};

class AssemblyModel {
 public:
  explicit AssemblyModel(ModelDefinition def);

  const ModelDefinition& definition() const { return def_; }
  const MultiPartMesh& mesh() const { return def_.mesh; }
  int num_elements() const { return def_.mesh.num_elements(); }
  int num_joints() const { return static_cast<int>(def_.joints.size()); }
  std::vector<Vec2> initial_positions() const;

  Evaluation evaluate(const Vector& rho, std::span<const Vec2> positions,
                      double beta, const EvalOptions& options = {}) const;

  // Worst compliance over all C(n_j, m) failure cases of a design.
  double worst_failure_compliance(const Vector& rho, std::span<const Vec2> positions,
                                  double beta, int mode) const;

 private:
  std::vector<Joint> joints_at(std::span<const Vec2> positions) const;
  void check_case_connectivity(const FailureCase& fc) const;

  ModelDefinition def_;
  DensityFilter filter_;
  ElementStiffness ke_;
  std::vector<char> supported_part_;
};

}  // namespace jointopt
