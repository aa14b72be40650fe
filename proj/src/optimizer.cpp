#include <jointopt/optimizer.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace jointopt {

namespace {

struct PositionScaling {
  std::vector<Vec2> lo;
  std::vector<Vec2> range;

  explicit PositionScaling(const ModelDefinition& def) {
    for (const auto& j : def.joints) {
      lo.emplace_back(j.bounds.x_lo, j.bounds.y_lo);
      range.emplace_back(j.bounds.width(), j.bounds.height());
    }
  }

  double to_unit(std::size_t j, int c, double x) const {
    return range[j][c] > 0.0 ? (x - lo[j][c]) / range[j][c] : 0.0;
  }
  double from_unit(std::size_t j, int c, double s) const {
    return lo[j][c] + std::clamp(s, 0.0, 1.0) * range[j][c];
  }
};

std::string diagnostic(int iteration, const Evaluation& ev, const Vector& rho,
                       const std::vector<Vec2>& positions) {
  std::ostringstream os;
  os << "non-finite objective at iteration " << iteration << " (objective " << ev.objective
     << ", rho in [" << rho.minCoeff() << ", " << rho.maxCoeff() << "]";
  for (std::size_t j = 0; j < positions.size(); ++j)
    os << ", joint " << j << " at (" << positions[j].x() << ", " << positions[j].y() << ")";
  os << ")";
  return os.str();
}

}  // namespace

RunResult run_optimization(const AssemblyModel& model, const ProblemConfig& config,
                           const RunOptions& options) {
  const ModelDefinition& def = model.definition();
  const int ne = model.num_elements();
  const int nj = model.num_joints();
  const int n = ne + 2 * nj;
  const int iterations = options.iterations.value_or(config.schedule.iterations);
  const int mode = options.failure_mode.value_or(def.failure_mode);
  if (iterations < 0) throw InputError("iterations must be >= 0");
  if (mode < 0 || mode > nj) throw InputError("failure mode must lie in [0, number of joints]");

  const PositionScaling scaling(def);
  Vector rho = Vector::Constant(ne, def.volume_limit);
  std::vector<Vec2> positions = model.initial_positions();

  Eigen::VectorXd z(n);
  z.head(ne) = rho;
  for (int j = 0; j < nj; ++j)
    for (int c = 0; c < 2; ++c)
      z[ne + 2 * j + c] = scaling.to_unit(static_cast<std::size_t>(j), c, positions[j][c]);
  Eigen::VectorXd zmin = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd zmax = Eigen::VectorXd::Ones(n);
  for (int j = 0; j < nj; ++j)
    for (int c = 0; c < 2; ++c)
      if (scaling.range[static_cast<std::size_t>(j)][c] <= 0.0) zmax[ne + 2 * j + c] = 0.0;

  RunResult result;
  MmaState mma_state;
  double gamma = 0.0;
  double objective_scale = 1.0;
  double previous_beta = -1.0;
  const double d0 = def.min_distance ? def.min_distance->d0 : 1.0;

  for (int it = 0; it < iterations; ++it) {
    const double beta = config.schedule.beta_at(it);
    EvalOptions eo;
    eo.failure_mode = mode;
    eo.gamma_factor = config.ks_gamma_factor;
    eo.gamma = beta != previous_beta ? 0.0 : gamma;
    previous_beta = beta;

    Evaluation ev;
    try {
      ev = model.evaluate(rho, positions, beta, eo);
    } catch (const NumericalError& e) {
      throw NumericalError("iteration " + std::to_string(it) + ": " + e.what());
    }
    if (!std::isfinite(ev.objective) || !ev.objective_grad_rho.allFinite() ||
        !ev.objective_grad_x.allFinite())
      throw NumericalError(diagnostic(it, ev, rho, positions));
    gamma = ev.gamma;
    if (it == 0) {
      if (!(ev.objective > 0.0)) throw NumericalError(diagnostic(it, ev, rho, positions));
      objective_scale = 1.0 / ev.objective;
    }

    HistoryRecord rec;
    rec.iteration = it;
    rec.beta = beta;
    rec.objective = ev.objective;
    if (ev.nominal) {
      rec.compliance = ev.nominal->compliance.total;
      rec.c_material = ev.nominal->compliance.material;
      rec.c_joint = ev.nominal->compliance.joint;
    }
    rec.positions = positions;
    rec.gamma = ev.gamma;
    rec.failure_cases = static_cast<int>(ev.failures.size());
    auto track = [&rec](const CaseResult& cr) {
      rec.coupling_residual = std::max(rec.coupling_residual, cr.report.coupling_residual);
      const double c = cr.compliance.total;
      rec.energy_error = std::max(rec.energy_error, std::abs(cr.external_work - c) / c);
    };
    if (ev.nominal) track(*ev.nominal);
    for (const auto& cr : ev.failures) {
      track(cr);
      rec.worst_failure = std::max(rec.worst_failure, cr.compliance.total);
    }

    // Scaled problem: objective relative to its first value, positions on
    // [0, 1], the distance constraint relative to d0.
    Eigen::VectorXd df0(n);
    df0.head(ne) = objective_scale * ev.objective_grad_rho;
    for (int j = 0; j < nj; ++j)
      for (int c = 0; c < 2; ++c)
        df0[ne + 2 * j + c] = objective_scale * ev.objective_grad_x[2 * j + c] *
                              scaling.range[static_cast<std::size_t>(j)][c];

    const int m = static_cast<int>(ev.constraints.size());
    const bool has_distance = def.min_distance.has_value() && nj >= 2;
    Eigen::VectorXd fval(m);
    Eigen::MatrixXd dfdx = Eigen::MatrixXd::Zero(m, n);
    for (int i = 0; i < m; ++i) {
      const ConstraintValue& cv = ev.constraints[static_cast<std::size_t>(i)];
      rec.constraints.push_back(cv.value);
      const double s = (has_distance && i == m - 1) ? 1.0 / d0 : 1.0;
      fval[i] = s * cv.value;
      if (cv.grad_rho.size() == ne) dfdx.row(i).head(ne) = s * cv.grad_rho.transpose();
      for (int j = 0; j < nj; ++j)
        for (int c = 0; c < 2; ++c)
          dfdx(i, ne + 2 * j + c) =
              s * cv.grad_x[2 * j + c] * scaling.range[static_cast<std::size_t>(j)][c];
    }

    const MmaStepResult step = mma_step(z, objective_scale * ev.objective, df0, fval, dfdx,
                                        zmin, zmax, mma_state, config.mma);
    rec.max_change = (step.x - z).cwiseAbs().maxCoeff();
    rec.kkt_residual = step.kkt_residual;
    z = step.x;
    rho = z.head(ne);
    for (int j = 0; j < nj; ++j)
      for (int c = 0; c < 2; ++c)
        positions[static_cast<std::size_t>(j)][c] =
            scaling.from_unit(static_cast<std::size_t>(j), c, z[ne + 2 * j + c]);

    if (options.on_iteration) options.on_iteration(rec);
    result.history.records.push_back(std::move(rec));
  }

  result.beta = config.schedule.beta_at(std::max(iterations - 1, 0));
  EvalOptions fo;
  fo.gradients = false;
  fo.failure_mode = mode;
  fo.gamma_factor = config.ks_gamma_factor;
  fo.gamma = result.beta == previous_beta ? gamma : 0.0;
  try {
    result.final_evaluation = model.evaluate(rho, positions, result.beta, fo);
  } catch (const NumericalError& e) {
    throw NumericalError("final design: " + std::string(e.what()));
  }
  result.rho = rho;
  result.rho_hat = result.final_evaluation.rho_hat;
  result.positions = positions;
  return result;
}

RunResult run_optimization(const ProblemConfig& config, const RunOptions& options) {
  const AssemblyModel model(build_model_definition(config));
  return run_optimization(model, config, options);
}

}  // namespace jointopt
