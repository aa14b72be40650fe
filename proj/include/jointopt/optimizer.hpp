#pragma once

#include <jointopt/config.hpp>
#include <jointopt/model.hpp>

#include <functional>
#include <optional>
#include <vector>

namespace jointopt {

struct HistoryRecord {
  int iteration = 0;
  double beta = 0.0;
  double objective = 0.0;  // c, or c_KS with a failure objective
  double compliance = 0.0;  // nominal c
  double c_material = 0.0;
  double c_joint = 0.0;
  std::vector<double> constraints;
  std::vector<Vec2> positions;
  double max_change = 0.0;  // of the scaled design vector in the following step
  double kkt_residual = 0.0;
  // Failure objective only: max_d c_d, the number of cases and gamma.
  double worst_failure = 0.0;
  int failure_cases = 0;
  double gamma = 0.0;
  // Worst over every solve of the iteration: ||G u||_inf / ||u||_inf and
  // |f~^T u~ - (c_m + c_c)| / c.
  double coupling_residual = 0.0;
  double energy_error = 0.0;
};

struct RunHistory {
  std::vector<HistoryRecord> records;
};

struct RunResult {
  RunHistory history;
  Vector rho;      // final design densities
  Vector rho_hat;  // final physical densities
  std::vector<Vec2> positions;
  double beta = 0.0;
  Evaluation final_evaluation;  // of the returned design, no gradients
};

struct RunOptions {
  std::optional<int> iterations;
  std::optional<int> failure_mode;
  std::function<void(const HistoryRecord&)> on_iteration;
};

// Runs the optimization loop for an already-built model.
RunResult run_optimization(const AssemblyModel& model, const ProblemConfig& config,
                           const RunOptions& options = {});

// Builds the model from the configuration and runs it.
RunResult run_optimization(const ProblemConfig& config, const RunOptions& options = {});

}  // namespace jointopt
