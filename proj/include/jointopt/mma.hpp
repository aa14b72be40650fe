#pragma once

#include <jointopt/types.hpp>

#include <Eigen/Dense>

namespace jointopt {

// Method of Moving Asymptotes for
//   min f0(x)  s.t.  f_i(x) <= 0,  xmin <= x <= xmax
// using the standard artificial-variable form (a0 = 1, a_i = 0, c_i, d_i)
// and a primal-dual interior point solver for the convex subproblem.
struct MmaSettings {
  double asymptote_init = 0.5;
  double asymptote_increase = 1.2;
  double asymptote_decrease = 0.7;
  double asymptote_min = 1e-5;  // closest / farthest asymptote, fraction of range
  double asymptote_max = 10.0;
  double move = 0.2;  // fraction of (xmax - xmin) per iteration
  double albefa = 0.1;
  double raa0 = 1e-5;
  double subproblem_tolerance = 1e-9;
  double c_penalty = 1000.0;
  double d_penalty = 1.0;
};

struct MmaState {
  Eigen::VectorXd low;
  Eigen::VectorXd upp;
  Eigen::VectorXd xold1;
  Eigen::VectorXd xold2;
  int iteration = 0;
};

struct MmaStepResult {
  Eigen::VectorXd x;
  Eigen::VectorXd y;
  double z = 0.0;
  Eigen::VectorXd lambda;
  double kkt_residual = 0.0;  // max-norm of the subproblem KKT residual
};

// One MMA iteration. dfdx is m x n. Updates `state` in place.
MmaStepResult mma_step(const Eigen::VectorXd& x, double f0, const Eigen::VectorXd& df0,
                       const Eigen::VectorXd& fval, const Eigen::MatrixXd& dfdx,
                       const Eigen::VectorXd& xmin, const Eigen::VectorXd& xmax,
                       MmaState& state, const MmaSettings& settings = {});

}  // namespace jointopt
