#pragma once

#include <jointopt/config.hpp>
#include <jointopt/model.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace jointopt {

struct GradientCheckOptions {
  int samples = 10;                 // random density entries checked
  std::optional<double> step;       // overrides both default steps
  double density_step = 1e-5;
  double position_step = 1e-6;
  std::uint64_t seed = 1;
  std::optional<int> failure_mode;  // adds the KS family when > 0
};

// Error of one gradient family: max |analytic - fd| / max |fd|.
struct FamilyError {
  std::string name;
  int entries = 0;
  double max_abs_error = 0.0;
  double scale = 0.0;  // max |fd|
  double relative = 0.0;
};

struct GradientReport {
  std::vector<FamilyError> families;

  double worst() const;
  bool passed(double tolerance = 1e-3) const { return worst() < tolerance; }
  void print(std::ostream& os) const;
};

// Central differences around (rho, positions) at projection sharpness beta.
GradientReport verify_gradients(const AssemblyModel& model, const Vector& rho,
                                const std::vector<Vec2>& positions, double beta,
                                const GradientCheckOptions& options);

// Same at a seeded random design (densities in [0.2, 0.9], initial joint
// positions, first beta of the schedule).
GradientReport verify_gradients(const ProblemConfig& config, const GradientCheckOptions& options);

}  // namespace jointopt
