#include <jointopt/gradient_check.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <random>

namespace jointopt {

namespace {

struct Accumulator {
  std::string name;
  std::vector<double> analytic;
  std::vector<double> fd;

  FamilyError finish() const {
    FamilyError f;
    f.name = name;
    f.entries = static_cast<int>(fd.size());
    for (std::size_t k = 0; k < fd.size(); ++k) {
      f.max_abs_error = std::max(f.max_abs_error, std::abs(analytic[k] - fd[k]));
      f.scale = std::max(f.scale, std::abs(fd[k]));
    }
    const double denom =
        std::max(f.scale, std::abs(*std::max_element(analytic.begin(), analytic.end(),
                                                     [](double a, double b) {
                                                       return std::abs(a) < std::abs(b);
                                                     })));
    f.relative = denom > 1e-12 ? f.max_abs_error / denom : 0.0;
    return f;
  }
};

// Scalar quantities taken from one evaluation, in a fixed order.
std::vector<double> quantities(const Evaluation& ev, bool ks) {
  std::vector<double> q{ev.nominal->compliance.total};
  if (ks) q.push_back(ev.ks.value);
  for (const auto& c : ev.constraints) q.push_back(c.value);
  return q;
}

}  // namespace

double GradientReport::worst() const {
  double w = 0.0;
  for (const auto& f : families) w = std::max(w, f.relative);
  return w;
}

void GradientReport::print(std::ostream& os) const {
  for (const auto& f : families) {
    char line[160];
    std::snprintf(line, sizeof line, "%-22s entries %4d  max rel error %.3e  (abs %.3e, scale %.3e)\n",
                  f.name.c_str(), f.entries, f.relative, f.max_abs_error, f.scale);
    os << line;
  }
}

GradientReport verify_gradients(const AssemblyModel& model, const Vector& rho,
                                const std::vector<Vec2>& positions, double beta,
                                const GradientCheckOptions& options) {
  const int ne = model.num_elements();
  const int nj = model.num_joints();
  const int mode = options.failure_mode.value_or(model.definition().failure_mode);
  const bool ks = mode > 0;
  const double h_rho = options.step.value_or(options.density_step);
  const double h_x = options.step.value_or(options.position_step);

  EvalOptions base;
  base.failure_mode = mode;
  const Evaluation ev = model.evaluate(rho, positions, beta, base);

  // Freeze gamma so the KS function is the same at every perturbed point.
  EvalOptions probe;
  probe.gradients = false;
  probe.failure_mode = mode;
  probe.gamma = ks ? ev.gamma : 1.0;

  std::vector<std::string> names{"compliance"};
  if (ks) names.push_back("ks");
  const int nv = model.definition().volume_scope == VolumeScope::Global
                     ? 1
                     : model.mesh().num_parts();
  for (int i = 0; i < nv; ++i)
    names.push_back(nv == 1 ? "volume" : "volume[" + std::to_string(i) + "]");
  const bool has_distance = ev.constraints.size() > static_cast<std::size_t>(nv);
  if (has_distance) names.push_back("min_distance");

  std::vector<const Vector*> grad_rho{&ev.nominal->grad_rho};
  std::vector<const Vector*> grad_x{&ev.nominal->grad_x};
  if (ks) {
    grad_rho.push_back(&ev.objective_grad_rho);
    grad_x.push_back(&ev.objective_grad_x);
  }
  for (const auto& c : ev.constraints) {
    grad_rho.push_back(&c.grad_rho);
    grad_x.push_back(&c.grad_x);
  }

  std::vector<Accumulator> acc_rho, acc_x;
  for (const auto& n : names) {
    acc_rho.push_back({n + "/rho", {}, {}});
    acc_x.push_back({n + "/x", {}, {}});
  }

  std::mt19937_64 rng(options.seed);
  std::vector<int> elements(static_cast<std::size_t>(ne));
  std::iota(elements.begin(), elements.end(), 0);
  std::shuffle(elements.begin(), elements.end(), rng);
  elements.resize(static_cast<std::size_t>(std::clamp(options.samples, 0, ne)));

  for (int e : elements) {
    Vector rp = rho, rm = rho;
    rp[e] += h_rho;
    rm[e] -= h_rho;
    const auto qp = quantities(model.evaluate(rp, positions, beta, probe), ks);
    const auto qm = quantities(model.evaluate(rm, positions, beta, probe), ks);
    for (std::size_t f = 0; f < names.size(); ++f) {
      if (names[f] == "min_distance") continue;
      acc_rho[f].analytic.push_back((*grad_rho[f])[e]);
      acc_rho[f].fd.push_back((qp[f] - qm[f]) / (2.0 * h_rho));
    }
  }

  for (int k = 0; k < 2 * nj; ++k) {
    std::vector<Vec2> pp = positions, pm = positions;
    pp[static_cast<std::size_t>(k / 2)][k % 2] += h_x;
    pm[static_cast<std::size_t>(k / 2)][k % 2] -= h_x;
    const auto qp = quantities(model.evaluate(rho, pp, beta, probe), ks);
    const auto qm = quantities(model.evaluate(rho, pm, beta, probe), ks);
    for (std::size_t f = 0; f < names.size(); ++f) {
      acc_x[f].analytic.push_back((*grad_x[f])[k]);
      acc_x[f].fd.push_back((qp[f] - qm[f]) / (2.0 * h_x));
    }
  }

  GradientReport report;
  for (std::size_t f = 0; f < names.size(); ++f) {
    if (!acc_rho[f].fd.empty()) report.families.push_back(acc_rho[f].finish());
    if (!acc_x[f].fd.empty()) report.families.push_back(acc_x[f].finish());
  }
  return report;
}

GradientReport verify_gradients(const ProblemConfig& config, const GradientCheckOptions& options) {
  const AssemblyModel model(build_model_definition(config));
  std::mt19937_64 rng(options.seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> dist(0.2, 0.9);
  Vector rho(model.num_elements());
  for (int e = 0; e < rho.size(); ++e) rho[e] = dist(rng);
  return verify_gradients(model, rho, model.initial_positions(),
                          config.schedule.beta_values.front(), options);
}

}  // namespace jointopt
