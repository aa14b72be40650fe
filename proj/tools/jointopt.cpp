#include <jointopt/config.hpp>
#include <jointopt/export.hpp>
#include <jointopt/gradient_check.hpp>
#include <jointopt/optimizer.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;

jointopt::ProblemConfig load(const std::string& path) {
  jointopt::ProblemConfig config = jointopt::load_config(path);
  for (const auto& w : config.warnings) std::cerr << "warning: " << w << "\n";
  return config;
}

int optimize(const std::string& config_path, const std::string& out_dir,
             std::optional<int> iterations, std::optional<int> failure_mode) {
  const jointopt::ProblemConfig config = load(config_path);
  const jointopt::AssemblyModel model(jointopt::build_model_definition(config));
  jointopt::RunOptions options;
  options.iterations = iterations;
  options.failure_mode = failure_mode;
  options.on_iteration = [](const jointopt::HistoryRecord& r) {
    std::printf("it %4d  beta %4.1f  obj %12.6g  c %12.6g  c_c %10.4g  change %8.4f\n",
                r.iteration, r.beta, r.objective, r.compliance, r.c_joint, r.max_change);
    std::fflush(stdout);
  };
  const jointopt::RunResult result = jointopt::run_optimization(model, config, options);
  const auto files = jointopt::export_results(result, config, model.mesh(), out_dir);
  const auto& ev = result.final_evaluation;
  std::printf("final objective %.8g", ev.objective);
  if (ev.nominal) std::printf("  compliance %.8g", ev.nominal->compliance.total);
  std::printf("\nwrote %zu files to %s\n", files.size(), out_dir.c_str());
  return 0;
}

int check_gradients(const std::string& config_path, int samples, std::optional<double> step,
                    std::optional<int> failure_mode) {
  const jointopt::ProblemConfig config = load(config_path);
  jointopt::GradientCheckOptions options;
  options.samples = samples;
  options.step = step;
  options.failure_mode = failure_mode;
  const jointopt::GradientReport report = jointopt::verify_gradients(config, options);
  report.print(std::cout);
  const bool ok = report.passed(1e-3);
  std::printf("%s: worst relative error %.3e (tolerance 1e-3)\n", ok ? "PASS" : "FAIL",
              report.worst());
  return ok ? 0 : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simultaneous topology and joint placement optimization of multi-part assemblies"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::optional<int> iterations, failure_mode, gc_failure_mode;
  auto* opt = app.add_subcommand("optimize", "Run the optimization and export results");
  opt->add_option("--config", config_path, "Problem configuration (JSON)")->required();
  opt->add_option("--out", out_dir, "Output directory")->required();
  opt->add_option("--iterations", iterations, "Override the iteration count")
      ->check(CLI::NonNegativeNumber);
  opt->add_option("--failure-mode", failure_mode,
                  "Number of simultaneous joint failures (0 = nominal)")
      ->check(CLI::NonNegativeNumber);

  int samples = 10;
  std::optional<double> step;
  auto* gc = app.add_subcommand("check-gradients", "Compare analytic and finite-difference gradients");
  gc->add_option("--config", config_path, "Problem configuration (JSON)")->required();
  gc->add_option("--samples", samples, "Number of density entries to sample")
      ->check(CLI::PositiveNumber);
  gc->add_option("--step", step, "Finite-difference step")->check(CLI::PositiveNumber);
  gc->add_option("--failure-mode", gc_failure_mode, "Also check the fail-safe objective")
      ->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*opt) return optimize(config_path, out_dir, iterations, failure_mode);
    return check_gradients(config_path, samples, step, gc_failure_mode);
  } catch (const jointopt::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const jointopt::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
}
