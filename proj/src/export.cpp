#include <jointopt/export.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace jointopt {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw InputError("cannot write " + path.string());
  return out;
}

double element_value(const PartMesh& part, const Vector& rho_hat, int col, int row) {
  return rho_hat[part.element_offset + row * part.nx + col];
}

}  // namespace

std::vector<unsigned char> density_pixels(const PartMesh& part, const Vector& rho_hat) {
  std::vector<unsigned char> px;
  px.reserve(static_cast<std::size_t>(part.num_elements()));
  for (int row = part.ny - 1; row >= 0; --row)
    for (int col = 0; col < part.nx; ++col) {
      const double v = std::clamp(element_value(part, rho_hat, col, row), 0.0, 1.0);
      px.push_back(static_cast<unsigned char>(std::lround(255.0 * (1.0 - v))));
    }
  return px;
}

void write_pgm(const std::filesystem::path& path, const PartMesh& part, const Vector& rho_hat) {
  const auto px = density_pixels(part, rho_hat);
  auto out = open_out(path, true);
  out << "P5\n" << part.nx << " " << part.ny << "\n255\n";
  out.write(reinterpret_cast<const char*>(px.data()), static_cast<std::streamsize>(px.size()));
  if (!out) throw InputError("failed writing " + path.string());
}

void write_density_csv(const std::filesystem::path& path, const PartMesh& part,
                       const Vector& rho_hat) {
  auto out = open_out(path);
  for (int row = part.ny - 1; row >= 0; --row) {
    for (int col = 0; col < part.nx; ++col)
      out << (col ? "," : "") << fmt(element_value(part, rho_hat, col, row));
    out << "\n";
  }
}

void write_joint_trajectory_csv(const std::filesystem::path& path, const RunHistory& history) {
  auto out = open_out(path);
  out << "iteration,joint,x,y\n";
  for (const auto& r : history.records)
    for (std::size_t j = 0; j < r.positions.size(); ++j)
      out << r.iteration << "," << j << "," << fmt(r.positions[j].x()) << ","
          << fmt(r.positions[j].y()) << "\n";
}

void write_history_csv(const std::filesystem::path& path, const RunHistory& history) {
  auto out = open_out(path);
  const std::size_t m = history.records.empty() ? 0 : history.records.front().constraints.size();
  out << "iteration,beta,objective,compliance,c_material,c_joint";
  for (std::size_t i = 0; i < m; ++i) out << ",constraint_" << i;
  out << ",max_change,kkt_residual,worst_failure,coupling_residual\n";
  for (const auto& r : history.records) {
    out << r.iteration << "," << fmt(r.beta) << "," << fmt(r.objective) << ","
        << fmt(r.compliance) << "," << fmt(r.c_material) << "," << fmt(r.c_joint);
    for (double v : r.constraints) out << "," << fmt(v);
    out << "," << fmt(r.max_change) << "," << fmt(r.kkt_residual) << "," << fmt(r.worst_failure)
        << "," << fmt(r.coupling_residual) << "\n";
  }
}

void write_manifest(const std::filesystem::path& path, const ProblemConfig& config,
                    const RunResult& result, const std::vector<std::string>& files) {
  using nlohmann::json;
  json j;
  j["config"] = json::parse(config_to_json(config));
  j["iterations_completed"] = result.history.records.size();
  const Evaluation& ev = result.final_evaluation;
  json fin;
  fin["beta"] = result.beta;
  fin["objective"] = ev.objective;
  if (ev.nominal) {
    fin["compliance"] = ev.nominal->compliance.total;
    fin["c_material"] = ev.nominal->compliance.material;
    fin["c_joint"] = ev.nominal->compliance.joint;
  }
  if (!ev.failures.empty()) {
    json cases = json::array();
    for (std::size_t d = 0; d < ev.failures.size(); ++d)
      cases.push_back({{"failed_joints", ev.cases[d].failed_joints},
                       {"compliance", ev.failures[d].compliance.total}});
    fin["failure_cases"] = cases;
    fin["gamma"] = ev.gamma;
  }
  fin["constraints"] = json::array();
  for (const auto& c : ev.constraints) fin["constraints"].push_back(c.value);
  fin["joints"] = json::array();
  for (const auto& p : result.positions) fin["joints"].push_back({p.x(), p.y()});
  j["final"] = fin;
  j["files"] = files;
  auto out = open_out(path);
  out << j.dump(2) << "\n";
}

std::vector<std::string> export_results(const RunResult& result, const ProblemConfig& config,
                                        const MultiPartMesh& mesh,
                                        const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw InputError("cannot create output directory " + dir.string());

  const auto wants = [&](const char* f) {
    return std::find(config.output_formats.begin(), config.output_formats.end(), f) !=
           config.output_formats.end();
  };
  std::vector<std::string> files;
  for (int k = 0; k < mesh.num_parts(); ++k) {
    const std::string stem = "density_part" + std::to_string(k);
    if (wants("pgm")) {
      write_pgm(dir / (stem + ".pgm"), mesh.part(k), result.rho_hat);
      files.push_back(stem + ".pgm");
    }
    if (wants("csv")) {
      write_density_csv(dir / (stem + ".csv"), mesh.part(k), result.rho_hat);
      files.push_back(stem + ".csv");
    }
  }
  write_joint_trajectory_csv(dir / "joints.csv", result.history);
  files.push_back("joints.csv");
  write_history_csv(dir / "history.csv", result.history);
  files.push_back("history.csv");
  files.push_back("manifest.json");
  write_manifest(dir / "manifest.json", config, result, files);
  return files;
}

}  // namespace jointopt
