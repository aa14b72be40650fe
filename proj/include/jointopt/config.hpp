#pragma once

#include <jointopt/mma.hpp>
#include <jointopt/model.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace jointopt {

struct PartConfig {
  int nx = 1;
  int ny = 1;
  double element_size = 1.0;
  Vec2 origin = Vec2::Zero();
};

// Nodes of one part picked by edge name, nearest node to a point, or grid
// index.
struct NodeSelector {
  enum class Kind { Edge, Point, Node };
  int part = 0;
  Kind kind = Kind::Edge;
  std::string edge;  // left, right, bottom, top
  Vec2 point = Vec2::Zero();
  int col = 0, row = 0;
};

struct SupportConfig {
  NodeSelector nodes;
  bool fix_x = true;
  bool fix_y = true;
};

// `force` is the total load, split evenly over the selected nodes.
struct LoadConfig {
  NodeSelector nodes;
  Vec2 force = Vec2::Zero();
};

struct JointConfig {
  Vec2 position = Vec2::Zero();
  PatternKind pattern = PatternKind::Ring;
  std::vector<double> pattern_radii;
  double stiffness = 10.0;
  NdsSpec nds;
  std::array<int, 2> parts{0, 1};
  JointBounds bounds;  // resolved (defaults to the inset overlap)
};

struct ScheduleConfig {
  int iterations = 200;
  std::vector<double> beta_values{2.0, 4.0, 8.0};
  std::vector<int> beta_iterations{0, 50, 100};

  double beta_at(int iteration) const;
};

struct ProblemConfig {
  std::string name = "unnamed";
  // material
  double e0 = 1.0;
  double nu = 0.3;
  double e_min = 1e-9;
  double penalty = 3.0;
  double filter_radius = 4.0;
  double eta = 0.5;
  double alpha = 10.0;

  std::vector<PartConfig> parts;
  std::vector<SupportConfig> supports;
  std::vector<LoadConfig> loads;
  std::vector<JointConfig> joints;
  std::optional<MinDistanceSpec> min_distance;

  VolumeScope volume_scope = VolumeScope::Global;
  double volume_limit = 0.4;

  int failure_mode = 0;
  double degradation = 1e-6;
  double ks_gamma_factor = 20.0;

  ScheduleConfig schedule;
  MmaSettings mma;
  std::vector<std::string> output_formats{"pgm", "csv"};

  std::vector<std::string> warnings;
};

ProblemConfig parse_config(const std::string& json_text);
ProblemConfig load_config(const std::filesystem::path& path);
// Resolved configuration with all defaults filled, as JSON text.
std::string config_to_json(const ProblemConfig& config);

// Global node indices (per part, local numbering) picked by a selector.
std::vector<int> select_nodes(const PartMesh& mesh, const NodeSelector& selector);

ModelDefinition build_model_definition(const ProblemConfig& config);

}  // namespace jointopt
