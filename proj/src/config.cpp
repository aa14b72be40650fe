#include <jointopt/config.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace jointopt {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw InputError(path + ": " + what);
}

// Strict object reader: every key must be consumed, unknown keys are errors.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_, "expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }
  std::string path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  const json& raw(const std::string& key) {
    used_.insert(key);
    if (!j_.contains(key)) fail(path(key), "missing required field");
    return j_.at(key);
  }

  Reader child(const std::string& key) { return Reader(raw(key), path(key)); }

  double number(const std::string& key, std::optional<double> def = std::nullopt) {
    if (!has(key)) {
      used_.insert(key);
      if (!def) fail(path(key), "missing required field");
      return *def;
    }
    const json& v = raw(key);
    if (!v.is_number()) fail(path(key), "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(path(key), "must be finite");
    return x;
  }

  int integer(const std::string& key, std::optional<int> def = std::nullopt) {
    if (!has(key)) {
      used_.insert(key);
      if (!def) fail(path(key), "missing required field");
      return *def;
    }
    const json& v = raw(key);
    if (!v.is_number_integer()) fail(path(key), "expected an integer");
    return v.get<int>();
  }

  std::string string(const std::string& key, std::optional<std::string> def = std::nullopt) {
    if (!has(key)) {
      used_.insert(key);
      if (!def) fail(path(key), "missing required field");
      return *def;
    }
    const json& v = raw(key);
    if (!v.is_string()) fail(path(key), "expected a string");
    return v.get<std::string>();
  }

  bool boolean(const std::string& key, bool def) {
    if (!has(key)) return def;
    const json& v = raw(key);
    if (!v.is_boolean()) fail(path(key), "expected true or false");
    return v.get<bool>();
  }

  std::vector<double> numbers(const std::string& key, std::optional<std::size_t> size = {}) {
    const json& v = raw(key);
    if (!v.is_array()) fail(path(key), "expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) fail(path(key), "expected an array of numbers");
      out.push_back(e.get<double>());
    }
    if (size && out.size() != *size)
      fail(path(key), "expected " + std::to_string(*size) + " entries");
    return out;
  }

  Vec2 vec2(const std::string& key) {
    const auto v = numbers(key, 2);
    return {v[0], v[1]};
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!used_.count(it.key())) fail(path(it.key()), "unknown field");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

void require_positive(double v, const std::string& path) {
  if (!(v > 0.0)) fail(path, "must be positive");
}

NodeSelector read_selector(Reader& r, const std::string& where, int num_parts) {
  NodeSelector s;
  s.part = r.integer("part");
  if (s.part < 0 || s.part >= num_parts)
    fail(r.path("part"), "refers to part " + std::to_string(s.part) + " which does not exist");
  const int kinds = int(r.has("edge")) + int(r.has("point")) + int(r.has("node"));
  if (kinds != 1) fail(where, "exactly one of edge, point or node is required");
  if (r.has("edge")) {
    s.kind = NodeSelector::Kind::Edge;
    s.edge = r.string("edge");
    if (s.edge != "left" && s.edge != "right" && s.edge != "bottom" && s.edge != "top")
      fail(r.path("edge"), "must be left, right, bottom or top");
  } else if (r.has("point")) {
    s.kind = NodeSelector::Kind::Point;
    s.point = r.vec2("point");
  } else {
    s.kind = NodeSelector::Kind::Node;
    const auto v = r.numbers("node", 2);
    s.col = static_cast<int>(v[0]);
    s.row = static_cast<int>(v[1]);
  }
  return s;
}

json selector_json(const NodeSelector& s) {
  json j{{"part", s.part}};
  switch (s.kind) {
    case NodeSelector::Kind::Edge: j["edge"] = s.edge; break;
    case NodeSelector::Kind::Point: j["point"] = {s.point.x(), s.point.y()}; break;
    case NodeSelector::Kind::Node: j["node"] = {s.col, s.row}; break;
  }
  return j;
}

// Named joint presets; every field can be overridden.
struct JointTemplate {
  PatternKind pattern = PatternKind::Ring;
  std::vector<double> radii{6.0, 8.0};
  NdsSpec nds{NdsMode::Ring, 10.0, 4.0};
  double stiffness = 10.0;
  std::array<int, 2> parts{0, 1};
  std::optional<JointBounds> bounds;
};

JointTemplate preset(const std::string& type, const std::string& path) {
  JointTemplate t;
  if (type == "bolt") return t;
  if (type == "spot") {
    t.pattern = PatternKind::Circular;
    t.radii = {4.0};
    t.nds = {NdsMode::Solid, 8.0, 0.0};
    return t;
  }
  fail(path, "unknown joint type '" + type + "' (expected bolt or spot)");
}

NdsMode parse_mode(const std::string& s, const std::string& path) {
  if (s == "hole") return NdsMode::Hole;
  if (s == "solid") return NdsMode::Solid;
  if (s == "ring") return NdsMode::Ring;
  fail(path, "must be hole, solid or ring");
}

const char* mode_name(NdsMode m) {
  switch (m) {
    case NdsMode::Hole: return "hole";
    case NdsMode::Solid: return "solid";
    case NdsMode::Ring: return "ring";
  }
  return "?";
}

// Applies the overridable joint fields present in `r` on top of `t`.
void read_joint_fields(Reader& r, JointTemplate& t, int num_parts) {
  if (r.has("pattern")) {
    Reader p = r.child("pattern");
    if (p.has("kind")) {
      const std::string k = p.string("kind");
      if (k == "circular") t.pattern = PatternKind::Circular;
      else if (k == "ring") t.pattern = PatternKind::Ring;
      else fail(p.path("kind"), "must be circular or ring");
    }
    if (p.has("radii")) t.radii = p.numbers("radii");
    p.finish();
  }
  if (r.has("nds")) {
    Reader n = r.child("nds");
    if (n.has("mode")) t.nds.mode = parse_mode(n.string("mode"), n.path("mode"));
    if (n.has("solid_radius")) t.nds.solid_radius = n.number("solid_radius");
    if (n.has("hole_radius")) t.nds.hole_radius = n.number("hole_radius");
    n.finish();
  }
  if (r.has("stiffness")) {
    t.stiffness = r.number("stiffness");
    require_positive(t.stiffness, r.path("stiffness"));
  }
  if (r.has("parts")) {
    const auto v = r.numbers("parts", 2);
    for (int k = 0; k < 2; ++k) {
      const int p = static_cast<int>(v[static_cast<std::size_t>(k)]);
      if (p < 0 || p >= num_parts || p != v[static_cast<std::size_t>(k)])
        fail(r.path("parts"), "refers to a part that does not exist");
      t.parts[static_cast<std::size_t>(k)] = p;
    }
    if (t.parts[0] == t.parts[1]) fail(r.path("parts"), "a joint must connect two different parts");
  }
  if (r.has("bounds")) {
    const auto v = r.numbers("bounds", 4);
    JointBounds b{v[0], v[1], v[2], v[3]};
    if (b.x_lo > b.x_hi || b.y_lo > b.y_hi)
      fail(r.path("bounds"), "expected [x_lo, x_hi, y_lo, y_hi] with lo <= hi");
    t.bounds = b;
  }
}

void validate_pattern(const JointTemplate& t, const std::string& path) {
  const std::size_t expected = t.pattern == PatternKind::Circular ? 1 : 2;
  if (t.radii.size() != expected)
    fail(path + ".pattern.radii", t.pattern == PatternKind::Circular
                                      ? "circular pattern takes one radius"
                                      : "ring pattern takes two radii");
  for (double r : t.radii) require_positive(r, path + ".pattern.radii");
  try {
    t.nds.validate();
  } catch (const std::exception& e) {
    fail(path + ".nds", e.what());
  }
}

void read_schedule(Reader& r, ScheduleConfig& s) {
  s.iterations = r.integer("iterations", s.iterations);
  if (s.iterations < 0) fail(r.path("iterations"), "must be >= 0");
  if (r.has("beta")) s.beta_values = r.numbers("beta");
  if (r.has("beta_iterations")) {
    s.beta_iterations.clear();
    for (double v : r.numbers("beta_iterations")) s.beta_iterations.push_back(static_cast<int>(v));
  }
  if (s.beta_values.empty() || s.beta_values.size() != s.beta_iterations.size())
    fail(r.path("beta"), "beta and beta_iterations must be non-empty and of equal length");
  if (s.beta_iterations.front() != 0) fail(r.path("beta_iterations"), "must start at 0");
  for (std::size_t k = 0; k < s.beta_values.size(); ++k) {
    require_positive(s.beta_values[k], r.path("beta"));
    if (k > 0 && s.beta_iterations[k] <= s.beta_iterations[k - 1])
      fail(r.path("beta_iterations"), "must be strictly increasing");
  }
}

}  // namespace

double ScheduleConfig::beta_at(int iteration) const {
  double beta = beta_values.front();
  for (std::size_t k = 0; k < beta_values.size(); ++k)
    if (iteration >= beta_iterations[k]) beta = beta_values[k];
  return beta;
}

ProblemConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("configuration is not valid JSON: ") + e.what());
  }
  Reader r(root, "");
  ProblemConfig c;
  c.name = r.string("name", c.name);

  if (r.has("material")) {
    Reader m = r.child("material");
    c.e0 = m.number("E0", c.e0);
    c.nu = m.number("nu", c.nu);
    c.e_min = m.number("Emin", c.e_min);
    c.penalty = m.number("penalty", c.penalty);
    require_positive(c.e0, m.path("E0"));
    if (!(c.nu > -1.0 && c.nu < 0.5)) fail(m.path("nu"), "must lie in (-1, 0.5)");
    if (!(c.e_min > 0.0 && c.e_min <= 1e-6 * c.e0))
      fail(m.path("Emin"), "must lie in (0, 1e-6 * E0]");
    if (!(c.penalty >= 1.0)) fail(m.path("penalty"), "must be >= 1");
    m.finish();
  }

  {
    const json& parts = r.raw("parts");
    if (!parts.is_array() || parts.empty()) fail("parts", "expected a non-empty array");
    for (std::size_t i = 0; i < parts.size(); ++i) {
      Reader p(parts[i], "parts[" + std::to_string(i) + "]");
      PartConfig pc;
      pc.nx = p.integer("nx");
      pc.ny = p.integer("ny");
      pc.element_size = p.number("element_size", 1.0);
      if (p.has("origin")) pc.origin = p.vec2("origin");
      if (pc.nx < 1) fail(p.path("nx"), "must be >= 1");
      if (pc.ny < 1) fail(p.path("ny"), "must be >= 1");
      require_positive(pc.element_size, p.path("element_size"));
      p.finish();
      c.parts.push_back(pc);
    }
  }
  const int np = static_cast<int>(c.parts.size());
  double h_min = c.parts.front().element_size;
  for (const auto& p : c.parts) h_min = std::min(h_min, p.element_size);

  {
    const json& sup = r.raw("supports");
    if (!sup.is_array() || sup.empty()) fail("supports", "expected a non-empty array");
    for (std::size_t i = 0; i < sup.size(); ++i) {
      const std::string path = "supports[" + std::to_string(i) + "]";
      Reader s(sup[i], path);
      SupportConfig sc;
      sc.nodes = read_selector(s, path, np);
      sc.fix_x = sc.fix_y = false;
      const json& fix = s.raw("fix");
      if (!fix.is_array() || fix.empty()) fail(s.path("fix"), "expected a list of \"x\"/\"y\"");
      for (const auto& f : fix) {
        if (f == "x") sc.fix_x = true;
        else if (f == "y") sc.fix_y = true;
        else fail(s.path("fix"), "entries must be \"x\" or \"y\"");
      }
      s.finish();
      c.supports.push_back(sc);
    }
  }

  {
    const json& loads = r.raw("loads");
    if (!loads.is_array() || loads.empty()) fail("loads", "expected a non-empty array");
    for (std::size_t i = 0; i < loads.size(); ++i) {
      const std::string path = "loads[" + std::to_string(i) + "]";
      Reader l(loads[i], path);
      LoadConfig lc;
      lc.nodes = read_selector(l, path, np);
      lc.force = l.vec2("force");
      l.finish();
      c.loads.push_back(lc);
    }
  }

  bool min_distance_enabled = false;
  if (r.has("joints")) {
    Reader jr = r.child("joints");
    JointTemplate base = preset(jr.string("type", "bolt"), jr.path("type"));
    c.alpha = jr.number("alpha", c.alpha);
    require_positive(c.alpha, jr.path("alpha"));
    read_joint_fields(jr, base, np);
    const json& items = jr.raw("items");
    if (!items.is_array()) fail(jr.path("items"), "expected an array");
    for (std::size_t i = 0; i < items.size(); ++i) {
      const std::string path = jr.path("items[" + std::to_string(i) + "]");
      Reader it(items[i], path);
      JointTemplate t = it.has("type") ? preset(it.string("type"), it.path("type")) : base;
      if (it.has("type")) {
        t.stiffness = base.stiffness;
        t.parts = base.parts;
      }
      read_joint_fields(it, t, np);
      validate_pattern(t, path);
      JointConfig jc;
      jc.position = it.vec2("position");
      it.finish();
      if (np < 2) fail(path, "joints need at least two parts");
      jc.pattern = t.pattern;
      jc.pattern_radii = t.radii;
      jc.stiffness = t.stiffness;
      jc.nds = t.nds;
      jc.parts = t.parts;

      const PartMesh a = build_part_mesh(c.parts[t.parts[0]].nx, c.parts[t.parts[0]].ny,
                                         c.parts[t.parts[0]].element_size,
                                         c.parts[t.parts[0]].origin, t.parts[0]);
      const PartMesh b = build_part_mesh(c.parts[t.parts[1]].nx, c.parts[t.parts[1]].ny,
                                         c.parts[t.parts[1]].element_size,
                                         c.parts[t.parts[1]].origin, t.parts[1]);
      const double reach =
          std::max(t.nds.outer_radius(), *std::max_element(t.radii.begin(), t.radii.end()));
      JointBounds overlap;
      try {
        overlap = overlap_bounds(a, b, reach);
      } catch (const InputError&) {
        fail(path, "the overlap of parts " + std::to_string(t.parts[0]) + " and " +
                       std::to_string(t.parts[1]) + " is too small for this joint");
      }
      if (t.bounds) {
        const JointBounds& u = *t.bounds;
        if (u.x_lo < overlap.x_lo - 1e-12 || u.x_hi > overlap.x_hi + 1e-12 ||
            u.y_lo < overlap.y_lo - 1e-12 || u.y_hi > overlap.y_hi + 1e-12)
          fail(path + ".bounds", "let the joint leave the overlap of its parts");
        jc.bounds = u;
      } else {
        jc.bounds = overlap;
      }
      if (!jc.bounds.contains(jc.position)) {
        std::ostringstream os;
        os << "position (" << jc.position.x() << ", " << jc.position.y()
           << ") lies outside the joint bounds [" << jc.bounds.x_lo << ", " << jc.bounds.x_hi
           << "] x [" << jc.bounds.y_lo << ", " << jc.bounds.y_hi
           << "] inside the overlap";
        fail(path + ".position", os.str());
      }
      c.joints.push_back(std::move(jc));
    }
    jr.finish();
  }

  if (r.has("objective")) {
    Reader o = r.child("objective");
    c.failure_mode = o.integer("failure_mode", c.failure_mode);
    c.ks_gamma_factor = o.number("gamma_factor", c.ks_gamma_factor);
    c.degradation = o.number("degradation", c.degradation);
    const int nj = static_cast<int>(c.joints.size());
    if (c.failure_mode < 0 || c.failure_mode > nj)
      fail(o.path("failure_mode"), "must lie in [0, number of joints]");
    require_positive(c.ks_gamma_factor, o.path("gamma_factor"));
    if (!(c.degradation > 0.0 && c.degradation < 1.0))
      fail(o.path("degradation"), "must lie in (0, 1)");
    o.finish();
  }

  if (r.has("constraints")) {
    Reader k = r.child("constraints");
    if (k.has("volume")) {
      Reader v = k.child("volume");
      const std::string scope = v.string("scope", "global");
      if (scope == "global") c.volume_scope = VolumeScope::Global;
      else if (scope == "per_part") c.volume_scope = VolumeScope::PerPart;
      else fail(v.path("scope"), "must be global or per_part");
      c.volume_limit = v.number("limit", c.volume_limit);
      if (!(c.volume_limit > 0.0 && c.volume_limit <= 1.0))
        fail(v.path("limit"), "volume fraction must lie in (0, 1]");
      v.finish();
    }
    if (k.has("min_distance")) {
      Reader m = k.child("min_distance");
      MinDistanceSpec md;
      min_distance_enabled = m.boolean("enabled", true);
      md.d0 = m.number("d0", md.d0);
      md.p = m.number("p", md.p);
      md.eps = m.number("eps", 0.01 * h_min);
      require_positive(md.d0, m.path("d0"));
      if (!(md.p >= 1.0)) fail(m.path("p"), "must be >= 1");
      require_positive(md.eps, m.path("eps"));
      m.finish();
      if (min_distance_enabled) c.min_distance = md;
    }
    k.finish();
  }

  if (r.has("schedule")) {
    Reader s = r.child("schedule");
    read_schedule(s, c.schedule);
    c.filter_radius = s.number("filter_radius", c.filter_radius);
    c.eta = s.number("eta", c.eta);
    require_positive(c.filter_radius, s.path("filter_radius"));
    if (!(c.eta > 0.0 && c.eta < 1.0)) fail(s.path("eta"), "must lie in (0, 1)");
    s.finish();
  }

  if (r.has("mma")) {
    Reader m = r.child("mma");
    c.mma.move = m.number("move", c.mma.move);
    c.mma.asymptote_init = m.number("asymptote_init", c.mma.asymptote_init);
    c.mma.asymptote_increase = m.number("asymptote_increase", c.mma.asymptote_increase);
    c.mma.asymptote_decrease = m.number("asymptote_decrease", c.mma.asymptote_decrease);
    c.mma.asymptote_min = m.number("asymptote_min", c.mma.asymptote_min);
    c.mma.c_penalty = m.number("c", c.mma.c_penalty);
    if (!(c.mma.move > 0.0 && c.mma.move <= 1.0)) fail(m.path("move"), "must lie in (0, 1]");
    if (!(c.mma.asymptote_min > 0.0 && c.mma.asymptote_min < c.mma.asymptote_init))
      fail(m.path("asymptote_min"), "must lie in (0, asymptote_init)");
    m.finish();
  }

  if (r.has("outputs")) {
    Reader o = r.child("outputs");
    const json& f = o.raw("formats");
    if (!f.is_array()) fail(o.path("formats"), "expected an array");
    c.output_formats.clear();
    for (const auto& e : f) {
      if (e != "pgm" && e != "csv") fail(o.path("formats"), "entries must be pgm or csv");
      c.output_formats.push_back(e.get<std::string>());
    }
    o.finish();
  }
  r.finish();

  if (c.joints.size() >= 2 && !min_distance_enabled) {
    for (std::size_t i = 0; i < c.joints.size(); ++i)
      for (std::size_t j = i + 1; j < c.joints.size(); ++j) {
        const double d = (c.joints[i].position - c.joints[j].position).norm();
        if (d < c.joints[i].nds.outer_radius() + c.joints[j].nds.outer_radius())
          c.warnings.push_back("joints " + std::to_string(i) + " and " + std::to_string(j) +
                               " start with overlapping features and no minimum distance "
                               "constraint is enabled");
      }
  }
  return c;
}

ProblemConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open configuration file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const ProblemConfig& c) {
  json j;
  j["name"] = c.name;
  j["material"] = {{"E0", c.e0}, {"nu", c.nu}, {"Emin", c.e_min}, {"penalty", c.penalty}};
  j["parts"] = json::array();
  for (const auto& p : c.parts)
    j["parts"].push_back({{"nx", p.nx},
                          {"ny", p.ny},
                          {"element_size", p.element_size},
                          {"origin", {p.origin.x(), p.origin.y()}}});
  j["supports"] = json::array();
  for (const auto& s : c.supports) {
    json e = selector_json(s.nodes);
    e["fix"] = json::array();
    if (s.fix_x) e["fix"].push_back("x");
    if (s.fix_y) e["fix"].push_back("y");
    j["supports"].push_back(e);
  }
  j["loads"] = json::array();
  for (const auto& l : c.loads) {
    json e = selector_json(l.nodes);
    e["force"] = {l.force.x(), l.force.y()};
    j["loads"].push_back(e);
  }
  if (!c.joints.empty()) {
    json items = json::array();
    for (const auto& jc : c.joints)
      items.push_back(
          {{"position", {jc.position.x(), jc.position.y()}},
           {"pattern",
            {{"kind", jc.pattern == PatternKind::Circular ? "circular" : "ring"},
             {"radii", jc.pattern_radii}}},
           {"nds",
            {{"mode", mode_name(jc.nds.mode)},
             {"solid_radius", jc.nds.solid_radius},
             {"hole_radius", jc.nds.hole_radius}}},
           {"stiffness", jc.stiffness},
           {"parts", {jc.parts[0], jc.parts[1]}},
           {"bounds", {jc.bounds.x_lo, jc.bounds.x_hi, jc.bounds.y_lo, jc.bounds.y_hi}}});
    j["joints"] = {{"alpha", c.alpha}, {"items", items}};
  }
  j["objective"] = {{"failure_mode", c.failure_mode},
                    {"gamma_factor", c.ks_gamma_factor},
                    {"degradation", c.degradation}};
  j["constraints"]["volume"] = {
      {"scope", c.volume_scope == VolumeScope::Global ? "global" : "per_part"},
      {"limit", c.volume_limit}};
  if (c.min_distance)
    j["constraints"]["min_distance"] = {{"enabled", true},
                                        {"d0", c.min_distance->d0},
                                        {"p", c.min_distance->p},
                                        {"eps", c.min_distance->eps}};
  j["schedule"] = {{"iterations", c.schedule.iterations},
                   {"beta", c.schedule.beta_values},
                   {"beta_iterations", c.schedule.beta_iterations},
                   {"filter_radius", c.filter_radius},
                   {"eta", c.eta}};
  j["mma"] = {{"move", c.mma.move},
              {"asymptote_init", c.mma.asymptote_init},
              {"asymptote_increase", c.mma.asymptote_increase},
              {"asymptote_decrease", c.mma.asymptote_decrease},
              {"asymptote_min", c.mma.asymptote_min},
              {"c", c.mma.c_penalty}};
  j["outputs"] = {{"formats", c.output_formats}};
  return j.dump(2);
}

std::vector<int> select_nodes(const PartMesh& mesh, const NodeSelector& s) {
  std::vector<int> out;
  switch (s.kind) {
    case NodeSelector::Kind::Edge:
      if (s.edge == "left" || s.edge == "right") {
        const int col = s.edge == "left" ? 0 : mesh.nx;
        for (int row = 0; row <= mesh.ny; ++row) out.push_back(mesh.node_index(col, row));
      } else {
        const int row = s.edge == "bottom" ? 0 : mesh.ny;
        for (int col = 0; col <= mesh.nx; ++col) out.push_back(mesh.node_index(col, row));
      }
      break;
    case NodeSelector::Kind::Point: {
      const Vec2 local = (s.point - mesh.origin) / mesh.element_size;
      const int col = std::clamp(static_cast<int>(std::lround(local.x())), 0, mesh.nx);
      const int row = std::clamp(static_cast<int>(std::lround(local.y())), 0, mesh.ny);
      out.push_back(mesh.node_index(col, row));
      break;
    }
    case NodeSelector::Kind::Node:
      if (s.col < 0 || s.col > mesh.nx || s.row < 0 || s.row > mesh.ny)
        throw InputError("node selector [" + std::to_string(s.col) + ", " +
                         std::to_string(s.row) + "] is outside part " +
                         std::to_string(s.part));
      out.push_back(mesh.node_index(s.col, s.row));
      break;
  }
  return out;
}

ModelDefinition build_model_definition(const ProblemConfig& c) {
  std::vector<PartMesh> parts;
  for (std::size_t i = 0; i < c.parts.size(); ++i) {
    const auto& p = c.parts[i];
    parts.push_back(build_part_mesh(p.nx, p.ny, p.element_size, p.origin, static_cast<int>(i)));
  }
  ModelDefinition d;
  d.mesh = MultiPartMesh(std::move(parts));
  d.law = SimpLaw{c.e0, c.e_min, c.penalty};
  d.nu = c.nu;
  d.filter_radius = c.filter_radius;
  d.eta = c.eta;
  d.alpha = c.alpha;
  d.volume_scope = c.volume_scope;
  d.volume_limit = c.volume_limit;
  d.min_distance = c.min_distance;
  d.failure_mode = c.failure_mode;
  d.degradation = c.degradation;

  d.f_m = Vector::Zero(d.mesh.num_dofs());
  for (const auto& l : c.loads) {
    const PartMesh& m = d.mesh.part(l.nodes.part);
    const auto nodes = select_nodes(m, l.nodes);
    const Vec2 share = l.force / static_cast<double>(nodes.size());
    for (int n : nodes) {
      d.f_m[m.node_dof(n, 0)] += share.x();
      d.f_m[m.node_dof(n, 1)] += share.y();
    }
  }
  std::set<int> fixed;
  for (const auto& s : c.supports) {
    const PartMesh& m = d.mesh.part(s.nodes.part);
    for (int n : select_nodes(m, s.nodes)) {
      if (s.fix_x) fixed.insert(m.node_dof(n, 0));
      if (s.fix_y) fixed.insert(m.node_dof(n, 1));
    }
  }
  d.fixed_dofs.assign(fixed.begin(), fixed.end());

  for (const auto& jc : c.joints) {
    Joint j;
    j.position = jc.position;
    j.pattern = generate_pattern(jc.pattern, jc.pattern_radii, jc.stiffness);
    j.nds = jc.nds;
    j.bounds = jc.bounds;
    j.parts = jc.parts;
    d.joints.push_back(std::move(j));
  }
  return d;
}

}  // namespace jointopt
