#include "oap/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "oap/error.hpp"
#include "oap/reference_setup.hpp"
#include "oap/text.hpp"

namespace oap {

namespace {

using nlohmann::json;

double deg(double d) { return d * std::numbers::pi / 180.0; }

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

// Object reader that tracks consumed keys so leftovers can be reported.
class Node {
 public:
  Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError("must be an object", path_);
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json* get(const std::string& key) {
    used_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  template <class T>
  void number(const std::string& key, T& out) {
    if (const json* v = get(key)) out = static_cast<T>(as_number(*v, join(path_, key)));
  }

  void boolean(const std::string& key, bool& out) {
    if (const json* v = get(key)) {
      if (!v->is_boolean()) throw ConfigError("must be true or false", join(path_, key));
      out = v->get<bool>();
    }
  }

  void vec3(const std::string& key, Vec3& out) {
    if (const json* v = get(key)) out = as_vec3(*v, join(path_, key));
  }

  Node child(const std::string& key) {
    const json* v = get(key);
    return Node(*v, join(path_, key));
  }

  const std::string& path() const { return path_; }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!used_.count(it.key())) throw ConfigError("unknown key", join(path_, it.key()));
    }
  }

  static double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) throw ConfigError("must be a number", path);
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError("must be finite", path);
    return d;
  }

  static Vec3 as_vec3(const json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 3) {
      throw ConfigError("must be an array of 3 numbers", path);
    }
    Vec3 out;
    for (int a = 0; a < 3; ++a) {
      out[a] = as_number(v[a], path + "[" + std::to_string(a) + "]");
    }
    return out;
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

SensorSpec parse_sensor(const json& j, const std::string& path) {
  Node n(j, path);
  SensorSpec s;
  if (!n.has("mount")) throw ConfigError("missing required field", join(path, "mount"));
  if (!n.has("max_range")) throw ConfigError("missing required field", join(path, "max_range"));
  if (!n.has("p_peak")) throw ConfigError("missing required field", join(path, "p_peak"));
  double az = 0.0, half_az = 180.0, half_el = 90.0;
  n.vec3("mount", s.mount);
  n.number("azimuth_deg", az);
  n.number("azimuth_half_angle_deg", half_az);
  n.number("elevation_half_angle_deg", half_el);
  n.number("max_range", s.max_range);
  n.number("p_peak", s.p_peak);
  n.number("decay", s.decay);
  n.finish();
  s.azimuth_center = deg(az);
  s.azimuth_half_angle = deg(half_az);
  s.elevation_half_angle = deg(half_el);
  try {
    s.validate();
  } catch (const ConfigError& e) {
    // "sensor.p_peak" -> "sensors.devices[2].p_peak"
    std::string field = e.field();
    const auto dot = field.find('.');
    field = dot == std::string::npos ? path : join(path, field.substr(dot + 1));
    std::string msg = e.what();
    const auto colon = msg.find(": ");
    if (colon != std::string::npos) msg = msg.substr(colon + 2);
    throw ConfigError(msg, field);
  }
  return s;
}

SensorSetup parse_sensors(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() != "reference") {
      throw ConfigError("expected \"reference\" or an object", "sensors");
    }
    return reference_sensor_setup();
  }
  Node n(j, "sensors");
  SensorSetup setup;
  const json* devices = n.get("devices");
  if (!devices) throw ConfigError("missing required field", "sensors.devices");
  if (devices->is_string()) {
    if (devices->get<std::string>() != "reference") {
      throw ConfigError("expected \"reference\" or an array", "sensors.devices");
    }
    setup = reference_sensor_setup();
  } else if (devices->is_array()) {
    if (devices->empty()) throw ConfigError("needs at least one sensor", "sensors.devices");
    for (std::size_t i = 0; i < devices->size(); ++i) {
      setup.sensors.push_back(
          parse_sensor((*devices)[i], "sensors.devices[" + std::to_string(i) + "]"));
    }
  } else {
    throw ConfigError("expected \"reference\" or an array", "sensors.devices");
  }
  n.number("attenuation", setup.attenuation);
  n.finish();
  setup.validate();
  return setup;
}

GridSpec parse_grid(const json& j) {
  if (j.is_string()) return GridSpec::preset(j.get<std::string>());
  Node n(j, "grid");
  GridSpec s;
  if (const json* p = n.get("preset")) {
    if (!p->is_string()) throw ConfigError("must be a string", "grid.preset");
    s = GridSpec::preset(p->get<std::string>());
  } else {
    for (const char* key : {"x_min", "x_max", "y_min", "y_max", "z_min", "z_max",
                            "dx", "dy", "dz"}) {
      if (!n.has(key)) throw ConfigError("missing required field (or give a preset)", join("grid", key));
    }
  }
  n.number("x_min", s.x_min);
  n.number("x_max", s.x_max);
  n.number("y_min", s.y_min);
  n.number("y_max", s.y_max);
  n.number("z_min", s.z_min);
  n.number("z_max", s.z_max);
  n.number("dx", s.dx);
  n.number("dy", s.dy);
  n.number("dz", s.dz);
  n.finish();
  return s;
}

std::vector<double> parse_k(const json& j) {
  std::vector<double> out;
  if (j.is_array()) {
    if (j.empty()) throw ConfigError("needs at least one value", "k_j");
    for (std::size_t i = 0; i < j.size(); ++i) {
      out.push_back(Node::as_number(j[i], "k_j[" + std::to_string(i) + "]"));
    }
  } else {
    out.push_back(Node::as_number(j, "k_j"));
  }
  return out;
}

void require(bool ok, const std::string& msg, const std::string& field) {
  if (!ok) throw ConfigError(msg, field);
}

}  // namespace

void PipelineConfig::validate() const {
  require(sensors.has_value() != grid_file.has_value(),
          "exactly one of 'sensors' and 'grid_file' must be given", "sensors");
  if (sensors) sensors->validate();
  grid.validate();
  design.validate();
  motion.validate();
  require(start.allFinite(), "must be finite", "start");
  require(ego.allFinite(), "must be finite", "ego");
  require(!k_j.empty(), "needs at least one value", "k_j");
  for (std::size_t i = 0; i < k_j.size(); ++i) {
    require(std::isfinite(k_j[i]) && k_j[i] > 0.0, "must be > 0",
            k_j.size() == 1 ? "k_j" : "k_j[" + std::to_string(i) + "]");
  }
  require(half_width > 0.0 && std::isfinite(half_width), "must be > 0", "half_width");
  const TransformSettings& t = transform;
  require(t.smoothing_half_window >= 0.0, "must be >= 0", "transform.smoothing_half_window");
  require(t.plan_roughness >= 0.0, "must be >= 0", "transform.plan_roughness");
  require(t.ego_lookahead > 0.0, "must be > 0", "transform.ego_lookahead");
  require(t.corridor_band >= 0.0, "must be >= 0", "transform.corridor_band");
  require(t.swing_limit >= 0.0, "must be >= 0", "transform.swing_limit");
  require(t.swing_accel_limit >= 0.0, "must be >= 0", "transform.swing_accel_limit");
  require(t.challenger_lookahead > 0.0, "must be > 0", "transform.challenger_lookahead");
  require(t.max_steps > 0, "must be > 0", "transform.max_steps");
}

PipelineConfig parse_config(std::string_view json_text,
                            const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what(), "");
  }
  Node root(doc, "");
  PipelineConfig cfg;

  if (root.has("sensors") && root.has("grid_file")) {
    throw ConfigError("conflicts with 'sensors'; give only one grid source", "grid_file");
  }
  if (const json* s = root.get("sensors")) cfg.sensors = parse_sensors(*s);
  if (const json* g = root.get("grid_file")) {
    if (!g->is_string() || g->get<std::string>().empty()) {
      throw ConfigError("must be a non-empty path", "grid_file");
    }
    std::filesystem::path p = g->get<std::string>();
    cfg.grid_file = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
    if (root.has("grid")) {
      throw ConfigError("the grid file carries its own layout", "grid");
    }
  }
  if (!cfg.sensors && !cfg.grid_file) {
    throw ConfigError("missing required field (or give 'grid_file')", "sensors");
  }
  if (const json* g = root.get("grid")) cfg.grid = parse_grid(*g);

  if (root.has("design_class")) {
    Node d = root.child("design_class");
    d.number("r_min", cfg.design.r_min);
    d.number("h_crest", cfg.design.h_crest);
    d.number("h_hollow", cfg.design.h_hollow);
    d.number("y_off_max", cfg.design.y_off_max);
    d.number("x_max", cfg.design.x_max);
    d.number("z_lo", cfg.design.z_lo);
    d.number("z_hi", cfg.design.z_hi);
    d.finish();
  }
  root.vec3("start", cfg.start);
  root.vec3("ego", cfg.ego);
  if (const json* k = root.get("k_j")) cfg.k_j = parse_k(*k);

  if (root.has("motion")) {
    Node m = root.child("motion");
    if (const json* v = m.get("v_ego_kmh")) {
      cfg.motion.v_ego = Node::as_number(*v, "motion.v_ego_kmh") / 3.6;
    }
    if (const json* v = m.get("v_ch_kmh")) {
      cfg.motion.v_ch = Node::as_number(*v, "motion.v_ch_kmh") / 3.6;
    }
    m.number("dt", cfg.motion.dt);
    m.number("max_yaw_rate", cfg.motion.max_yaw_rate);
    m.number("max_yaw_diff", cfg.motion.max_yaw_diff);
    m.number("max_pitch_rate", cfg.motion.max_pitch_rate);
    m.number("max_grade", cfg.motion.max_grade);
    m.finish();
  }
  if (root.has("transform")) {
    Node t = root.child("transform");
    TransformSettings& s = cfg.transform;
    t.number("smoothing_half_window", s.smoothing_half_window);
    t.number("plan_roughness", s.plan_roughness);
    t.number("ego_lookahead", s.ego_lookahead);
    t.number("corridor_band", s.corridor_band);
    t.number("swing_limit", s.swing_limit);
    t.number("swing_accel_limit", s.swing_accel_limit);
    t.number("challenger_lookahead", s.challenger_lookahead);
    double steps = static_cast<double>(s.max_steps);
    t.number("max_steps", steps);
    if (!(steps >= 1.0) || steps != std::floor(steps)) {
      throw ConfigError("must be a positive integer", "transform.max_steps");
    }
    s.max_steps = static_cast<std::size_t>(steps);
    t.finish();
  }
  cfg.half_width = cfg.design.y_off_max;
  root.number("half_width", cfg.half_width);
  if (const json* o = root.get("output_dir")) {
    if (!o->is_string() || o->get<std::string>().empty()) {
      throw ConfigError("must be a non-empty path", "output_dir");
    }
    cfg.output_dir = o->get<std::string>();
  }
  root.boolean("emit_plots", cfg.emit_plots);
  root.finish();
  cfg.validate();
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot open config '" + file.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  if (!in && !in.eof()) throw IoError("failed reading config '" + file.string() + "'");
  return parse_config(text.str(), file.parent_path());
}

std::vector<double> parse_k_list(std::string_view text) {
  std::vector<double> out;
  for (auto tok : split(text, ',')) {
    const auto v = parse_number(tok);
    if (!v) throw ConfigError("'" + std::string(tok) + "' is not a number", "kj");
    if (!(*v > 0.0) || !std::isfinite(*v)) {
      throw ConfigError("values must be finite and > 0, got '" + std::string(tok) + "'", "kj");
    }
    out.push_back(*v);
  }
  return out;
}

}  // namespace oap
