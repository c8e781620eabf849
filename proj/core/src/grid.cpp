#include "oap/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "oap/error.hpp"

namespace oap {

namespace {

constexpr double kAxisSlack = 1e-9;

int axis_count(double lo, double hi, double spacing) {
  const double q = (hi - lo) / spacing;
  return static_cast<int>(std::floor(q + kAxisSlack * std::max(1.0, q))) + 1;
}

void require(bool ok, const char* field, const std::string& what) {
  if (!ok) throw ConfigError(what, field);
}

double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * std::numbers::pi);
  return a;
}

GridSpec table_preset(double dx, double dy, double dz) {
  GridSpec s;
  s.x_min = 0.0;
  s.x_max = 300.0;
  s.y_min = -80.0;
  s.y_max = 80.0;
  s.z_min = 0.0;
  s.z_max = 4.8;
  s.dx = dx;
  s.dy = dy;
  s.dz = dz;
  return s;
}

}  // namespace

void GridSpec::validate() const {
  for (double v : {x_min, x_max, y_min, y_max, z_min, z_max, dx, dy, dz}) {
    require(std::isfinite(v), "grid", "bounds and spacings must be finite");
  }
  require(dx > 0.0, "grid.dx", "spacing must be > 0");
  require(dy > 0.0, "grid.dy", "spacing must be > 0");
  require(dz > 0.0, "grid.dz", "spacing must be > 0");
  require(x_max > x_min, "grid.x_max", "must be greater than x_min");
  require(y_max > y_min, "grid.y_max", "must be greater than y_min");
  require(z_max > z_min, "grid.z_max", "must be greater than z_min");
}

int GridSpec::nx() const { return axis_count(x_min, x_max, dx); }
int GridSpec::ny() const { return axis_count(y_min, y_max, dy); }
int GridSpec::nz() const { return axis_count(z_min, z_max, dz); }

std::size_t GridSpec::node_count() const {
  return static_cast<std::size_t>(nx()) * ny() * nz();
}

GridSpec GridSpec::normalized() const {
  GridSpec s = *this;
  s.x_max = x_min + (nx() - 1) * dx;
  s.y_max = y_min + (ny() - 1) * dy;
  s.z_max = z_min + (nz() - 1) * dz;
  return s;
}

GridSpec GridSpec::fine() { return table_preset(1.0, 1.0, 0.2); }
GridSpec GridSpec::middle() { return table_preset(2.0, 2.0, 0.4); }
GridSpec GridSpec::coarse() { return table_preset(4.0, 4.0, 0.8); }

GridSpec GridSpec::preset(std::string_view name) {
  if (name == "fine") return fine();
  if (name == "middle") return middle();
  if (name == "coarse") return coarse();
  throw ConfigError("unknown preset '" + std::string(name) +
                        "' (expected fine, middle or coarse)",
                    "grid.preset");
}

void SensorSpec::validate() const {
  using std::numbers::pi;
  require(mount.allFinite(), "sensor.mount", "must be finite");
  require(azimuth_half_angle > 0.0 && azimuth_half_angle <= pi,
          "sensor.azimuth_half_angle", "must be in (0, pi]");
  require(elevation_half_angle > 0.0 && elevation_half_angle <= pi,
          "sensor.elevation_half_angle", "must be in (0, pi]");
  require(std::isfinite(azimuth_center), "sensor.azimuth_center",
          "must be finite");
  require(max_range > 0.0 && std::isfinite(max_range), "sensor.max_range",
          "must be > 0");
  require(p_peak >= 0.0 && p_peak <= 1.0, "sensor.p_peak",
          "must be in [0, 1]");
  require(decay > 0.0 && std::isfinite(decay), "sensor.decay", "must be > 0");
}

void SensorSetup::validate() const {
  require(!sensors.empty(), "sensors", "setup needs at least one sensor");
  require(attenuation > 0.0 && attenuation <= 1.0, "sensors.attenuation",
          "must be in (0, 1]");
  for (const auto& s : sensors) s.validate();
}

DetectionGrid::DetectionGrid(const GridSpec& spec, std::vector<double> values,
                             const Vec3& ego_position)
    : values_(std::move(values)), ego_(ego_position) {
  spec.validate();
  spec_ = spec.normalized();
  nx_ = spec_.nx();
  ny_ = spec_.ny();
  nz_ = spec_.nz();
  if (values_.size() != spec_.node_count()) {
    throw ValidationError("grid holds " + std::to_string(values_.size()) +
                          " values but its spec needs " +
                          std::to_string(spec_.node_count()));
  }
  for (std::size_t n = 0; n < values_.size(); ++n) {
    const double v = values_[n];
    if (!(v >= 0.0 && v <= 1.0)) {
      throw ValidationError("value #" + std::to_string(n) +
                            " is outside [0, 1]");
    }
  }
  if (!ego_.allFinite()) throw ValidationError("ego position must be finite");
}

GridIndex DetectionGrid::unravel(std::size_t linear) const {
  GridIndex idx;
  idx.k = static_cast<int>(linear % nz_);
  linear /= nz_;
  idx.j = static_cast<int>(linear % ny_);
  idx.i = static_cast<int>(linear / ny_);
  return idx;
}

Vec3 DetectionGrid::position(const GridIndex& idx) const {
  return {spec_.x_min + idx.i * spec_.dx, spec_.y_min + idx.j * spec_.dy,
          spec_.z_min + idx.k * spec_.dz};
}

std::optional<GridIndex> DetectionGrid::nearest_node(const Vec3& p) const {
  auto axis = [](double v, double lo, double d, int n) -> std::optional<int> {
    const long r = std::lround(std::floor((v - lo) / d + 0.5));
    if (r < 0 || r >= n) return std::nullopt;
    return static_cast<int>(r);
  };
  auto i = axis(p.x(), spec_.x_min, spec_.dx, nx_);
  auto j = axis(p.y(), spec_.y_min, spec_.dy, ny_);
  auto k = axis(p.z(), spec_.z_min, spec_.dz, nz_);
  if (!i || !j || !k) return std::nullopt;
  return GridIndex{*i, *j, *k};
}

bool operator==(const DetectionGrid& a, const DetectionGrid& b) {
  return a.spec_ == b.spec_ && a.ego_ == b.ego_ && a.values_ == b.values_;
}

double single_sensor_probability(const SensorSpec& sensor, const Vec3& point) {
  const Vec3 d = point - sensor.mount;
  const double r = d.norm();
  if (r > sensor.max_range) return 0.0;
  if (r == 0.0) return sensor.p_peak;
  const double azimuth =
      wrap_angle(std::atan2(d.y(), d.x()) - sensor.azimuth_center);
  if (std::abs(azimuth) > sensor.azimuth_half_angle) return 0.0;
  const double elevation = std::atan2(d.z(), std::hypot(d.x(), d.y()));
  if (std::abs(elevation) > sensor.elevation_half_angle) return 0.0;
  return sensor.p_peak * (1.0 - std::pow(r / sensor.max_range, sensor.decay));
}

double fuse(std::span<const double> probabilities) {
  // Uncovered sensors are skipped so that a single covering sensor passes
  // through bit-exactly.
  std::vector<double> covered;
  covered.reserve(probabilities.size());
  for (double p : probabilities) {
    if (p > 0.0) covered.push_back(p);
  }
  if (covered.empty()) return 0.0;
  std::sort(covered.begin(), covered.end());
  if (covered.size() == 1) return covered.front();
  double miss = 1.0;
  for (double p : covered) miss *= 1.0 - p;
  return std::clamp(1.0 - miss, covered.back(), 1.0);
}

DetectionGrid build_grid(const SensorSetup& setup, const GridSpec& spec,
                         const Vec3& ego_position) {
  spec.validate();
  setup.validate();
  const GridSpec s = spec.normalized();
  const int nx = s.nx();
  const int ny = s.ny();
  const int nz = s.nz();
  std::vector<double> values(s.node_count(), 0.0);
  std::vector<double> per_sensor(setup.sensors.size());
  std::size_t n = 0;
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      for (int k = 0; k < nz; ++k, ++n) {
        const Vec3 p{s.x_min + i * s.dx, s.y_min + j * s.dy, s.z_min + k * s.dz};
        for (std::size_t m = 0; m < setup.sensors.size(); ++m) {
          per_sensor[m] = single_sensor_probability(setup.sensors[m], p);
        }
        values[n] = setup.attenuation * fuse(per_sensor);
      }
    }
  }
  return DetectionGrid(s, std::move(values), ego_position);
}

}  // namespace oap
