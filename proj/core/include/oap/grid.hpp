#pragma once

#include <compare>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace oap {

using Vec3 = Eigen::Vector3d;

/// Ego reference point used throughout the default scenarios (m).
inline const Vec3 kDefaultEgoPosition{0.0, 0.0, 0.5};

struct GridIndex {
  int i = 0;
  int j = 0;
  int k = 0;

  auto operator<=>(const GridIndex&) const = default;
};

/// Axis-aligned lattice description. Node count per axis is
/// floor((max - min) / spacing) + 1; the quotient is taken with a 1e-9
/// relative slack so that e.g. 4.8 / 0.8 yields 6 intervals.
struct GridSpec {
  double x_min = 0.0;
  double x_max = 0.0;
  double y_min = 0.0;
  double y_max = 0.0;
  double z_min = 0.0;
  double z_max = 0.0;
  double dx = 1.0;
  double dy = 1.0;
  double dz = 1.0;

  /// Throws ConfigError on non-positive spacing or an empty extent.
  void validate() const;

  int nx() const;
  int ny() const;
  int nz() const;
  std::size_t node_count() const;

  /// Same lattice with every max bound moved onto the last node.
  GridSpec normalized() const;

  /// Presets over x in [0, 300], y in [-80, 80], z in [0, 4.8].
  static GridSpec fine();
  static GridSpec middle();
  static GridSpec coarse();
  /// "fine", "middle" or "coarse"; anything else is a ConfigError.
  static GridSpec preset(std::string_view name);

  bool operator==(const GridSpec&) const = default;
};

struct SensorSpec {
  Vec3 mount{0.0, 0.0, 0.0};        // relative to the ego origin (m)
  double azimuth_center = 0.0;      // rad, 0 = ego +x
  double azimuth_half_angle = 0.0;  // rad, (0, pi]
  double elevation_half_angle = 0.0;  // rad, (0, pi], about the horizontal
  double max_range = 0.0;           // m
  double p_peak = 0.0;              // [0, 1]
  double decay = 2.0;               // range-decay exponent, > 0

  void validate() const;
};

struct SensorSetup {
  std::vector<SensorSpec> sensors;
  /// Uniform scale on every fused value; 1 means good weather.
  double attenuation = 1.0;

  void validate() const;
};

/// Immutable dense 3D field of detection probabilities. Storage is row-major
/// with x outermost and z innermost.
class DetectionGrid {
 public:
  /// Validates the grid layout, the value count and that every value is in [0, 1].
  DetectionGrid(const GridSpec& spec, std::vector<double> values,
                const Vec3& ego_position);

  const GridSpec& spec() const { return spec_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int nz() const { return nz_; }
  std::size_t size() const { return values_.size(); }

  bool contains(const GridIndex& idx) const {
    return idx.i >= 0 && idx.i < nx_ && idx.j >= 0 && idx.j < ny_ &&
           idx.k >= 0 && idx.k < nz_;
  }
  std::size_t linear_index(const GridIndex& idx) const {
    return (static_cast<std::size_t>(idx.i) * ny_ + idx.j) * nz_ + idx.k;
  }
  GridIndex unravel(std::size_t linear) const;

  Vec3 position(const GridIndex& idx) const;
  double value(const GridIndex& idx) const { return values_[linear_index(idx)]; }
  double value(std::size_t linear) const { return values_[linear]; }
  std::span<const double> values() const { return values_; }
  const Vec3& ego_position() const { return ego_; }

  /// Closest lattice node (per-axis rounding, halves away from min), or
  /// nullopt when the point lies more than half a spacing outside the grid.
  std::optional<GridIndex> nearest_node(const Vec3& point) const;

  friend bool operator==(const DetectionGrid& a, const DetectionGrid& b);

 private:
  GridSpec spec_;
  int nx_;
  int ny_;
  int nz_;
  std::vector<double> values_;
  Vec3 ego_;
};

/// Cone-plus-range-decay model:
///   p_peak * (1 - (r / max_range)^decay)  inside the angular cone, else 0.
/// `point` is in ego coordinates.
double single_sensor_probability(const SensorSpec& sensor, const Vec3& point);

/// Independent fusion 1 - prod(1 - p_i). Inputs are combined in sorted order
/// so the result does not depend on their order. Empty input gives 0.
double fuse(std::span<const double> probabilities);

DetectionGrid build_grid(const SensorSetup& setup, const GridSpec& spec,
                         const Vec3& ego_position = kDefaultEgoPosition);

/// Text format:
///   OAPGRID 1
///   nx ny nz
///   x_min y_min z_min
///   dx dy dz
///   ego_x ego_y ego_z
///   nx*ny*nz values (x outer, z inner)
/// Numbers are written in shortest round-trip form.
void save_grid(const DetectionGrid& grid, std::ostream& out);
void save_grid(const DetectionGrid& grid, const std::filesystem::path& file);
DetectionGrid load_grid(std::istream& in);
DetectionGrid load_grid(const std::filesystem::path& file);

}  // namespace oap
