#pragma once

#include <string_view>
#include <utility>
#include <vector>

#include "oap/grid.hpp"

namespace oap {

/// Motorway envelope constants. Defaults are those of design class EKA 1 B
/// with the 43.5 m standard cross section.
struct MotorwayDesignClass {
  double r_min = 720.0;       // minimum curve radius (m)
  double h_crest = 10000.0;   // minimum crest radius (m)
  double h_hollow = 5700.0;   // minimum hollow radius (m)
  double y_off_max = 10.875;  // maximum lateral offset within the roadway (m)
  double x_max = 300.0;       // forward search cap (m)
  double z_lo = 0.0;          // base vertical band (m)
  double z_hi = 4.0;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// |y| bound of the reachable set at forward distance x: the lateral reach
/// of a circular arc of radius r_min plus y_off_max. Throws DomainError for
/// x < 0 or x > r_min.
double lateral_bound(double x, const MotorwayDesignClass& dc);

/// (z_low, z_high) at forward distance x from crest/hollow arc sweeps of the
/// base band. Throws DomainError for x < 0 or x beyond either radius.
std::pair<double, double> vertical_bounds(double x,
                                          const MotorwayDesignClass& dc);

enum class PruneRule {
  kValid,
  kBehindEgo,
  kBeyondRange,
  kLateral,
  kVertical,
};

std::string_view to_string(PruneRule rule);

/// Which rule (if any) excludes a point given in grid coordinates. x and y
/// are measured from the ego position; z is absolute height.
PruneRule classify_point(const Vec3& point, const Vec3& ego,
                         const MotorwayDesignClass& dc);

/// One flag per grid node in storage order; true = searchable.
using NodeMask = std::vector<char>;

NodeMask prune_nodes(const DetectionGrid& grid, const MotorwayDesignClass& dc);

std::size_t count_valid(const NodeMask& mask);

}  // namespace oap
