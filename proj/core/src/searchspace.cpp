#include "oap/searchspace.hpp"

#include <cmath>
#include <string>

#include "oap/error.hpp"

namespace oap {

namespace {

void require(bool ok, const char* field, const char* what) {
  if (!ok) throw ConfigError(what, field);
}

// Sagitta of a circle of radius r at chord offset x.
double sagitta(double x, double r) { return r - std::sqrt(r * r - x * x); }

}  // namespace

void MotorwayDesignClass::validate() const {
  require(std::isfinite(r_min) && r_min > 0.0, "design_class.r_min", "must be > 0");
  require(std::isfinite(h_crest) && h_crest > 0.0, "design_class.h_crest",
          "must be > 0");
  require(std::isfinite(h_hollow) && h_hollow > 0.0, "design_class.h_hollow",
          "must be > 0");
  require(std::isfinite(y_off_max) && y_off_max >= 0.0,
          "design_class.y_off_max", "must be >= 0");
  require(std::isfinite(x_max) && x_max > 0.0, "design_class.x_max",
          "must be > 0");
  require(x_max <= r_min && x_max <= h_crest && x_max <= h_hollow,
          "design_class.x_max", "must not exceed any of the radii");
  require(std::isfinite(z_lo) && std::isfinite(z_hi) && z_hi > z_lo,
          "design_class.z_hi", "must be greater than z_lo");
}

double lateral_bound(double x, const MotorwayDesignClass& dc) {
  if (!(x >= 0.0) || x > dc.r_min) {
    throw DomainError("lateral_bound: x = " + std::to_string(x) +
                      " outside [0, r_min]");
  }
  return sagitta(x, dc.r_min) + dc.y_off_max;
}

std::pair<double, double> vertical_bounds(double x,
                                          const MotorwayDesignClass& dc) {
  if (!(x >= 0.0) || x > dc.h_crest || x > dc.h_hollow) {
    throw DomainError("vertical_bounds: x = " + std::to_string(x) +
                      " outside the crest/hollow domain");
  }
  return {dc.z_lo - sagitta(x, dc.h_crest), dc.z_hi + sagitta(x, dc.h_hollow)};
}

std::string_view to_string(PruneRule rule) {
  switch (rule) {
    case PruneRule::kValid:
      return "valid";
    case PruneRule::kBehindEgo:
      return "behind the ego (x < 0)";
    case PruneRule::kBeyondRange:
      return "beyond the forward cap x_max";
    case PruneRule::kLateral:
      return "outside the lateral bound |y| <= lateral_bound(x)";
    case PruneRule::kVertical:
      return "outside the vertical band vertical_bounds(x)";
  }
  return "unknown";
}

PruneRule classify_point(const Vec3& point, const Vec3& ego,
                         const MotorwayDesignClass& dc) {
  const double x = point.x() - ego.x();
  const double y = point.y() - ego.y();
  if (x < 0.0) return PruneRule::kBehindEgo;
  if (x > dc.x_max) return PruneRule::kBeyondRange;
  if (std::abs(y) > lateral_bound(x, dc)) return PruneRule::kLateral;
  const auto [lo, hi] = vertical_bounds(x, dc);
  if (point.z() < lo || point.z() > hi) return PruneRule::kVertical;
  return PruneRule::kValid;
}

NodeMask prune_nodes(const DetectionGrid& grid, const MotorwayDesignClass& dc) {
  dc.validate();
  NodeMask mask(grid.size(), 0);
  for (std::size_t n = 0; n < grid.size(); ++n) {
    mask[n] = classify_point(grid.position(grid.unravel(n)), grid.ego_position(),
                             dc) == PruneRule::kValid;
  }
  return mask;
}

std::size_t count_valid(const NodeMask& mask) {
  std::size_t n = 0;
  for (char c : mask) n += c != 0;
  return n;
}

}  // namespace oap
