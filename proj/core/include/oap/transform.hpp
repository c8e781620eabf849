#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "oap/grid.hpp"
#include "oap/pathfind.hpp"

namespace oap {

/// Speeds and orientation limits shared by both vehicles.
struct MotionLimits {
  double v_ego = 130.0 / 3.6;    // m/s
  double v_ch = 80.0 / 3.6;      // m/s
  double dt = 0.01;              // s
  double max_yaw_rate = 0.22;    // rad/s
  double max_yaw_diff = 0.21;    // rad, between the two vehicles
  double max_pitch_rate = 0.22;  // rad/s
  double max_grade = 0.06;       // |tan(pitch)|

  double v_rel() const { return v_ego - v_ch; }
  /// Throws ConfigError; requires v_ego > v_ch > 0 and positive limits.
  void validate() const;
};

/// Relative path sampled every `dt` seconds.
struct TimedPath {
  double dt = 0.01;
  std::vector<Vec3> points;

  std::size_t size() const { return points.size(); }
  double time(std::size_t i) const { return static_cast<double>(i) * dt; }
  double duration() const {
    return points.empty() ? 0.0 : time(points.size() - 1);
  }
};

/// Arc-length resampling of a polyline at spacing step = v_rel * dt. With
/// n = ceil(L / step) the samples sit at min(i * step, L), i = 0..n, so the
/// last sample is the polyline end. Throws ConfigError if v_rel <= 0 and
/// ValidationError for fewer than two points.
TimedPath resample_path(const std::vector<Vec3>& polyline,
                        const MotionLimits& limits);
TimedPath resample_path(const ApproachPath& path, const MotionLimits& limits);

/// Centred moving average over +-round(half_window / dt) samples. Near the
/// ends the window shrinks symmetrically, so both end points are kept.
TimedPath smooth_path(const TimedPath& path, double half_window);

struct ClampedStep {
  Vec3 step = Vec3::Zero();
  double yaw = 0.0;
  double pitch = 0.0;
  bool yaw_clamped = false;
  bool pitch_clamped = false;

  bool clamped() const { return yaw_clamped || pitch_clamped; }
};

/// Orientation of `desired_step` projected onto the feasible set
///   |yaw - prev_yaw|   <= max_yaw_rate * dt
///   |yaw - other_yaw|  <= max_yaw_diff
///   |pitch - prev_pitch| <= max_pitch_rate * dt
///   |tan(pitch)|       <= max_grade
/// The returned step has length speed * dt along the clamped orientation.
/// Yaw angles are continuous (not wrapped); the desired heading is unwrapped
/// next to prev_yaw. A zero desired step keeps the previous orientation.
/// The inputs prev_yaw/prev_pitch/other_yaw must themselves be feasible.
ClampedStep clamp_motion(double prev_yaw, double prev_pitch,
                         const Vec3& desired_step, double other_yaw,
                         double speed, const MotionLimits& limits);

/// Body-to-global rotation for yaw about z followed by pitch about the
/// lateral axis (positive pitch = nose up).
Eigen::Matrix3d body_rotation(double yaw, double pitch);

struct VehicleSample {
  double t = 0.0;
  Vec3 position = Vec3::Zero();
  double yaw = 0.0;
  double pitch = 0.0;
};

struct VehicleTrajectory {
  double speed = 0.0;
  std::vector<VehicleSample> samples;

  std::size_t size() const { return samples.size(); }
  /// Sum of the Euclidean step lengths.
  double travelled() const;
};

/// Closed time range [begin, end] of samples. `peak` is the largest replay
/// error inside.
struct TimeInterval {
  double begin = 0.0;
  double end = 0.0;
  double peak = 0.0;
};

struct ViolationInterval {
  double x_begin = 0.0;  // global x range of the challenger samples (m)
  double x_end = 0.0;
  double max_exceedance = 0.0;  // largest offset minus half-width (m)
};

struct RoadEnvelope {
  std::vector<Vec3> centerline;  // ego positions
  std::vector<double> station;   // arc length along the centerline
  double half_width = 10.875;
  std::vector<char> violation_flags;  // per centerline sample
  std::vector<ViolationInterval> violations;  // sorted, disjoint
  /// Challenger horizontal distance to the centerline, per challenger sample.
  std::vector<double> challenger_offset;

  /// True when challenger sample x lies inside a violation interval.
  bool in_violation(double x) const;
};

struct TransformSettings {
  /// Moving-average half window applied to the resampled path (s).
  double smoothing_half_window = 0.5;
  /// Roughness weight of the ego lateral plan y(x) = a (3u^2 - 2u^3),
  /// u = x / X, which minimises lambda * int y''^2 + (y(X) - y_target)^2 and
  /// gives a = y_target / (1 + 12 lambda / X^3). Zero reaches the challenger
  /// start exactly (m^3).
  double plan_roughness = 0.0;
  /// Pure-pursuit lookahead used by the ego, in seconds of ego travel.
  double ego_lookahead = 1.0;
  /// In the second phase the ego keeps the challenger's track within this
  /// lateral band and only steers when it drifts outside (m).
  double corridor_band = 2.0;
  /// Extra cap on the ego yaw rate so that the swing it induces on the
  /// challenger, yaw_rate * relative distance, stays below this (m/s).
  /// Zero disables the cap.
  double swing_limit = 3.0;
  /// Cap on how fast that swing may change (m/s^2). Zero disables the cap.
  double swing_accel_limit = 1.0;
  /// Distance along the relative path between the challenger's current
  /// projection and the point it steers at (m).
  double challenger_lookahead = 4.0;
  /// Safety cap on the number of simulated steps.
  std::size_t max_steps = 200000;
};

struct PhaseOneResult {
  VehicleTrajectory ego;
  VehicleTrajectory challenger;
  std::vector<double> replay_error;   // per sample (m)
  std::vector<double> progress;       // relative arc length reached (m)
  std::vector<char> infeasible;       // step i -> sample i was clamped
  std::vector<Vec3> ego_plan;         // planned ego polyline
};

struct ScenarioResult {
  VehicleTrajectory ego;
  VehicleTrajectory challenger;
  std::vector<double> replay_error;
  std::vector<double> progress;
  std::vector<char> infeasible;
  std::vector<TimeInterval> infeasible_intervals;
  std::size_t handoff_index = 0;  // first sample of the second phase
  double duration = 0.0;          // T (s)
  double ego_distance = 0.0;      // v_ego * T
  double challenger_distance = 0.0;
  double closest_approach = 0.0;       // min |C - E| (m)
  double closest_approach_time = 0.0;  // s
  bool terminated = true;  // false if max_steps stopped the loop
};

/// First phase: the ego follows its lateral plan towards the challenger's
/// start while the challenger steps onto the relative path mapped through
/// the ego's new pose. Ends once the ego's global x exceeds the challenger's
/// start x. The ego starts at the global origin in x and y at the height of
/// `ego_rel` and the challenger at `oap.points.front()`, both heading +x.
PhaseOneResult transform_phase1(const TimedPath& oap, const Vec3& ego_rel,
                                const MotionLimits& limits,
                                const TransformSettings& settings);

/// Second phase: the ego follows the corridor already driven by the
/// challenger while the challenger keeps realising the relative path. Ends
/// once the ego's global x exceeds the challenger's.
ScenarioResult transform_phase2(const TimedPath& oap, const Vec3& ego_rel,
                                PhaseOneResult phase1,
                                const MotionLimits& limits,
                                const TransformSettings& settings);

/// Both phases back to back.
ScenarioResult transform_scenario(const TimedPath& oap, const Vec3& ego_rel,
                                  const MotionLimits& limits,
                                  const TransformSettings& settings);

/// Centerline equals the ego trajectory. A challenger sample whose horizontal
/// distance to the centerline exceeds half_width is a violation; exactly
/// half_width is not.
RoadEnvelope derive_road_envelope(const ScenarioResult& result,
                                  double half_width);

/// Challenger position expressed in the ego frame and shifted so the ego
/// sits at `ego_rel`, one entry per sample.
std::vector<Vec3> relative_positions(const VehicleTrajectory& ego,
                                     const VehicleTrajectory& challenger,
                                     const Vec3& ego_rel);

/// Distance from `point` to the polyline.
double distance_to_polyline(const std::vector<Vec3>& polyline,
                            const Vec3& point);

}  // namespace oap
