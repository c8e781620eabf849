#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <vector>

#include "oap/config.hpp"
#include "oap/grid.hpp"
#include "oap/pathfind.hpp"
#include "oap/searchspace.hpp"
#include "oap/transform.hpp"

namespace oap {

/// Largest per-step values along a trajectory. Rates are |delta| / dt; the
/// yaw difference is taken against the other vehicle's sample at the same
/// index; grade is |tan(pitch)|.
struct MotionUsage {
  double yaw_rate = 0.0;
  double yaw_diff = 0.0;
  double pitch_rate = 0.0;
  double grade = 0.0;
  double speed_error = 0.0;  // max |step length / dt - speed|
};

MotionUsage measure_motion(const VehicleTrajectory& vehicle,
                           const VehicleTrajectory& other, double dt);

/// Challenger motion rebuilt from the two output trajectories and compared
/// with the smoothed relative path.
struct ReplayReport {
  std::vector<Vec3> relative;
  std::vector<double> error;    // distance to the relative path (m)
  std::vector<char> excluded;   // inside a violation or infeasible interval
  double max_error = 0.0;
  double max_error_outside = 0.0;  // over samples that are not excluded
};

ReplayReport replay(const ScenarioResult& result, const RoadEnvelope& envelope,
                    const TimedPath& oap, const Vec3& ego_rel);

/// Grid from the config's grid file or its sensor setup.
std::shared_ptr<const DetectionGrid> obtain_grid(const PipelineConfig& config);

/// Start and goal nodes for the config's v_1 and v_N. Throws NoPathError
/// naming the pruning rule when v_1 or v_N cannot take part in the search.
std::pair<GridIndex, GridIndex> endpoints(const DetectionGrid& grid,
                                          const NodeMask& mask,
                                          const PipelineConfig& config);

struct RunResult {
  std::shared_ptr<const DetectionGrid> grid;
  std::size_t valid_nodes = 0;
  ApproachPath path;
  double k_j = 0.0;
  Vec3 ego_rel = Vec3::Zero();
  TimedPath oap;  // resampled and smoothed
  ScenarioResult scenario;
  RoadEnvelope envelope;
  ReplayReport replay;
  MotionUsage ego_usage;
  MotionUsage challenger_usage;
  std::vector<std::filesystem::path> artifacts;
};

/// Runs search and transformation without touching the disk. The config
/// must hold exactly one k_j value.
RunResult compute_pipeline(const PipelineConfig& config);

/// compute_pipeline plus the artifacts in `out_dir`: grid.oapgrid (only when
/// built from sensors), path.csv, ego_trajectory.csv,
/// challenger_trajectory.csv, envelope.csv and summary.json. With
/// emit_plots, replay_series.csv and road_edges.csv are added.
RunResult run_pipeline(const PipelineConfig& config,
                       const std::filesystem::path& out_dir);

struct SweepEntry {
  double k_j = 0.0;
  ApproachPath path;
  double length = 0.0;
  double mean_pd = 0.0;
};

struct SweepReport {
  std::vector<SweepEntry> entries;  // ascending k_j
  bool length_decreasing = false;   // strictly, over ascending k_j
  bool mean_pd_increasing = false;  // strictly, over ascending k_j
  std::vector<std::filesystem::path> artifacts;
};

/// Searches once per k value in parallel over one shared grid. Needs two or
/// more distinct values; duplicates are a ConfigError. With `out_dir` the
/// report is written as sweep.json and sweep_series.csv.
SweepReport run_kj_sweep(const PipelineConfig& config, std::vector<double> k_values,
                         const std::optional<std::filesystem::path>& out_dir = {});

}  // namespace oap
