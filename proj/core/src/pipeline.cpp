#include "oap/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <sstream>
#include <string>

#include <json.hpp>

#include "oap/csv.hpp"
#include "oap/error.hpp"
#include "oap/text.hpp"

namespace oap {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string describe(const Vec3& p) {
  return "(" + format_number(p.x()) + ", " + format_number(p.y()) + ", " +
         format_number(p.z()) + ")";
}

ordered_json usage_json(const MotionUsage& u, const MotionLimits& lim) {
  ordered_json j;
  j["max_yaw_rate"] = u.yaw_rate;
  j["max_yaw_rate_utilization"] = u.yaw_rate / lim.max_yaw_rate;
  j["max_yaw_diff"] = u.yaw_diff;
  j["max_yaw_diff_utilization"] = u.yaw_diff / lim.max_yaw_diff;
  j["max_pitch_rate"] = u.pitch_rate;
  j["max_pitch_rate_utilization"] = u.pitch_rate / lim.max_pitch_rate;
  j["max_grade"] = u.grade;
  j["max_grade_utilization"] = u.grade / lim.max_grade;
  j["max_speed_error"] = u.speed_error;
  return j;
}

ordered_json vec_json(const Vec3& v) { return ordered_json::array({v.x(), v.y(), v.z()}); }

ordered_json summary_json(const PipelineConfig& cfg, const RunResult& r) {
  const ScenarioResult& s = r.scenario;
  ordered_json j;
  j["k_j"] = r.k_j;
  j["start"] = vec_json(r.path.positions.front());
  j["goal"] = vec_json(r.path.positions.back());
  j["grid_nodes"] = r.grid->values().size();
  j["valid_nodes"] = r.valid_nodes;
  j["path"] = {{"nodes", r.path.size()},
               {"length", r.path.length},
               {"cost", r.path.cost},
               {"mean_p_d", mean_detection(r.path)},
               {"expanded", r.path.expanded}};
  j["duration"] = s.duration;
  j["handoff_time"] = s.ego.samples[s.handoff_index].t;
  j["ego_distance"] = s.ego_distance;
  j["challenger_distance"] = s.challenger_distance;
  j["ego_travelled"] = s.ego.travelled();
  j["challenger_travelled"] = s.challenger.travelled();
  j["closest_approach"] = s.closest_approach;
  j["closest_approach_time"] = s.closest_approach_time;
  j["terminated"] = s.terminated;
  j["ego_motion"] = usage_json(r.ego_usage, cfg.motion);
  j["challenger_motion"] = usage_json(r.challenger_usage, cfg.motion);
  ordered_json viol = ordered_json::array();
  for (const auto& v : r.envelope.violations) {
    viol.push_back({{"x_begin", v.x_begin}, {"x_end", v.x_end},
                    {"max_exceedance", v.max_exceedance}});
  }
  j["half_width"] = r.envelope.half_width;
  j["violations"] = std::move(viol);
  ordered_json inf = ordered_json::array();
  std::size_t clamped = 0;
  for (char f : s.infeasible) clamped += f ? 1 : 0;
  for (const auto& iv : s.infeasible_intervals) {
    inf.push_back({{"t_begin", iv.begin}, {"t_end", iv.end}, {"peak_error", iv.peak}});
  }
  j["infeasible_samples"] = clamped;
  j["samples"] = s.ego.size();
  j["infeasible_intervals"] = std::move(inf);
  j["replay"] = {{"max_error", r.replay.max_error},
                 {"max_error_outside_intervals", r.replay.max_error_outside}};
  return j;
}

void write_text(const std::filesystem::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw IoError("cannot open '" + file.string() + "' for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("failed writing '" + file.string() + "'");
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw IoError("cannot create output directory '" + dir.string() + "'");
  }
}

CsvTable replay_table(const RunResult& r) {
  CsvTable t{{"t", "rel_x", "rel_y", "rel_z", "error", "excluded"}, {}};
  for (std::size_t i = 0; i < r.replay.relative.size(); ++i) {
    const Vec3& p = r.replay.relative[i];
    t.rows.push_back({r.scenario.ego.samples[i].t, p.x(), p.y(), p.z(),
                      r.replay.error[i], static_cast<double>(r.replay.excluded[i])});
  }
  return t;
}

CsvTable road_edges_table(const RunResult& r) {
  CsvTable t{{"s", "left_x", "left_y", "right_x", "right_y"}, {}};
  const auto& c = r.envelope.centerline;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const std::size_t a = i == 0 ? 0 : i - 1;
    const std::size_t b = std::min(c.size() - 1, i + 1);
    Eigen::Vector2d d = (c[b] - c[a]).head<2>();
    d = d.norm() > 0.0 ? d.normalized() : Eigen::Vector2d{1.0, 0.0};
    const Eigen::Vector2d n{-d.y(), d.x()};
    const Eigen::Vector2d left = c[i].head<2>() + r.envelope.half_width * n;
    const Eigen::Vector2d right = c[i].head<2>() - r.envelope.half_width * n;
    t.rows.push_back({r.envelope.station[i], left.x(), left.y(), right.x(), right.y()});
  }
  return t;
}

}  // namespace

MotionUsage measure_motion(const VehicleTrajectory& vehicle,
                           const VehicleTrajectory& other, double dt) {
  MotionUsage u;
  const auto& s = vehicle.samples;
  for (std::size_t i = 0; i < s.size(); ++i) {
    u.grade = std::max(u.grade, std::abs(std::tan(s[i].pitch)));
    if (i < other.size()) {
      u.yaw_diff = std::max(u.yaw_diff, std::abs(s[i].yaw - other.samples[i].yaw));
    }
    if (i == 0) continue;
    u.yaw_rate = std::max(u.yaw_rate, std::abs(s[i].yaw - s[i - 1].yaw) / dt);
    u.pitch_rate = std::max(u.pitch_rate, std::abs(s[i].pitch - s[i - 1].pitch) / dt);
    const double v = (s[i].position - s[i - 1].position).norm() / dt;
    u.speed_error = std::max(u.speed_error, std::abs(v - vehicle.speed));
  }
  return u;
}

ReplayReport replay(const ScenarioResult& result, const RoadEnvelope& envelope,
                    const TimedPath& oap, const Vec3& ego_rel) {
  ReplayReport rep;
  rep.relative = relative_positions(result.ego, result.challenger, ego_rel);
  const std::size_t n = rep.relative.size();
  rep.error.resize(n);
  rep.excluded.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    rep.error[i] = distance_to_polyline(oap.points, rep.relative[i]);
    const bool clamped = i < result.infeasible.size() && result.infeasible[i];
    rep.excluded[i] =
        clamped || envelope.in_violation(result.challenger.samples[i].position.x());
    rep.max_error = std::max(rep.max_error, rep.error[i]);
    if (!rep.excluded[i]) rep.max_error_outside = std::max(rep.max_error_outside, rep.error[i]);
  }
  return rep;
}

std::shared_ptr<const DetectionGrid> obtain_grid(const PipelineConfig& config) {
  if (config.grid_file) {
    try {
      return std::make_shared<const DetectionGrid>(load_grid(*config.grid_file));
    } catch (const ParseError& e) {
      throw ParseError(config.grid_file->string() + ": " + e.what());
    }
  }
  return std::make_shared<const DetectionGrid>(
      build_grid(*config.sensors, config.grid, config.ego));
}

std::pair<GridIndex, GridIndex> endpoints(const DetectionGrid& grid,
                                          const NodeMask& mask,
                                          const PipelineConfig& config) {
  const Vec3& ego = grid.ego_position();
  const PruneRule rule = classify_point(config.start, ego, config.design);
  if (rule != PruneRule::kValid) {
    throw NoPathError("challenger start " + describe(config.start) +
                      " is pruned: " + std::string(to_string(rule)));
  }
  const auto start = grid.nearest_node(config.start);
  if (!start) {
    throw NoPathError("challenger start " + describe(config.start) +
                      " lies outside the grid");
  }
  const auto goal = grid.nearest_node(config.ego);
  if (!goal) {
    throw NoPathError("ego position " + describe(config.ego) + " lies outside the grid");
  }
  for (auto [idx, what] : {std::pair{*start, "challenger start"}, std::pair{*goal, "ego"}}) {
    if (!mask[grid.linear_index(idx)]) {
      const Vec3 p = grid.position(idx);
      throw NoPathError(std::string(what) + " node " + describe(p) +
                        " is pruned: " +
                        std::string(to_string(classify_point(p, ego, config.design))));
    }
  }
  return {*start, *goal};
}

RunResult compute_pipeline(const PipelineConfig& config) {
  config.validate();
  if (config.k_j.size() != 1) {
    throw ConfigError("a single run takes one value; use sweep for several", "k_j");
  }
  RunResult r;
  r.k_j = config.k_j.front();
  r.grid = obtain_grid(config);
  const DetectionGrid& grid = *r.grid;
  const NodeMask mask = prune_nodes(grid, config.design);
  r.valid_nodes = count_valid(mask);
  const auto [start, goal] = endpoints(grid, mask, config);
  r.path = find_path(grid, mask, start, goal, CostWeights{r.k_j});
  r.ego_rel = grid.position(goal);

  r.oap = smooth_path(resample_path(r.path, config.motion),
                      config.transform.smoothing_half_window);
  r.scenario = transform_scenario(r.oap, r.ego_rel, config.motion, config.transform);
  r.envelope = derive_road_envelope(r.scenario, config.half_width);
  r.replay = replay(r.scenario, r.envelope, r.oap, r.ego_rel);
  r.ego_usage = measure_motion(r.scenario.ego, r.scenario.challenger, config.motion.dt);
  r.challenger_usage =
      measure_motion(r.scenario.challenger, r.scenario.ego, config.motion.dt);
  return r;
}

RunResult run_pipeline(const PipelineConfig& config,
                       const std::filesystem::path& out_dir) {
  RunResult r = compute_pipeline(config);
  ensure_dir(out_dir);
  auto out = [&](const char* name) {
    r.artifacts.push_back(out_dir / name);
    return r.artifacts.back();
  };
  if (!config.grid_file) save_grid(*r.grid, out("grid.oapgrid"));
  write_csv(path_table(r.path), out("path.csv"));
  write_csv(trajectory_table(r.scenario.ego), out("ego_trajectory.csv"));
  write_csv(trajectory_table(r.scenario.challenger), out("challenger_trajectory.csv"));
  write_csv(envelope_table(r.envelope), out("envelope.csv"));
  write_text(out("summary.json"), summary_json(config, r).dump(2) + "\n");
  if (config.emit_plots) {
    write_csv(replay_table(r), out("replay_series.csv"));
    write_csv(road_edges_table(r), out("road_edges.csv"));
  }
  return r;
}

SweepReport run_kj_sweep(const PipelineConfig& config, std::vector<double> k_values,
                         const std::optional<std::filesystem::path>& out_dir) {
  PipelineConfig cfg = config;
  cfg.k_j = k_values;
  cfg.validate();
  std::sort(k_values.begin(), k_values.end());
  if (std::adjacent_find(k_values.begin(), k_values.end()) != k_values.end()) {
    throw ConfigError("sweep values must be distinct", "kj");
  }
  if (k_values.size() < 2) throw ConfigError("sweep needs at least two values", "kj");

  const auto grid = obtain_grid(cfg);
  const NodeMask mask = prune_nodes(*grid, cfg.design);
  const auto [start, goal] = endpoints(*grid, mask, cfg);

  std::vector<std::future<ApproachPath>> jobs;
  for (double k : k_values) {
    jobs.push_back(std::async(std::launch::async, [&, k] {
      return find_path(*grid, mask, start, goal, CostWeights{k});
    }));
  }
  SweepReport rep;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    SweepEntry e;
    e.k_j = k_values[i];
    e.path = jobs[i].get();
    e.length = e.path.length;
    e.mean_pd = mean_detection(e.path);
    rep.entries.push_back(std::move(e));
  }
  rep.length_decreasing = rep.mean_pd_increasing = true;
  for (std::size_t i = 1; i < rep.entries.size(); ++i) {
    rep.length_decreasing &= rep.entries[i].length < rep.entries[i - 1].length;
    rep.mean_pd_increasing &= rep.entries[i].mean_pd > rep.entries[i - 1].mean_pd;
  }

  if (out_dir) {
    ensure_dir(*out_dir);
    ordered_json j;
    ordered_json entries = ordered_json::array();
    for (const auto& e : rep.entries) {
      entries.push_back({{"k_j", e.k_j},
                         {"length", e.length},
                         {"mean_p_d", e.mean_pd},
                         {"cost", e.path.cost},
                         {"nodes", e.path.size()},
                         {"expanded", e.path.expanded}});
    }
    j["start"] = vec_json(grid->position(start));
    j["goal"] = vec_json(grid->position(goal));
    j["entries"] = std::move(entries);
    j["length_strictly_decreasing"] = rep.length_decreasing;
    j["mean_p_d_strictly_increasing"] = rep.mean_pd_increasing;
    rep.artifacts.push_back(*out_dir / "sweep.json");
    write_text(rep.artifacts.back(), j.dump(2) + "\n");

    CsvTable series{{"k_j", "x", "y", "z", "p_d"}, {}};
    for (const auto& e : rep.entries) {
      for (std::size_t n = 0; n < e.path.size(); ++n) {
        const Vec3& p = e.path.positions[n];
        series.rows.push_back({e.k_j, p.x(), p.y(), p.z(), e.path.p_d[n]});
      }
    }
    rep.artifacts.push_back(*out_dir / "sweep_series.csv");
    write_csv(series, rep.artifacts.back());
  }
  return rep;
}

}  // namespace oap
