#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "oap/config.hpp"
#include "oap/error.hpp"
#include "oap/grid.hpp"
#include "oap/pipeline.hpp"
#include "oap/searchspace.hpp"

namespace {

enum Exit : int {
  kOk = 0,
  kFailure = 1,
  kConfig = 2,
  kNoPath = 3,
  kIo = 4,
};

int cmd_run(const std::string& config_file, const std::string& out_dir) {
  const oap::PipelineConfig cfg = oap::load_config(config_file);
  const std::filesystem::path out = out_dir.empty() ? cfg.output_dir : std::filesystem::path(out_dir);
  const oap::RunResult r = oap::run_pipeline(cfg, out);
  const auto& s = r.scenario;
  std::printf("path: %zu nodes, L = %.1f m, mean P_D = %.3f, %zu expansions\n",
              r.path.size(), r.path.length, oap::mean_detection(r.path),
              r.path.expanded);
  std::printf("scenario: T = %.2f s (handoff %.2f s), ego %.1f m, challenger %.1f m\n",
              s.duration, s.ego.samples[s.handoff_index].t, s.ego_distance,
              s.challenger_distance);
  std::printf("replay: max error %.3f m (%.3f m outside reported intervals)\n",
              r.replay.max_error, r.replay.max_error_outside);
  for (const auto& v : r.envelope.violations) {
    std::printf("road violation: x in [%.1f, %.1f] m, max exceedance %.2f m\n",
                v.x_begin, v.x_end, v.max_exceedance);
  }
  for (const auto& f : r.artifacts) std::printf("wrote %s\n", f.string().c_str());
  return kOk;
}

int cmd_sweep(const std::string& config_file, const std::string& k_list,
              const std::string& out_dir) {
  const oap::PipelineConfig cfg = oap::load_config(config_file);
  const std::filesystem::path out = out_dir.empty() ? cfg.output_dir : std::filesystem::path(out_dir);
  const auto rep = oap::run_kj_sweep(cfg, oap::parse_k_list(k_list), out);
  std::printf("%8s %10s %10s %12s\n", "k_j", "L (m)", "mean P_D", "expanded");
  for (const auto& e : rep.entries) {
    std::printf("%8.3f %10.1f %10.4f %12zu\n", e.k_j, e.length, e.mean_pd,
                e.path.expanded);
  }
  std::printf("L strictly decreasing in k_j: %s\n", rep.length_decreasing ? "yes" : "no");
  std::printf("mean P_D strictly increasing in k_j: %s\n",
              rep.mean_pd_increasing ? "yes" : "no");
  for (const auto& f : rep.artifacts) std::printf("wrote %s\n", f.string().c_str());
  return kOk;
}

int cmd_grid_build(const std::string& config_file, const std::string& file) {
  const oap::PipelineConfig cfg = oap::load_config(config_file);
  if (!cfg.sensors) {
    throw oap::ConfigError("grid build needs a sensor setup, not a grid file", "sensors");
  }
  const auto grid = oap::obtain_grid(cfg);
  oap::save_grid(*grid, std::filesystem::path(file));
  std::printf("wrote %s (%d x %d x %d nodes)\n", file.c_str(), grid->nx(), grid->ny(),
              grid->nz());
  return kOk;
}

int cmd_grid_info(const std::string& file) {
  const oap::DetectionGrid grid = oap::load_grid(std::filesystem::path(file));
  const oap::GridSpec& s = grid.spec();
  std::size_t covered = 0;
  double peak = 0.0;
  for (double v : grid.values()) {
    covered += v > 0.0 ? 1 : 0;
    peak = std::max(peak, v);
  }
  const oap::NodeMask mask = oap::prune_nodes(grid, oap::MotorwayDesignClass{});
  std::printf("dimensions: %d x %d x %d = %zu nodes\n", grid.nx(), grid.ny(), grid.nz(),
              grid.values().size());
  std::printf("x: [%g, %g] step %g\ny: [%g, %g] step %g\nz: [%g, %g] step %g\n",
              s.x_min, s.x_max, s.dx, s.y_min, s.y_max, s.dy, s.z_min, s.z_max, s.dz);
  std::printf("ego: (%g, %g, %g)\n", grid.ego_position().x(), grid.ego_position().y(),
              grid.ego_position().z());
  std::printf("covered nodes: %zu, max P_D: %.4f\n", covered, peak);
  std::printf("valid nodes after default pruning: %zu\n", oap::count_valid(mask));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Worst-case approaching path search and scenario transformation"};
  app.require_subcommand(1);

  std::string config_file, out_dir, k_list, grid_file;

  auto* run = app.add_subcommand("run", "search one path and build the scenario");
  run->add_option("--config", config_file, "JSON config file")->required();
  run->add_option("--out", out_dir, "output directory (default: config output_dir)");

  auto* sweep = app.add_subcommand("sweep", "compare paths over several k_j values");
  sweep->add_option("--config", config_file, "JSON config file")->required();
  sweep->add_option("--kj", k_list, "comma separated k_j values, e.g. 0.1,0.25,0.5")
      ->required();
  sweep->add_option("--out", out_dir, "output directory (default: config output_dir)");

  auto* grid = app.add_subcommand("grid", "build or inspect grid files");
  grid->require_subcommand(1);
  auto* build = grid->add_subcommand("build", "build the grid of a config and save it");
  build->add_option("--config", config_file, "JSON config file with a sensor setup")
      ->required();
  build->add_option("file", grid_file, "destination grid file")->required();
  auto* info = grid->add_subcommand("info", "print a summary of a grid file");
  info->add_option("file", grid_file, "grid file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  try {
    if (*run) return cmd_run(config_file, out_dir);
    if (*sweep) return cmd_sweep(config_file, k_list, out_dir);
    if (*build) return cmd_grid_build(config_file, grid_file);
    if (*info) return cmd_grid_info(grid_file);
  } catch (const oap::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const oap::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kConfig;
  } catch (const oap::NoPathError& e) {
    std::cerr << "no path: " << e.what() << '\n';
    return kNoPath;
  } catch (const oap::IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}
