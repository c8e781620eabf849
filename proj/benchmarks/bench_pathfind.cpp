#include <benchmark/benchmark.h>

#include "oap/grid.hpp"
#include "oap/pathfind.hpp"
#include "oap/reference_setup.hpp"
#include "oap/searchspace.hpp"

namespace {

const oap::DetectionGrid& grid_for(int preset) {
  static const oap::DetectionGrid coarse =
      oap::build_grid(oap::reference_sensor_setup(), oap::GridSpec::coarse(),
                      oap::kDefaultEgoPosition);
  static const oap::DetectionGrid middle =
      oap::build_grid(oap::reference_sensor_setup(), oap::GridSpec::middle(),
                      oap::kDefaultEgoPosition);
  return preset == 0 ? coarse : middle;
}

void BM_BuildGridCoarse(benchmark::State& state) {
  const auto setup = oap::reference_sensor_setup();
  for (auto _ : state) {
    auto g = oap::build_grid(setup, oap::GridSpec::coarse(), oap::kDefaultEgoPosition);
    benchmark::DoNotOptimize(g.values().data());
  }
}
BENCHMARK(BM_BuildGridCoarse)->Unit(benchmark::kMillisecond);

void BM_FindPath(benchmark::State& state) {
  const auto& grid = grid_for(static_cast<int>(state.range(0)));
  const oap::NodeMask mask = oap::prune_nodes(grid, oap::MotorwayDesignClass{});
  const auto start = *grid.nearest_node({300.0, -20.0, 2.0});
  const auto goal = *grid.nearest_node(oap::kDefaultEgoPosition);
  const oap::CostWeights w{static_cast<double>(state.range(1)) / 100.0};
  std::size_t expanded = 0;
  for (auto _ : state) {
    auto p = oap::find_path(grid, mask, start, goal, w);
    expanded = p.expanded;
    benchmark::DoNotOptimize(p.cost);
  }
  state.counters["expanded"] = static_cast<double>(expanded);
}
// Second argument is k_j in hundredths.
BENCHMARK(BM_FindPath)
    ->ArgsProduct({{0, 1}, {10, 25, 50}})
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
