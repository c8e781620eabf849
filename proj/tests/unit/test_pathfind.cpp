#include <doctest.h>

#include <cmath>
#include <random>

#include "oap/error.hpp"
#include "oap/grid.hpp"
#include "oap/pathfind.hpp"
#include "oap/searchspace.hpp"
#include "oracles.hpp"

using oap::CostWeights;
using oap::GridIndex;
using oap::Vec3;

namespace {

oap::DetectionGrid uniform_grid(double p, int nx = 6, int ny = 5, int nz = 3) {
  oap::GridSpec s{0.0, double(nx - 1), -double(ny / 2), double(ny - 1 - ny / 2),
                  0.0, 0.5 * (nz - 1), 1.0, 1.0, 0.5};
  return oap::DetectionGrid(s, std::vector<double>(s.node_count(), p), {0.0, 0.0, 0.0});
}

std::vector<char> all_valid(const oap::DetectionGrid& g) { return std::vector<char>(g.size(), 1); }

}  // namespace

TEST_SUITE("pathfind") {

TEST_CASE("node cost closed forms") {
  CHECK(oap::node_cost(0.5, 4.0, CostWeights{0.25}) == 2.4);
  for (double k : {0.1, 0.25, 0.5, 1.0, 3.0}) {
    for (double d : {0.4, 1.0, std::sqrt(2.0), 4.0}) {
      CHECK(oap::node_cost(0.0, d, CostWeights{k}) == k / (k + 1.0) * d);
      CHECK(oap::node_cost(1.0, d, CostWeights{k}) == d);
    }
  }
  CHECK(oap::heuristic({0, 0, 0}, {3, 4, 0}, CostWeights{0.25}) == 0.25 / 1.25 * 5.0);
}

TEST_CASE("path_cost on a hand-built path") {
  oap::GridSpec s{0.0, 2.0, 0.0, 2.0, 0.0, 2.0, 2.0, 1.5, 0.4};
  s.y_max = 3.0;
  s.z_max = 0.8;
  std::vector<double> v(s.node_count());
  for (std::size_t n = 0; n < v.size(); ++n) v[n] = 0.01 * static_cast<double>(n);
  const oap::DetectionGrid g(s, v, {0, 0, 0});
  const CostWeights w{0.3};
  const auto path = oap::make_path(g, {{0, 0, 0}, {1, 0, 0}, {1, 1, 1}}, w);
  const double p1 = g.value(GridIndex{1, 0, 0});
  const double p2 = g.value(GridIndex{1, 1, 1});
  const double d1 = 2.0;
  const double d2 = std::sqrt(1.5 * 1.5 + 0.4 * 0.4);
  const double expected = (0.3 + p1) / 1.3 * d1 + (0.3 + p2) / 1.3 * d2;
  CHECK(oap::path_cost(path, g, w) == expected);
  CHECK(path.cost == expected);
  CHECK(path.length == d1 + d2);
  CHECK(oap::mean_detection(path) == doctest::Approx((p1 * d1 + p2 * d2) / (d1 + d2)));
  CHECK_THROWS_AS(oap::make_path(g, {{0, 0, 0}, {2, 0, 0}}, w), oap::ValidationError);
  CHECK_THROWS_AS(oap::make_path(g, {{0, 0, 0}, {0, 0, 0}}, w), oap::ValidationError);
  CHECK_THROWS_AS(oap::make_path(g, {{0, 0, 0}, {0, 0, -1}}, w), oap::ValidationError);
}

TEST_CASE("weights validation") {
  CHECK_THROWS_AS(CostWeights{0.0}.validate(), oap::ConfigError);
  CHECK_THROWS_AS(CostWeights{-1.0}.validate(), oap::ConfigError);
  CHECK_NOTHROW(CostWeights{0.1}.validate());
}

TEST_CASE("A* matches Dijkstra on random grids") {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> dim(2, 8);
  std::uniform_real_distribution<double> kd(0.1, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const auto g = oracle::random_grid(rng, dim(rng), dim(rng), 2 + dim(rng) / 4);
    auto mask = all_valid(g);
    if (trial % 2) {
      for (auto& m : mask) m = u(rng) > 0.2;
    }
    std::uniform_int_distribution<std::size_t> pick(0, g.size() - 1);
    const std::size_t s = pick(rng);
    std::size_t t = pick(rng);
    if (t == s) t = (s + 1) % g.size();
    mask[s] = mask[t] = 1;
    const double k = kd(rng);
    const auto dist = oracle::dijkstra_from(g, mask, s, k);
    if (std::isinf(dist[t])) {
      CHECK_THROWS_AS(oap::find_path(g, mask, g.unravel(s), g.unravel(t), CostWeights{k}),
                      oap::NoPathError);
      continue;
    }
    const auto path = oap::find_path(g, mask, g.unravel(s), g.unravel(t), CostWeights{k});
    REQUIRE(path.cost == dist[t]);
    REQUIRE(path.nodes.front() == g.unravel(s));
    REQUIRE(path.nodes.back() == g.unravel(t));
    for (const auto& n : path.nodes) REQUIRE(mask[g.linear_index(n)]);
  }
}

TEST_CASE("uniform zero grid gives the straight path for every k") {
  const auto g = uniform_grid(0.0, 9, 5, 3);
  const GridIndex start{8, 2, 1}, goal{0, 2, 1};
  for (double k : {0.1, 0.25, 0.5, 2.0}) {
    const auto p = oap::find_path(g, all_valid(g), start, goal, CostWeights{k});
    REQUIRE(p.size() == 9);
    for (std::size_t n = 0; n < p.size(); ++n) {
      CHECK(p.nodes[n] == GridIndex{8 - int(n), 2, 1});
    }
    CHECK(p.length == 8.0);
  }
}

TEST_CASE("detour around a covered block") {
  // A high-P wall across the direct line makes the path bend.
  oap::GridSpec s{0.0, 10.0, -5.0, 5.0, 0.0, 0.0, 1.0, 1.0, 1.0};
  s.z_max = 1.0;
  std::vector<double> v(s.node_count(), 0.0);
  oap::DetectionGrid tmp(s, v, {0, 0, 0});
  for (std::size_t n = 0; n < v.size(); ++n) {
    const auto idx = tmp.unravel(n);
    if (idx.i == 5 && idx.j >= 2 && idx.j <= 8) v[n] = 1.0;
  }
  const oap::DetectionGrid g(s, v, {0, 0, 0});
  const auto p = oap::find_path(g, all_valid(g), {10, 5, 0}, {0, 5, 0}, CostWeights{0.1});
  bool crosses_wall = false;
  for (std::size_t n = 0; n < p.size(); ++n) crosses_wall |= p.p_d[n] == 1.0;
  CHECK_FALSE(crosses_wall);
  const auto straight = oap::find_path(g, all_valid(g), {10, 5, 0}, {0, 5, 0}, CostWeights{50.0});
  CHECK(straight.length <= p.length);
}

TEST_CASE("endpoint errors") {
  const auto g = uniform_grid(0.3);
  auto mask = all_valid(g);
  CHECK_THROWS_AS(oap::find_path(g, mask, {0, 0, 0}, {0, 0, 0}, CostWeights{}), oap::ValidationError);
  CHECK_THROWS_AS(oap::find_path(g, mask, {0, 0, 0}, {99, 0, 0}, CostWeights{}), oap::ValidationError);
  mask[g.linear_index({5, 2, 1})] = 0;
  CHECK_THROWS_AS(oap::find_path(g, mask, {5, 2, 1}, {0, 0, 0}, CostWeights{}), oap::NoPathError);
  // Wall of pruned nodes at i = 3.
  mask = all_valid(g);
  for (std::size_t n = 0; n < g.size(); ++n) {
    if (g.unravel(n).i == 3) mask[n] = 0;
  }
  CHECK_THROWS_AS(oap::find_path(g, mask, {5, 2, 1}, {0, 2, 1}, CostWeights{}), oap::NoPathError);
}

TEST_CASE("heuristic admissible and consistent") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const auto g = oracle::random_grid(rng, 7, 6, 3);
    const auto mask = all_valid(g);
    const double k = 0.1 + 0.09 * trial;
    const std::size_t goal = g.size() / 2;
    const Vec3 gp = g.position(g.unravel(goal));
    const auto rest = oracle::dijkstra_to(g, mask, goal, k);
    const auto L = oracle::lattice(g);
    for (std::size_t n = 0; n < g.size(); ++n) {
      const double h = oap::heuristic(g.position(g.unravel(n)), gp, CostWeights{k});
      REQUIRE(h <= rest[n]);
      oracle::for_neighbours(L, n, mask, [&](std::size_t m, int di, int dj, int dk) {
        const double c = oracle::edge_cost(g.value(m), oracle::step_length(di, dj, dk, g.spec()), k);
        const double hm = oap::heuristic(g.position(g.unravel(m)), gp, CostWeights{k});
        REQUIRE(h <= c + hm);
      });
    }
  }
}

TEST_CASE("search is deterministic") {
  std::mt19937_64 rng(17);
  const auto g = oracle::random_grid(rng, 8, 8, 3);
  const auto a = oap::find_path(g, all_valid(g), {7, 7, 2}, {0, 0, 0}, CostWeights{0.4});
  const auto b = oap::find_path(g, all_valid(g), {7, 7, 2}, {0, 0, 0}, CostWeights{0.4});
  CHECK(a.nodes == b.nodes);
  CHECK(a.expanded == b.expanded);
  CHECK(a.expanded > 0);
}

}
