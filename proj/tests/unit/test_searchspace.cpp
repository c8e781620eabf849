#include <doctest.h>

#include <cmath>

#include "oap/error.hpp"
#include "oap/grid.hpp"
#include "oap/searchspace.hpp"
#include "oracles.hpp"

using oap::PruneRule;
using oap::Vec3;

TEST_SUITE("searchspace") {

TEST_CASE("lateral bound") {
  const oap::MotorwayDesignClass dc;
  CHECK(oap::lateral_bound(0.0, dc) == 10.875);
  const double at300 = oap::lateral_bound(300.0, dc);
  CHECK(std::abs(at300 - 76.36) <= 0.01);
  CHECK(std::abs(at300 - (oracle::sampled_arc_reach(300.0, 720.0) + 10.875)) < 1e-3);
  CHECK(std::abs(oap::lateral_bound(100.0, dc) - 17.85) < 0.01);
  CHECK(std::abs(oap::lateral_bound(100.0, dc) -
                 (oracle::sampled_arc_reach(100.0, 720.0) + 10.875)) < 1e-3);
  CHECK_THROWS_AS(oap::lateral_bound(721.0, dc), oap::DomainError);
  CHECK_THROWS_AS(oap::lateral_bound(-1.0, dc), oap::DomainError);
  // Monotone in x.
  double prev = 0.0;
  for (double x = 0.0; x <= 300.0; x += 7.5) {
    const double b = oap::lateral_bound(x, dc);
    CHECK(b >= prev);
    prev = b;
  }
}

TEST_CASE("vertical bounds widen with distance") {
  const oap::MotorwayDesignClass dc;
  const auto [lo0, hi0] = oap::vertical_bounds(0.0, dc);
  CHECK(lo0 == dc.z_lo);
  CHECK(hi0 == dc.z_hi);
  const auto [lo, hi] = oap::vertical_bounds(300.0, dc);
  CHECK(std::abs((dc.z_lo - lo) - oracle::sampled_arc_reach(300.0, 10000.0)) < 1e-3);
  CHECK(std::abs((hi - dc.z_hi) - oracle::sampled_arc_reach(300.0, 5700.0)) < 1e-3);
  CHECK_THROWS_AS(oap::vertical_bounds(6000.0, dc), oap::DomainError);
}

TEST_CASE("classification rules") {
  const oap::MotorwayDesignClass dc;
  const Vec3 ego{0.0, 0.0, 0.5};
  CHECK(oap::classify_point({10.0, 0.0, 1.0}, ego, dc) == PruneRule::kValid);
  CHECK(oap::classify_point({-1.0, 0.0, 1.0}, ego, dc) == PruneRule::kBehindEgo);
  CHECK(oap::classify_point({301.0, 0.0, 1.0}, ego, dc) == PruneRule::kBeyondRange);
  CHECK(oap::classify_point({300.0, 100.0, 1.0}, ego, dc) == PruneRule::kLateral);
  CHECK(oap::classify_point({0.0, 10.875, 1.0}, ego, dc) == PruneRule::kValid);
  CHECK(oap::classify_point({0.0, 10.9, 1.0}, ego, dc) == PruneRule::kLateral);
  CHECK(oap::classify_point({10.0, 0.0, 4.5}, ego, dc) == PruneRule::kVertical);
  CHECK(oap::classify_point({300.0, 0.0, 4.5}, ego, dc) == PruneRule::kValid);
  CHECK(oap::to_string(PruneRule::kLateral).find("lateral") != std::string_view::npos);
}

TEST_CASE("design class validation") {
  oap::MotorwayDesignClass dc;
  dc.r_min = 0.0;
  CHECK_THROWS_AS(dc.validate(), oap::ConfigError);
  dc = {};
  dc.z_hi = dc.z_lo;
  CHECK_THROWS_AS(dc.validate(), oap::ConfigError);
}

TEST_CASE("pruned coarse grid") {
  const oap::GridSpec spec = oap::GridSpec::coarse();
  const oap::DetectionGrid g(spec, std::vector<double>(spec.node_count(), 0.0),
                             oap::kDefaultEgoPosition);
  const oap::MotorwayDesignClass dc;
  const auto mask = oap::prune_nodes(g, dc);
  // Count with the closed forms evaluated here.
  std::size_t expected = 0;
  for (int i = 0; i < g.nx(); ++i)
    for (int j = 0; j < g.ny(); ++j)
      for (int k = 0; k < g.nz(); ++k) {
        const double x = spec.x_min + i * spec.dx;
        const double y = spec.y_min + j * spec.dy;
        const double z = spec.z_min + k * spec.dz;
        const double lat = 720.0 - std::sqrt(720.0 * 720.0 - x * x) + 10.875;
        const double lo = 0.0 - (10000.0 - std::sqrt(1e8 - x * x));
        const double hi = 4.0 + (5700.0 - std::sqrt(5700.0 * 5700.0 - x * x));
        if (std::abs(y) <= lat && z >= lo && z <= hi) ++expected;
      }
  CHECK(oap::count_valid(mask) == expected);
  CHECK(std::abs(static_cast<double>(expected) - 8926.0) <= 0.1 * 8926.0);
}

}
