// Acceptance checks. Each criterion prints one PASS or FAIL line; the exit
// status is non-zero when any of them fails.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oap/config.hpp"
#include "oap/error.hpp"
#include "oap/grid.hpp"
#include "oap/pathfind.hpp"
#include "oap/pipeline.hpp"
#include "oap/reference_setup.hpp"
#include "oap/searchspace.hpp"
#include "oap/transform.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

void fail(Outcome& o, const std::string& why) {
  if (o.pass) o.detail = why;
  o.pass = false;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

const fs::path kConfigs = OAPGEN_CONFIG_DIR;

struct RandomCase {
  oap::DetectionGrid grid;
  oap::NodeMask mask;
  oap::GridIndex start, goal;
  double k;
};

// Random grids of at most 12 x 12 x 4 nodes. About one node in eight is
// masked out so that detours are exercised too.
std::vector<RandomCase> random_cases(int count) {
  std::mt19937_64 rng(20240601);
  std::uniform_int_distribution<int> nxy(2, 12), nzd(2, 4);
  std::uniform_real_distribution<double> kd(0.1, 1.0), u(0.0, 1.0);
  std::vector<RandomCase> out;
  while (static_cast<int>(out.size()) < count) {
    const int nx = nxy(rng), ny = nxy(rng), nz = nzd(rng);
    auto grid = oracle::random_grid(rng, nx, ny, nz);
    oap::NodeMask mask(grid.size());
    for (auto& m : mask) m = u(rng) < 0.875 ? 1 : 0;
    const std::size_t s = std::uniform_int_distribution<std::size_t>(0, grid.size() - 1)(rng);
    std::size_t g = std::uniform_int_distribution<std::size_t>(0, grid.size() - 1)(rng);
    if (g == s) g = (s + 1) % grid.size();
    mask[s] = mask[g] = 1;
    out.push_back({std::move(grid), std::move(mask), {}, {}, kd(rng)});
    out.back().start = out.back().grid.unravel(s);
    out.back().goal = out.back().grid.unravel(g);
  }
  return out;
}

Outcome criterion1(const std::vector<RandomCase>& cases) {
  Outcome o;
  const auto t0 = Clock::now();
  int solved = 0, unreachable = 0;
  for (const auto& c : cases) {
    const auto g = c.grid.linear_index(c.goal);
    const auto dist = oracle::dijkstra_from(c.grid, c.mask, c.grid.linear_index(c.start), c.k);
    if (dist[g] == oracle::kInf) {
      ++unreachable;
      try {
        oap::find_path(c.grid, c.mask, c.start, c.goal, {c.k});
        fail(o, "A* found a path the oracle cannot reach");
      } catch (const oap::NoPathError&) {
      }
      continue;
    }
    const auto p = oap::find_path(c.grid, c.mask, c.start, c.goal, {c.k});
    ++solved;
    if (p.cost != dist[g]) fail(o, fmt("cost %.17g vs oracle %.17g", p.cost, dist[g]));
    if (oap::path_cost(p, c.grid, {c.k}) != p.cost) fail(o, "reported cost is not the path sum");
  }
  const double secs = seconds_since(t0);
  if (secs >= 30.0) fail(o, fmt("took %.1f s", secs));
  if (o.pass) {
    o.detail = std::to_string(cases.size()) + " grids (" + std::to_string(solved) +
               " solved, " + std::to_string(unreachable) + " unreachable), " +
               fmt("%.2f s", secs);
  }
  return o;
}

Outcome criterion2(const std::vector<RandomCase>& cases) {
  Outcome o;
  std::size_t nodes = 0, pairs = 0;
  for (const auto& c : cases) {
    const oap::CostWeights w{c.k};
    const auto gi = c.grid.linear_index(c.goal);
    const oap::Vec3 goal = c.grid.position(c.goal);
    // Admissibility is checked against the unmasked lattice as well, which is
    // the stronger statement.
    const std::vector<char> open(c.grid.size(), 1);
    for (const auto* mask : {&c.mask, &open}) {
      const auto rest = oracle::dijkstra_to(c.grid, *mask, gi, c.k);
      for (std::size_t n = 0; n < c.grid.size(); ++n) {
        if (!(*mask)[n] || rest[n] == oracle::kInf) continue;
        ++nodes;
        if (oap::heuristic(c.grid.position(c.grid.unravel(n)), goal, w) > rest[n]) {
          fail(o, "heuristic above the remaining cost");
        }
      }
    }
    const oracle::Lattice L = oracle::lattice(c.grid);
    for (std::size_t n = 0; n < c.grid.size(); ++n) {
      const double hu = oap::heuristic(c.grid.position(c.grid.unravel(n)), goal, w);
      oracle::for_neighbours(L, n, open, [&](std::size_t m, int di, int dj, int dk) {
        ++pairs;
        const double step = oracle::edge_cost(
            c.grid.value(m), oracle::step_length(di, dj, dk, c.grid.spec()), c.k);
        const double hv = oap::heuristic(c.grid.position(c.grid.unravel(m)), goal, w);
        if (hu > step + hv) fail(o, fmt("h(u) %.17g > c + h(v) %.17g", hu, step + hv));
      });
    }
  }
  if (o.pass) {
    o.detail = std::to_string(nodes) + " node checks, " + std::to_string(pairs) +
               " neighbour pairs";
  }
  return o;
}

Outcome criterion3() {
  Outcome o;
  if (oap::node_cost(0.5, 4.0, {0.25}) != 2.4) fail(o, "node_cost(0.5, 4, 0.25) != 2.4");
  for (double k : {0.1, 0.25, 0.5, 1.0}) {
    for (double d : {0.4, 0.8, 1.0, std::sqrt(2.0), 2.5}) {
      if (oap::node_cost(0.0, d, {k}) != k / (k + 1.0) * d) fail(o, "node_cost(0, d, k)");
    }
  }
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> kd(0.1, 1.0);
  int paths = 0;
  for (int rep = 0; rep < 50; ++rep) {
    const auto g = oracle::random_grid(rng, 4, 4, 3);
    const double k = kd(rng);
    // v1 -> v2 -> v3 along two different neighbour offsets.
    const std::vector<oap::GridIndex> nodes{{0, 0, 0}, {1, 1, 0}, {2, 1, 1}};
    const auto p = oap::make_path(g, nodes, {k});
    const auto& s = g.spec();
    const double d1 = oracle::step_length(1, 1, 0, s), d2 = oracle::step_length(1, 0, 1, s);
    const double expected = oracle::edge_cost(g.value(nodes[1]), d1, k) +
                            oracle::edge_cost(g.value(nodes[2]), d2, k);
    if (oap::path_cost(p, g, {k}) != expected || p.cost != expected) {
      fail(o, fmt("3-node path cost %.17g vs %.17g", p.cost, expected));
    }
    if (p.length != d1 + d2) fail(o, "3-node path length");
    ++paths;
  }
  if (o.pass) o.detail = "node_cost(0.5, 4, 0.25) = 2.4; " + std::to_string(paths) + " hand-built paths";
  return o;
}

Outcome criterion4() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto cfg = oap::load_config(kConfigs / "coarse_sweep.json");
  const auto rep = oap::run_kj_sweep(cfg, {0.1, 0.25, 0.5});
  const double secs = seconds_since(t0);
  std::string series;
  for (std::size_t i = 0; i < rep.entries.size(); ++i) {
    const auto& e = rep.entries[i];
    series += fmt("k=%.2f L=%.1f P=%.4f; ", e.k_j, e.length, e.mean_pd);
    if (i > 0) {
      if (!(e.length < rep.entries[i - 1].length)) fail(o, "L not strictly decreasing");
      if (!(e.mean_pd > rep.entries[i - 1].mean_pd)) fail(o, "mean P_D not strictly increasing");
    }
  }
  if (secs >= 60.0) fail(o, fmt("took %.1f s", secs));
  o.detail = (o.pass ? "" : o.detail + "; ") + series + fmt("%.2f s", secs);
  return o;
}

Outcome criterion5() {
  Outcome o;
  const oap::MotorwayDesignClass dc;
  const double b0 = oap::lateral_bound(0.0, dc);
  const double b300 = oap::lateral_bound(300.0, dc);
  const double sampled = oracle::sampled_arc_reach(300.0, dc.r_min) + dc.y_off_max;
  if (b0 != 10.875) fail(o, fmt("lateral_bound(0) = %.17g", b0));
  if (std::abs(b300 - 76.36) > 0.01) fail(o, fmt("lateral_bound(300) = %.4f", b300));
  if (std::abs(b300 - sampled) > 0.01) fail(o, fmt("arc sampling gives %.4f", sampled));
  const auto grid = oap::build_grid(oap::reference_sensor_setup(), oap::GridSpec::coarse());
  const std::size_t valid = oap::count_valid(oap::prune_nodes(grid, dc));
  const double rel = (static_cast<double>(valid) - 8926.0) / 8926.0;
  if (std::abs(rel) > 0.10) fail(o, "valid coarse nodes " + std::to_string(valid));
  o.detail = (o.pass ? "" : o.detail + "; ") +
             fmt("bound(0)=%.3f bound(300)=%.4f arc oracle=%.4f; ", b0, b300, sampled) +
             "valid coarse nodes " + std::to_string(valid) + fmt(" (%+.1f %%)", 100.0 * rel);
  return o;
}

Outcome criterion6(const oap::RunResult& r, const oap::MotionLimits& lim) {
  Outcome o;
  const auto& ego = r.scenario.ego.samples;
  const auto& ch = r.scenario.challenger.samples;
  std::size_t checks = 0;
  auto check = [&](bool ok, const char* what, std::size_t i) {
    ++checks;
    if (!ok) fail(o, std::string(what) + " at sample " + std::to_string(i));
  };
  for (std::size_t i = 0; i < ego.size(); ++i) {
    check(std::abs(ego[i].yaw - ch[i].yaw) <= lim.max_yaw_diff, "yaw difference", i);
    for (const auto* v : {&ego, &ch}) {
      const auto& s = (*v)[i];
      check(std::abs(std::tan(s.pitch)) <= lim.max_grade, "grade", i);
      if (i == 0) continue;
      const auto& p = (*v)[i - 1];
      check(std::abs(s.yaw - p.yaw) / lim.dt <= lim.max_yaw_rate, "yaw rate", i);
      check(std::abs(s.pitch - p.pitch) / lim.dt <= lim.max_pitch_rate, "pitch rate", i);
    }
  }
  if (o.pass) {
    o.detail = std::to_string(ego.size()) + " samples per vehicle, " + std::to_string(checks) +
               " limit checks";
  }
  return o;
}

Outcome criterion7(const oap::RunResult& r, const oap::MotionLimits& lim) {
  Outcome o;
  const auto& s = r.scenario;
  const double T = s.duration;
  if (s.ego_distance != lim.v_ego * T) fail(o, "ego distance != v_ego * T");
  if (s.challenger_distance != lim.v_ch * T) fail(o, "challenger distance != v_ch * T");
  if (T != static_cast<double>(s.ego.size() - 1) * lim.dt) fail(o, "T does not match the samples");
  // Every simulated step has the vehicle's exact speed (to rounding).
  for (std::size_t i = 1; i < s.ego.size(); ++i) {
    const double de = (s.ego.samples[i].position - s.ego.samples[i - 1].position).norm();
    const double dc = (s.challenger.samples[i].position - s.challenger.samples[i - 1].position).norm();
    if (std::abs(de - lim.v_ego * lim.dt) > 1e-12 || std::abs(dc - lim.v_ch * lim.dt) > 1e-12) {
      fail(o, "step length differs from v * dt at sample " + std::to_string(i));
      break;
    }
  }
  if (!(T >= 12.0 && T <= 17.0)) fail(o, fmt("T = %.2f s outside [12, 17]", T));
  o.detail = (o.pass ? "" : o.detail + "; ") +
             fmt("T = %.2f s, ego %.2f m, challenger %.2f m", T, s.ego_distance,
                 s.challenger_distance);
  return o;
}

Outcome criterion8(const oap::RunResult& r, double& violation_only) {
  Outcome o;
  const auto& s = r.scenario;
  const double dt = r.oap.dt;
  auto in_infeasible = [&](std::size_t i) {
    const double t = static_cast<double>(i) * dt;
    for (const auto& iv : s.infeasible_intervals) {
      if (t >= iv.begin - 1e-9 && t <= iv.end + 1e-9) return true;
    }
    return false;
  };
  double outside = 0.0;
  violation_only = 0.0;
  std::size_t counted = 0;
  for (std::size_t i = 0; i < s.ego.size(); ++i) {
    const auto& e = s.ego.samples[i];
    const oap::Vec3 rel = oracle::to_ego_frame(e.position, e.yaw, e.pitch,
                                               s.challenger.samples[i].position, r.ego_rel);
    const double err = oracle::distance_to_path(r.oap.points, rel);
    const bool violated = r.envelope.in_violation(s.challenger.samples[i].position.x());
    if (!violated) violation_only = std::max(violation_only, err);
    if (violated || in_infeasible(i)) continue;
    ++counted;
    outside = std::max(outside, err);
  }
  if (outside > 0.5) fail(o, fmt("max error %.3f m outside reported intervals", outside));
  if (r.envelope.violations.empty()) fail(o, "no violation interval reported");
  std::string iv;
  for (const auto& v : r.envelope.violations) iv += fmt(" [%.1f, %.1f]", v.x_begin, v.x_end);
  o.detail = (o.pass ? "" : o.detail + "; ") +
             fmt("max error %.3f m over %.0f samples outside intervals; violation x", outside,
                 static_cast<double>(counted)) +
             iv + " m; " + std::to_string(s.infeasible_intervals.size()) +
             " infeasibility intervals";
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

Outcome criterion9(const oap::PipelineConfig& cfg) {
  Outcome o;
  const fs::path base = fs::temp_directory_path() / "oapgen_acceptance";
  fs::remove_all(base);
  const auto a = oap::run_pipeline(cfg, base / "a");
  const auto b = oap::run_pipeline(cfg, base / "b");
  if (a.artifacts.size() != b.artifacts.size() || a.artifacts.size() != 6) {
    fail(o, "unexpected artifact count");
  }
  std::size_t bytes = 0;
  for (const auto& f : a.artifacts) {
    const std::string x = slurp(f), y = slurp(base / "b" / f.filename());
    bytes += x.size();
    if (x.empty() || x != y) fail(o, f.filename().string() + " differs");
  }
  fs::remove_all(base);
  if (o.pass) {
    o.detail = std::to_string(a.artifacts.size()) + " artifacts, " + std::to_string(bytes) +
               " bytes identical";
  }
  return o;
}

Outcome criterion10() {
  Outcome o;
  std::mt19937_64 rng(12345);
  std::uniform_int_distribution<int> n(2, 9);
  std::uniform_real_distribution<double> off(-500.0, 500.0);
  const int count = 25;
  for (int rep = 0; rep < count; ++rep) {
    auto g = oracle::random_grid(rng, n(rng), n(rng), n(rng));
    // Unaligned origin and an off-origin ego.
    oap::GridSpec s = g.spec();
    const double sx = off(rng), sy = off(rng);
    s.x_min += sx, s.x_max += sx, s.y_min += sy, s.y_max += sy;
    std::vector<double> v(g.values().begin(), g.values().end());
    if (rep % 5 == 0) v[0] = 0.0;
    if (rep % 7 == 0) v.back() = 1.0;
    const oap::DetectionGrid grid(s, v, {off(rng), off(rng), off(rng) / 100.0});
    std::stringstream ss;
    oap::save_grid(grid, ss);
    const auto back = oap::load_grid(ss);
    if (!(back == grid)) fail(o, "grid differs after round-trip");
    const auto bv = back.values();
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (std::bit_cast<std::uint64_t>(bv[i]) != std::bit_cast<std::uint64_t>(v[i])) {
        fail(o, "value bits differ");
        break;
      }
    }
  }
  if (o.pass) o.detail = std::to_string(count) + " random grids";
  return o;
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const char* name, const Outcome& o) {
    std::printf("[%s] criterion %2d  %-28s %s\n", o.pass ? "PASS" : "FAIL", id, name,
                o.detail.c_str());
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  };
  auto guarded = [&](int id, const char* name, const std::function<Outcome()>& f) {
    try {
      report(id, name, f());
    } catch (const std::exception& e) {
      report(id, name, Outcome{false, std::string("exception: ") + e.what()});
    }
  };

  const auto cases = random_cases(120);
  guarded(1, "A* optimality", [&] { return criterion1(cases); });
  guarded(2, "heuristic admissible", [&] { return criterion2(cases); });
  guarded(3, "cost unit oracle", [] { return criterion3(); });
  guarded(4, "k_j trend", [] { return criterion4(); });
  guarded(5, "search-space geometry", [] { return criterion5(); });

  oap::PipelineConfig cfg;
  oap::RunResult run;
  bool have_run = false;
  try {
    cfg = oap::load_config(kConfigs / "default.json");
    run = oap::compute_pipeline(cfg);
    have_run = true;
  } catch (const std::exception& e) {
    for (int id = 6; id <= 8; ++id) {
      report(id, "default scenario", Outcome{false, std::string("exception: ") + e.what()});
    }
  }
  double violation_only = 0.0;
  if (have_run) {
    guarded(6, "motion limits", [&] { return criterion6(run, cfg.motion); });
    guarded(7, "kinematic identities", [&] { return criterion7(run, cfg.motion); });
    guarded(8, "replay", [&] { return criterion8(run, violation_only); });
    std::printf("       info: replay error outside violation intervals only: %.3f m\n",
                violation_only);
  }
  guarded(9, "determinism", [&] { return criterion9(cfg); });
  guarded(10, "grid round-trip", [] { return criterion10(); });

  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
