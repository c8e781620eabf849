#include <algorithm>
#include <cmath>
#include <limits>

#include "oap/error.hpp"
#include "oap/transform.hpp"

namespace oap {

namespace {

double horizontal_distance(const std::vector<Vec3>& line, const Vec3& q) {
  double best = std::numeric_limits<double>::infinity();
  const Eigen::Vector2d p = q.head<2>();
  if (line.size() == 1) return (line.front().head<2>() - p).norm();
  for (std::size_t i = 0; i + 1 < line.size(); ++i) {
    const Eigen::Vector2d a = line[i].head<2>();
    const Eigen::Vector2d d = line[i + 1].head<2>() - a;
    const double dd = d.squaredNorm();
    const double u = dd > 0.0 ? std::clamp((p - a).dot(d) / dd, 0.0, 1.0) : 0.0;
    best = std::min(best, (a + u * d - p).norm());
  }
  return best;
}

}  // namespace

RoadEnvelope derive_road_envelope(const ScenarioResult& result,
                                  double half_width) {
  if (!(half_width > 0.0)) throw ConfigError("must be > 0", "envelope.half_width");
  if (result.ego.samples.empty()) {
    throw ValidationError("envelope needs a non-empty ego trajectory");
  }
  RoadEnvelope env;
  env.half_width = half_width;
  env.centerline.reserve(result.ego.size());
  env.station.reserve(result.ego.size());
  for (const auto& s : result.ego.samples) {
    env.station.push_back(env.centerline.empty()
                              ? 0.0
                              : env.station.back() + (s.position - env.centerline.back()).norm());
    env.centerline.push_back(s.position);
  }

  const auto& ch = result.challenger.samples;
  env.challenger_offset.reserve(ch.size());
  for (const auto& s : ch) {
    env.challenger_offset.push_back(horizontal_distance(env.centerline, s.position));
  }

  std::vector<ViolationInterval> raw;
  std::size_t i = 0;
  while (i < ch.size()) {
    if (!(env.challenger_offset[i] > half_width)) {
      ++i;
      continue;
    }
    ViolationInterval v;
    v.x_begin = v.x_end = ch[i].position.x();
    while (i < ch.size() && env.challenger_offset[i] > half_width) {
      v.x_begin = std::min(v.x_begin, ch[i].position.x());
      v.x_end = std::max(v.x_end, ch[i].position.x());
      v.max_exceedance = std::max(v.max_exceedance, env.challenger_offset[i] - half_width);
      ++i;
    }
    raw.push_back(v);
  }
  std::sort(raw.begin(), raw.end(), [](const auto& a, const auto& b) {
    return a.x_begin < b.x_begin;
  });
  for (const auto& v : raw) {
    if (!env.violations.empty() && v.x_begin <= env.violations.back().x_end) {
      auto& last = env.violations.back();
      last.x_end = std::max(last.x_end, v.x_end);
      last.max_exceedance = std::max(last.max_exceedance, v.max_exceedance);
    } else {
      env.violations.push_back(v);
    }
  }

  env.violation_flags.reserve(env.centerline.size());
  for (const auto& p : env.centerline) {
    env.violation_flags.push_back(env.in_violation(p.x()) ? 1 : 0);
  }
  return env;
}

}  // namespace oap
