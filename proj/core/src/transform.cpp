#include "oap/transform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

#include <Eigen/Geometry>

#include "oap/error.hpp"

namespace oap {

namespace {

constexpr double kNoLimit = std::numeric_limits<double>::infinity();

void require(bool ok, const char* field, const char* what) {
  if (!ok) throw ConfigError(what, field);
}

// Moves `value` towards `anchor` one ulp at a time until `ok` holds. Used to
// make the rate checks hold in floating point, not only in exact arithmetic.
template <class Pred>
double settle(double value, double anchor, Pred ok) {
  for (int n = 0; n < 64 && !ok(value); ++n) value = std::nextafter(value, anchor);
  return ok(value) ? value : anchor;
}

Vec3 heading_vector(double yaw, double pitch) {
  return {std::cos(pitch) * std::cos(yaw), std::cos(pitch) * std::sin(yaw),
          std::sin(pitch)};
}

// Arc-length parametrised polyline with local projection queries.
class Polyline {
 public:
  explicit Polyline(const std::vector<Vec3>& points) : p_(points) {
    s_.resize(p_.size(), 0.0);
    for (std::size_t i = 1; i < p_.size(); ++i) {
      s_[i] = s_[i - 1] + (p_[i] - p_[i - 1]).norm();
    }
  }

  std::size_t size() const { return p_.size(); }
  double length() const { return s_.empty() ? 0.0 : s_.back(); }
  const Vec3& point(std::size_t i) const { return p_[i]; }
  double station(std::size_t i) const { return s_[i]; }

  // Segment index containing arc length `s`.
  std::size_t segment(double s) const {
    if (p_.size() < 2) return 0;
    auto it = std::upper_bound(s_.begin(), s_.end(), s);
    std::size_t i = it == s_.begin() ? 0 : static_cast<std::size_t>(it - s_.begin()) - 1;
    return std::min(i, p_.size() - 2);
  }

  Vec3 at(double s) const {
    if (p_.size() == 1) return p_.front();
    s = std::clamp(s, 0.0, length());
    const std::size_t i = segment(s);
    const double len = s_[i + 1] - s_[i];
    const double u = len > 0.0 ? (s - s_[i]) / len : 0.0;
    return p_[i] + u * (p_[i + 1] - p_[i]);
  }

  struct Projection {
    double station = 0.0;
    double distance = kNoLimit;
  };

  // Closest point over segments whose stations overlap [lo, hi].
  Projection project(const Vec3& q, double lo, double hi) const {
    Projection best;
    if (p_.size() == 1) return {0.0, (q - p_.front()).norm()};
    const std::size_t first = segment(std::max(lo, 0.0));
    const std::size_t last = segment(std::min(hi, length()));
    for (std::size_t i = first; i <= last; ++i) {
      const Vec3 d = p_[i + 1] - p_[i];
      const double dd = d.squaredNorm();
      double u = dd > 0.0 ? (q - p_[i]).dot(d) / dd : 0.0;
      u = std::clamp(u, 0.0, 1.0);
      const double dist = (p_[i] + u * d - q).norm();
      if (dist < best.distance) {
        best.distance = dist;
        best.station = s_[i] + u * (s_[i + 1] - s_[i]);
      }
    }
    return best;
  }

 private:
  std::vector<Vec3> p_;
  std::vector<double> s_;
};

// Global pose of the ego and the mapping of relative path points.
struct Pose {
  Vec3 position;
  Eigen::Matrix3d rotation;

  Vec3 to_global(const Vec3& rel, const Vec3& ego_rel) const {
    return position + rotation * (rel - ego_rel);
  }
  Vec3 to_relative(const Vec3& global, const Vec3& ego_rel) const {
    return rotation.transpose() * (global - position) + ego_rel;
  }
};

// Own step of the challenger, in the ego frame, that lands its relative
// position on the ray r_now + mu * direction. `drift` is the change of the
// relative position caused by the ego's step alone. Solves
// |mu d - drift| = reach for the smallest positive mu, which is the solution
// with the challenger driving forward; when the ray never meets the sphere
// the closest achievable point is used.
Vec3 pursuit_step(const Vec3& drift, const Vec3& direction, double reach) {
  const double cd = direction.dot(drift);
  const double disc = cd * cd - drift.squaredNorm() + reach * reach;
  double mu = std::max(0.0, cd);
  if (disc >= 0.0) {
    const double root = std::sqrt(disc);
    mu = cd - root > 0.0 ? cd - root : cd + root;
  }
  return mu * direction - drift;
}

struct Tracker {
  const Polyline& oap;
  Vec3 ego_rel;
  MotionLimits limits;
  TransformSettings settings;
};

constexpr double kScanWindow = 80.0;   // m of relative path scanned per step
constexpr double kBackWindow = 5.0;    // m of backtracking allowed in projection

struct State {
  VehicleTrajectory ego;
  VehicleTrajectory challenger;
  std::vector<double> replay_error;
  std::vector<double> progress;
  std::vector<char> infeasible;
};

// One cycle: ego step (already chosen), then the challenger pursues a point
// `challenger_lookahead` ahead on the relative path, seen from the ego's new
// pose.
void advance(State& st, const Tracker& tr, const ClampedStep& ego_step) {
  const VehicleSample& e = st.ego.samples.back();
  const VehicleSample& c = st.challenger.samples.back();
  const std::size_t i = st.ego.samples.size();
  const double dt = tr.limits.dt;
  const double t = static_cast<double>(i) * dt;

  VehicleSample e_next{t, e.position + ego_step.step, ego_step.yaw, ego_step.pitch};
  const Pose pose{e_next.position, body_rotation(e_next.yaw, e_next.pitch)};
  const double s0 = st.progress.back();

  // Relative position now, and the one the ego's step alone would produce.
  const Pose prev{e.position, body_rotation(e.yaw, e.pitch)};
  const Vec3 rel_now = prev.to_relative(c.position, tr.ego_rel);
  const Vec3 rel_still = pose.to_relative(c.position, tr.ego_rel);
  Vec3 dir = tr.oap.at(s0 + tr.settings.challenger_lookahead) - rel_now;
  Vec3 desired = Vec3::Zero();
  if (dir.norm() > 0.0) {
    dir.normalize();
    desired = pose.rotation *
              pursuit_step(rel_still - rel_now, dir, tr.limits.v_ch * dt);
  }
  const ClampedStep cs = clamp_motion(c.yaw, c.pitch, desired, e_next.yaw,
                                      tr.limits.v_ch, tr.limits);
  VehicleSample c_next{t, c.position + cs.step, cs.yaw, cs.pitch};

  const Vec3 rel = pose.to_relative(c_next.position, tr.ego_rel);
  const auto proj = tr.oap.project(rel, s0 - kBackWindow, s0 + kScanWindow);

  st.ego.samples.push_back(e_next);
  st.challenger.samples.push_back(c_next);
  st.progress.push_back(proj.station);
  st.replay_error.push_back(proj.distance);
  st.infeasible.push_back(cs.clamped() ? 1 : 0);
}

// Ego heading command. Besides the vehicle limits, the ego's yaw rate and
// its change per step are capped so that the sweep it induces on the
// challenger (yaw rate times distance) stays inside what the challenger can
// follow.
ClampedStep ego_command(const State& st, const Tracker& tr, const Vec3& desired) {
  const VehicleSample& e = st.ego.samples.back();
  const VehicleSample& c = st.challenger.samples.back();
  const double dt = tr.limits.dt;
  Vec3 aim = desired;
  const double dist = (c.position - e.position).norm();
  const double horizontal = std::hypot(desired.x(), desired.y());
  if (dist > 0.0 && horizontal > 0.0) {
    const double wanted =
        std::remainder(std::atan2(desired.y(), desired.x()) - e.yaw, 2.0 * std::numbers::pi) / dt;
    double lo = -kNoLimit, hi = kNoLimit;
    if (tr.settings.swing_limit > 0.0) {
      hi = tr.settings.swing_limit / dist;
      lo = -hi;
    }
    if (tr.settings.swing_accel_limit > 0.0) {
      // The scenario starts with the ego yaw rate at zero.
      const std::size_t n = st.ego.samples.size();
      const double rate = n >= 2 ? (e.yaw - st.ego.samples[n - 2].yaw) / dt : 0.0;
      const double step = tr.settings.swing_accel_limit * dt / dist;
      lo = std::max(lo, rate - step);
      hi = std::min(hi, rate + step);
    }
    const double rate = lo <= hi ? std::clamp(wanted, lo, hi) : 0.5 * (lo + hi);
    const double yaw = e.yaw + rate * dt;
    aim = Vec3{std::cos(yaw) * horizontal, std::sin(yaw) * horizontal, desired.z()};
  }
  return clamp_motion(e.yaw, e.pitch, aim, c.yaw, tr.limits.v_ego, tr.limits);
}

State initial_state(const TimedPath& oap, const Vec3& ego_rel,
                    const MotionLimits& limits) {
  State st;
  st.ego.speed = limits.v_ego;
  st.challenger.speed = limits.v_ch;
  const Vec3 e0{0.0, 0.0, ego_rel.z()};
  const Pose pose{e0, Eigen::Matrix3d::Identity()};
  st.ego.samples.push_back({0.0, e0, 0.0, 0.0});
  // The challenger starts already heading along its first step, taken with
  // the ego driving straight on.
  const Vec3 c0 = pose.to_global(oap.points.front(), ego_rel);
  const Pose next{e0 + Vec3{limits.v_ego * limits.dt, 0.0, 0.0}, pose.rotation};
  const Vec3 d = next.to_global(oap.points[std::min<std::size_t>(1, oap.points.size() - 1)], ego_rel) - c0;
  const double yaw = std::atan2(d.y(), d.x());
  const double pitch = std::clamp(std::atan2(d.z(), std::hypot(d.x(), d.y())),
                                  -std::atan(limits.max_grade), std::atan(limits.max_grade));
  st.challenger.samples.push_back({0.0, c0, std::clamp(yaw, -limits.max_yaw_diff, limits.max_yaw_diff), pitch});
  st.progress.push_back(0.0);
  st.replay_error.push_back(0.0);
  st.infeasible.push_back(0);
  return st;
}

std::vector<TimeInterval> runs(const std::vector<char>& flags,
                               const std::vector<double>& error, double dt) {
  std::vector<TimeInterval> out;
  std::size_t i = 0;
  while (i < flags.size()) {
    if (!flags[i]) {
      ++i;
      continue;
    }
    TimeInterval iv;
    iv.begin = static_cast<double>(i) * dt;
    while (i < flags.size() && flags[i]) {
      iv.peak = std::max(iv.peak, error[i]);
      iv.end = static_cast<double>(i) * dt;
      ++i;
    }
    out.push_back(iv);
  }
  return out;
}

}  // namespace

void MotionLimits::validate() const {
  require(std::isfinite(v_ch) && v_ch > 0.0, "motion.v_ch", "must be > 0");
  require(std::isfinite(v_ego) && v_ego > v_ch, "motion.v_ego",
          "must be greater than v_ch");
  require(std::isfinite(dt) && dt > 0.0, "motion.dt", "must be > 0");
  require(std::isfinite(max_yaw_rate) && max_yaw_rate > 0.0,
          "motion.max_yaw_rate", "must be > 0");
  require(std::isfinite(max_yaw_diff) && max_yaw_diff > 0.0,
          "motion.max_yaw_diff", "must be > 0");
  require(std::isfinite(max_pitch_rate) && max_pitch_rate > 0.0,
          "motion.max_pitch_rate", "must be > 0");
  require(std::isfinite(max_grade) && max_grade > 0.0, "motion.max_grade",
          "must be > 0");
}

TimedPath resample_path(const std::vector<Vec3>& polyline,
                        const MotionLimits& limits) {
  if (!(limits.v_rel() > 0.0)) {
    throw ConfigError("relative speed v_ego - v_ch must be > 0", "motion");
  }
  if (!(limits.dt > 0.0)) throw ConfigError("must be > 0", "motion.dt");
  if (polyline.size() < 2) {
    throw ValidationError("resampling needs a path with at least two nodes");
  }
  const Polyline line(polyline);
  const double step = limits.v_rel() * limits.dt;
  const double total = line.length();
  const auto n = static_cast<std::size_t>(std::ceil(total / step - 1e-9));
  TimedPath out;
  out.dt = limits.dt;
  out.points.reserve(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    const double s = std::min(static_cast<double>(i) * step, total);
    out.points.push_back(i == n ? polyline.back() : line.at(s));
  }
  if (n == 0) out.points.push_back(polyline.back());
  return out;
}

TimedPath resample_path(const ApproachPath& path, const MotionLimits& limits) {
  return resample_path(path.positions, limits);
}

TimedPath smooth_path(const TimedPath& path, double half_window) {
  if (!(half_window >= 0.0)) {
    throw ConfigError("must be >= 0", "transform.smoothing_half_window");
  }
  const auto w = static_cast<std::ptrdiff_t>(std::llround(half_window / path.dt));
  if (w == 0 || path.points.size() < 3) return path;
  TimedPath out;
  out.dt = path.dt;
  out.points.resize(path.points.size());
  const auto n = static_cast<std::ptrdiff_t>(path.points.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const std::ptrdiff_t h = std::min({w, i, n - 1 - i});
    Vec3 sum = Vec3::Zero();
    for (std::ptrdiff_t j = i - h; j <= i + h; ++j) sum += path.points[j];
    out.points[i] = sum / static_cast<double>(2 * h + 1);
  }
  return out;
}

Eigen::Matrix3d body_rotation(double yaw, double pitch) {
  return (Eigen::AngleAxisd(yaw, Vec3::UnitZ()) *
          Eigen::AngleAxisd(-pitch, Vec3::UnitY()))
      .toRotationMatrix();
}

ClampedStep clamp_motion(double prev_yaw, double prev_pitch,
                         const Vec3& desired_step, double other_yaw,
                         double speed, const MotionLimits& limits) {
  double yaw_d = prev_yaw;
  double pitch_d = prev_pitch;
  const double horizontal = std::hypot(desired_step.x(), desired_step.y());
  if (desired_step.norm() > 0.0) {
    if (horizontal > 0.0) {
      yaw_d = prev_yaw + std::remainder(std::atan2(desired_step.y(), desired_step.x()) - prev_yaw,
                                        2.0 * std::numbers::pi);
    }
    pitch_d = std::atan2(desired_step.z(), horizontal);
  }

  const double dt = limits.dt;
  const double yaw_step = limits.max_yaw_rate * dt;
  double lo = std::max(prev_yaw - yaw_step, other_yaw - limits.max_yaw_diff);
  double hi = std::min(prev_yaw + yaw_step, other_yaw + limits.max_yaw_diff);
  if (lo > hi) {
    // Inconsistent inputs; honour the rate limit first.
    lo = prev_yaw - yaw_step;
    hi = prev_yaw + yaw_step;
  }
  double yaw = std::clamp(yaw_d, lo, hi);
  auto yaw_ok = [&](double y) {
    const double d = std::abs(y - prev_yaw);
    return d <= yaw_step && d / dt <= limits.max_yaw_rate &&
           std::abs(y - other_yaw) <= limits.max_yaw_diff;
  };
  if (!yaw_ok(yaw)) yaw = settle(yaw, prev_yaw, yaw_ok);

  const double pitch_step = limits.max_pitch_rate * dt;
  const double pitch_cap = std::atan(limits.max_grade);
  lo = std::max(prev_pitch - pitch_step, -pitch_cap);
  hi = std::min(prev_pitch + pitch_step, pitch_cap);
  if (lo > hi) {
    lo = prev_pitch - pitch_step;
    hi = prev_pitch + pitch_step;
  }
  double pitch = std::clamp(pitch_d, lo, hi);
  auto pitch_ok = [&](double p) {
    const double d = std::abs(p - prev_pitch);
    return d <= pitch_step && d / dt <= limits.max_pitch_rate &&
           std::abs(std::tan(p)) <= limits.max_grade;
  };
  if (!pitch_ok(pitch)) pitch = settle(pitch, prev_pitch, pitch_ok);

  ClampedStep out;
  out.yaw = yaw;
  out.pitch = pitch;
  out.yaw_clamped = yaw != yaw_d;
  out.pitch_clamped = pitch != pitch_d;
  out.step = speed * dt * heading_vector(yaw, pitch);
  return out;
}

double VehicleTrajectory::travelled() const {
  double d = 0.0;
  for (std::size_t i = 1; i < samples.size(); ++i) {
    d += (samples[i].position - samples[i - 1].position).norm();
  }
  return d;
}

bool RoadEnvelope::in_violation(double x) const {
  for (const auto& v : violations) {
    if (x >= v.x_begin && x <= v.x_end) return true;
  }
  return false;
}

PhaseOneResult transform_phase1(const TimedPath& oap, const Vec3& ego_rel,
                                const MotionLimits& limits,
                                const TransformSettings& settings) {
  limits.validate();
  if (oap.points.size() < 2) {
    throw ValidationError("relative path needs at least two samples");
  }
  const Polyline rel(oap.points);
  const Tracker tr{rel, ego_rel, limits, settings};
  State st = initial_state(oap, ego_rel, limits);

  const Vec3 e0 = st.ego.samples.front().position;
  const Vec3 c0 = st.challenger.samples.front().position;
  const double span = c0.x() - e0.x();

  // Ego lateral plan from its start to the challenger start, then straight.
  PhaseOneResult out;
  if (span > 0.0) {
    const double target = c0.y() - e0.y();
    const double lambda = std::max(0.0, settings.plan_roughness);
    const double a = target / (1.0 + 12.0 * lambda / (span * span * span));
    const double spacing = 0.5;
    const auto n = static_cast<std::size_t>(std::ceil(span / spacing));
    for (std::size_t k = 0; k <= n; ++k) {
      const double u = static_cast<double>(k) / static_cast<double>(n);
      out.ego_plan.push_back({e0.x() + u * span, e0.y() + a * (3 * u * u - 2 * u * u * u), e0.z()});
    }
    const double tail = limits.v_ego * settings.ego_lookahead + 10.0;
    out.ego_plan.push_back({c0.x() + tail, e0.y() + a, e0.z()});
  } else {
    out.ego_plan = {e0, e0 + Vec3{1.0, 0.0, 0.0}};
  }
  const Polyline plan(out.ego_plan);
  const double lookahead = limits.v_ego * settings.ego_lookahead;
  double plan_s = 0.0;

  while (st.ego.samples.back().position.x() <= c0.x() &&
         st.ego.samples.size() <= settings.max_steps) {
    const VehicleSample& e = st.ego.samples.back();
    plan_s = plan.project(e.position, plan_s - 1.0, plan_s + 20.0).station;
    const Vec3 aim = plan.at(plan_s + lookahead);
    const ClampedStep es = ego_command(st, tr, aim - e.position);
    advance(st, tr, es);
  }

  out.ego = std::move(st.ego);
  out.challenger = std::move(st.challenger);
  out.replay_error = std::move(st.replay_error);
  out.progress = std::move(st.progress);
  out.infeasible = std::move(st.infeasible);
  return out;
}

ScenarioResult transform_phase2(const TimedPath& oap, const Vec3& ego_rel,
                                PhaseOneResult phase1,
                                const MotionLimits& limits,
                                const TransformSettings& settings) {
  limits.validate();
  const Polyline rel(oap.points);
  const Tracker tr{rel, ego_rel, limits, settings};
  State st;
  st.ego = std::move(phase1.ego);
  st.challenger = std::move(phase1.challenger);
  st.replay_error = std::move(phase1.replay_error);
  st.progress = std::move(phase1.progress);
  st.infeasible = std::move(phase1.infeasible);

  ScenarioResult out;
  out.handoff_index = st.ego.samples.size() - 1;
  const double lookahead = limits.v_ego * settings.ego_lookahead;
  const double band = std::max(0.0, settings.corridor_band);
  std::size_t track_i = 0;

  while (st.ego.samples.back().position.x() <= st.challenger.samples.back().position.x()) {
    if (st.ego.samples.size() > settings.max_steps) {
      out.terminated = false;
      break;
    }
    const VehicleSample& e = st.ego.samples.back();
    const auto& track = st.challenger.samples;

    // Nearest challenger track sample in the horizontal plane, searched
    // forward from the previous match.
    auto hdist = [&](std::size_t k) {
      return (track[k].position - e.position).head<2>().norm();
    };
    std::size_t best = track_i;
    const std::size_t scan_end = std::min(track.size(), track_i + 2000);
    for (std::size_t k = track_i; k < scan_end; ++k) {
      if (hdist(k) < hdist(best)) best = k;
    }
    track_i = best;

    auto tangent = [&](std::size_t k) -> Eigen::Vector2d {
      const std::size_t k0 = k == 0 ? 0 : k - 1;
      const std::size_t k1 = std::min(track.size() - 1, k + 1);
      Eigen::Vector2d d = (track[k1].position - track[k0].position).head<2>();
      if (d.norm() == 0.0) return {std::cos(track[k].yaw), std::sin(track[k].yaw)};
      return d.normalized();
    };
    const Eigen::Vector2d t0 = tangent(best);
    const Eigen::Vector2d n0{-t0.y(), t0.x()};
    const double offset = (e.position - track[best].position).head<2>().dot(n0);

    const auto ahead = static_cast<std::size_t>(lookahead / (limits.v_ch * limits.dt));
    const std::size_t la = std::min(track.size() - 1, best + ahead);
    const Eigen::Vector2d t1 = tangent(la);
    const Eigen::Vector2d n1{-t1.y(), t1.x()};
    Eigen::Vector2d aim = track[la].position.head<2>() + n1 * std::clamp(offset, -band, band);
    if (la == track.size() - 1) {
      // Track ends within the lookahead: extend along its last tangent.
      const double rest = lookahead - static_cast<double>(la - best) * limits.v_ch * limits.dt;
      aim += t1 * std::max(0.0, rest);
    }
    const Vec3 desired{aim.x() - e.position.x(), aim.y() - e.position.y(), 0.0};
    const ClampedStep es = ego_command(st, tr, desired);
    advance(st, tr, es);
  }

  out.ego = std::move(st.ego);
  out.challenger = std::move(st.challenger);
  out.replay_error = std::move(st.replay_error);
  out.progress = std::move(st.progress);
  out.infeasible = std::move(st.infeasible);
  out.infeasible_intervals = runs(out.infeasible, out.replay_error, limits.dt);
  const std::size_t steps = out.ego.samples.size() - 1;
  out.duration = static_cast<double>(steps) * limits.dt;
  out.ego_distance = limits.v_ego * out.duration;
  out.challenger_distance = limits.v_ch * out.duration;
  out.closest_approach = kNoLimit;
  for (std::size_t i = 0; i < out.ego.samples.size(); ++i) {
    const double d = (out.challenger.samples[i].position - out.ego.samples[i].position).norm();
    if (d < out.closest_approach) {
      out.closest_approach = d;
      out.closest_approach_time = out.ego.samples[i].t;
    }
  }
  return out;
}

ScenarioResult transform_scenario(const TimedPath& oap, const Vec3& ego_rel,
                                  const MotionLimits& limits,
                                  const TransformSettings& settings) {
  return transform_phase2(oap, ego_rel,
                          transform_phase1(oap, ego_rel, limits, settings),
                          limits, settings);
}

std::vector<Vec3> relative_positions(const VehicleTrajectory& ego,
                                     const VehicleTrajectory& challenger,
                                     const Vec3& ego_rel) {
  const std::size_t n = std::min(ego.size(), challenger.size());
  std::vector<Vec3> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& e = ego.samples[i];
    const Pose pose{e.position, body_rotation(e.yaw, e.pitch)};
    out.push_back(pose.to_relative(challenger.samples[i].position, ego_rel));
  }
  return out;
}

double distance_to_polyline(const std::vector<Vec3>& polyline, const Vec3& point) {
  if (polyline.empty()) return kNoLimit;
  const Polyline line(polyline);
  return line.project(point, 0.0, line.length()).distance;
}

}  // namespace oap
