#include "oap/pathfind.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <string>

#include "oap/error.hpp"

namespace oap {

namespace {

int offset_slot(int di, int dj, int dk) {
  return (di + 1) * 9 + (dj + 1) * 3 + (dk + 1);
}

struct OpenEntry {
  double f;
  double g;
  std::size_t node;
};

// std::priority_queue pops the "largest"; this orders the preferred entry
// last.
struct WorseThan {
  bool operator()(const OpenEntry& a, const OpenEntry& b) const {
    if (a.f != b.f) return a.f > b.f;
    if (a.g != b.g) return a.g < b.g;
    return a.node > b.node;
  }
};

std::string describe(const GridIndex& n) {
  return "(" + std::to_string(n.i) + ", " + std::to_string(n.j) + ", " +
         std::to_string(n.k) + ")";
}

}  // namespace

void CostWeights::validate() const {
  if (!(std::isfinite(k_j) && k_j > 0.0)) {
    throw ConfigError("must be a finite value > 0", "k_j");
  }
}

double heuristic(const Vec3& node, const Vec3& goal, const CostWeights& w) {
  return w.k_j / (w.k_j + 1.0) * (goal - node).norm();
}

std::vector<double> neighbour_step_lengths(const GridSpec& spec) {
  std::vector<double> steps(27, 0.0);
  for (int di = -1; di <= 1; ++di) {
    for (int dj = -1; dj <= 1; ++dj) {
      for (int dk = -1; dk <= 1; ++dk) {
        const double a = di * spec.dx;
        const double b = dj * spec.dy;
        const double c = dk * spec.dz;
        steps[offset_slot(di, dj, dk)] = std::sqrt(a * a + b * b + c * c);
      }
    }
  }
  return steps;
}

ApproachPath make_path(const DetectionGrid& grid, std::vector<GridIndex> nodes,
                       const CostWeights& w) {
  ApproachPath path;
  path.nodes = std::move(nodes);
  path.positions.reserve(path.nodes.size());
  path.p_d.reserve(path.nodes.size());
  for (const auto& n : path.nodes) {
    if (!grid.contains(n)) {
      throw ValidationError("path node " + describe(n) + " lies outside the grid");
    }
    path.positions.push_back(grid.position(n));
    path.p_d.push_back(grid.value(n));
  }
  path.cost = path_cost(path, grid, w);
  const auto steps = neighbour_step_lengths(grid.spec());
  for (std::size_t j = 1; j < path.nodes.size(); ++j) {
    const auto& a = path.nodes[j - 1];
    const auto& b = path.nodes[j];
    path.length += steps[offset_slot(b.i - a.i, b.j - a.j, b.k - a.k)];
  }
  return path;
}

double path_cost(const ApproachPath& path, const DetectionGrid& grid,
                 const CostWeights& w) {
  const auto steps = neighbour_step_lengths(grid.spec());
  double cost = 0.0;
  for (std::size_t j = 1; j < path.nodes.size(); ++j) {
    const auto& a = path.nodes[j - 1];
    const auto& b = path.nodes[j];
    const int di = b.i - a.i;
    const int dj = b.j - a.j;
    const int dk = b.k - a.k;
    if (!grid.contains(a) || !grid.contains(b)) {
      throw ValidationError("path step " + std::to_string(j) +
                            " leaves the grid");
    }
    if (std::abs(di) > 1 || std::abs(dj) > 1 || std::abs(dk) > 1 ||
        (di == 0 && dj == 0 && dk == 0)) {
      throw ValidationError("path step " + std::to_string(j) + " from " +
                            describe(a) + " to " + describe(b) +
                            " is not a 26-neighbour move");
    }
    cost += node_cost(grid.value(b), steps[offset_slot(di, dj, dk)], w);
  }
  return cost;
}

double mean_detection(const ApproachPath& path) {
  if (path.positions.empty()) return 0.0;
  if (path.positions.size() == 1) return path.p_d.front();
  double weighted = 0.0;
  double length = 0.0;
  for (std::size_t j = 1; j < path.positions.size(); ++j) {
    const double d = (path.positions[j] - path.positions[j - 1]).norm();
    weighted += path.p_d[j] * d;
    length += d;
  }
  return weighted / length;
}

ApproachPath find_path(const DetectionGrid& grid, const NodeMask& mask,
                       const GridIndex& start, const GridIndex& goal,
                       const CostWeights& w) {
  w.validate();
  if (mask.size() != grid.size()) {
    throw ValidationError("node mask size does not match the grid");
  }
  if (!grid.contains(start) || !grid.contains(goal)) {
    throw ValidationError("start or goal lies outside the grid");
  }
  if (start == goal) throw ValidationError("start and goal coincide");
  const std::size_t s = grid.linear_index(start);
  const std::size_t t = grid.linear_index(goal);
  if (!mask[s]) throw NoPathError("start node " + describe(start) + " is pruned");
  if (!mask[t]) throw NoPathError("goal node " + describe(goal) + " is pruned");

  const int nx = grid.nx();
  const int ny = grid.ny();
  const int nz = grid.nz();
  const auto steps = neighbour_step_lengths(grid.spec());
  const Vec3 goal_pos = grid.position(goal);
  constexpr double kInf = std::numeric_limits<double>::infinity();
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  std::vector<double> g(grid.size(), kInf);
  std::vector<std::size_t> parent(grid.size(), kNone);
  std::vector<char> closed(grid.size(), 0);
  std::priority_queue<OpenEntry, std::vector<OpenEntry>, WorseThan> open;

  g[s] = 0.0;
  open.push({heuristic(grid.position(start), goal_pos, w), 0.0, s});
  std::size_t expanded = 0;
  bool reached = false;

  while (!open.empty()) {
    const OpenEntry top = open.top();
    open.pop();
    if (top.g != g[top.node]) continue;  // superseded entry
    if (closed[top.node]) continue;
    closed[top.node] = 1;
    ++expanded;
    if (top.node == t) {
      reached = true;
      break;
    }
    const GridIndex u = grid.unravel(top.node);
    for (int di = -1; di <= 1; ++di) {
      const int i = u.i + di;
      if (i < 0 || i >= nx) continue;
      for (int dj = -1; dj <= 1; ++dj) {
        const int j = u.j + dj;
        if (j < 0 || j >= ny) continue;
        for (int dk = -1; dk <= 1; ++dk) {
          const int k = u.k + dk;
          if (k < 0 || k >= nz || (di == 0 && dj == 0 && dk == 0)) continue;
          const GridIndex v{i, j, k};
          const std::size_t m = grid.linear_index(v);
          if (!mask[m]) continue;
          const double candidate =
              top.g + node_cost(grid.value(m), steps[offset_slot(di, dj, dk)], w);
          if (candidate < g[m]) {
            g[m] = candidate;
            parent[m] = top.node;
            closed[m] = 0;  // re-open on strictly better g
            open.push({candidate + heuristic(grid.position(v), goal_pos, w),
                       candidate, m});
          }
        }
      }
    }
  }
  if (!reached) {
    throw NoPathError("goal " + describe(goal) + " is unreachable from start " +
                      describe(start) + " through valid nodes (" +
                      std::to_string(expanded) + " nodes expanded)");
  }

  std::vector<GridIndex> nodes;
  for (std::size_t n = t; n != kNone; n = parent[n]) nodes.push_back(grid.unravel(n));
  std::reverse(nodes.begin(), nodes.end());
  ApproachPath path = make_path(grid, std::move(nodes), w);
  path.expanded = expanded;
  return path;
}

}  // namespace oap
