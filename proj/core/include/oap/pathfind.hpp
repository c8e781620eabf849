#pragma once

#include <cstddef>
#include <vector>

#include "oap/grid.hpp"
#include "oap/searchspace.hpp"

namespace oap {

struct CostWeights {
  double k_j = 0.25;

  /// Throws ConfigError unless k_j is finite and > 0.
  void validate() const;
};

/// Cost of stepping a distance `dist` onto a node with detection
/// probability `p_d`:  (k_j + p_d) / (k_j + 1) * dist.
inline double node_cost(double p_d, double dist, const CostWeights& w) {
  return (w.k_j + p_d) / (w.k_j + 1.0) * dist;
}

/// Lower bound of the remaining cost: the cost of a straight flight through
/// undetected space, k_j / (k_j + 1) * |goal - node|.
double heuristic(const Vec3& node, const Vec3& goal, const CostWeights& w);

struct ApproachPath {
  std::vector<GridIndex> nodes;   // v_1 ... v_N
  std::vector<Vec3> positions;
  std::vector<double> p_d;
  double cost = 0.0;
  double length = 0.0;
  std::size_t expanded = 0;       // A* node expansions, 0 if not searched

  std::size_t size() const { return nodes.size(); }
};

/// Builds the positions, P_D, cost and length fields of a node sequence.
/// Throws ValidationError if a node is off-grid or a step is not one of the
/// 26 neighbour offsets.
ApproachPath make_path(const DetectionGrid& grid, std::vector<GridIndex> nodes,
                       const CostWeights& w);

/// Sum over j = 2..N of node_cost(P_D(v_j), |v_j - v_{j-1}|), accumulated from
/// the start. Same validation as make_path.
double path_cost(const ApproachPath& path, const DetectionGrid& grid,
                 const CostWeights& w);

/// Length-weighted mean detection probability along the path,
/// sum_j P_D(v_j) * d_j / L over j = 2..N. Returns the start value for a
/// single-node path.
double mean_detection(const ApproachPath& path);

/// Euclidean step length for each of the 26 neighbour offsets, indexed by
/// (di + 1) * 9 + (dj + 1) * 3 + (dk + 1). Entry 13 (no move) is 0.
std::vector<double> neighbour_step_lengths(const GridSpec& spec);

/// A* over the 26-neighbourhood restricted to `mask`. Ties on f go to the
/// larger g, then to the smaller storage index. Throws NoPathError when the
/// goal cannot be reached and ValidationError for invalid endpoints.
ApproachPath find_path(const DetectionGrid& grid, const NodeMask& mask,
                       const GridIndex& start, const GridIndex& goal,
                       const CostWeights& w);

}  // namespace oap
