#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mtrs/feasibility.hpp"
#include "mtrs/hypergraph.hpp"
#include "mtrs/model.hpp"
#include "mtrs/solvers.hpp"

namespace mtrs::cluster {

/// Closed integer-second interval; construction rejects a > b.
struct IntervalWindow {
  Seconds a = 0;
  Seconds b = 0;

  IntervalWindow() = default;
  IntervalWindow(Seconds a_, Seconds b_);
  bool overlaps(const IntervalWindow& o) const {
    return a <= o.b && o.a <= b;
  }
};

/// Time window in which an agent can plausibly reach or leave a station,
/// shrunk from their own window by detour or saving slack. Degenerate
/// results clamp to [alpha, alpha]; the agent still participates.
IntervalWindow interval_window(const Driver& d);
IntervalWindow interval_window(const Rider& r);

/// m1 x m2 cells over a bounding box; cell (1,1) sits at the top-left.
/// Points on an inner boundary belong to the higher-indexed cell.
struct Grid {
  double min_x = 0.0, min_y = 0.0, max_x = 0.0, max_y = 0.0;
  int m1 = 1, m2 = 1;
};

struct CellIndex {
  int x = 1;  // column, 1..m1
  int y = 1;  // row from the top, 1..m2
};

Grid make_grid(const routing::RoadNetwork& net, int m1, int m2);
CellIndex locate_cell(const Grid& g, double px, double py);

inline bool cells_adjacent(const CellIndex& a, const CellIndex& b) {
  return std::abs(a.x - b.x) + std::abs(a.y - b.y) <= 2;
}

/// Which of 8 coarse directions `target` lies in, seen from `center`:
/// 1..4 the four diagonal quadrants, 5/6 due east/west, 7/8 due south/north
/// in row-major cell coordinates. When both cells coincide the straight-line
/// bearing (radians, 0 = due east, counterclockwise) decides instead.
int sector_of(const CellIndex& center, const CellIndex& target,
              double fallback_bearing);

struct ClusterConfig {
  int m1 = 8;
  int m2 = 8;
  int s_min = 4;
  int s_max = 24;
  double tau1 = 0.05;  // lower balance bound, in (0, |R|/|Gamma|]
  double tau2 = 3.0;   // upper balance multiplier, >= 1
};

enum class AllocMode { Greedy, Exact };

struct Cluster {
  int id = 0;
  MatchType match_type = MatchType::FirstMile;
  CellIndex cell;  // origin cell for FM, destination cell for LM
  int sector = 0;  // destination sector for FM, origin sector for LM
  std::vector<AgentId> riders;
  std::vector<AgentId> personal_drivers;
  std::vector<AgentId> designated_drivers;
  bool isolated = false;  // had no mergeable neighbor while undersized

  int size() const {
    return static_cast<int>(riders.size() + personal_drivers.size() +
                            designated_drivers.size());
  }
};

using ClusterSet = std::vector<Cluster>;

/// Groups riders and personal drivers by (cell, sector), picks a dominating
/// set of rider windows per group, and grows one cluster per dominator over
/// the group's window-overlap graph.
ClusterSet build_clusters_phase1(const Instance& inst,
                                 const ClusterConfig& cfg);

/// Merges undersized clusters into adjacent ones, rebalances rider/driver
/// ratios, then splits oversized clusters evenly.
void refine_clusters(ClusterSet& cs, const ClusterConfig& cfg,
                     const Instance& inst);

/// Pairs every rider with one designated driver (same match type, nearest
/// origin for FM / destination for LM; exact mode solves the min-cost
/// perfect matching) and places the driver in its rider's cluster.
/// Throws CardinalityMismatchError unless |designated| == |riders|.
void allocate_designated(ClusterSet& cs, const Instance& inst,
                         AllocMode mode = AllocMode::Greedy);

struct ClusteredSolve {
  ClusterSet clusters;
  Hypergraph merged;  // union of per-cluster hypergraphs, edge ids reassigned
  solver::AssignmentSolution solution;
  std::int64_t enum_ms = 0;   // enumeration time summed over clusters
  std::int64_t solve_ms = 0;  // solver time summed over clusters
};

/// Full accelerator pipeline: phase-1 clusters, refinement, designated
/// allocation, then independent enumeration and solving per cluster.
/// Infeasibility is reported with the offending cluster id in `note`.
ClusteredSolve solve_clustered(const Instance& inst, const ClusterConfig& cfg,
                               feas::Problem problem, const std::string& algo,
                               const solver::SolveOptions& opts = {},
                               AllocMode mode = AllocMode::Greedy);

}  // namespace mtrs::cluster
