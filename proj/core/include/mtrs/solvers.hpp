#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mtrs/feasibility.hpp"
#include "mtrs/hypergraph.hpp"

namespace mtrs::solver {

using feas::Problem;

enum class SolveStatus { Optimal, Feasible, Infeasible, TimeLimit };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Feasible: return "feasible";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::TimeLimit: return "time_limit";
  }
  return "?";
}

struct AssignmentSolution {
  SolveStatus status = SolveStatus::Infeasible;
  std::int64_t objective = 0;
  std::vector<int> edges;                 // chosen edge ids, ascending
  std::map<AgentId, AgentId> assignment;  // rider -> driver
  std::string note;                       // diagnostics, e.g. failing cluster
};

struct SolveOptions {
  /// Wall-clock budget for the exact search; <0 means unlimited.
  double time_limit_s = -1.0;
};

/// Exact optimum of the set-packing program: pick pairwise disjoint edges
/// covering every rider, minimizing total weight. Branch and bound over
/// connected components, branching on the uncovered rider with the fewest
/// usable edges; bounds come from Lagrangian rider prices seeded with the
/// per-rider weight shares w(e)/|R(e)| and tightened by subgradient steps,
/// which also drives reduced-cost edge elimination. Honors the time limit
/// by returning the incumbent with status TimeLimit.
AssignmentSolution solve_exact(const Hypergraph& h,
                               const SolveOptions& opts = {});

/// Reference optimum by complete enumeration of all exact covers. No
/// objective-based pruning; intended for small graphs and cross-checks.
AssignmentSolution brute_force_optimal(const Hypergraph& h);

/// Best of two sweeps: repeatedly take the cheapest edge, and repeatedly
/// take the edge with the best weight-per-rider ratio, removing covered
/// vertices and their edges after each pick. Ties go to the lower edge id.
AssignmentSolution greedy_min_dist(const Hypergraph& h);

/// Repeatedly take the edge serving the most riders; ties prefer smaller
/// weight, then lower edge id.
AssignmentSolution greedy_min_num(const Hypergraph& h);

struct LsTrace {
  int initial_drivers = 0;
  int improvements = 0;
  std::vector<int> driver_counts;  // after start and each applied move
};

/// Fleet-size local search: start from a maximum matching on single-rider
/// edges, then repeatedly try to retire one driver by merging a singleton
/// into another served edge, or by redistributing three edges onto two of
/// their drivers. Applies the first improvement in a fixed scan order.
AssignmentSolution local_search_ls(const Hypergraph& h,
                                   LsTrace* trace = nullptr);

struct PartialAssignment {
  std::vector<int> edges;
  std::vector<AgentId> served;    // ascending
  std::vector<AgentId> unserved;  // ascending
};

/// Maximal greedy pass used before the designated fleet is engaged: edges
/// with more riders first (ties: smaller weight, lower id), skipping any
/// edge that conflicts with riders or drivers already taken.
PartialAssignment assign_personal_maximal(const Hypergraph& h);

/// Dispatches an algorithm label: "exact", "greedy" (problem-appropriate
/// sweep), "greedy_min_dist", "greedy_min_num", or "ls" (fleet minimization
/// only). Throws ConfigError on unknown or mismatched labels.
AssignmentSolution run_algorithm(const Hypergraph& h, const std::string& algo,
                                 Problem problem,
                                 const SolveOptions& opts = {});

/// Serializes the set-packing program in CPLEX LP text form. Variables are
/// x_<edge id>; one <=1 row per driver with edges, one =1 row per rider.
std::string export_lp(const Hypergraph& h);

/// Consistency gate run on every solver result before it is reported:
/// chosen edges must be pairwise disjoint and cover `required` exactly, and
/// the objective must equal the weight sum.
bool validate_solution(const Hypergraph& h, const AssignmentSolution& s,
                       const std::vector<AgentId>& required,
                       std::string* why = nullptr);

}  // namespace mtrs::solver
