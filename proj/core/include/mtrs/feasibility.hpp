#pragma once

#include <optional>
#include <span>
#include <vector>

#include "mtrs/hypergraph.hpp"
#include "mtrs/model.hpp"
#include "mtrs/routing.hpp"

namespace mtrs::feas {

enum class Problem { MinDist, MinNum };

inline const char* to_string(Problem p) {
  return p == Problem::MinDist ? "mindist" : "minnum";
}

/// Shared routing state for one instance: road distance tables and transit
/// profiles. Warm once, then feasibility queries leave it untouched.
class MatchContext {
 public:
  explicit MatchContext(const Instance& inst);

  const Instance& instance() const { return *inst_; }
  routing::RoadCache& roads() { return roads_; }
  routing::TransitPlanner& transit() { return transit_; }

  Seconds drive_s(VertexId a, VertexId b) { return roads_.travel_s(a, b); }
  Meters drive_m(VertexId a, VertexId b) { return roads_.distance_m(a, b); }

  /// Pre-runs Dijkstra from every vertex feasibility can query.
  void warm_all();

 private:
  const Instance* inst_;
  routing::RoadCache roads_;
  routing::TransitPlanner transit_;
};

/// Extra meters a driver absorbs by serving the match: route length minus
/// their fastest-path length for personal drivers (never negative on sane
/// data), the full route length for designated drivers.
Meters incurred_travel_distance(MatchContext& ctx, const Driver& driver,
                                const FeasibleMatch& match);

/// Cheapest feasible way for `driver` to serve exactly `riders` (ascending
/// ids), over all stations and pickup/dropoff orders. Ties prefer the lowest
/// station vertex id, then the lexicographically smallest order. nullopt when
/// no schedule satisfies every window, capacity, detour, and saving bound.
std::optional<FeasibleMatch> check_feasible_match(
    MatchContext& ctx, const Driver& driver, std::span<const Rider> riders);

/// All feasible matches for the drivers in scope, level-wise per driver:
/// a rider set is tried only when all its subsets one smaller are feasible,
/// which is exact because feasibility is downward closed.
Hypergraph enumerate_hypergraph(MatchContext& ctx, Problem problem);

/// Same, restricted to an explicit agent subset (used by clustering and by
/// the two-stage fleet-minimization pipeline).
Hypergraph enumerate_hypergraph_scoped(MatchContext& ctx, Problem problem,
                                       std::span<const Driver> drivers,
                                       std::span<const Rider> riders);

}  // namespace mtrs::feas
