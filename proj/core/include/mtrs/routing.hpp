#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <unordered_map>
#include <variant>
#include <vector>

#include "mtrs/types.hpp"

namespace mtrs::routing {

struct RoadEdge {
  VertexId from = -1;
  VertexId to = -1;
  Meters distance_m = 0;
  Seconds travel_s = 0;
};

/// Directed road graph over densely numbered vertices 0..n-1.
/// Read-only after construction, so queries may run concurrently.
class RoadNetwork {
 public:
  RoadNetwork() = default;
  RoadNetwork(std::vector<Location> vertices, std::vector<RoadEdge> edges);

  const std::vector<Location>& vertices() const { return vertices_; }
  const std::vector<RoadEdge>& edges() const { return edges_; }
  std::span<const RoadEdge> out_edges(VertexId v) const;
  bool has_vertex(VertexId v) const {
    return v >= 0 && static_cast<std::size_t>(v) < vertices_.size();
  }
  const Location& location(VertexId v) const;
  std::size_t vertex_count() const { return vertices_.size(); }

 private:
  std::vector<Location> vertices_;
  std::vector<RoadEdge> edges_;  // as given, serialization order
  std::vector<RoadEdge> adj_;    // grouped by source, then by target id
  std::vector<std::int32_t> adj_offset_;
};

struct PathResult {
  Meters distance_m = 0;
  Seconds travel_s = 0;
  std::vector<VertexId> path;  // o..d inclusive, single vertex when o == d
};

/// Fastest path by travel time; ties broken by fewer edges, then by the
/// lexicographically smallest vertex-id sequence. Throws UnreachableError.
PathResult shortest_path(const RoadNetwork& net, const Location& o,
                         const Location& d);

/// One-to-all fastest-path tables, one Dijkstra pass per warmed source.
/// Warm every source before issuing concurrent queries.
class RoadCache {
 public:
  explicit RoadCache(const RoadNetwork& net) : net_(&net) {}

  void warm(VertexId source);
  Seconds travel_s(VertexId from, VertexId to);
  Meters distance_m(VertexId from, VertexId to);
  bool reachable(VertexId from, VertexId to);
  PathResult path(VertexId from, VertexId to);

  const RoadNetwork& network() const { return *net_; }

 private:
  struct Table {
    std::vector<Seconds> time;
    std::vector<std::int32_t> hops;
    std::vector<VertexId> parent;
    std::vector<Meters> meters;  // along the canonical fastest path
  };
  friend PathResult shortest_path(const RoadNetwork&, const Location&,
                                  const Location&);
  static Table build_table(const RoadNetwork& net, VertexId source);
  const Table& table(VertexId source);

  const RoadNetwork* net_;
  std::unordered_map<VertexId, Table> tables_;
};

struct StopEvent {
  VertexId station = -1;
  Seconds arrival = 0;
  Seconds departure = 0;  // >= arrival
};

struct Trip {
  int id = 0;
  std::vector<StopEvent> stops;  // strictly increasing in time
};

class TransitTimetable {
 public:
  TransitTimetable() = default;
  explicit TransitTimetable(std::vector<Trip> trips);

  const std::vector<Trip>& trips() const { return trips_; }
  /// Every distinct station vertex referenced by some trip, ascending.
  const std::vector<VertexId>& stop_vertices() const { return stop_vertices_; }

 private:
  std::vector<Trip> trips_;
  std::vector<VertexId> stop_vertices_;
};

struct WalkLeg {
  VertexId from = -1;
  VertexId to = -1;
  Seconds seconds = 0;
  Meters meters = 0;
};

struct RideLeg {
  int trip = 0;
  VertexId board = -1;
  VertexId alight = -1;
  Seconds depart = 0;
  Seconds arrive = 0;
};

using JourneyLeg = std::variant<WalkLeg, RideLeg>;

/// A door-to-door transit itinerary: optional walk, trips with transfers,
/// optional walk. depart is normalized to the latest start that still catches
/// the same trip sequence, so arrive - depart is the true travel duration.
struct Journey {
  std::vector<JourneyLeg> legs;
  Seconds depart = 0;
  Seconds arrive = 0;
  Meters walk_m = 0;

  Seconds duration() const { return arrive - depart; }
  int ride_count() const;
};

struct WalkParams {
  double speed_mps = 1.4;
  Meters cap_m = 4000;  // total walking allowed per journey
};

Seconds walk_seconds(Meters m, double speed_mps = 1.4);
Meters straight_line_m(const Location& a, const Location& b);

/// Step function tau -> earliest arrival for one origin/destination pair.
/// Transit options are Pareto breakpoints; a pure walk, when short enough,
/// is available at any departure time.
struct JourneyProfile {
  struct Entry {
    Seconds depart = 0;
    Seconds arrive = 0;
    Journey journey;
  };
  std::vector<Entry> transit;  // ascending depart, ascending arrive
  std::optional<Journey> walk_only;

  /// Best journey leaving no earlier than tau, or nullopt.
  std::optional<Journey> earliest(Seconds tau) const;
  /// Arrival of earliest(tau) without materializing the journey.
  std::optional<Seconds> earliest_arrival(Seconds tau) const;
};

/// Earliest-arrival queries over walking plus scheduled trips.
/// Profiles are memoized per (origin vertex, destination vertex).
class TransitPlanner {
 public:
  TransitPlanner(const RoadNetwork& net, const TransitTimetable& tt,
                 WalkParams wp = {});

  std::optional<Journey> earliest_arrival(const Location& o, const Location& d,
                                          Seconds depart) const;
  const JourneyProfile& profile(VertexId o, VertexId d);

  const WalkParams& walk_params() const { return wp_; }

 private:
  std::optional<Journey> search(const Location& o, const Location& d,
                                Seconds depart, bool allow_pure_walk) const;

  const RoadNetwork* net_;
  const TransitTimetable* tt_;
  WalkParams wp_;
  std::unordered_map<std::uint64_t, JourneyProfile> profiles_;
};

/// Convenience wrapper used by one-shot callers and tests.
std::optional<Journey> earliest_arrival_journey(const RoadNetwork& net,
                                                const TransitTimetable& tt,
                                                const Location& o,
                                                const Location& d,
                                                Seconds depart,
                                                WalkParams wp = {});

}  // namespace mtrs::routing
