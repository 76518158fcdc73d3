#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <unordered_map>
#include <vector>

#include "mtrs/model.hpp"
#include "mtrs/types.hpp"

namespace mtrs {

/// When a rider is picked up, when their transit leg departs, and when they
/// reach their destination, under the canonical schedule of one match.
struct ServiceTimes {
  Seconds pickup = 0;
  Seconds transit_board = 0;
  Seconds arrive = 0;
};

/// One feasible (driver, rider set) pairing. Doubles as a hyperedge: the
/// solver weight is the incurred travel distance for distance minimization
/// or 1 for fleet-size minimization. Synthetic edges used by reductions and
/// tests carry no route or service detail.
struct FeasibleMatch {
  AgentId driver = 0;
  std::vector<AgentId> riders;  // ascending id, never empty
  std::optional<VertexId> station;
  std::vector<VertexId> route;  // stop sequence incl. driver endpoints
  Meters route_distance_m = 0;
  Seconds route_duration_s = 0;  // pure driving time along route
  Meters incurred_m = 0;         // extra meters the driver absorbs
  std::int64_t weight = 1;
  std::vector<ServiceTimes> service;  // parallel to riders

  bool contains_rider(AgentId r) const;
};

/// Weighted hypergraph over drivers and riders. Edge ids are indices into
/// edges(), assigned in enumeration order, which is deterministic.
class Hypergraph {
 public:
  Hypergraph() = default;
  Hypergraph(std::vector<AgentId> drivers, std::vector<AgentId> riders,
             std::unordered_map<AgentId, int> driver_capacity);

  int add_edge(FeasibleMatch e);

  const std::vector<AgentId>& drivers() const { return drivers_; }
  const std::vector<AgentId>& riders() const { return riders_; }
  const std::vector<FeasibleMatch>& edges() const { return edges_; }
  const FeasibleMatch& edge(int id) const { return edges_.at(id); }
  std::size_t edge_count() const { return edges_.size(); }

  const std::vector<int>& edges_of_driver(AgentId d) const;
  const std::vector<int>& edges_of_rider(AgentId r) const;
  int capacity(AgentId driver) const;

  /// Edge id for an exact (driver, rider set) pair, if present.
  std::optional<int> find_edge(AgentId driver,
                               const std::vector<AgentId>& riders) const;

  int max_capacity() const;  // lambda over this graph's drivers
  std::int64_t min_weight() const;
  std::int64_t max_weight() const;
  double weight_ratio() const;  // mu = max weight / min weight

  /// Restriction to edges whose riders all lie in `keep`; drivers unchanged,
  /// edge order preserved, ids reassigned densely.
  Hypergraph restrict_riders(const std::vector<AgentId>& keep) const;

 private:
  std::vector<AgentId> drivers_;
  std::vector<AgentId> riders_;
  std::unordered_map<AgentId, int> capacity_;
  std::vector<FeasibleMatch> edges_;
  std::unordered_map<AgentId, std::vector<int>> by_driver_;
  std::unordered_map<AgentId, std::vector<int>> by_rider_;
};

/// Every rider can be served by a distinct designated driver: a perfect
/// matching exists on the designated-driver/rider singleton edges.
bool check_assumption1(const Instance& inst, const Hypergraph& h);

/// Designated drivers cover riders one-for-one per match type and every
/// same-type (designated driver, rider) pair edge is present. Implies the
/// weaker perfect-matching condition above.
bool check_assumption2(const Instance& inst, const Hypergraph& h);

}  // namespace mtrs
