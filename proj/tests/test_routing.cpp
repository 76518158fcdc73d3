#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "mtrs/instance_gen.hpp"
#include "mtrs/routing.hpp"
#include "test_support.hpp"

using namespace mtrs;
using namespace mtrs::routing;
namespace ts = test_support;

namespace {

// Reference road oracle: Bellman-Ford over travel time, no tie rules.
std::vector<Seconds> bellman_ford(const RoadNetwork& net, VertexId src) {
  const Seconds inf = std::numeric_limits<Seconds>::max() / 4;
  std::vector<Seconds> dist(net.vertex_count(), inf);
  dist[src] = 0;
  for (std::size_t pass = 0; pass + 1 < net.vertex_count() + 1; ++pass) {
    bool changed = false;
    for (const RoadEdge& e : net.edges()) {
      if (dist[e.from] == inf) continue;
      if (dist[e.from] + e.travel_s < dist[e.to]) {
        dist[e.to] = dist[e.from] + e.travel_s;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return dist;
}

RoadNetwork random_network(gen::Rng& rng, int n, int m) {
  std::vector<Location> vs;
  for (int i = 0; i < n; ++i)
    vs.push_back({static_cast<VertexId>(i), rng.uniform_real(0, 5000),
                  rng.uniform_real(0, 5000)});
  std::set<std::pair<int, int>> used;
  std::vector<RoadEdge> es;
  while (static_cast<int>(es.size()) < m) {
    int a = static_cast<int>(rng.uniform_int(0, n - 1));
    int b = static_cast<int>(rng.uniform_int(0, n - 1));
    if (a == b || !used.insert({a, b}).second) continue;
    es.push_back({static_cast<VertexId>(a), static_cast<VertexId>(b),
                  rng.uniform_int(100, 3000), rng.uniform_int(10, 600)});
  }
  return {std::move(vs), std::move(es)};
}

void check_path_consistency(const RoadNetwork& net, const Location& o,
                            const Location& d, const PathResult& r) {
  REQUIRE(!r.path.empty());
  CHECK(r.path.front() == o.vertex);
  CHECK(r.path.back() == d.vertex);
  Seconds t = 0;
  Meters m = 0;
  for (std::size_t i = 0; i + 1 < r.path.size(); ++i) {
    bool found = false;
    for (const RoadEdge& e : net.out_edges(r.path[i])) {
      if (e.to == r.path[i + 1]) {
        t += e.travel_s;
        m += e.distance_m;
        found = true;
        break;
      }
    }
    REQUIRE(found);
  }
  CHECK(t == r.travel_s);
  CHECK(m == r.distance_m);
}

// Reference journey oracle: depth-first enumeration of walk/ride sequences
// under the same rules (no consecutive walks, shared walking budget, final
// walk only after a ride unless the whole journey is one walk). Returns the
// best (arrival, walk meters) pair reachable when departing at tau.
struct OracleBest {
  Seconds arrive = std::numeric_limits<Seconds>::max();
  Meters walk = std::numeric_limits<Meters>::max();
};

void oracle_rec(const RoadNetwork& net, const TransitTimetable& tt,
                const WalkParams& wp, const Location& dest, int station,
                Seconds time, Meters walk, bool just_walked, bool rode,
                int rides_left, OracleBest& best) {
  const std::vector<VertexId>& stops = tt.stop_vertices();
  const Location& here = net.location(stops[station]);

  const Meters tail = straight_line_m(here, dest);
  if (rode && (tail == 0 || !just_walked) && walk + tail <= wp.cap_m) {
    const Seconds arr = time + walk_seconds(tail, wp.speed_mps);
    if (arr < best.arrive || (arr == best.arrive && walk + tail < best.walk)) {
      best.arrive = arr;
      best.walk = walk + tail;
    }
  }
  if (rides_left == 0) return;

  for (const Trip& trip : tt.trips()) {
    int board = -1;
    for (std::size_t k = 0; k < trip.stops.size(); ++k) {
      if (trip.stops[k].station == stops[station] &&
          trip.stops[k].departure >= time) {
        board = static_cast<int>(k);
        break;
      }
    }
    if (board < 0) continue;
    for (std::size_t l = board + 1; l < trip.stops.size(); ++l) {
      auto it = std::lower_bound(stops.begin(), stops.end(),
                                 trip.stops[l].station);
      if (it == stops.end() || *it != trip.stops[l].station) continue;
      oracle_rec(net, tt, wp, dest,
                 static_cast<int>(it - stops.begin()), trip.stops[l].arrival,
                 walk, false, true, rides_left - 1, best);
    }
  }
  if (!just_walked) {
    for (int j = 0; j < static_cast<int>(stops.size()); ++j) {
      if (j == station) continue;
      const Meters m = straight_line_m(here, net.location(stops[j]));
      if (m == 0 || walk + m > wp.cap_m) continue;
      oracle_rec(net, tt, wp, dest, j, time + walk_seconds(m, wp.speed_mps),
                 walk + m, true, rode, rides_left, best);
    }
  }
}

OracleBest oracle_earliest(const RoadNetwork& net, const TransitTimetable& tt,
                           const WalkParams& wp, const Location& o,
                           const Location& d, Seconds tau) {
  OracleBest best;
  const Meters direct = straight_line_m(o, d);
  if (direct <= wp.cap_m) {
    best.arrive = tau + walk_seconds(direct, wp.speed_mps);
    best.walk = direct;
  }
  const std::vector<VertexId>& stops = tt.stop_vertices();
  for (int i = 0; i < static_cast<int>(stops.size()); ++i) {
    const Meters m = straight_line_m(o, net.location(stops[i]));
    if (m > wp.cap_m) continue;
    oracle_rec(net, tt, wp, d, i, tau + walk_seconds(m, wp.speed_mps), m, true,
               false, 4, best);
  }
  return best;
}

void check_journey_structure(const Journey& j, const Location& o,
                             const Location& d) {
  Meters walked = 0;
  VertexId at = o.vertex;
  bool prev_walk = false;
  for (const JourneyLeg& leg : j.legs) {
    if (const auto* w = std::get_if<WalkLeg>(&leg)) {
      CHECK_FALSE(prev_walk);
      CHECK(w->from == at);
      walked += w->meters;
      at = w->to;
      prev_walk = true;
    } else {
      const RideLeg& r = std::get<RideLeg>(leg);
      CHECK(r.board == at);
      CHECK(r.depart < r.arrive);
      at = r.alight;
      prev_walk = false;
    }
  }
  CHECK(at == d.vertex);
  CHECK(walked == j.walk_m);
}

}  // namespace

TEST_CASE("walk helpers round up") {
  CHECK(walk_seconds(140) == 100);
  CHECK(walk_seconds(1) == 1);
  CHECK(walk_seconds(0) == 0);
  CHECK(walk_seconds(-5) == 0);
  CHECK(straight_line_m({0, 0.0, 0.0}, {1, 3.0, 4.0}) == 5);
  CHECK(straight_line_m({0, 1.0, 1.0}, {1, 1.0, 1.0}) == 0);
}

TEST_CASE("single-vertex path when origin equals destination") {
  const RoadNetwork net = ts::line_network(3);
  const PathResult r = shortest_path(net, net.vertices()[1],
                                     net.vertices()[1]);
  CHECK(r.travel_s == 0);
  CHECK(r.distance_m == 0);
  CHECK(r.path == std::vector<VertexId>{1});
}

TEST_CASE("unreachable pair throws") {
  const RoadNetwork net({{0, 0.0, 0.0}, {1, 10.0, 0.0}}, {});
  CHECK_THROWS_AS(shortest_path(net, net.vertices()[0], net.vertices()[1]),
                  UnreachableError);
}

TEST_CASE("equal-time tie goes to the path with fewer edges") {
  std::vector<Location> vs = {{0, 0, 0}, {1, 1, 0}, {2, 2, 0}};
  std::vector<RoadEdge> es = {{0, 1, 500, 50},
                              {1, 2, 500, 50},
                              {0, 2, 2000, 100}};
  const RoadNetwork net(vs, es);
  const PathResult r = shortest_path(net, vs[0], vs[2]);
  CHECK(r.travel_s == 100);
  CHECK(r.path == std::vector<VertexId>{0, 2});
  CHECK(r.distance_m == 2000);
}

TEST_CASE("equal-time equal-hop tie goes to the smaller vertex sequence") {
  std::vector<Location> vs = {{0, 0, 0}, {1, 1, 0}, {2, 2, 0}, {3, 3, 0}};
  std::vector<RoadEdge> es = {{0, 2, 500, 50},
                              {2, 3, 500, 50},
                              {0, 1, 700, 50},
                              {1, 3, 700, 50}};
  const RoadNetwork net(vs, es);
  const PathResult r = shortest_path(net, vs[0], vs[3]);
  CHECK(r.travel_s == 100);
  CHECK(r.path == std::vector<VertexId>{0, 1, 3});
}

TEST_CASE("fastest paths agree with Bellman-Ford on random graphs") {
  gen::Rng rng(42);
  for (int trial = 0; trial < 25; ++trial) {
    const RoadNetwork net = random_network(rng, 12, 30);
    for (VertexId s = 0; s < 12; ++s) {
      const std::vector<Seconds> ref = bellman_ford(net, s);
      for (VertexId t = 0; t < 12; ++t) {
        const Seconds inf = std::numeric_limits<Seconds>::max() / 4;
        if (ref[t] == inf) {
          CHECK_THROWS_AS(
              shortest_path(net, net.vertices()[s], net.vertices()[t]),
              UnreachableError);
          continue;
        }
        const PathResult r =
            shortest_path(net, net.vertices()[s], net.vertices()[t]);
        CHECK(r.travel_s == ref[t]);
        check_path_consistency(net, net.vertices()[s], net.vertices()[t], r);
      }
    }
  }
}

TEST_CASE("cache answers match one-shot queries") {
  gen::Rng rng(7);
  const RoadNetwork net = random_network(rng, 10, 26);
  RoadCache cache(net);
  for (VertexId s = 0; s < 10; ++s) cache.warm(s);
  for (VertexId s = 0; s < 10; ++s) {
    for (VertexId t = 0; t < 10; ++t) {
      if (!cache.reachable(s, t)) {
        CHECK_THROWS_AS(
            shortest_path(net, net.vertices()[s], net.vertices()[t]),
            UnreachableError);
        continue;
      }
      const PathResult one =
          shortest_path(net, net.vertices()[s], net.vertices()[t]);
      CHECK(cache.travel_s(s, t) == one.travel_s);
      CHECK(cache.distance_m(s, t) == one.distance_m);
      CHECK(cache.path(s, t).path == one.path);
    }
  }
}

TEST_CASE("known journey on a two-station line") {
  const RoadNetwork net = ts::line_network(6);  // x = 0..5000
  const TransitTimetable tt = ts::simple_timetable({2, 4}, 3, 600, 900, 300);

  // Walk 2000 m to the station (1429 s), catch the 1500 s trip, arrive 1800,
  // walk 1000 m (715 s) to x = 5000.
  const std::optional<Journey> j = earliest_arrival_journey(
      net, tt, net.vertices()[0], net.vertices()[5], 0);
  REQUIRE(j.has_value());
  CHECK(j->arrive == 2515);
  CHECK(j->walk_m == 3000);
  CHECK(j->ride_count() == 1);
  CHECK(j->depart == 1500 - 1429);
  check_journey_structure(*j, net.vertices()[0], net.vertices()[5]);

  // Departing after the last trip leaves only walking, which exceeds the cap.
  CHECK_FALSE(earliest_arrival_journey(net, tt, net.vertices()[0],
                                       net.vertices()[5], 3000)
                  .has_value());
}

TEST_CASE("planner agrees with the exhaustive journey oracle") {
  const WalkParams wp;
  gen::Rng rng(11);
  for (int trial = 0; trial < 12; ++trial) {
    const int n = 8;
    std::vector<Location> vs;
    for (int i = 0; i < n; ++i)
      vs.push_back({static_cast<VertexId>(i), rng.uniform_real(0, 3500),
                    rng.uniform_real(0, 3500)});
    const RoadNetwork net(vs, {});

    std::vector<VertexId> stations;
    for (int v = 2; v < 2 + 3; ++v) stations.push_back(v);
    const int trips = 4;
    const Seconds first = rng.uniform_int(120, 900);
    const TransitTimetable tt = ts::simple_timetable(
        stations, trips, first, rng.uniform_int(300, 900),
        rng.uniform_int(120, 600), 30);

    TransitPlanner planner(net, tt, wp);
    for (Seconds tau : {Seconds{0}, Seconds{400}, Seconds{1200}}) {
      const OracleBest want = oracle_earliest(net, tt, wp, vs[0], vs[1], tau);
      const std::optional<Journey> got =
          planner.earliest_arrival(vs[0], vs[1], tau);
      if (want.arrive == std::numeric_limits<Seconds>::max()) {
        CHECK_FALSE(got.has_value());
        continue;
      }
      REQUIRE(got.has_value());
      CHECK(got->arrive == want.arrive);
      CHECK(got->walk_m == want.walk);
      check_journey_structure(*got, vs[0], vs[1]);
      CHECK(got->depart >= tau);
    }
  }
}

TEST_CASE("profiles reproduce pointwise queries and step monotonically") {
  const RoadNetwork net = ts::line_network(6);
  const TransitTimetable tt = ts::simple_timetable({2, 4}, 4, 600, 700, 300);
  TransitPlanner planner(net, tt, {});

  const JourneyProfile& prof = planner.profile(0, 5);
  for (std::size_t i = 1; i < prof.transit.size(); ++i) {
    CHECK(prof.transit[i - 1].depart < prof.transit[i].depart);
    CHECK(prof.transit[i - 1].arrive <= prof.transit[i].arrive);
  }
  std::optional<Seconds> prev;
  for (Seconds tau = 0; tau <= 4200; tau += 97) {
    const std::optional<Seconds> fast = prof.earliest_arrival(tau);
    const std::optional<Journey> full = planner.earliest_arrival(
        net.vertices()[0], net.vertices()[5], tau);
    CHECK(fast.has_value() == full.has_value());
    if (fast && full) CHECK(*fast == full->arrive);
    const std::optional<Journey> j = prof.earliest(tau);
    CHECK(j.has_value() == fast.has_value());
    if (j && fast) CHECK(j->arrive == *fast);
    if (prev && fast) CHECK(*fast >= *prev);
    if (fast) prev = fast;
  }
}

TEST_CASE("pure walk wins when it beats every trip") {
  std::vector<Location> vs = {{0, 0, 0}, {1, 100, 0}, {2, 3000, 0}};
  const RoadNetwork net(vs, {});
  const TransitTimetable tt =
      ts::simple_timetable({1, 2}, 1, 5000, 600, 120);  // very late trip
  const std::optional<Journey> j =
      earliest_arrival_journey(net, tt, vs[0], vs[1], 0);
  REQUIRE(j.has_value());
  CHECK(j->ride_count() == 0);
  CHECK(j->walk_m == 100);
  CHECK(j->arrive == walk_seconds(100));
}
