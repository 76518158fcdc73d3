#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "mtrs/hypergraph.hpp"
#include "mtrs/instance_gen.hpp"
#include "test_support.hpp"

using namespace mtrs;
namespace ts = test_support;

namespace {

FeasibleMatch edge(AgentId d, std::vector<AgentId> rs, std::int64_t w) {
  FeasibleMatch m;
  m.driver = d;
  m.riders = std::move(rs);
  m.weight = w;
  return m;
}

Hypergraph tiny() {
  Hypergraph h({1, 2}, {10, 11, 12}, {{1, 2}, {2, 3}});
  h.add_edge(edge(1, {10}, 5));
  h.add_edge(edge(1, {10, 11}, 8));
  h.add_edge(edge(2, {11}, 3));
  h.add_edge(edge(2, {12}, 4));
  h.add_edge(edge(2, {10, 11, 12}, 20));
  return h;
}

}  // namespace

TEST_CASE("indices cover drivers, riders, and exact lookups") {
  const Hypergraph h = tiny();
  CHECK(h.edge_count() == 5);
  CHECK(h.edges_of_driver(1) == std::vector<int>{0, 1});
  CHECK(h.edges_of_driver(2) == std::vector<int>{2, 3, 4});
  CHECK(h.edges_of_driver(99).empty());
  CHECK(h.edges_of_rider(10) == std::vector<int>{0, 1, 4});
  CHECK(h.edges_of_rider(12) == std::vector<int>{3, 4});
  CHECK(h.capacity(2) == 3);
  CHECK(h.capacity(99) == 0);
  CHECK(h.find_edge(1, {10, 11}) == 1);
  CHECK_FALSE(h.find_edge(1, {11, 10}).has_value());  // ids must be ascending
  CHECK_FALSE(h.find_edge(1, {12}).has_value());
  CHECK(h.edge(4).contains_rider(12));
  CHECK_FALSE(h.edge(4).contains_rider(13));
}

TEST_CASE("weight statistics") {
  const Hypergraph h = tiny();
  CHECK(h.max_capacity() == 3);
  CHECK(h.min_weight() == 3);
  CHECK(h.max_weight() == 20);
  CHECK(h.weight_ratio() == doctest::Approx(20.0 / 3.0));
  CHECK(Hypergraph({}, {}, {}).weight_ratio() == 0.0);
}

TEST_CASE("rider restriction keeps only fully contained edges") {
  const Hypergraph h = tiny();
  const Hypergraph r = h.restrict_riders({10, 11});
  CHECK(r.riders() == std::vector<AgentId>{10, 11});
  CHECK(r.drivers() == h.drivers());
  REQUIRE(r.edge_count() == 3);
  // Order preserved from the original graph, ids reassigned densely.
  CHECK(r.edge(0).riders == std::vector<AgentId>{10});
  CHECK(r.edge(1).riders == std::vector<AgentId>{10, 11});
  CHECK(r.edge(2).riders == std::vector<AgentId>{11});
  CHECK(r.capacity(2) == 3);
}

TEST_CASE("servability check finds a system of distinct designated drivers") {
  Instance inst;
  for (int i = 0; i < 3; ++i) {
    Rider r;
    r.id = ts::rider_id(i);
    inst.riders.push_back(r);
    Driver d;
    d.id = ts::driver_id(i);
    d.kind = DriverKind::Designated;
    inst.designated_drivers.push_back(d);
  }

  SUBCASE("distinct singletons per rider pass") {
    Hypergraph h({ts::driver_id(0), ts::driver_id(1), ts::driver_id(2)},
                 {ts::rider_id(0), ts::rider_id(1), ts::rider_id(2)}, {});
    h.add_edge(edge(ts::driver_id(0), {ts::rider_id(0)}, 1));
    h.add_edge(edge(ts::driver_id(1), {ts::rider_id(1)}, 1));
    h.add_edge(edge(ts::driver_id(2), {ts::rider_id(2)}, 1));
    CHECK(check_assumption1(inst, h));
  }
  SUBCASE("augmenting paths rescue overlapping preferences") {
    Hypergraph h({ts::driver_id(0), ts::driver_id(1), ts::driver_id(2)},
                 {ts::rider_id(0), ts::rider_id(1), ts::rider_id(2)}, {});
    h.add_edge(edge(ts::driver_id(0), {ts::rider_id(0)}, 1));
    h.add_edge(edge(ts::driver_id(0), {ts::rider_id(1)}, 1));
    h.add_edge(edge(ts::driver_id(1), {ts::rider_id(0)}, 1));
    h.add_edge(edge(ts::driver_id(2), {ts::rider_id(2)}, 1));
    CHECK(check_assumption1(inst, h));
  }
  SUBCASE("two riders competing for one driver fail") {
    Hypergraph h({ts::driver_id(0), ts::driver_id(1), ts::driver_id(2)},
                 {ts::rider_id(0), ts::rider_id(1), ts::rider_id(2)}, {});
    h.add_edge(edge(ts::driver_id(0), {ts::rider_id(0)}, 1));
    h.add_edge(edge(ts::driver_id(0), {ts::rider_id(1)}, 1));
    h.add_edge(edge(ts::driver_id(2), {ts::rider_id(2)}, 1));
    CHECK_FALSE(check_assumption1(inst, h));
  }
  SUBCASE("group edges do not count: singletons are required") {
    Hypergraph h({ts::driver_id(0), ts::driver_id(1), ts::driver_id(2)},
                 {ts::rider_id(0), ts::rider_id(1), ts::rider_id(2)}, {});
    h.add_edge(edge(ts::driver_id(0), {ts::rider_id(0), ts::rider_id(1)}, 1));
    h.add_edge(edge(ts::driver_id(1), {ts::rider_id(1)}, 1));
    h.add_edge(edge(ts::driver_id(2), {ts::rider_id(2)}, 1));
    CHECK_FALSE(check_assumption1(inst, h));
  }
}

TEST_CASE("full-service check needs every same-type singleton present") {
  gen::Rng rng(5);
  ts::SyntheticGraph g = ts::full_closure_graph(rng, 4, 2, 50, 20);
  CHECK(check_assumption2(g.skeleton, g.h));
  CHECK(check_assumption1(g.skeleton, g.h));

  SUBCASE("count mismatch fails") {
    Instance broken = g.skeleton;
    broken.designated_drivers.pop_back();
    CHECK_FALSE(check_assumption2(broken, g.h));
  }
  SUBCASE("missing singleton fails") {
    Hypergraph h2(g.h.drivers(), g.h.riders(), {});
    for (int id = 0; id < static_cast<int>(g.h.edge_count()); ++id) {
      const FeasibleMatch& e = g.h.edge(id);
      if (e.riders.size() == 1 && e.driver == ts::driver_id(0) &&
          e.riders[0] == ts::rider_id(2))
        continue;
      h2.add_edge(e);
    }
    CHECK_FALSE(check_assumption2(g.skeleton, h2));
  }
  SUBCASE("opposite-type riders are not required") {
    Instance mixed = g.skeleton;
    mixed.riders[0].match_type = MatchType::LastMile;
    mixed.designated_drivers[0].match_type = MatchType::LastMile;
    // Counts still balance per type; driver 0's singleton for rider 0 is
    // present, and no cross-type edge is demanded.
    CHECK(check_assumption2(mixed, g.h));
  }
}
