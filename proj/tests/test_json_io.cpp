#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "mtrs/feasibility.hpp"
#include "mtrs/instance_gen.hpp"
#include "mtrs/json_io.hpp"
#include "mtrs/solvers.hpp"
#include "test_support.hpp"

using namespace mtrs;
namespace ts = test_support;
using nlohmann::json;

namespace {

Instance sample_instance() {
  gen::GenConfig cfg;
  cfg.grid_n = 8;
  cfg.block_m = 400;
  cfg.stations = 5;
  cfg.transit_lines = 2;
  cfg.trips_per_line = 12;
  cfg.riders = 6;
  cfg.zone_weights = {0.5, 0.5};
  return gen::gen_interval_instance(cfg, 21);
}

}  // namespace

TEST_CASE("instance serialization round-trips byte for byte") {
  const Instance inst = sample_instance();
  const std::string once = io::store_instance(inst);
  const Instance back = io::load_instance(once);
  const std::string twice = io::store_instance(back);
  CHECK(once == twice);
  CHECK(once.back() == '\n');

  CHECK(back.riders.size() == inst.riders.size());
  CHECK(back.personal_drivers.size() == inst.personal_drivers.size());
  CHECK(back.designated_drivers.size() == inst.designated_drivers.size());
  CHECK(back.network.vertices().size() == inst.network.vertices().size());
  CHECK(back.network.edges().size() == inst.network.edges().size());
  CHECK(back.timetable.trips().size() == inst.timetable.trips().size());
  CHECK(back.interval_start == inst.interval_start);
  CHECK(back.interval_end == inst.interval_end);
  CHECK(validate_instance(back).empty());

  const Rider& r0 = inst.riders[0];
  const Rider& r1 = back.riders[0];
  CHECK(r1.id == r0.id);
  CHECK(r1.match_type == r0.match_type);
  CHECK(r1.origin.vertex == r0.origin.vertex);
  CHECK(r1.origin.x == r0.origin.x);
  CHECK(r1.earliest_departure == r0.earliest_departure);
  CHECK(r1.latest_arrival == r0.latest_arrival);
  CHECK(r1.acceptance_threshold == doctest::Approx(r0.acceptance_threshold));
  CHECK(r1.transit_baseline == r0.transit_baseline);

  const Driver& d0 = inst.designated_drivers[0];
  const Driver& d1 = back.designated_drivers[0];
  CHECK(d1.id == d0.id);
  CHECK(d1.kind == DriverKind::Designated);
  CHECK(d1.capacity == d0.capacity);
  CHECK(d1.detour_limit == d0.detour_limit);
}

TEST_CASE("malformed instance text reports an io error") {
  CHECK_THROWS_AS(io::load_instance("not json"), IoError);
  CHECK_THROWS_AS(io::load_instance("{}"), IoError);
  // A structurally valid document with one field of the wrong shape.
  const Instance inst = sample_instance();
  json j = json::parse(io::store_instance(inst));
  j["riders"][0].erase("acceptance_threshold");
  CHECK_THROWS_AS(io::load_instance(j.dump()), IoError);
  json k = json::parse(io::store_instance(inst));
  k["riders"][2]["match_type"] = "sideways";
  CHECK_THROWS_AS(io::load_instance(k.dump()), IoError);
}

TEST_CASE("hypergraph export lists agents, capacities and edges") {
  const Instance inst = sample_instance();
  feas::MatchContext ctx(inst);
  ctx.warm_all();
  const Hypergraph h = feas::enumerate_hypergraph(ctx, feas::Problem::MinDist);
  REQUIRE(h.edge_count() > 0);

  const json j = json::parse(io::store_hypergraph(h));
  CHECK(j.at("drivers").size() == h.drivers().size());
  CHECK(j.at("riders").size() == h.riders().size());
  CHECK(j.at("capacities").size() == h.drivers().size());
  REQUIRE(j.at("edges").size() == h.edge_count());
  const json& e0 = j.at("edges")[0];
  CHECK(e0.at("id") == 0);
  CHECK(e0.at("driver") == h.edge(0).driver);
  CHECK(e0.at("weight") == h.edge(0).weight);
  CHECK(e0.at("riders").get<std::vector<AgentId>>() == h.edge(0).riders);
  // First-mile matches ride to a station; the export keeps it.
  if (h.edge(0).station)
    CHECK(e0.at("station") == *h.edge(0).station);
}

TEST_CASE("solution export mirrors the assignment") {
  const Instance inst = sample_instance();
  feas::MatchContext ctx(inst);
  ctx.warm_all();
  const Hypergraph h = feas::enumerate_hypergraph(ctx, feas::Problem::MinDist);
  const solver::AssignmentSolution s = solver::solve_exact(h);
  REQUIRE(s.status == solver::SolveStatus::Optimal);

  const json j = json::parse(io::store_solution(h, s, feas::Problem::MinDist));
  CHECK(j.at("problem") == "mindist");
  CHECK(j.at("status") == "optimal");
  CHECK(j.at("objective") == s.objective);
  CHECK(j.at("edges").size() == s.edges.size());
  CHECK(j.at("assignment").size() == s.assignment.size());
  CHECK_FALSE(j.contains("note"));

  solver::AssignmentSolution noted = s;
  noted.note = "cluster 3: rider 9 has no feasible match";
  const json jn =
      json::parse(io::store_solution(h, noted, feas::Problem::MinNum));
  CHECK(jn.at("problem") == "minnum");
  CHECK(jn.at("note") == noted.note);
}

TEST_CASE("cluster export captures membership and placement") {
  cluster::ClusterSet cs(2);
  cs[0].id = 0;
  cs[0].match_type = MatchType::FirstMile;
  cs[0].cell = {2, 3};
  cs[0].sector = 5;
  cs[0].riders = {ts::rider_id(0), ts::rider_id(1)};
  cs[0].personal_drivers = {ts::driver_id(0)};
  cs[1].id = 1;
  cs[1].isolated = true;
  cs[1].riders = {ts::rider_id(2)};

  const json j = json::parse(io::store_clusters(cs));
  REQUIRE(j.at("clusters").size() == 2);
  CHECK(j.at("clusters")[0].at("cell").at("x") == 2);
  CHECK(j.at("clusters")[0].at("sector") == 5);
  CHECK(j.at("clusters")[0].at("size") == 3);
  CHECK(j.at("clusters")[0].at("isolated") == false);
  CHECK(j.at("clusters")[1].at("isolated") == true);
}

TEST_CASE("matching market text round-trips") {
  const gen::ThreeDM t = gen::gen_random_threedm(3, 0.6, 9, 17);
  const std::string once = io::store_threedm(t);
  const gen::ThreeDM back = io::load_threedm(once);
  CHECK(io::store_threedm(back) == once);
  CHECK(back.q == t.q);
  CHECK(back.A == t.A);
  CHECK(back.F == t.F);
  CHECK(back.omega == t.omega);
  CHECK_THROWS_AS(io::load_threedm("[1,2"), IoError);
}

TEST_CASE("config loaders keep defaults for absent keys") {
  const gen::GenConfig dflt;
  const gen::GenConfig a = io::load_gen_config("{}");
  CHECK(a.grid_n == dflt.grid_n);
  CHECK(a.riders == dflt.riders);
  CHECK(a.zone_weights == dflt.zone_weights);

  const gen::GenConfig b =
      io::load_gen_config(R"({"riders": 40, "zone_weights": [0.2, 0.8]})");
  CHECK(b.riders == 40);
  CHECK(b.zone_weights == std::vector<double>{0.2, 0.8});
  CHECK(b.grid_n == dflt.grid_n);
  CHECK_THROWS_AS(io::load_gen_config(R"({"riders": "many"})"), IoError);

  const cluster::ClusterConfig cdflt;
  const cluster::ClusterConfig c = io::load_cluster_config("{}");
  CHECK(c.m1 == cdflt.m1);
  CHECK(c.s_max == cdflt.s_max);
  const cluster::ClusterConfig d =
      io::load_cluster_config(R"({"m1": 7, "tau2": 4.5})");
  CHECK(d.m1 == 7);
  CHECK(d.tau2 == 4.5);
  CHECK_THROWS_AS(io::load_cluster_config("nope"), IoError);
}

TEST_CASE("file helpers write and read back") {
  namespace fs = std::filesystem;
  const fs::path p = fs::temp_directory_path() / "mtrs_io_test.json";
  io::write_file(p, "{\"x\": 1}\n");
  CHECK(io::read_file(p) == "{\"x\": 1}\n");
  std::remove(p.string().c_str());
  CHECK_THROWS_AS(io::read_file(p), IoError);
}
