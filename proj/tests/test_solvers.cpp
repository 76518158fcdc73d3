#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <string>
#include <vector>

#include "mtrs/instance_gen.hpp"
#include "mtrs/solvers.hpp"
#include "test_support.hpp"

using namespace mtrs;
using namespace mtrs::solver;
namespace ts = test_support;

namespace {

FeasibleMatch edge(AgentId d, std::vector<AgentId> rs, std::int64_t w) {
  FeasibleMatch m;
  m.driver = d;
  m.riders = std::move(rs);
  m.weight = w;
  return m;
}

Hypergraph unit_weights(const Hypergraph& h) {
  std::unordered_map<AgentId, int> caps;
  for (AgentId d : h.drivers()) caps[d] = h.capacity(d);
  Hypergraph out(h.drivers(), h.riders(), caps);
  for (const FeasibleMatch& e : h.edges()) {
    FeasibleMatch copy = e;
    copy.weight = 1;
    out.add_edge(std::move(copy));
  }
  return out;
}

}  // namespace

TEST_CASE("reference enumerator agrees with an independent recursion") {
  gen::Rng rng(101);
  int infeasible_seen = 0;
  for (int trial = 0; trial < 80; ++trial) {
    const bool coverable = trial % 2 == 0;
    const Hypergraph h = ts::random_hypergraph(
        rng, 5 + trial % 3, 4, 16, 3, 1, 40, coverable);
    const AssignmentSolution got = brute_force_optimal(h);
    const std::optional<std::int64_t> want = ts::min_cover_weight(h);
    if (!want) {
      ++infeasible_seen;
      CHECK(got.status == SolveStatus::Infeasible);
      continue;
    }
    REQUIRE(got.status == SolveStatus::Optimal);
    CHECK(got.objective == *want);
    std::string why;
    CHECK_MESSAGE(validate_solution(h, got, h.riders(), &why), why);
  }
  CHECK(infeasible_seen > 0);  // both outcomes must actually occur
}

TEST_CASE("exact solver matches the reference everywhere") {
  gen::Rng rng(202);
  int optimal_seen = 0, infeasible_seen = 0;
  for (int trial = 0; trial < 120; ++trial) {
    const bool coverable = trial % 3 != 0;
    const Hypergraph h = ts::random_hypergraph(
        rng, 4 + trial % 3, 5, 20, 3, 1, 60, coverable);
    const AssignmentSolution want = brute_force_optimal(h);
    const AssignmentSolution got = solve_exact(h);
    CHECK(got.status == want.status);
    if (want.status == SolveStatus::Infeasible) {
      ++infeasible_seen;
      continue;
    }
    ++optimal_seen;
    CHECK(got.objective == want.objective);
    std::string why;
    CHECK_MESSAGE(validate_solution(h, got, h.riders(), &why), why);

    const Hypergraph h1 = unit_weights(h);
    const AssignmentSolution got1 = solve_exact(h1);
    const std::optional<int> edges1 = ts::min_cover_edges(h1);
    REQUIRE(edges1.has_value());
    CHECK(got1.status == SolveStatus::Optimal);
    CHECK(got1.objective == *edges1);
  }
  CHECK(optimal_seen > 0);
  CHECK(infeasible_seen > 0);
}

TEST_CASE("exact solver handles structured service fleets") {
  gen::Rng rng(303);
  for (int trial = 0; trial < 10; ++trial) {
    ts::SyntheticGraph g = ts::full_closure_graph(rng, 6, 3, 60, 25);
    const AssignmentSolution want = brute_force_optimal(g.h);
    const AssignmentSolution got = solve_exact(g.h);
    REQUIRE(want.status == SolveStatus::Optimal);
    CHECK(got.status == SolveStatus::Optimal);
    CHECK(got.objective == want.objective);
  }
}

TEST_CASE("exact solver is deterministic") {
  gen::Rng rng(404);
  const Hypergraph h = ts::random_hypergraph(rng, 6, 5, 22, 3, 1, 99, true);
  const AssignmentSolution a = solve_exact(h);
  const AssignmentSolution b = solve_exact(h);
  CHECK(a.edges == b.edges);
  CHECK(a.objective == b.objective);
  CHECK(std::is_sorted(a.edges.begin(), a.edges.end()));
}

TEST_CASE("an unservable rider is reported by name") {
  Hypergraph h({1}, {10, 11}, {{1, 2}});
  h.add_edge(edge(1, {10}, 5));
  const AssignmentSolution s = solve_exact(h);
  CHECK(s.status == SolveStatus::Infeasible);
  CHECK(s.note.find("11") != std::string::npos);
  CHECK(s.edges.empty());
}

TEST_CASE("no riders means an empty optimal dispatch") {
  Hypergraph h({1, 2}, {}, {});
  const AssignmentSolution s = solve_exact(h);
  CHECK(s.status == SolveStatus::Optimal);
  CHECK(s.objective == 0);
  CHECK(s.edges.empty());
  CHECK(greedy_min_dist(h).status == SolveStatus::Feasible);
  CHECK(greedy_min_num(h).status == SolveStatus::Feasible);
}

TEST_CASE("time-limited runs still return a consistent solution") {
  gen::Rng rng(505);
  ts::SyntheticGraph g = ts::full_closure_graph(rng, 14, 3, 4000, 2500);
  SolveOptions opts;
  opts.time_limit_s = 0.03;
  const AssignmentSolution s = solve_exact(g.h, opts);
  REQUIRE((s.status == SolveStatus::Optimal ||
           s.status == SolveStatus::TimeLimit));
  if (!s.edges.empty()) {
    std::string why;
    CHECK_MESSAGE(validate_solution(g.h, s, g.h.riders(), &why), why);
  }
}

TEST_CASE("distance greedy keeps the better of its two sweeps") {
  // Cheapest-first serves rider 20 with the singleton and strands the pair;
  // the ratio sweep takes the pair edge and wins, 3 against 11.
  Hypergraph h({1, 2, 3}, {20, 21}, {{1, 2}, {2, 1}, {3, 1}});
  h.add_edge(edge(1, {20, 21}, 3));
  h.add_edge(edge(2, {20}, 2));
  h.add_edge(edge(3, {21}, 9));
  const AssignmentSolution s = greedy_min_dist(h);
  CHECK(s.status == SolveStatus::Feasible);
  CHECK(s.objective == 3);
  CHECK(s.edges == std::vector<int>{0});
  CHECK(s.assignment.at(20) == 1);
  CHECK(s.assignment.at(21) == 1);
}

TEST_CASE("distance greedy breaks ties by the lower edge id") {
  Hypergraph h({1, 2}, {20}, {{1, 1}, {2, 1}});
  h.add_edge(edge(1, {20}, 7));
  h.add_edge(edge(2, {20}, 7));
  CHECK(greedy_min_dist(h).edges == std::vector<int>{0});
}

TEST_CASE("fleet greedy prefers bigger groups, then cheaper, then lower id") {
  Hypergraph h({1, 2, 3}, {20, 21, 22}, {{1, 2}, {2, 2}, {3, 1}});
  h.add_edge(edge(1, {20}, 1));
  h.add_edge(edge(2, {21, 22}, 50));
  h.add_edge(edge(1, {20, 21}, 2));
  h.add_edge(edge(3, {22}, 1));
  // Size-2 edges first: id 1 (weight 50) loses to id 2 (weight 2)? No:
  // cheaper wins, so id 2 is taken, then 21 is gone, killing id 1; riders
  // 20 and 21 are served, rider 22 falls to its singleton.
  const AssignmentSolution s = greedy_min_num(h);
  CHECK(s.status == SolveStatus::Feasible);
  CHECK(s.edges == std::vector<int>{2, 3});
  CHECK(s.objective == 3);
}

TEST_CASE("fleet greedy reports infeasible when stranded") {
  Hypergraph h({1}, {20, 21}, {{1, 2}});
  h.add_edge(edge(1, {20, 21}, 4));
  h.add_edge(edge(1, {20}, 1));
  // Taking the pair succeeds; the sweep never strands here.
  CHECK(greedy_min_num(h).status == SolveStatus::Feasible);

  Hypergraph h2({1}, {20, 21}, {{1, 1}});
  h2.add_edge(edge(1, {20}, 1));
  h2.add_edge(edge(1, {21}, 1));
  CHECK(greedy_min_num(h2).status == SolveStatus::Infeasible);
  CHECK(greedy_min_dist(h2).status == SolveStatus::Infeasible);
}

TEST_CASE("partial pass serves what it can and lists the rest") {
  Hypergraph h({1, 2}, {20, 21, 22, 23}, {{1, 2}, {2, 1}});
  h.add_edge(edge(1, {20, 21}, 5));
  h.add_edge(edge(2, {22}, 1));
  h.add_edge(edge(2, {23}, 2));
  const PartialAssignment p = assign_personal_maximal(h);
  CHECK(p.edges == std::vector<int>{0, 1});
  CHECK(p.served == std::vector<AgentId>{20, 21, 22});
  CHECK(p.unserved == std::vector<AgentId>{23});
}

TEST_CASE("local search merges a singleton into a shared ride") {
  Hypergraph h({1, 2}, {20, 21}, {{1, 2}, {2, 2}});
  h.add_edge(edge(1, {20}, 1));  // id 0
  h.add_edge(edge(2, {21}, 1));  // id 1
  h.add_edge(edge(2, {20, 21}, 1));  // id 2
  LsTrace trace;
  const AssignmentSolution s = local_search_ls(h, &trace);
  CHECK(s.status == SolveStatus::Feasible);
  CHECK(s.edges == std::vector<int>{2});
  CHECK(trace.initial_drivers == 2);
  CHECK(trace.improvements == 1);
  CHECK(trace.driver_counts == std::vector<int>{2, 1});
}

TEST_CASE("local search redistributes three rides onto two drivers") {
  Hypergraph h({1, 2, 3}, {20, 21, 22}, {{1, 2}, {2, 2}, {3, 2}});
  h.add_edge(edge(1, {20}, 1));      // id 0
  h.add_edge(edge(2, {21}, 1));      // id 1
  h.add_edge(edge(3, {22}, 1));      // id 2
  h.add_edge(edge(2, {20}, 1));      // id 3
  h.add_edge(edge(1, {21, 22}, 1));  // id 4
  LsTrace trace;
  const AssignmentSolution s = local_search_ls(h, &trace);
  CHECK(s.status == SolveStatus::Feasible);
  CHECK(s.edges == std::vector<int>{3, 4});
  CHECK(trace.initial_drivers == 3);
  CHECK(trace.improvements == 1);
}

TEST_CASE("local search needs a singleton cover to start") {
  Hypergraph h({1}, {20, 21}, {{1, 2}});
  h.add_edge(edge(1, {20, 21}, 1));
  h.add_edge(edge(1, {20}, 1));
  const AssignmentSolution s = local_search_ls(h);
  CHECK(s.status == SolveStatus::Infeasible);
  CHECK(s.note.find("single-rider") != std::string::npos);
}

TEST_CASE("local search never worsens and stays valid") {
  gen::Rng rng(606);
  for (int trial = 0; trial < 40; ++trial) {
    ts::SyntheticGraph g = ts::full_closure_graph(
        rng, 4 + static_cast<int>(rng.uniform_int(0, 2)),
        2 + static_cast<int>(trial % 2), 30, 12);
    const Hypergraph h = unit_weights(g.h);
    LsTrace trace;
    const AssignmentSolution s = local_search_ls(h, &trace);
    REQUIRE(s.status == SolveStatus::Feasible);
    std::string why;
    CHECK_MESSAGE(validate_solution(h, s, h.riders(), &why), why);
    for (std::size_t i = 1; i < trace.driver_counts.size(); ++i)
      CHECK(trace.driver_counts[i] < trace.driver_counts[i - 1]);
    CHECK(static_cast<int>(s.edges.size()) <= trace.initial_drivers);
    const AssignmentSolution opt = brute_force_optimal(h);
    CHECK(s.objective >= opt.objective);
  }
}

TEST_CASE("dispatcher routes labels and rejects misuse") {
  Hypergraph h({1}, {20}, {{1, 1}});
  h.add_edge(edge(1, {20}, 3));
  CHECK(run_algorithm(h, "exact", Problem::MinDist).objective == 3);
  CHECK(run_algorithm(h, "greedy", Problem::MinDist).objective == 3);
  CHECK(run_algorithm(h, "greedy", Problem::MinNum).objective == 3);
  CHECK(run_algorithm(h, "greedy_min_dist", Problem::MinNum).objective == 3);
  CHECK(run_algorithm(h, "greedy_min_num", Problem::MinDist).objective == 3);
  CHECK(run_algorithm(h, "ls", Problem::MinNum).objective == 3);
  CHECK_THROWS_AS(run_algorithm(h, "ls", Problem::MinDist), ConfigError);
  CHECK_THROWS_AS(run_algorithm(h, "simplex", Problem::MinDist), ConfigError);
}

TEST_CASE("program text lists objective, driver rows, and rider rows") {
  Hypergraph h({1, 2}, {20, 21, 22}, {{1, 2}, {2, 1}});
  h.add_edge(edge(1, {20, 21}, 5));
  h.add_edge(edge(2, {20}, 2));
  const std::string lp = export_lp(h);
  CHECK(lp ==
        "Minimize\n"
        " obj: 5 x_0 + 2 x_1\n"
        "Subject To\n"
        " d_1: x_0 <= 1\n"
        " d_2: x_1 <= 1\n"
        " r_20: x_0 + x_1 = 1\n"
        " r_21: x_0 = 1\n"
        "\\ rider 22 has no feasible match\n"
        "Binary\n"
        " x_0\n"
        " x_1\n"
        "End\n");
}

TEST_CASE("program semantics equal the set-packing optimum") {
  gen::Rng rng(707);
  for (int trial = 0; trial < 20; ++trial) {
    const Hypergraph h =
        ts::random_hypergraph(rng, 4, 4, 10, 2, 1, 30, trial % 2 == 0);
    // Enumerate every 0/1 vector over the edges and keep those satisfying
    // the printed constraints: at most one per driver, exactly one per rider.
    std::optional<std::int64_t> best;
    const int n = static_cast<int>(h.edge_count());
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      std::map<AgentId, int> per_driver, per_rider;
      std::int64_t cost = 0;
      for (int i = 0; i < n; ++i) {
        if (!((mask >> i) & 1u)) continue;
        ++per_driver[h.edge(i).driver];
        for (AgentId r : h.edge(i).riders) ++per_rider[r];
        cost += h.edge(i).weight;
      }
      bool ok = true;
      for (const auto& [d, cnt] : per_driver) ok = ok && cnt <= 1;
      for (AgentId r : h.riders()) ok = ok && per_rider[r] == 1;
      if (ok && (!best || cost < *best)) best = cost;
    }
    const AssignmentSolution s = brute_force_optimal(h);
    if (!best) {
      CHECK(s.status == SolveStatus::Infeasible);
    } else {
      REQUIRE(s.status == SolveStatus::Optimal);
      CHECK(s.objective == *best);
    }
  }
}

TEST_CASE("solution validation rejects each defect") {
  Hypergraph h({1, 2}, {20, 21}, {{1, 2}, {2, 1}});
  h.add_edge(edge(1, {20, 21}, 5));
  h.add_edge(edge(1, {20}, 2));
  h.add_edge(edge(2, {21}, 2));

  AssignmentSolution good;
  good.edges = {1, 2};
  good.objective = 4;
  std::string why;
  CHECK(validate_solution(h, good, {20, 21}, &why));

  AssignmentSolution bad = good;
  bad.objective = 5;
  CHECK_FALSE(validate_solution(h, bad, {20, 21}, &why));
  CHECK(why.find("objective") != std::string::npos);

  bad = good;
  bad.edges = {0, 1};  // driver 1 twice, rider 20 twice
  CHECK_FALSE(validate_solution(h, bad, {20, 21}, &why));

  bad = good;
  bad.edges = {1};
  bad.objective = 2;
  CHECK_FALSE(validate_solution(h, bad, {20, 21}, &why));
  CHECK(why.find("mismatch") != std::string::npos);

  bad = good;
  bad.edges = {1, 99};
  CHECK_FALSE(validate_solution(h, bad, {20, 21}, &why));
  CHECK(why.find("range") != std::string::npos);
}
