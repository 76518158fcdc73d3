#include "mtrs/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <sstream>
#include <unordered_set>
#include <utility>

#include <nlohmann/json.hpp>

#include "mtrs/feasibility.hpp"

namespace mtrs::pipeline {

namespace {

using Clock = std::chrono::steady_clock;

std::int64_t ms_since(Clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() -
                                                               t0)
      .count();
}

/// Door-to-door travel time of one rider under a match's schedule. An FM
/// rider's trip starts at the car pickup, an LM rider's at the transit
/// departure.
Seconds rider_duration(const Rider& r, const ServiceTimes& st) {
  return r.match_type == MatchType::FirstMile ? st.arrive - st.pickup
                                              : st.arrive - st.transit_board;
}

std::string format_avg(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

}  // namespace

std::string csv_row(const MetricsReport& r) {
  std::ostringstream out;
  out << r.interval << ',' << r.algo << ',' << (r.clustered ? 1 : 0) << ','
      << feas::to_string(r.problem) << ',' << r.objective << ','
      << r.assigned_total << ',' << r.assigned_personal << ','
      << r.assigned_designated << ',' << r.time_saved_total_s << ','
      << format_avg(r.time_saved_avg_s) << ',' << r.enum_ms << ','
      << r.solve_ms << ',' << r.total_ms;
  return out.str();
}

std::string to_csv(const std::vector<MetricsReport>& rows) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const MetricsReport& r : rows) {
    out += csv_row(r);
    out += '\n';
  }
  return out;
}

std::string to_json(const std::vector<MetricsReport>& rows) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const MetricsReport& r : rows) {
    arr.push_back(nlohmann::ordered_json{
        {"interval", r.interval},
        {"algo", r.algo},
        {"clustered", r.clustered},
        {"problem", feas::to_string(r.problem)},
        {"status", solver::to_string(r.status)},
        {"objective", r.objective},
        {"assigned_total", r.assigned_total},
        {"assigned_personal", r.assigned_personal},
        {"assigned_designated", r.assigned_designated},
        {"riders", r.riders},
        {"time_saved_total_s", r.time_saved_total_s},
        {"time_saved_avg_s", r.time_saved_avg_s},
        {"enum_ms", r.enum_ms},
        {"solve_ms", r.solve_ms},
        {"total_ms", r.total_ms}});
  }
  return arr.dump(2) + "\n";
}

MetricsReport aggregate(const std::vector<MetricsReport>& rows) {
  MetricsReport agg;
  agg.interval = "all";
  if (!rows.empty()) {
    agg.algo = rows.front().algo;
    agg.clustered = rows.front().clustered;
    agg.problem = rows.front().problem;
    agg.status = solver::SolveStatus::Optimal;
  }
  for (const MetricsReport& r : rows) {
    if (r.status == solver::SolveStatus::Infeasible)
      agg.status = solver::SolveStatus::Infeasible;
    else if (r.status == solver::SolveStatus::TimeLimit &&
             agg.status != solver::SolveStatus::Infeasible)
      agg.status = solver::SolveStatus::TimeLimit;
    else if (r.status == solver::SolveStatus::Feasible &&
             agg.status == solver::SolveStatus::Optimal)
      agg.status = solver::SolveStatus::Feasible;
    agg.objective += r.objective;
    agg.assigned_total += r.assigned_total;
    agg.assigned_personal += r.assigned_personal;
    agg.assigned_designated += r.assigned_designated;
    agg.riders += r.riders;
    agg.time_saved_total_s += r.time_saved_total_s;
    agg.enum_ms += r.enum_ms;
    agg.solve_ms += r.solve_ms;
    agg.total_ms += r.total_ms;
  }
  agg.time_saved_avg_s =
      agg.riders > 0
          ? static_cast<double>(agg.time_saved_total_s) / agg.riders
          : 0.0;
  return agg;
}

RunResult run_interval(const Instance& inst, const RunOptions& opts) {
  const Clock::time_point t_start = Clock::now();
  solver::SolveOptions sopts;
  sopts.time_limit_s = opts.time_limit_s;

  RunResult out;
  MetricsReport& rep = out.report;
  rep.interval = opts.interval_label;
  rep.algo = opts.algo;
  rep.clustered = opts.clustered;
  rep.problem = opts.problem;
  rep.riders = static_cast<int>(inst.riders.size());

  if (opts.clustered) {
    cluster::ClusteredSolve cs =
        cluster::solve_clustered(inst, opts.cluster_cfg, opts.problem,
                                 opts.algo, sopts, opts.alloc_mode);
    out.hypergraph = std::move(cs.merged);
    out.solution = std::move(cs.solution);
    rep.enum_ms = cs.enum_ms;
    rep.solve_ms = cs.solve_ms;
  } else if (opts.problem == feas::Problem::MinDist) {
    feas::MatchContext ctx(inst);
    ctx.warm_all();
    Clock::time_point t0 = Clock::now();
    Hypergraph h = feas::enumerate_hypergraph(ctx, opts.problem);
    rep.enum_ms = ms_since(t0);
    t0 = Clock::now();
    out.solution = solver::run_algorithm(h, opts.algo, opts.problem, sopts);
    rep.solve_ms = ms_since(t0);
    out.hypergraph = std::move(h);
  } else {
    // Stage 1 saturates the personal drivers, stage 2 covers the leftover
    // riders with the designated fleet; the reported solution lives on the
    // union of both stage graphs.
    feas::MatchContext ctx(inst);
    ctx.warm_all();

    std::vector<AgentId> all_drivers, all_riders;
    std::unordered_map<AgentId, int> caps;
    for (const Driver& d : inst.personal_drivers) {
      all_drivers.push_back(d.id);
      caps[d.id] = d.capacity;
    }
    for (const Driver& d : inst.designated_drivers) {
      all_drivers.push_back(d.id);
      caps[d.id] = d.capacity;
    }
    for (const Rider& r : inst.riders) all_riders.push_back(r.id);
    std::sort(all_drivers.begin(), all_drivers.end());
    std::sort(all_riders.begin(), all_riders.end());
    out.hypergraph = Hypergraph(all_drivers, all_riders, caps);

    Clock::time_point t0 = Clock::now();
    const Hypergraph hp = feas::enumerate_hypergraph_scoped(
        ctx, opts.problem, inst.personal_drivers, inst.riders);
    rep.enum_ms = ms_since(t0);
    t0 = Clock::now();
    const solver::PartialAssignment part = solver::assign_personal_maximal(hp);
    rep.solve_ms = ms_since(t0);

    std::vector<Rider> rest;
    for (const Rider& r : inst.riders)
      if (!std::binary_search(part.served.begin(), part.served.end(), r.id))
        rest.push_back(r);
    t0 = Clock::now();
    const Hypergraph hd = feas::enumerate_hypergraph_scoped(
        ctx, opts.problem, inst.designated_drivers, rest);
    rep.enum_ms += ms_since(t0);
    t0 = Clock::now();
    solver::AssignmentSolution stage2 =
        solver::run_algorithm(hd, opts.algo, opts.problem, sopts);
    rep.solve_ms += ms_since(t0);

    const int pbase = 0;
    for (const FeasibleMatch& e : hp.edges()) out.hypergraph.add_edge(e);
    const int dbase = static_cast<int>(out.hypergraph.edge_count());
    for (const FeasibleMatch& e : hd.edges()) out.hypergraph.add_edge(e);

    solver::AssignmentSolution combined;
    if (stage2.status == solver::SolveStatus::Infeasible) {
      combined.status = solver::SolveStatus::Infeasible;
      combined.note = stage2.note.empty()
                          ? "designated fleet cannot cover the leftover riders"
                          : stage2.note;
    } else {
      for (int id : part.edges) combined.edges.push_back(pbase + id);
      for (int id : stage2.edges) combined.edges.push_back(dbase + id);
      std::sort(combined.edges.begin(), combined.edges.end());
      for (int id : combined.edges) {
        const FeasibleMatch& e = out.hypergraph.edge(id);
        combined.objective += e.weight;
        for (AgentId r : e.riders) combined.assignment[r] = e.driver;
      }
      combined.status = stage2.status;
      combined.note = stage2.note;
    }
    out.solution = std::move(combined);
  }

  rep.status = out.solution.status;

  bool covered = false;
  if (out.solution.status != solver::SolveStatus::Infeasible) {
    std::string why;
    covered = solver::validate_solution(out.hypergraph, out.solution,
                                        out.hypergraph.riders(), &why);
    if (!covered && out.solution.status != solver::SolveStatus::TimeLimit)
      throw Error("solution failed re-validation: " + why);
  }

  if (covered) {
    std::unordered_set<AgentId> designated_ids;
    for (const Driver& d : inst.designated_drivers)
      designated_ids.insert(d.id);

    int designated_edges = 0;
    for (int id : out.solution.edges) {
      const FeasibleMatch& e = out.hypergraph.edge(id);
      const bool designated = designated_ids.count(e.driver) > 0;
      designated_edges += designated ? 1 : 0;
      ++rep.assigned_total;
      if (designated)
        ++rep.assigned_designated;
      else
        ++rep.assigned_personal;
      for (std::size_t j = 0; j < e.riders.size(); ++j) {
        const Rider* r = inst.find_rider(e.riders[j]);
        if (!r || j >= e.service.size()) continue;
        rep.time_saved_total_s +=
            r->transit_baseline - rider_duration(*r, e.service[j]);
      }
    }
    rep.objective = opts.problem == feas::Problem::MinDist
                        ? out.solution.objective
                        : designated_edges;
    rep.time_saved_avg_s =
        rep.riders > 0
            ? static_cast<double>(rep.time_saved_total_s) / rep.riders
            : 0.0;
  }

  rep.total_ms = ms_since(t_start);
  if (opts.stable_timing) {
    rep.enum_ms = 0;
    rep.solve_ms = 0;
    rep.total_ms = 0;
  }
  return out;
}

}  // namespace mtrs::pipeline
