#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mtrs/clustering.hpp"
#include "mtrs/instance_gen.hpp"
#include "mtrs/model.hpp"
#include "mtrs/solvers.hpp"

namespace mtrs::pipeline {

struct RunOptions {
  feas::Problem problem = feas::Problem::MinDist;
  std::string algo = "exact";  // exact | greedy | ls
  bool clustered = false;
  cluster::ClusterConfig cluster_cfg;
  cluster::AllocMode alloc_mode = cluster::AllocMode::Greedy;
  double time_limit_s = -1.0;
  /// Zeroes the *_ms columns so reports are byte-stable run to run.
  bool stable_timing = false;
  std::string interval_label = "0";
};

struct MetricsReport {
  std::string interval = "0";
  std::string algo;
  bool clustered = false;
  feas::Problem problem = feas::Problem::MinDist;
  solver::SolveStatus status = solver::SolveStatus::Infeasible;
  std::int64_t objective = 0;
  int assigned_total = 0;
  int assigned_personal = 0;
  int assigned_designated = 0;
  int riders = 0;  // denominator of the average below; not a CSV column
  Seconds time_saved_total_s = 0;
  double time_saved_avg_s = 0.0;  // over all riders of the instance
  std::int64_t enum_ms = 0;
  std::int64_t solve_ms = 0;
  std::int64_t total_ms = 0;
};

inline constexpr const char* kCsvHeader =
    "interval,algo,clustered,problem,objective,assigned_total,"
    "assigned_personal,assigned_designated,time_saved_total_s,"
    "time_saved_avg_s,enum_ms,solve_ms,total_ms";

std::string csv_row(const MetricsReport& r);
std::string to_csv(const std::vector<MetricsReport>& rows);
std::string to_json(const std::vector<MetricsReport>& rows);

/// Aggregate over per-interval rows: sums, with the average recomputed.
MetricsReport aggregate(const std::vector<MetricsReport>& rows);

struct RunResult {
  MetricsReport report;
  solver::AssignmentSolution solution;
  Hypergraph hypergraph;  // graph the solution's edge ids refer to
};

/// One interval end to end: enumerate (optionally per cluster), solve,
/// re-validate, and measure. Distance minimization uses all drivers in one
/// stage; fleet minimization first saturates personal drivers, then covers
/// the remaining riders with designated ones, and its objective counts the
/// designated edges. Throws Error subtypes on misuse; infeasibility is
/// reported in the solution status instead.
RunResult run_interval(const Instance& inst, const RunOptions& opts);

}  // namespace mtrs::pipeline
