// Command-line front end: generate instances, enumerate feasible matches,
// solve one interval (optionally clustered), sweep intervals, and export
// the integer program. Exit codes: 0 success, 2 no full assignment exists,
// 3 configuration error, 4 I/O failure.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mtrs/clustering.hpp"
#include "mtrs/feasibility.hpp"
#include "mtrs/instance_gen.hpp"
#include "mtrs/json_io.hpp"
#include "mtrs/model.hpp"
#include "mtrs/pipeline.hpp"
#include "mtrs/solvers.hpp"

namespace {

using namespace mtrs;

struct CommonArgs {
  std::string instance_path;
  std::string config_path;
  std::string out_path;
  std::string problem = "mindist";
  std::string algo = "exact";
  std::string format = "csv";
  std::string alloc = "greedy";
  std::string solution_path;
  bool clustered = false;
  bool stable_timing = false;
  double time_limit_s = -1.0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int intervals = 1;
  int threedm_q = 0;
  double threedm_density = 0.5;
  std::int64_t threedm_omega = 3;
};

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty())
    std::cout << text;
  else
    io::write_file(out_path, text);
}

feas::Problem parse_problem(const std::string& s) {
  if (s == "mindist") return feas::Problem::MinDist;
  if (s == "minnum") return feas::Problem::MinNum;
  throw ConfigError("unknown problem \"" + s + "\" (mindist|minnum)");
}

cluster::AllocMode parse_alloc(const std::string& s) {
  if (s == "greedy") return cluster::AllocMode::Greedy;
  if (s == "exact") return cluster::AllocMode::Exact;
  throw ConfigError("unknown allocation mode \"" + s + "\" (greedy|exact)");
}

gen::GenConfig gen_config_from(const CommonArgs& a) {
  gen::GenConfig cfg;
  if (!a.config_path.empty())
    cfg = io::load_gen_config(io::read_file(a.config_path));
  if (a.seed_set) cfg.seed = a.seed;
  const std::vector<std::string> problems = gen::validate_config(cfg);
  if (!problems.empty()) throw ConfigError("bad config: " + problems.front());
  return cfg;
}

cluster::ClusterConfig cluster_config_from(const CommonArgs& a) {
  if (a.config_path.empty()) return cluster::ClusterConfig{};
  return io::load_cluster_config(io::read_file(a.config_path));
}

Instance load_or_generate(const CommonArgs& a) {
  if (!a.instance_path.empty())
    return io::load_instance(io::read_file(a.instance_path));
  const gen::GenConfig cfg = gen_config_from(a);
  return gen::gen_interval_instance(cfg, cfg.seed);
}

int cmd_generate(const CommonArgs& a) {
  if (a.threedm_q > 0) {
    const gen::ThreeDM t = gen::gen_random_threedm(
        a.threedm_q, a.threedm_density, a.threedm_omega,
        a.seed_set ? a.seed : 1);
    emit(a.out_path, io::store_threedm(t));
    return 0;
  }
  const gen::GenConfig cfg = gen_config_from(a);
  const Instance inst = gen::gen_interval_instance(cfg, cfg.seed);
  emit(a.out_path, io::store_instance(inst));
  return 0;
}

int cmd_match(const CommonArgs& a) {
  const Instance inst = load_or_generate(a);
  feas::MatchContext ctx(inst);
  ctx.warm_all();
  const Hypergraph h = feas::enumerate_hypergraph(ctx, parse_problem(a.problem));
  emit(a.out_path, io::store_hypergraph(h));
  return 0;
}

int cmd_export_lp(const CommonArgs& a) {
  const Instance inst = load_or_generate(a);
  feas::MatchContext ctx(inst);
  ctx.warm_all();
  const Hypergraph h = feas::enumerate_hypergraph(ctx, parse_problem(a.problem));
  emit(a.out_path, solver::export_lp(h));
  return 0;
}

int cmd_cluster(const CommonArgs& a) {
  const Instance inst = load_or_generate(a);
  cluster::ClusterSet cs =
      cluster::build_clusters_phase1(inst, cluster_config_from(a));
  cluster::refine_clusters(cs, cluster_config_from(a), inst);
  cluster::allocate_designated(cs, inst, parse_alloc(a.alloc));
  emit(a.out_path, io::store_clusters(cs));
  return 0;
}

pipeline::RunOptions run_options_from(const CommonArgs& a,
                                      const std::string& label) {
  pipeline::RunOptions opts;
  opts.problem = parse_problem(a.problem);
  opts.algo = a.algo;
  opts.clustered = a.clustered;
  opts.cluster_cfg = cluster_config_from(a);
  opts.alloc_mode = parse_alloc(a.alloc);
  opts.time_limit_s = a.time_limit_s;
  opts.stable_timing = a.stable_timing;
  opts.interval_label = label;
  return opts;
}

int report_exit(const std::vector<pipeline::MetricsReport>& rows) {
  for (const pipeline::MetricsReport& r : rows)
    if (r.status == solver::SolveStatus::Infeasible) return 2;
  return 0;
}

int cmd_solve(const CommonArgs& a) {
  const Instance inst = load_or_generate(a);
  const pipeline::RunResult run =
      pipeline::run_interval(inst, run_options_from(a, "0"));
  const std::vector<pipeline::MetricsReport> rows = {run.report};
  emit(a.out_path, a.format == "json" ? pipeline::to_json(rows)
                                      : pipeline::to_csv(rows));
  if (!a.solution_path.empty())
    io::write_file(a.solution_path,
                   io::store_solution(run.hypergraph, run.solution,
                                      parse_problem(a.problem)));
  if (run.solution.status == solver::SolveStatus::Infeasible)
    std::cerr << "infeasible: " << run.solution.note << "\n";
  return report_exit(rows);
}

int cmd_bench(const CommonArgs& a) {
  const gen::GenConfig base = gen_config_from(a);
  std::vector<pipeline::MetricsReport> rows;
  for (int i = 0; i < a.intervals; ++i) {
    gen::GenConfig cfg = base;
    cfg.seed = base.seed + static_cast<std::uint64_t>(i);
    const Instance inst = gen::gen_interval_instance(
        cfg, cfg.seed, static_cast<Seconds>(i) * cfg.interval_len_s);
    const pipeline::RunResult run =
        pipeline::run_interval(inst, run_options_from(a, std::to_string(i)));
    rows.push_back(run.report);
  }
  std::vector<pipeline::MetricsReport> with_total = rows;
  if (rows.size() > 1) with_total.push_back(pipeline::aggregate(rows));
  emit(a.out_path, a.format == "json" ? pipeline::to_json(with_total)
                                      : pipeline::to_csv(with_total));
  return report_exit(rows);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multimodal first/last-mile rideshare matching engine"};
  app.require_subcommand(1);

  CommonArgs a;
  auto add_common = [&](CLI::App* cmd, bool with_instance) {
    if (with_instance)
      cmd->add_option("instance", a.instance_path,
                      "Instance JSON path (generated from --config if omitted)");
    cmd->add_option("--config", a.config_path,
                    "JSON parameter file; generation and clustering keys");
    cmd->add_option("--out", a.out_path, "Output path (stdout if omitted)");
    cmd->add_option("--seed", a.seed, "Generation seed override")
        ->each([&](const std::string&) { a.seed_set = true; });
  };

  CLI::App* generate = app.add_subcommand("generate", "Emit an instance JSON");
  add_common(generate, false);
  generate->add_option("--threedm", a.threedm_q,
                       "Emit a 3-dimensional matching instance of size q");
  generate->add_option("--density", a.threedm_density,
                       "Triple keep probability for --threedm");
  generate->add_option("--omega", a.threedm_omega,
                       "Filler edge weight for --threedm");

  CLI::App* match = app.add_subcommand(
      "match", "Enumerate the feasible-match hypergraph");
  add_common(match, true);
  match->add_option("--problem", a.problem, "mindist|minnum");

  CLI::App* solve = app.add_subcommand("solve", "Solve one interval");
  add_common(solve, true);
  solve->add_option("--problem", a.problem, "mindist|minnum");
  solve->add_option("--algo", a.algo, "exact|greedy|greedy_min_dist|greedy_min_num|ls");
  solve->add_flag("--cluster", a.clustered, "Solve per spatial cluster");
  solve->add_option("--alloc", a.alloc,
                    "Designated-driver allocation: greedy|exact");
  solve->add_option("--time-limit", a.time_limit_s,
                    "Exact-solver wall clock budget, seconds");
  solve->add_flag("--stable-timing", a.stable_timing,
                  "Zero timing columns for reproducible reports");
  solve->add_option("--format", a.format, "csv|json");
  solve->add_option("--solution", a.solution_path,
                    "Also write the solution JSON here");

  CLI::App* bench = app.add_subcommand(
      "bench", "Generate and solve a sweep of intervals");
  add_common(bench, false);
  bench->add_option("--intervals", a.intervals, "Number of intervals")
      ->check(CLI::PositiveNumber);
  bench->add_option("--problem", a.problem, "mindist|minnum");
  bench->add_option("--algo", a.algo, "exact|greedy|greedy_min_dist|greedy_min_num|ls");
  bench->add_flag("--cluster", a.clustered, "Solve per spatial cluster");
  bench->add_option("--alloc", a.alloc,
                    "Designated-driver allocation: greedy|exact");
  bench->add_option("--time-limit", a.time_limit_s,
                    "Exact-solver wall clock budget, seconds");
  bench->add_flag("--stable-timing", a.stable_timing,
                  "Zero timing columns for reproducible reports");
  bench->add_option("--format", a.format, "csv|json");

  CLI::App* lp = app.add_subcommand("export-lp",
                                    "Write the program in CPLEX LP format");
  add_common(lp, true);
  lp->add_option("--problem", a.problem, "mindist|minnum");

  CLI::App* clu = app.add_subcommand("cluster", "Emit the refined clusters");
  add_common(clu, true);
  clu->add_option("--alloc", a.alloc,
                  "Designated-driver allocation: greedy|exact");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 3;
  }

  try {
    if (*generate) return cmd_generate(a);
    if (*match) return cmd_match(a);
    if (*solve) return cmd_solve(a);
    if (*bench) return cmd_bench(a);
    if (*lp) return cmd_export_lp(a);
    if (*clu) return cmd_cluster(a);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 3;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 4;
  } catch (const GenerationExhaustedError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 3;
}
