#include "mtrs/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

namespace mtrs::solver {

namespace {

std::map<AgentId, AgentId> build_assignment(const Hypergraph& h,
                                            const std::vector<int>& edges) {
  std::map<AgentId, AgentId> out;
  for (int id : edges)
    for (AgentId r : h.edge(id).riders) out[r] = h.edge(id).driver;
  return out;
}

AssignmentSolution make_solution(const Hypergraph& h, SolveStatus status,
                                 std::vector<int> edges) {
  AssignmentSolution s;
  s.status = status;
  std::sort(edges.begin(), edges.end());
  s.edges = std::move(edges);
  s.objective = 0;
  for (int id : s.edges) s.objective += h.edge(id).weight;
  s.assignment = build_assignment(h, s.edges);
  return s;
}

struct RiderIndex {
  std::vector<AgentId> ids;  // ascending
  int of(AgentId id) const {
    return static_cast<int>(
        std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
  }
};

// Greedy sweep shared by both heuristics: repeatedly take the best live
// edge, then drop every edge touching its driver or riders. `better` must
// be a strict ordering; scanning ids ascending breaks ties by lowest id.
template <typename Better>
std::optional<std::vector<int>> greedy_sweep(const Hypergraph& h,
                                             Better better) {
  const std::size_t n_riders = h.riders().size();
  RiderIndex ri{h.riders()};
  std::vector<char> edge_dead(h.edge_count(), 0);
  std::vector<char> rider_covered(n_riders, 0);
  std::size_t covered = 0;
  std::vector<int> chosen;

  while (covered < n_riders) {
    int best = -1;
    for (int id = 0; id < static_cast<int>(h.edge_count()); ++id) {
      if (edge_dead[id]) continue;
      if (best == -1 || better(id, best)) best = id;
    }
    if (best == -1) return std::nullopt;
    chosen.push_back(best);
    const FeasibleMatch& e = h.edge(best);
    for (int other : h.edges_of_driver(e.driver)) edge_dead[other] = 1;
    for (AgentId r : e.riders) {
      rider_covered[ri.of(r)] = 1;
      ++covered;
      for (int other : h.edges_of_rider(r)) edge_dead[other] = 1;
    }
  }
  return chosen;
}

}  // namespace

AssignmentSolution greedy_min_dist(const Hypergraph& h) {
  if (h.riders().empty()) return make_solution(h, SolveStatus::Feasible, {});

  auto by_weight = [&](int a, int b) {
    return h.edge(a).weight < h.edge(b).weight;
  };
  // weight per rider served; cross-multiplied to stay exact
  auto by_ratio = [&](int a, int b) {
    return h.edge(a).weight * static_cast<std::int64_t>(h.edge(b).riders.size()) <
           h.edge(b).weight * static_cast<std::int64_t>(h.edge(a).riders.size());
  };

  std::optional<std::vector<int>> m1 = greedy_sweep(h, by_weight);
  std::optional<std::vector<int>> m2 = greedy_sweep(h, by_ratio);
  if (!m1 && !m2) return make_solution(h, SolveStatus::Infeasible, {});

  auto total = [&](const std::vector<int>& edges) {
    std::int64_t w = 0;
    for (int id : edges) w += h.edge(id).weight;
    return w;
  };
  std::vector<int> pick;
  if (m1 && (!m2 || total(*m1) <= total(*m2)))
    pick = *m1;
  else
    pick = *m2;
  return make_solution(h, SolveStatus::Feasible, std::move(pick));
}

AssignmentSolution greedy_min_num(const Hypergraph& h) {
  if (h.riders().empty()) return make_solution(h, SolveStatus::Feasible, {});
  auto better = [&](int a, int b) {
    if (h.edge(a).riders.size() != h.edge(b).riders.size())
      return h.edge(a).riders.size() > h.edge(b).riders.size();
    return h.edge(a).weight < h.edge(b).weight;
  };
  std::optional<std::vector<int>> m = greedy_sweep(h, better);
  if (!m) return make_solution(h, SolveStatus::Infeasible, {});
  return make_solution(h, SolveStatus::Feasible, std::move(*m));
}

PartialAssignment assign_personal_maximal(const Hypergraph& h) {
  PartialAssignment out;
  std::vector<char> edge_dead(h.edge_count(), 0);
  std::set<AgentId> served;

  auto better = [&](int a, int b) {
    if (h.edge(a).riders.size() != h.edge(b).riders.size())
      return h.edge(a).riders.size() > h.edge(b).riders.size();
    return h.edge(a).weight < h.edge(b).weight;
  };
  for (;;) {
    int best = -1;
    for (int id = 0; id < static_cast<int>(h.edge_count()); ++id) {
      if (edge_dead[id]) continue;
      if (best == -1 || better(id, best)) best = id;
    }
    if (best == -1) break;
    out.edges.push_back(best);
    const FeasibleMatch& e = h.edge(best);
    for (int other : h.edges_of_driver(e.driver)) edge_dead[other] = 1;
    for (AgentId r : e.riders) {
      served.insert(r);
      for (int other : h.edges_of_rider(r)) edge_dead[other] = 1;
    }
  }

  out.served.assign(served.begin(), served.end());
  for (AgentId r : h.riders())
    if (!served.count(r)) out.unserved.push_back(r);
  return out;
}

namespace {

/// Branch-and-bound over one connected component of the hypergraph.  Edge
/// ids stay global; rider and driver indices are local to the component.
struct ExactSearch {
  const Hypergraph& h;
  std::vector<int> edges;  // component edge ids, ascending
  std::size_t n_riders;
  std::size_t n_drivers;
  std::vector<int> edge_driver;               // per edge: dense driver index
  std::vector<std::vector<int>> edge_riders;  // per edge: rider indices
  std::vector<std::vector<int>> incident;     // per rider: incident edge ids
  std::vector<std::vector<int>> by_driver;    // per dense driver: edge ids
  std::vector<double> u;                      // rider price, frozen after root
  std::vector<double> cbar;                   // edge weight less riders' prices
  std::vector<int> active_drivers;            // drivers with a cbar < 0 edge

  std::vector<char> rider_covered;
  std::vector<char> driver_used;
  std::vector<int> blocked;  // per edge: covered riders + used-driver marks
  std::vector<int> avail;    // per rider: incident edges with blocked == 0
  std::vector<double> term_scratch;
  double open_price_sum = 0.0;
  std::vector<int> current;
  std::int64_t current_cost = 0;

  // Node-local price state: uc is re-tuned against the residual problem as
  // the search descends and restored on backtrack; u stays at the root
  // prices that cbar and the incremental fast bound are frozen against.
  std::vector<double> uc;
  std::vector<std::vector<double>> u_stack;
  int depth = 0;
  std::vector<double> gres;
  std::vector<std::pair<double, int>> pick_scratch;

  bool have_best = false;
  std::int64_t best_cost = 0;
  std::vector<int> best_edges;
  double root_lb = -std::numeric_limits<double>::infinity();

  std::chrono::steady_clock::time_point deadline;
  bool use_deadline = false;
  bool expired = false;
  std::int64_t node_cap = -1;  // probe budget; < 0 means unlimited
  bool capped = false;
  std::int64_t node_budget_check = 0;

  ExactSearch(const Hypergraph& hg, std::vector<int> edge_ids,
              const std::vector<AgentId>& comp_riders,
              const std::vector<AgentId>& comp_drivers)
      : h(hg),
        edges(std::move(edge_ids)),
        n_riders(comp_riders.size()),
        n_drivers(comp_drivers.size()) {
    std::unordered_map<AgentId, int> rider_idx, driver_idx;
    for (AgentId r : comp_riders)
      rider_idx.emplace(r, static_cast<int>(rider_idx.size()));
    for (AgentId d : comp_drivers)
      driver_idx.emplace(d, static_cast<int>(driver_idx.size()));

    edge_driver.assign(h.edge_count(), -1);
    edge_riders.resize(h.edge_count());
    by_driver.resize(n_drivers);
    incident.resize(n_riders);
    for (int id : edges) {
      const FeasibleMatch& e = h.edge(id);
      edge_driver[id] = driver_idx.at(e.driver);
      for (AgentId r : e.riders) {
        const int lr = rider_idx.at(r);
        edge_riders[id].push_back(lr);
        incident[lr].push_back(id);
      }
      by_driver[edge_driver[id]].push_back(id);
    }
    rider_covered.assign(n_riders, 0);
    driver_used.assign(n_drivers, 0);

    // Start every rider's price at its cheapest per-rider weight share.
    u.assign(n_riders, 0.0);
    for (std::size_t r = 0; r < n_riders; ++r) {
      double mn = 0.0;
      for (std::size_t k = 0; k < incident[r].size(); ++k) {
        const FeasibleMatch& e = h.edge(incident[r][k]);
        const double s = static_cast<double>(e.weight) /
                         static_cast<double>(e.riders.size());
        mn = k == 0 ? s : std::min(mn, s);
      }
      u[r] = mn;
    }
  }

  bool out_of_time() {
    ++node_budget_check;
    if (node_cap >= 0 && node_budget_check > node_cap) capped = true;
    if (!use_deadline) return capped;
    if (node_budget_check % 1024 == 0 &&
        std::chrono::steady_clock::now() >= deadline)
      expired = true;
    return expired || capped;
  }

  void offer_incumbent(std::int64_t cost, const std::vector<int>& edges) {
    if (!have_best || cost < best_cost) {
      have_best = true;
      best_cost = cost;
      best_edges = edges;
    }
  }

  double reduced_cost(int id) const {
    double c = static_cast<double>(h.edge(id).weight);
    for (int r : edge_riders[id]) c -= u[r];
    return c;
  }

  /// Subgradient ascent on the rider prices against the incumbent value.
  /// Deterministic: fixed iteration budget, no clock, no randomness. Steps
  /// aim a little above the best dual value seen, not at the incumbent,
  /// which keeps them sane while the primal-dual gap is still wide. A zero
  /// subgradient means the driver picks form an exact cover; that cover is
  /// both a new incumbent and a proof that the component is done.
  void tune_prices(int iters) {
    if (!have_best) return;
    double ub = static_cast<double>(best_cost);
    std::vector<double> best_u = u;
    double best_l = root_lb;
    double theta = 1.0;
    int stale = 0;
    const bool trace = std::getenv("MTRS_EXACT_DEBUG") != nullptr;
    std::vector<double> g(n_riders);
    std::vector<std::pair<double, int>> picks;
    for (int iter = 0; iter < iters && theta > 1e-4; ++iter) {
      if (trace && iter % 500 == 0)
        std::fprintf(stderr, "  subgrad iter=%d best_l=%.2f theta=%.4f\n",
                     iter, best_l, theta);
      double l = 0.0;
      for (std::size_t r = 0; r < n_riders; ++r) {
        l += u[r];
        g[r] = 1.0;
      }
      picks.clear();
      for (std::size_t d = 0; d < n_drivers; ++d) {
        double best = 0.0;
        int pick = -1;
        for (int id : by_driver[d]) {
          const double c = reduced_cost(id);
          if (c < best) {
            best = c;
            pick = id;
          }
        }
        if (pick != -1) picks.emplace_back(best, pick);
      }
      // A completion dispatches at most one edge per rider, so only the
      // |riders| cheapest driver minima can ever materialise.
      if (picks.size() > n_riders) {
        std::sort(picks.begin(), picks.end());
        picks.resize(n_riders);
      }
      bool integral = true;
      for (const auto& [c, pick] : picks) {
        l += c;
        for (int r : edge_riders[pick]) g[r] -= 1.0;
      }
      for (double gr : g)
        if (gr != 0.0) integral = false;
      if (integral) {
        std::int64_t cost = 0;
        std::vector<int> sol;
        for (const auto& [c, pick] : picks) {
          cost += h.edge(pick).weight;
          sol.push_back(pick);
        }
        offer_incumbent(cost, sol);
        ub = static_cast<double>(best_cost);
      }
      if (l > best_l) {
        best_l = l;
        best_u = u;
        stale = 0;
      } else if (++stale >= 30) {
        theta *= 0.5;
        stale = 0;
      }
      if (best_l >= ub - 1.0 + 1e-9) break;  // incumbent already proven
      double norm = 0.0;
      for (double gr : g) norm += gr * gr;
      if (norm == 0.0) break;
      const double target =
          std::min(ub, best_l + std::max(1.0, 0.05 * (ub - best_l)));
      const double step = theta * std::max(target - l, 1.0) / norm;
      for (std::size_t r = 0; r < n_riders; ++r) u[r] += step * g[r];
    }
    u = best_u;
    root_lb = best_l;
  }

  /// Locks the tuned prices into per-edge reduced costs, drops edges no
  /// improving solution can use (any solution through e costs at least
  /// root_lb + cbar(e)), rebuilds the search orders sorted by reduced cost,
  /// and initialises the incremental availability counters.  Safe to call
  /// again after the incumbent improves; the edge set only shrinks.
  void freeze() {
    cbar.assign(h.edge_count(), 0.0);
    for (int id : edges) cbar[id] = reduced_cost(id);
    if (have_best && std::isfinite(root_lb)) {
      const double keep =
          static_cast<double>(best_cost) - 1.0 + 1e-6 - root_lb;
      std::erase_if(edges, [&](int id) { return cbar[id] > keep; });
    }
    const auto by_cbar = [&](int a, int b) {
      if (cbar[a] != cbar[b]) return cbar[a] < cbar[b];
      return a < b;
    };
    for (std::vector<int>& v : incident) v.clear();
    for (std::vector<int>& v : by_driver) v.clear();
    for (int id : edges) {
      for (int r : edge_riders[id]) incident[r].push_back(id);
      by_driver[edge_driver[id]].push_back(id);
    }
    for (std::vector<int>& v : incident) std::sort(v.begin(), v.end(), by_cbar);
    active_drivers.clear();
    for (std::size_t d = 0; d < n_drivers; ++d) {
      std::vector<int>& v = by_driver[d];
      std::sort(v.begin(), v.end(), by_cbar);
      if (!v.empty() && cbar[v.front()] < 0.0)
        active_drivers.push_back(static_cast<int>(d));
    }
    blocked.assign(h.edge_count(), 0);
    avail.resize(n_riders);
    open_price_sum = 0.0;
    for (std::size_t r = 0; r < n_riders; ++r) {
      avail[r] = static_cast<int>(incident[r].size());
      open_price_sum += u[r];
    }
    uc = u;
    gres.assign(n_riders, 0.0);
  }

  void bump(int id) {
    if (blocked[id]++ == 0)
      for (int r : edge_riders[id]) --avail[r];
  }

  void unbump(int id) {
    if (--blocked[id] == 0)
      for (int r : edge_riders[id]) ++avail[r];
  }

  void apply(int id) {
    current.push_back(id);
    current_cost += h.edge(id).weight;
    const int d = edge_driver[id];
    driver_used[d] = 1;
    for (int e : by_driver[d]) bump(e);
    for (int r : edge_riders[id]) {
      rider_covered[r] = 1;
      open_price_sum -= u[r];
      for (int e : incident[r]) bump(e);
    }
  }

  void undo(int id) {
    const int d = edge_driver[id];
    for (int r : edge_riders[id]) {
      rider_covered[r] = 0;
      open_price_sum += u[r];
      for (int e : incident[r]) unbump(e);
    }
    for (int e : by_driver[d]) unbump(e);
    driver_used[d] = 0;
    current_cost -= h.edge(id).weight;
    current.pop_back();
  }

  /// Prices the cover constraints: with the driver-disjointness kept exact,
  /// sum of prices of the open riders plus the unused drivers' best negative
  /// reduced costs bounds the remaining cost from below for any price
  /// vector, so the root-tuned prices stay valid down the tree.  An
  /// unblocked edge has every rider open, so its frozen reduced cost is the
  /// right one, and the per-driver cbar order makes the first unblocked
  /// negative entry that driver's minimum.  A completion has at most one
  /// edge per open rider, so only the open_cnt cheapest terms count.
  double residual_bound(int open_cnt) {
    double lb = open_price_sum;
    term_scratch.clear();
    for (int d : active_drivers) {
      if (driver_used[d]) continue;
      for (int id : by_driver[d]) {
        if (cbar[id] >= 0.0) break;
        if (blocked[id] == 0) {
          term_scratch.push_back(cbar[id]);
          break;
        }
      }
    }
    if (term_scratch.size() > static_cast<std::size_t>(open_cnt))
      std::nth_element(term_scratch.begin(), term_scratch.begin() + open_cnt,
                       term_scratch.end());
    const std::size_t take =
        std::min(term_scratch.size(), static_cast<std::size_t>(open_cnt));
    for (std::size_t i = 0; i < take; ++i) lb += term_scratch[i];
    return lb;
  }

  /// Short subgradient burst on the residual problem, continuing from the
  /// prices inherited from the parent node.  Any price vector bounds the
  /// completion cost from below, so every intermediate value may prune.
  /// When the relaxation picks cover each open rider exactly once they form
  /// a feasible completion and are harvested as an incumbent.
  double reprice(int open_cnt, double budget) {
    const int iters = 8;
    double best_l = -std::numeric_limits<double>::infinity();
    double theta = 0.7;
    for (int it = 0; it < iters; ++it) {
      double l = 0.0;
      for (std::size_t r = 0; r < n_riders; ++r) {
        if (rider_covered[r]) continue;
        l += uc[r];
        gres[r] = 1.0;
      }
      pick_scratch.clear();
      for (std::size_t d = 0; d < n_drivers; ++d) {
        if (driver_used[d]) continue;
        double best = 0.0;
        int pick = -1;
        for (int id : by_driver[d]) {
          if (blocked[id] != 0) continue;
          double c = static_cast<double>(h.edge(id).weight);
          for (int r : edge_riders[id]) c -= uc[r];
          if (c < best) {
            best = c;
            pick = id;
          }
        }
        if (pick != -1) pick_scratch.emplace_back(best, pick);
      }
      if (pick_scratch.size() > static_cast<std::size_t>(open_cnt)) {
        std::sort(pick_scratch.begin(), pick_scratch.end());
        pick_scratch.resize(open_cnt);
      }
      for (const auto& [c, pick] : pick_scratch) {
        l += c;
        for (int r : edge_riders[pick]) gres[r] -= 1.0;
      }
      best_l = std::max(best_l, l);
      if (best_l > budget) return best_l;
      double norm = 0.0;
      bool integral = true;
      for (std::size_t r = 0; r < n_riders; ++r) {
        if (rider_covered[r]) continue;
        norm += gres[r] * gres[r];
        if (gres[r] != 0.0) integral = false;
      }
      if (integral) {
        // Disjoint picks covering every open rider: a true completion.
        std::int64_t cost = current_cost;
        std::vector<int> sol = current;
        for (const auto& [c, pick] : pick_scratch) {
          cost += h.edge(pick).weight;
          sol.push_back(pick);
        }
        offer_incumbent(cost, sol);
        return best_l;
      }
      if (it + 1 == iters) break;
      const double step =
          theta * std::max(budget + 1.0 - l, 1.0) / norm;
      for (std::size_t r = 0; r < n_riders; ++r)
        if (!rider_covered[r]) uc[r] += step * gres[r];
      theta *= 0.75;
    }
    return best_l;
  }

  // Fail-first: branch on the open rider with the fewest usable edges; a
  // rider with none cuts the node outright.  Edges are tried cheapest
  // reduced cost first, so the leftmost dive tracks the priced relaxation.
  void dfs() {
    if (expired || capped || out_of_time()) return;

    int branch = -1;
    int branch_avail = std::numeric_limits<int>::max();
    int open_cnt = 0;
    for (std::size_t r = 0; r < n_riders; ++r) {
      if (rider_covered[r]) continue;
      ++open_cnt;
      if (avail[r] == 0) return;
      if (avail[r] < branch_avail) {
        branch_avail = avail[r];
        branch = static_cast<int>(r);
      }
    }
    if (open_cnt == 0) {
      offer_incumbent(current_cost, current);
      return;
    }
    bool price_pushed = false;
    if (have_best) {
      // Improving on the incumbent needs residual cost at most the gap
      // minus one, costs being integral; the margin absorbs float error.
      const double gap =
          static_cast<double>(best_cost - current_cost) - 1.0 + 1e-6;
      if (residual_bound(open_cnt) > gap) return;
      if (open_cnt >= 3) {
        if (static_cast<std::size_t>(depth) >= u_stack.size())
          u_stack.resize(depth + 1);
        u_stack[depth] = uc;
        price_pushed = true;
        const double lb = reprice(open_cnt, gap);
        // reprice may have harvested a better incumbent; re-read the gap.
        if (lb > static_cast<double>(best_cost - current_cost) - 1.0 + 1e-6) {
          uc = u_stack[depth];
          return;
        }
      }
    }

    for (int id : incident[branch]) {
      if (blocked[id] != 0) continue;
      apply(id);
      ++depth;
      dfs();
      --depth;
      undo(id);
      if (expired || capped) break;
    }
    if (price_pushed) uc = u_stack[depth];
  }
};

/// Ruin-and-recreate pass over the incumbent: slide a window over the
/// incumbent edges, free those edges' riders plus every driver the rest of
/// the incumbent leaves idle, and re-dispatch the fragment exactly.  A
/// strict improvement splices in and the sweep restarts, so the pass stops
/// at a window-local optimum (or the deadline).  Everything is
/// deterministic: fixed window size, fixed node caps, no randomness.
void polish_incumbent(ExactSearch& search,
                      const std::vector<AgentId>& comp_drivers) {
  if (!search.have_best) return;
  const Hypergraph& h = search.h;
  constexpr std::size_t kWindow = 5;
  for (int sweep = 0; sweep < 8; ++sweep) {
    bool improved = false;
    std::vector<int> inc = search.best_edges;
    std::sort(inc.begin(), inc.end());
    const std::size_t m = inc.size();
    if (m < 2) return;
    for (std::size_t start = 0; start < m && !improved; ++start) {
      if (search.expired) return;
      std::vector<char> out(m, 0);
      for (std::size_t j = 0; j < std::min(kWindow, m); ++j)
        out[(start + j) % m] = 1;
      std::vector<int> removed, kept;
      for (std::size_t i = 0; i < m; ++i)
        (out[i] ? removed : kept).push_back(inc[i]);
      std::int64_t removed_cost = 0;
      std::set<AgentId> freed;
      for (int id : removed) {
        removed_cost += h.edge(id).weight;
        for (AgentId r : h.edge(id).riders) freed.insert(r);
      }
      std::set<AgentId> busy;
      for (int id : kept) busy.insert(h.edge(id).driver);
      std::vector<AgentId> riders(freed.begin(), freed.end());
      std::vector<AgentId> drivers;
      for (AgentId d : comp_drivers)
        if (!busy.count(d)) drivers.push_back(d);
      std::vector<int> sub_edges;
      for (int id : search.edges) {
        const FeasibleMatch& e = h.edge(id);
        if (busy.count(e.driver)) continue;
        const bool inside =
            std::all_of(e.riders.begin(), e.riders.end(),
                        [&](AgentId r) { return freed.count(r) != 0; });
        if (inside) sub_edges.push_back(id);
      }
      ExactSearch sub(h, std::move(sub_edges), riders, drivers);
      sub.use_deadline = search.use_deadline;
      sub.deadline = search.deadline;
      sub.offer_incumbent(removed_cost, removed);
      sub.tune_prices(200);
      sub.freeze();
      sub.node_cap = 20000;
      sub.dfs();
      search.node_budget_check += sub.node_budget_check;
      if (sub.expired) {
        search.expired = true;
        return;
      }
      if (sub.best_cost < removed_cost) {
        std::vector<int> next = kept;
        next.insert(next.end(), sub.best_edges.begin(), sub.best_edges.end());
        std::int64_t cost = 0;
        for (int id : next) cost += h.edge(id).weight;
        search.offer_incumbent(cost, next);
        improved = true;
      }
    }
    if (!improved) return;
  }
}

}  // namespace

AssignmentSolution solve_exact(const Hypergraph& h, const SolveOptions& opts) {
  for (AgentId r : h.riders())
    if (h.edges_of_rider(r).empty()) {
      AssignmentSolution s = make_solution(h, SolveStatus::Infeasible, {});
      s.note = "rider " + std::to_string(r) + " has no feasible match";
      return s;
    }
  if (h.riders().empty()) return make_solution(h, SolveStatus::Optimal, {});

  const bool use_deadline = opts.time_limit_s >= 0.0;
  const auto deadline =
      std::chrono::steady_clock::now() +
      std::chrono::microseconds(static_cast<std::int64_t>(
          use_deadline ? opts.time_limit_s * 1e6 : 0.0));

  // The hypergraph usually splits into independent pieces (first and last
  // mile never share edges, and zones separate further); solving the
  // connected components one by one keeps the search trees shallow.
  const std::size_t n_riders = h.riders().size();
  const RiderIndex ri{h.riders()};
  std::unordered_map<AgentId, int> driver_idx;
  for (AgentId d : h.drivers())
    driver_idx.emplace(d, static_cast<int>(driver_idx.size()));
  std::vector<int> parent(n_riders + driver_idx.size());
  std::iota(parent.begin(), parent.end(), 0);
  const auto find = [&parent](int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (const FeasibleMatch& e : h.edges()) {
    const int dn = static_cast<int>(n_riders) + driver_idx.at(e.driver);
    for (AgentId r : e.riders) {
      const int a = find(dn), b = find(ri.of(r));
      if (a != b) parent[b] = a;
    }
  }

  struct Component {
    std::vector<AgentId> riders, drivers;
    std::vector<int> edges;
  };
  std::vector<Component> comps;
  std::unordered_map<int, int> comp_of_root;
  for (std::size_t r = 0; r < n_riders; ++r) {
    const auto [it, fresh] =
        comp_of_root.emplace(find(static_cast<int>(r)),
                             static_cast<int>(comps.size()));
    if (fresh) comps.emplace_back();
    comps[it->second].riders.push_back(h.riders()[r]);
  }
  std::vector<int> comp_of_edge(h.edge_count(), -1);
  for (AgentId d : h.drivers()) {
    const auto it =
        comp_of_root.find(find(static_cast<int>(n_riders) + driver_idx.at(d)));
    if (it != comp_of_root.end()) comps[it->second].drivers.push_back(d);
  }
  for (std::size_t i = 0; i < h.edge_count(); ++i) {
    const int root =
        find(static_cast<int>(n_riders) + driver_idx.at(h.edges()[i].driver));
    comp_of_edge[i] = comp_of_root.at(root);
    comps[comp_of_edge[i]].edges.push_back(static_cast<int>(i));
  }

  // Feasible warm starts tighten the bound from the first node on; a full
  // assignment restricted to a component covers exactly its riders.
  const AssignmentSolution seed_dist = greedy_min_dist(h);
  const AssignmentSolution seed_num = greedy_min_num(h);

  const bool debug = std::getenv("MTRS_EXACT_DEBUG") != nullptr;
  std::vector<int> chosen;
  bool expired = false;
  std::int64_t nodes = 0;
  for (std::size_t c = 0; c < comps.size(); ++c) {
    ExactSearch search(h, std::move(comps[c].edges), comps[c].riders,
                       comps[c].drivers);
    search.use_deadline = use_deadline;
    search.deadline = deadline;
    for (const AssignmentSolution* seed : {&seed_dist, &seed_num}) {
      if (seed->status != SolveStatus::Feasible) continue;
      std::vector<int> sub;
      std::int64_t cost = 0;
      for (int id : seed->edges)
        if (comp_of_edge[id] == static_cast<int>(c)) {
          sub.push_back(id);
          cost += h.edge(id).weight;
        }
      search.offer_incumbent(cost, sub);
    }
    if (!expired) {
      search.tune_prices(std::min<int>(
          4000, 800 + 60 * static_cast<int>(search.n_riders)));
      search.freeze();
      if (debug)
        std::fprintf(
            stderr, "exact: comp=%zu riders=%zu edges=%zu incumbent=%lld lb=%.2f\n",
            c, search.n_riders, search.edges.size(),
            search.have_best ? (long long)search.best_cost : -1LL,
            search.residual_bound(static_cast<int>(search.n_riders)));
      // Primal probe: a node-capped pass whose per-node repricing keeps
      // harvesting relaxation solutions; it usually lands within a percent
      // of the optimum long before a full proof could.  The improved
      // incumbent then lets freeze() thin the edge set for the real proof.
      search.capped = false;
      search.node_cap =
          std::max<std::int64_t>(50000, 6000 * static_cast<std::int64_t>(
                                            search.n_riders));
      search.dfs();
      if (search.capped && !search.expired) {
        const std::size_t before = search.edges.size();
        search.tune_prices(600);
        search.freeze();
        polish_incumbent(search, comps[c].drivers);
        search.tune_prices(600);
        search.freeze();
        if (debug)
          std::fprintf(stderr,
                       "exact: comp=%zu refixed edges=%zu->%zu incumbent=%lld lb=%.2f\n",
                       c, before, search.edges.size(),
                       (long long)search.best_cost, search.root_lb);
        search.capped = false;
        search.node_cap = -1;
        if (!search.expired) search.dfs();
      }
      nodes += search.node_budget_check;
      if (search.expired) expired = true;
      if (debug)
        std::fprintf(stderr, "exact: comp=%zu nodes=%lld best=%lld%s\n", c,
                     (long long)search.node_budget_check,
                     search.have_best ? (long long)search.best_cost : -1LL,
                     search.expired ? " (expired)" : "");
    }
    if (!search.have_best) {
      if (expired) {
        AssignmentSolution s = make_solution(h, SolveStatus::TimeLimit, {});
        s.note = "time limit hit before any incumbent";
        return s;
      }
      return make_solution(h, SolveStatus::Infeasible, {});
    }
    chosen.insert(chosen.end(), search.best_edges.begin(),
                  search.best_edges.end());
  }
  if (debug) std::fprintf(stderr, "exact: total nodes=%lld\n", (long long)nodes);
  std::sort(chosen.begin(), chosen.end());
  return make_solution(
      h, expired ? SolveStatus::TimeLimit : SolveStatus::Optimal, chosen);
}

namespace {

struct BruteSearch {
  const Hypergraph& h;
  RiderIndex ri;
  std::vector<char> rider_covered;
  std::set<AgentId> drivers_used;
  std::vector<int> current;
  std::int64_t current_cost = 0;
  bool have_best = false;
  std::int64_t best_cost = 0;
  std::vector<int> best_edges;

  explicit BruteSearch(const Hypergraph& hg) : h(hg), ri{hg.riders()} {
    rider_covered.assign(h.riders().size(), 0);
  }

  void dfs(std::size_t cursor) {
    while (cursor < h.riders().size() && rider_covered[cursor]) ++cursor;
    if (cursor == h.riders().size()) {
      if (!have_best || current_cost < best_cost) {
        have_best = true;
        best_cost = current_cost;
        best_edges = current;
      }
      return;
    }
    for (int id : h.edges_of_rider(h.riders()[cursor])) {
      const FeasibleMatch& e = h.edge(id);
      if (drivers_used.count(e.driver)) continue;
      bool clash = false;
      for (AgentId r : e.riders)
        if (rider_covered[ri.of(r)]) {
          clash = true;
          break;
        }
      if (clash) continue;
      current.push_back(id);
      current_cost += e.weight;
      drivers_used.insert(e.driver);
      for (AgentId r : e.riders) rider_covered[ri.of(r)] = 1;
      dfs(cursor);
      for (AgentId r : e.riders) rider_covered[ri.of(r)] = 0;
      drivers_used.erase(e.driver);
      current_cost -= e.weight;
      current.pop_back();
    }
  }
};

}  // namespace

AssignmentSolution brute_force_optimal(const Hypergraph& h) {
  if (h.riders().empty()) return make_solution(h, SolveStatus::Optimal, {});
  BruteSearch search(h);
  search.dfs(0);
  if (!search.have_best) return make_solution(h, SolveStatus::Infeasible, {});
  return make_solution(h, SolveStatus::Optimal, search.best_edges);
}

namespace {

struct MatchingState {
  std::set<int> edges;  // ids in the current solution

  std::vector<int> sorted() const {
    return std::vector<int>(edges.begin(), edges.end());
  }
};

// Edges of the solution whose removal set, if `added` were applied, keeps
// all riders covered and edges disjoint, with strictly fewer drivers.
bool apply_if_improving(const Hypergraph& h, MatchingState& m,
                        const std::vector<int>& removed,
                        const std::vector<int>& added) {
  std::set<AgentId> removed_riders, added_riders;
  for (int id : removed)
    for (AgentId r : h.edge(id).riders) removed_riders.insert(r);
  for (int id : added)
    for (AgentId r : h.edge(id).riders) added_riders.insert(r);
  if (removed_riders != added_riders) return false;
  if (added_riders.size() !=
      [&] {
        std::size_t n = 0;
        for (int id : added) n += h.edge(id).riders.size();
        return n;
      }())
    return false;

  std::set<AgentId> added_drivers;
  for (int id : added)
    if (!added_drivers.insert(h.edge(id).driver).second) return false;
  for (int id : m.edges) {
    if (std::find(removed.begin(), removed.end(), id) != removed.end())
      continue;
    if (added_drivers.count(h.edge(id).driver)) return false;
    for (AgentId r : h.edge(id).riders)
      if (added_riders.count(r)) return false;
  }
  if (added.size() >= removed.size()) return false;  // must retire a driver

  for (int id : removed) m.edges.erase(id);
  for (int id : added) m.edges.insert(id);
  return true;
}

}  // namespace

AssignmentSolution local_search_ls(const Hypergraph& h, LsTrace* trace) {
  // Step 1: maximum matching over the single-rider edges.
  const std::vector<AgentId>& riders = h.riders();
  const std::vector<AgentId>& drivers = h.drivers();
  std::unordered_map<AgentId, int> didx;
  for (std::size_t i = 0; i < drivers.size(); ++i)
    didx[drivers[i]] = static_cast<int>(i);

  // (driver idx, rider idx) -> lowest singleton edge id
  std::map<std::pair<int, int>, int> pair_edge;
  std::vector<std::vector<int>> adj(riders.size());
  RiderIndex ri{riders};
  for (int id = 0; id < static_cast<int>(h.edge_count()); ++id) {
    const FeasibleMatch& e = h.edge(id);
    if (e.riders.size() != 1) continue;
    int d = didx.at(e.driver);
    int r = ri.of(e.riders[0]);
    auto key = std::make_pair(d, r);
    if (!pair_edge.count(key)) {
      pair_edge[key] = id;
      adj[r].push_back(d);
    }
  }
  for (auto& a : adj) std::sort(a.begin(), a.end());

  std::vector<int> match_driver(drivers.size(), -1);
  std::vector<char> visited;
  std::function<bool(int)> try_rider = [&](int r) -> bool {
    for (int d : adj[r]) {
      if (visited[d]) continue;
      visited[d] = 1;
      if (match_driver[d] == -1 || try_rider(match_driver[d])) {
        match_driver[d] = r;
        return true;
      }
    }
    return false;
  };
  int matched = 0;
  for (std::size_t r = 0; r < riders.size(); ++r) {
    visited.assign(drivers.size(), 0);
    if (try_rider(static_cast<int>(r))) ++matched;
  }
  if (matched != static_cast<int>(riders.size())) {
    AssignmentSolution s = make_solution(h, SolveStatus::Infeasible, {});
    s.note = "single-rider matching cannot cover every rider";
    return s;
  }

  MatchingState m;
  for (std::size_t d = 0; d < drivers.size(); ++d)
    if (match_driver[d] != -1)
      m.edges.insert(
          pair_edge.at({static_cast<int>(d), match_driver[d]}));

  if (trace) {
    trace->initial_drivers = static_cast<int>(m.edges.size());
    trace->improvements = 0;
    trace->driver_counts = {trace->initial_drivers};
  }

  // Step 2: first-improvement scan over the singleton edges of the solution.
  auto union_sorted = [](std::vector<AgentId> a,
                         const std::vector<AgentId>& b) {
    a.insert(a.end(), b.begin(), b.end());
    std::sort(a.begin(), a.end());
    return a;
  };

  bool progress = true;
  while (progress) {
    progress = false;
    std::vector<int> ms = m.sorted();
    std::vector<int> singles;
    for (int id : ms)
      if (h.edge(id).riders.size() == 1) singles.push_back(id);

    for (int e : singles) {
      const AgentId er = h.edge(e).riders[0];
      const AgentId ed = h.edge(e).driver;

      // (a) merge this rider into another served edge
      for (int g : ms) {
        if (g == e) continue;
        std::vector<AgentId> target =
            union_sorted(h.edge(g).riders, h.edge(e).riders);
        if (static_cast<int>(target.size()) > h.capacity(h.edge(g).driver))
          continue;
        std::optional<int> e3 = h.find_edge(h.edge(g).driver, target);
        if (!e3) continue;
        if (apply_if_improving(h, m, {e, g}, {*e3})) {
          progress = true;
          break;
        }
      }
      if (progress) break;

      // (b) redistribute this rider plus two served edges onto two of their
      // drivers, freeing the third
      for (int g : ms) {
        if (g == e) continue;
        for (int hh : ms) {
          if (hh == e || hh == g) continue;
          std::vector<AgentId> pool = union_sorted(
              union_sorted(h.edge(g).riders, h.edge(hh).riders),
              h.edge(e).riders);
          const std::size_t n = pool.size();
          if (n > 14) continue;
          for (std::uint32_t mask = 1; mask + 1 < (1u << n); ++mask) {
            std::vector<AgentId> s1, s2;
            for (std::size_t i = 0; i < n; ++i)
              ((mask >> i) & 1u ? s1 : s2).push_back(pool[i]);
            if (std::find(s1.begin(), s1.end(), er) == s1.end()) continue;
            if (static_cast<int>(s1.size()) > h.capacity(h.edge(g).driver))
              continue;
            if (static_cast<int>(s2.size()) > h.capacity(ed)) continue;
            std::optional<int> e3 = h.find_edge(h.edge(g).driver, s1);
            if (!e3) continue;
            std::optional<int> e4 = h.find_edge(ed, s2);
            if (!e4) continue;
            if (apply_if_improving(h, m, {e, g, hh}, {*e3, *e4})) {
              progress = true;
              break;
            }
          }
          if (progress) break;
        }
        if (progress) break;
      }
      if (progress) break;
    }

    if (progress && trace) {
      ++trace->improvements;
      trace->driver_counts.push_back(static_cast<int>(m.edges.size()));
    }
  }

  return make_solution(h, SolveStatus::Feasible, m.sorted());
}

AssignmentSolution run_algorithm(const Hypergraph& h, const std::string& algo,
                                 Problem problem, const SolveOptions& opts) {
  if (algo == "exact") return solve_exact(h, opts);
  if (algo == "greedy")
    return problem == Problem::MinDist ? greedy_min_dist(h)
                                       : greedy_min_num(h);
  if (algo == "greedy_min_dist") return greedy_min_dist(h);
  if (algo == "greedy_min_num") return greedy_min_num(h);
  if (algo == "ls") {
    if (problem == Problem::MinDist)
      throw ConfigError("ls only applies to fleet minimization");
    return local_search_ls(h);
  }
  throw ConfigError("unknown algorithm '" + algo + "'");
}

std::string export_lp(const Hypergraph& h) {
  std::ostringstream out;
  out << "Minimize\n obj:";
  if (h.edge_count() == 0) {
    out << " 0\n";
  } else {
    for (std::size_t i = 0; i < h.edge_count(); ++i) {
      out << (i == 0 ? " " : " + ") << h.edges()[i].weight << " x_" << i;
    }
    out << "\n";
  }
  out << "Subject To\n";
  for (AgentId d : h.drivers()) {
    const std::vector<int>& ids = h.edges_of_driver(d);
    if (ids.empty()) continue;
    out << " d_" << d << ":";
    for (std::size_t i = 0; i < ids.size(); ++i)
      out << (i == 0 ? " " : " + ") << "x_" << ids[i];
    out << " <= 1\n";
  }
  for (AgentId r : h.riders()) {
    const std::vector<int>& ids = h.edges_of_rider(r);
    if (ids.empty()) {
      out << "\\ rider " << r << " has no feasible match\n";
      continue;
    }
    out << " r_" << r << ":";
    for (std::size_t i = 0; i < ids.size(); ++i)
      out << (i == 0 ? " " : " + ") << "x_" << ids[i];
    out << " = 1\n";
  }
  out << "Binary\n";
  for (std::size_t i = 0; i < h.edge_count(); ++i) out << " x_" << i << "\n";
  out << "End\n";
  return out.str();
}

bool validate_solution(const Hypergraph& h, const AssignmentSolution& s,
                       const std::vector<AgentId>& required,
                       std::string* why) {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  std::set<AgentId> drivers, covered;
  std::int64_t total = 0;
  for (int id : s.edges) {
    if (id < 0 || id >= static_cast<int>(h.edge_count()))
      return fail("edge id out of range");
    const FeasibleMatch& e = h.edge(id);
    if (!drivers.insert(e.driver).second)
      return fail("driver " + std::to_string(e.driver) + " used twice");
    for (AgentId r : e.riders)
      if (!covered.insert(r).second)
        return fail("rider " + std::to_string(r) + " covered twice");
    total += e.weight;
  }
  std::set<AgentId> want(required.begin(), required.end());
  if (covered != want) return fail("covered rider set mismatch");
  if (total != s.objective) return fail("objective does not match weights");
  return true;
}

}  // namespace mtrs::solver
