#include "mtrs/hypergraph.hpp"

#include <algorithm>
#include <functional>

namespace mtrs {

bool FeasibleMatch::contains_rider(AgentId r) const {
  return std::binary_search(riders.begin(), riders.end(), r);
}

Hypergraph::Hypergraph(std::vector<AgentId> drivers,
                       std::vector<AgentId> riders,
                       std::unordered_map<AgentId, int> driver_capacity)
    : drivers_(std::move(drivers)),
      riders_(std::move(riders)),
      capacity_(std::move(driver_capacity)) {
  std::sort(drivers_.begin(), drivers_.end());
  std::sort(riders_.begin(), riders_.end());
}

int Hypergraph::add_edge(FeasibleMatch e) {
  int id = static_cast<int>(edges_.size());
  by_driver_[e.driver].push_back(id);
  for (AgentId r : e.riders) by_rider_[r].push_back(id);
  edges_.push_back(std::move(e));
  return id;
}

const std::vector<int>& Hypergraph::edges_of_driver(AgentId d) const {
  static const std::vector<int> kEmpty;
  auto it = by_driver_.find(d);
  return it == by_driver_.end() ? kEmpty : it->second;
}

const std::vector<int>& Hypergraph::edges_of_rider(AgentId r) const {
  static const std::vector<int> kEmpty;
  auto it = by_rider_.find(r);
  return it == by_rider_.end() ? kEmpty : it->second;
}

int Hypergraph::capacity(AgentId driver) const {
  auto it = capacity_.find(driver);
  return it == capacity_.end() ? 0 : it->second;
}

std::optional<int> Hypergraph::find_edge(
    AgentId driver, const std::vector<AgentId>& riders) const {
  for (int id : edges_of_driver(driver))
    if (edges_[id].riders == riders) return id;
  return std::nullopt;
}

int Hypergraph::max_capacity() const {
  int lambda = 0;
  for (AgentId d : drivers_) lambda = std::max(lambda, capacity(d));
  return lambda;
}

std::int64_t Hypergraph::min_weight() const {
  std::int64_t w = 0;
  for (std::size_t i = 0; i < edges_.size(); ++i)
    w = i == 0 ? edges_[i].weight : std::min(w, edges_[i].weight);
  return w;
}

std::int64_t Hypergraph::max_weight() const {
  std::int64_t w = 0;
  for (const FeasibleMatch& e : edges_) w = std::max(w, e.weight);
  return w;
}

double Hypergraph::weight_ratio() const {
  std::int64_t lo = min_weight();
  if (lo <= 0) return 0.0;
  return static_cast<double>(max_weight()) / static_cast<double>(lo);
}

Hypergraph Hypergraph::restrict_riders(
    const std::vector<AgentId>& keep) const {
  std::vector<AgentId> sorted = keep;
  std::sort(sorted.begin(), sorted.end());
  Hypergraph out(drivers_, sorted, capacity_);
  for (const FeasibleMatch& e : edges_) {
    bool ok = std::all_of(e.riders.begin(), e.riders.end(), [&](AgentId r) {
      return std::binary_search(sorted.begin(), sorted.end(), r);
    });
    if (ok) out.add_edge(e);
  }
  return out;
}

namespace {

// Deterministic augmenting-path matching; rider order and adjacency order
// are both ascending, so the result is stable.
struct Kuhn {
  const std::vector<std::vector<int>>& adj;  // rider idx -> driver idxs
  std::vector<int> match_driver;             // driver idx -> rider idx
  std::vector<char> visited;

  explicit Kuhn(const std::vector<std::vector<int>>& a, std::size_t drivers)
      : adj(a), match_driver(drivers, -1) {}

  bool try_rider(int r) {
    for (int d : adj[r]) {
      if (visited[d]) continue;
      visited[d] = 1;
      if (match_driver[d] == -1 || try_rider(match_driver[d])) {
        match_driver[d] = r;
        return true;
      }
    }
    return false;
  }

  int run(std::size_t riders) {
    int matched = 0;
    for (std::size_t r = 0; r < riders; ++r) {
      visited.assign(match_driver.size(), 0);
      if (try_rider(static_cast<int>(r))) ++matched;
    }
    return matched;
  }
};

}  // namespace

bool check_assumption1(const Instance& inst, const Hypergraph& h) {
  const auto& riders = inst.riders;
  const auto& designated = inst.designated_drivers;
  if (designated.size() < riders.size()) return false;

  std::unordered_map<AgentId, int> driver_idx;
  for (std::size_t i = 0; i < designated.size(); ++i)
    driver_idx[designated[i].id] = static_cast<int>(i);

  std::vector<std::vector<int>> adj(riders.size());
  for (std::size_t r = 0; r < riders.size(); ++r) {
    for (int eid : h.edges_of_rider(riders[r].id)) {
      const FeasibleMatch& e = h.edge(eid);
      if (e.riders.size() != 1) continue;
      auto it = driver_idx.find(e.driver);
      if (it != driver_idx.end()) adj[r].push_back(it->second);
    }
    std::sort(adj[r].begin(), adj[r].end());
    adj[r].erase(std::unique(adj[r].begin(), adj[r].end()), adj[r].end());
  }

  Kuhn kuhn(adj, designated.size());
  return kuhn.run(riders.size()) == static_cast<int>(riders.size());
}

bool check_assumption2(const Instance& inst, const Hypergraph& h) {
  std::size_t fm_riders = 0, lm_riders = 0, fm_drivers = 0, lm_drivers = 0;
  for (const Rider& r : inst.riders)
    (r.match_type == MatchType::FirstMile ? fm_riders : lm_riders)++;
  for (const Driver& d : inst.designated_drivers)
    (d.match_type == MatchType::FirstMile ? fm_drivers : lm_drivers)++;
  if (fm_riders != fm_drivers || lm_riders != lm_drivers) return false;

  for (const Driver& d : inst.designated_drivers) {
    for (const Rider& r : inst.riders) {
      if (r.match_type != d.match_type) continue;
      if (!h.find_edge(d.id, {r.id})) return false;
    }
  }
  return true;
}

}  // namespace mtrs
