#include "mtrs/clustering.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <unordered_map>

namespace mtrs::cluster {

namespace {

Seconds round_half_up(double x) {
  return static_cast<Seconds>(std::floor(x + 0.5));
}

IntervalWindow clamp_window(Seconds alpha, Seconds a, Seconds b) {
  if (a > b) return IntervalWindow(alpha, alpha);
  return IntervalWindow(a, b);
}

}  // namespace

IntervalWindow::IntervalWindow(Seconds a_, Seconds b_) : a(a_), b(b_) {
  if (a > b) throw Error("interval window start exceeds end");
}

IntervalWindow interval_window(const Driver& d) {
  const Seconds alpha = d.earliest_departure;
  const Seconds beta = d.latest_arrival;
  const Seconds z = d.detour_limit;
  if (d.match_type == MatchType::FirstMile)
    return clamp_window(alpha, alpha, beta - z);
  return clamp_window(alpha, alpha + round_half_up(0.2 * static_cast<double>(z)),
                      beta - round_half_up(0.3 * static_cast<double>(z)));
}

IntervalWindow interval_window(const Rider& r) {
  const Seconds alpha = r.earliest_departure;
  const Seconds beta = r.latest_arrival;
  const double slack =
      r.acceptance_threshold * static_cast<double>(r.transit_baseline);
  if (r.match_type == MatchType::FirstMile)
    return clamp_window(alpha, alpha, beta - round_half_up(slack));
  return clamp_window(alpha, alpha + round_half_up(0.25 * slack),
                      beta - round_half_up(0.35 * slack));
}

Grid make_grid(const routing::RoadNetwork& net, int m1, int m2) {
  if (m1 < 1 || m2 < 1) throw ConfigError("grid needs m1 >= 1 and m2 >= 1");
  if (net.vertex_count() == 0) throw ConfigError("grid over an empty network");
  Grid g;
  g.m1 = m1;
  g.m2 = m2;
  g.min_x = g.max_x = net.vertices()[0].x;
  g.min_y = g.max_y = net.vertices()[0].y;
  for (const Location& v : net.vertices()) {
    g.min_x = std::min(g.min_x, v.x);
    g.max_x = std::max(g.max_x, v.x);
    g.min_y = std::min(g.min_y, v.y);
    g.max_y = std::max(g.max_y, v.y);
  }
  return g;
}

CellIndex locate_cell(const Grid& g, double px, double py) {
  if (px < g.min_x || px > g.max_x || py < g.min_y || py > g.max_y)
    throw OutOfBoundsError("point outside the clustering grid");
  const double w = (g.max_x - g.min_x) / g.m1;
  const double h = (g.max_y - g.min_y) / g.m2;
  CellIndex c;
  c.x = w > 0.0 ? static_cast<int>(std::floor((px - g.min_x) / w)) + 1 : 1;
  c.y = h > 0.0 ? static_cast<int>(std::floor((g.max_y - py) / h)) + 1 : 1;
  c.x = std::clamp(c.x, 1, g.m1);
  c.y = std::clamp(c.y, 1, g.m2);
  return c;
}

int sector_of(const CellIndex& center, const CellIndex& target,
              double fallback_bearing) {
  const int dx = target.x - center.x;
  const int dy = target.y - center.y;
  if (dx == 0 && dy == 0) {
    // Bearing is in physical coordinates: 0 = east, pi/2 = north. Rows grow
    // southward, so north maps to dy < 0.
    constexpr double kPi = 3.14159265358979323846;
    const double two_pi = 2.0 * kPi;
    double th = std::fmod(fallback_bearing, two_pi);
    if (th < 0.0) th += two_pi;
    const double eps = 1e-9;
    auto near = [&](double v) { return std::fabs(th - v) <= eps; };
    if (near(0.0) || near(two_pi)) return 5;
    if (near(kPi / 2.0)) return 8;
    if (near(kPi)) return 6;
    if (near(3.0 * kPi / 2.0)) return 7;
    if (th < kPi / 2.0) return 4;
    if (th < kPi) return 3;
    if (th < 3.0 * kPi / 2.0) return 2;
    return 1;
  }
  if (dx > 0 && dy > 0) return 1;
  if (dx < 0 && dy > 0) return 2;
  if (dx < 0 && dy < 0) return 3;
  if (dx > 0 && dy < 0) return 4;
  if (dy == 0) return dx > 0 ? 5 : 6;
  return dy > 0 ? 7 : 8;
}

namespace {

double bearing_between(const Location& from, const Location& to) {
  return std::atan2(to.y - from.y, to.x - from.x);
}

struct Node {
  AgentId id = 0;
  bool is_driver = false;
  IntervalWindow win;
};

struct GroupKey {
  int y = 0, x = 0, sector = 0;
  bool operator<(const GroupKey& o) const {
    return std::tie(y, x, sector) < std::tie(o.y, o.x, o.sector);
  }
};

struct Group {
  std::vector<Node> riders;   // ascending id
  std::vector<Node> drivers;  // ascending id
};

void cluster_group(const Group& grp, MatchType mt, const CellIndex& cell,
                   int sector, int& next_id, ClusterSet& out) {
  // Greedy interval domination: scan by window end; an undominated rider
  // becomes a dominator and covers everyone it overlaps.
  std::vector<int> order(grp.riders.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (grp.riders[a].win.b != grp.riders[b].win.b)
      return grp.riders[a].win.b < grp.riders[b].win.b;
    return grp.riders[a].id < grp.riders[b].id;
  });
  std::vector<char> dominated(grp.riders.size(), 0);
  std::vector<int> dominators;
  for (int i : order) {
    if (dominated[i]) continue;
    dominators.push_back(i);
    for (std::size_t j = 0; j < grp.riders.size(); ++j)
      if (grp.riders[i].win.overlaps(grp.riders[j].win)) dominated[j] = 1;
  }

  std::vector<Cluster> clusters(dominators.size());
  for (std::size_t u = 0; u < dominators.size(); ++u) {
    clusters[u].id = next_id++;
    clusters[u].match_type = mt;
    clusters[u].cell = cell;
    clusters[u].sector = sector;
    clusters[u].riders.push_back(grp.riders[dominators[u]].id);
  }

  // Bipartite interval graph: dominators vs everyone else in the group.
  std::vector<Node> rest;
  std::set<int> domset(dominators.begin(), dominators.end());
  for (std::size_t j = 0; j < grp.riders.size(); ++j)
    if (!domset.count(static_cast<int>(j))) rest.push_back(grp.riders[j]);
  for (const Node& d : grp.drivers) rest.push_back(d);

  std::vector<std::vector<int>> nbr_of_u(dominators.size());
  std::vector<std::vector<int>> nbr_of_v(rest.size());
  for (std::size_t u = 0; u < dominators.size(); ++u)
    for (std::size_t v = 0; v < rest.size(); ++v)
      if (grp.riders[dominators[u]].win.overlaps(rest[v].win)) {
        nbr_of_u[u].push_back(static_cast<int>(v));
        nbr_of_v[v].push_back(static_cast<int>(u));
      }

  std::vector<char> taken(rest.size(), 0);
  auto attach = [&](int v, int u) {
    if (rest[v].is_driver)
      clusters[u].personal_drivers.push_back(rest[v].id);
    else
      clusters[u].riders.push_back(rest[v].id);
    taken[v] = 1;
  };

  // Degree-1 nodes go straight to their only dominator.
  for (std::size_t v = 0; v < rest.size(); ++v)
    if (nbr_of_v[v].size() == 1) attach(static_cast<int>(v), nbr_of_v[v][0]);

  // Then feed the smallest cluster, degree as tiebreak.
  auto live_deg = [&](std::size_t u) {
    int d = 0;
    for (int v : nbr_of_u[u])
      if (!taken[v]) ++d;
    return d;
  };
  for (;;) {
    int best_u = -1;
    int best_riders = 0, best_deg = 0;
    for (std::size_t u = 0; u < dominators.size(); ++u) {
      const int deg = live_deg(u);
      if (deg == 0) continue;
      const int nr = static_cast<int>(clusters[u].riders.size());
      if (best_u == -1 || nr < best_riders ||
          (nr == best_riders && deg < best_deg)) {
        best_u = static_cast<int>(u);
        best_riders = nr;
        best_deg = deg;
      }
    }
    if (best_u == -1) break;
    int best_v = -1;
    for (int v : nbr_of_u[best_u]) {
      if (taken[v]) continue;
      if (best_v == -1 ||
          nbr_of_v[v].size() < nbr_of_v[best_v].size())
        best_v = v;
    }
    attach(best_v, best_u);
  }

  for (Cluster& c : clusters) {
    std::sort(c.riders.begin(), c.riders.end());
    std::sort(c.personal_drivers.begin(), c.personal_drivers.end());
    out.push_back(std::move(c));
  }

  // Leftovers overlap no dominator at all; they cluster alone.
  for (std::size_t v = 0; v < rest.size(); ++v) {
    if (taken[v]) continue;
    Cluster c;
    c.id = next_id++;
    c.match_type = mt;
    c.cell = cell;
    c.sector = sector;
    if (rest[v].is_driver)
      c.personal_drivers.push_back(rest[v].id);
    else
      c.riders.push_back(rest[v].id);
    out.push_back(std::move(c));
  }
}

}  // namespace

ClusterSet build_clusters_phase1(const Instance& inst,
                                 const ClusterConfig& cfg) {
  const Grid grid = make_grid(inst.network, cfg.m1, cfg.m2);
  ClusterSet out;
  int next_id = 0;

  for (MatchType mt : {MatchType::FirstMile, MatchType::LastMile}) {
    std::map<GroupKey, Group> groups;

    // First-mile agents bin by origin and point at their destination;
    // last-mile agents bin by destination and point back at their origin.
    auto place = [&](AgentId id, bool is_driver, const Location& o,
                     const Location& d, const IntervalWindow& win) {
      const Location& bin_at = mt == MatchType::FirstMile ? o : d;
      const Location& toward = mt == MatchType::FirstMile ? d : o;
      const CellIndex cell = locate_cell(grid, bin_at.x, bin_at.y);
      const CellIndex away = locate_cell(grid, toward.x, toward.y);
      const int sec = sector_of(cell, away, bearing_between(o, d));
      Group& g = groups[GroupKey{cell.y, cell.x, sec}];
      (is_driver ? g.drivers : g.riders).push_back(Node{id, is_driver, win});
    };

    for (const Rider& r : inst.riders)
      if (r.match_type == mt)
        place(r.id, false, r.origin, r.destination, interval_window(r));
    for (const Driver& d : inst.personal_drivers)
      if (d.match_type == mt)
        place(d.id, true, d.origin, d.destination, interval_window(d));

    for (auto& [key, grp] : groups) {
      auto by_id = [](const Node& a, const Node& b) { return a.id < b.id; };
      std::sort(grp.riders.begin(), grp.riders.end(), by_id);
      std::sort(grp.drivers.begin(), grp.drivers.end(), by_id);
      cluster_group(grp, mt, CellIndex{key.x, key.y}, key.sector, next_id,
                    out);
    }
  }
  return out;
}

namespace {

struct WindowLookup {
  std::unordered_map<AgentId, IntervalWindow> win;

  explicit WindowLookup(const Instance& inst) {
    for (const Rider& r : inst.riders) win.emplace(r.id, interval_window(r));
    for (const Driver& d : inst.personal_drivers)
      win.emplace(d.id, interval_window(d));
  }
};

struct AvgWindow {
  double a = 0.0, b = 0.0;
  bool overlaps(const AvgWindow& o) const { return a <= o.b && o.a <= b; }
};

AvgWindow average_window(const std::vector<AgentId>& ids,
                         const WindowLookup& wl) {
  AvgWindow w;
  for (AgentId id : ids) {
    const IntervalWindow& iw = wl.win.at(id);
    w.a += static_cast<double>(iw.a);
    w.b += static_cast<double>(iw.b);
  }
  w.a /= static_cast<double>(ids.size());
  w.b /= static_cast<double>(ids.size());
  return w;
}

struct ClusterWindows {
  AvgWindow riders, drivers;
};

ClusterWindows windows_of(const Cluster& c, const WindowLookup& wl) {
  std::vector<AgentId> everyone = c.riders;
  everyone.insert(everyone.end(), c.personal_drivers.begin(),
                  c.personal_drivers.end());
  ClusterWindows w;
  w.riders = average_window(c.riders.empty() ? everyone : c.riders, wl);
  w.drivers = average_window(
      c.personal_drivers.empty() ? everyone : c.personal_drivers, wl);
  return w;
}

bool clusters_adjacent(const Cluster& c, const Cluster& o,
                       const WindowLookup& wl) {
  if (c.match_type != o.match_type) return false;
  if (c.sector != o.sector) return false;
  if (!cells_adjacent(c.cell, o.cell)) return false;
  const ClusterWindows cw = windows_of(c, wl);
  const ClusterWindows ow = windows_of(o, wl);
  return cw.drivers.overlaps(ow.riders) || cw.riders.overlaps(ow.drivers);
}

void merge_into(Cluster& from, Cluster& into) {
  into.riders.insert(into.riders.end(), from.riders.begin(),
                     from.riders.end());
  into.personal_drivers.insert(into.personal_drivers.end(),
                               from.personal_drivers.begin(),
                               from.personal_drivers.end());
  std::sort(into.riders.begin(), into.riders.end());
  std::sort(into.personal_drivers.begin(), into.personal_drivers.end());
  from.riders.clear();
  from.personal_drivers.clear();
}

}  // namespace

void refine_clusters(ClusterSet& cs, const ClusterConfig& cfg,
                     const Instance& inst) {
  if (cfg.s_min >= cfg.s_max)
    throw ConfigError("cluster sizes need s_min < s_max");
  if (cfg.tau1 <= 0.0 || cfg.tau2 < 1.0)
    throw ConfigError("balance bounds need tau1 > 0 and tau2 >= 1");
  const double riders_total = static_cast<double>(inst.riders.size());
  const double drivers_total =
      static_cast<double>(inst.personal_drivers.size());
  if (drivers_total > 0.0 && cfg.tau1 > riders_total / drivers_total)
    throw ConfigError("tau1 exceeds the global rider/driver ratio");

  const WindowLookup wl(inst);
  std::vector<char> alive(cs.size(), 1);

  auto adjacent_live = [&](std::size_t i) {
    std::vector<std::size_t> found;
    for (std::size_t j = 0; j < cs.size(); ++j)
      if (j != i && alive[j] && clusters_adjacent(cs[i], cs[j], wl))
        found.push_back(j);
    return found;
  };

  // Fold undersized clusters into their smallest compatible neighbor.
  std::set<std::size_t> cmin;
  for (std::size_t i = 0; i < cs.size(); ++i)
    if (cs[i].size() < cfg.s_min) cmin.insert(i);
  while (!cmin.empty()) {
    std::size_t pick = *cmin.begin();
    for (std::size_t i : cmin)
      if (cs[i].size() < cs[pick].size() ||
          (cs[i].size() == cs[pick].size() && cs[i].id < cs[pick].id))
        pick = i;
    const std::vector<std::size_t> nbrs = adjacent_live(pick);
    if (nbrs.empty()) {
      cs[pick].isolated = true;
      cmin.erase(pick);
      continue;
    }
    std::size_t target = nbrs[0];
    for (std::size_t j : nbrs)
      if (cs[j].size() < cs[target].size() ||
          (cs[j].size() == cs[target].size() && cs[j].id < cs[target].id))
        target = j;
    merge_into(cs[pick], cs[target]);
    alive[pick] = 0;
    cmin.erase(pick);
    if (cmin.count(target) && cs[target].size() >= cfg.s_min)
      cmin.erase(target);
  }

  // Rebalance rider/driver ratios by merging across imbalance sides.
  if (drivers_total > 0.0) {
    const double upper = cfg.tau2 * riders_total / drivers_total;
    enum class Side { Low, Balanced, High };
    auto side_of = [&](const Cluster& c) {
      const double nr = static_cast<double>(c.riders.size());
      const double ng = static_cast<double>(c.personal_drivers.size());
      if (ng == 0.0) return nr > 0.0 ? Side::High : Side::Balanced;
      if (nr < cfg.tau1 * ng) return Side::Low;
      if (nr > upper * ng) return Side::High;
      return Side::Balanced;
    };
    auto f_value = [&](const Cluster& c, Side s) {
      const double nr = static_cast<double>(c.riders.size());
      const double ng = static_cast<double>(c.personal_drivers.size());
      if (s == Side::Low)
        return nr == 0.0 ? std::numeric_limits<double>::infinity() : ng / nr;
      return ng == 0.0 ? std::numeric_limits<double>::infinity() : nr / ng;
    };

    std::set<std::size_t> cimb;
    for (std::size_t i = 0; i < cs.size(); ++i)
      if (alive[i] && side_of(cs[i]) != Side::Balanced) cimb.insert(i);

    while (!cimb.empty()) {
      // Merges change memberships, so re-classify every round.
      std::size_t pick = cs.size();
      double pick_f = -1.0;
      for (auto it = cimb.begin(); it != cimb.end();) {
        if (!alive[*it] || side_of(cs[*it]) == Side::Balanced) {
          it = cimb.erase(it);
          continue;
        }
        const double f = f_value(cs[*it], side_of(cs[*it]));
        if (pick == cs.size() || f > pick_f) {
          pick = *it;
          pick_f = f;
        }
        ++it;
      }
      if (pick == cs.size()) break;

      const Side side = side_of(cs[pick]);
      const Side opposite = side == Side::Low ? Side::High : Side::Low;
      const std::vector<std::size_t> nbrs = adjacent_live(pick);
      std::size_t target = cs.size();
      double target_f = -1.0;
      for (std::size_t j : nbrs)
        if (side_of(cs[j]) == opposite && f_value(cs[j], opposite) > target_f) {
          target = j;
          target_f = f_value(cs[j], opposite);
        }
      if (target == cs.size())
        for (std::size_t j : nbrs)
          if (side_of(cs[j]) == Side::Balanced) {
            target = j;
            break;
          }
      if (target == cs.size()) {
        cimb.erase(pick);
        continue;
      }
      merge_into(cs[pick], cs[target]);
      alive[pick] = 0;
      cimb.erase(pick);
    }
  }

  // Deal oversized clusters into ceil(size / s_max) even parts.
  int next_id = 0;
  for (const Cluster& c : cs) next_id = std::max(next_id, c.id + 1);
  const std::size_t existing = cs.size();
  for (std::size_t i = 0; i < existing; ++i) {
    if (!alive[i] || cs[i].size() <= cfg.s_max) continue;
    const int z =
        static_cast<int>((cs[i].size() + cfg.s_max - 1) / cfg.s_max);
    auto by_window_start = [&](AgentId a, AgentId b) {
      const IntervalWindow& wa = wl.win.at(a);
      const IntervalWindow& wb = wl.win.at(b);
      if (wa.a != wb.a) return wa.a < wb.a;
      return a < b;
    };
    std::vector<AgentId> riders = cs[i].riders;
    std::vector<AgentId> drivers = cs[i].personal_drivers;
    std::sort(riders.begin(), riders.end(), by_window_start);
    std::sort(drivers.begin(), drivers.end(), by_window_start);

    std::vector<Cluster> parts(z);
    for (int p = 0; p < z; ++p) {
      parts[p].match_type = cs[i].match_type;
      parts[p].cell = cs[i].cell;
      parts[p].sector = cs[i].sector;
    }
    int slot = 0;
    for (AgentId r : riders) parts[slot++ % z].riders.push_back(r);
    for (AgentId d : drivers)
      parts[slot++ % z].personal_drivers.push_back(d);

    for (Cluster& p : parts) {
      std::sort(p.riders.begin(), p.riders.end());
      std::sort(p.personal_drivers.begin(), p.personal_drivers.end());
    }
    parts[0].id = cs[i].id;
    cs[i] = parts[0];
    for (int p = 1; p < z; ++p) {
      parts[p].id = next_id++;
      cs.push_back(parts[p]);
      alive.push_back(1);
    }
  }

  ClusterSet kept;
  for (std::size_t i = 0; i < cs.size(); ++i)
    if (alive[i]) kept.push_back(std::move(cs[i]));
  cs = std::move(kept);
}

namespace {

constexpr std::int64_t kUnreachableCost = 1'000'000'000'000LL;
constexpr std::int64_t kCrossTypeCost = 1'000'000'000'000'000LL;

VertexId anchor_vertex(const Driver& d) {
  return d.match_type == MatchType::FirstMile ? d.origin.vertex
                                              : d.destination.vertex;
}

VertexId anchor_vertex(const Rider& r) {
  return r.match_type == MatchType::FirstMile ? r.origin.vertex
                                              : r.destination.vertex;
}

// Jonker-Volgenant style assignment with potentials; O(n^3), 1-indexed.
std::vector<int> min_cost_assignment(
    const std::vector<std::vector<std::int64_t>>& cost) {
  const int n = static_cast<int>(cost.size());
  const std::int64_t inf = std::numeric_limits<std::int64_t>::max() / 4;
  std::vector<std::int64_t> u(n + 1, 0), v(n + 1, 0), minv(n + 1, 0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      std::int64_t delta = inf;
      int j1 = -1;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const std::int64_t cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_of_col(n);
  for (int j = 1; j <= n; ++j) row_of_col[j - 1] = p[j] - 1;
  return row_of_col;
}

}  // namespace

void allocate_designated(ClusterSet& cs, const Instance& inst,
                         AllocMode mode) {
  std::map<AgentId, std::size_t> cluster_of_rider;
  for (std::size_t i = 0; i < cs.size(); ++i)
    for (AgentId r : cs[i].riders) cluster_of_rider[r] = i;
  if (inst.designated_drivers.size() != cluster_of_rider.size())
    throw CardinalityMismatchError(
        "designated fleet size must equal the rider count");
  if (cluster_of_rider.empty()) return;

  std::vector<const Driver*> drivers;
  for (const Driver& d : inst.designated_drivers) drivers.push_back(&d);
  std::sort(drivers.begin(), drivers.end(),
            [](const Driver* a, const Driver* b) { return a->id < b->id; });
  std::vector<const Rider*> riders;
  for (const auto& [rid, ci] : cluster_of_rider)
    riders.push_back(inst.find_rider(rid));

  routing::RoadCache cache(inst.network);
  for (const Driver* d : drivers) cache.warm(anchor_vertex(*d));
  auto dist = [&](const Driver& d, const Rider& r) {
    const VertexId from = anchor_vertex(d);
    const VertexId to = anchor_vertex(r);
    if (!cache.reachable(from, to)) return kUnreachableCost;
    return static_cast<std::int64_t>(cache.distance_m(from, to));
  };

  std::vector<int> rider_of_driver(drivers.size(), -1);
  if (mode == AllocMode::Greedy) {
    std::vector<char> marked(riders.size(), 0);
    auto claim_nearest = [&](std::size_t di, bool same_type_only) {
      int best = -1;
      std::int64_t best_d = 0;
      for (std::size_t rj = 0; rj < riders.size(); ++rj) {
        if (marked[rj]) continue;
        if (same_type_only &&
            riders[rj]->match_type != drivers[di]->match_type)
          continue;
        const std::int64_t d = dist(*drivers[di], *riders[rj]);
        if (best == -1 || d < best_d) {
          best = static_cast<int>(rj);
          best_d = d;
        }
      }
      if (best != -1) {
        marked[best] = 1;
        rider_of_driver[di] = best;
      }
      return best != -1;
    };
    for (std::size_t di = 0; di < drivers.size(); ++di)
      claim_nearest(di, true);
    for (std::size_t di = 0; di < drivers.size(); ++di)
      if (rider_of_driver[di] == -1) claim_nearest(di, false);
  } else {
    std::vector<std::vector<std::int64_t>> cost(
        drivers.size(), std::vector<std::int64_t>(riders.size(), 0));
    for (std::size_t di = 0; di < drivers.size(); ++di)
      for (std::size_t rj = 0; rj < riders.size(); ++rj) {
        cost[di][rj] = dist(*drivers[di], *riders[rj]);
        if (drivers[di]->match_type != riders[rj]->match_type)
          cost[di][rj] += kCrossTypeCost;
      }
    const std::vector<int> row_of_col = min_cost_assignment(cost);
    for (std::size_t rj = 0; rj < riders.size(); ++rj)
      rider_of_driver[row_of_col[rj]] = static_cast<int>(rj);
  }

  for (std::size_t di = 0; di < drivers.size(); ++di) {
    const std::size_t ci = cluster_of_rider.at(riders[rider_of_driver[di]]->id);
    cs[ci].designated_drivers.push_back(drivers[di]->id);
  }
  for (Cluster& c : cs)
    std::sort(c.designated_drivers.begin(), c.designated_drivers.end());
}

ClusteredSolve solve_clustered(const Instance& inst, const ClusterConfig& cfg,
                               feas::Problem problem, const std::string& algo,
                               const solver::SolveOptions& opts,
                               AllocMode mode) {
  ClusteredSolve out;
  out.clusters = build_clusters_phase1(inst, cfg);
  refine_clusters(out.clusters, cfg, inst);
  allocate_designated(out.clusters, inst, mode);

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
  out.merged = Hypergraph(all_drivers, all_riders, caps);

  std::vector<int> chosen;
  bool any_time_limit = false;
  std::int64_t enum_ns = 0, solve_ns = 0;

  auto timed = [](std::int64_t& bucket, auto&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    auto result = fn();
    bucket += std::chrono::duration_cast<std::chrono::nanoseconds>(
                  std::chrono::steady_clock::now() - t0)
                  .count();
    return result;
  };
  auto seal = [&] {
    out.enum_ms = enum_ns / 1'000'000;
    out.solve_ms = solve_ns / 1'000'000;
  };
  auto append_edges = [&](const Hypergraph& local) {
    const int base = static_cast<int>(out.merged.edge_count());
    for (const FeasibleMatch& e : local.edges()) out.merged.add_edge(e);
    return base;
  };
  auto fail = [&](const Cluster& c, const std::string& detail) {
    out.solution = solver::AssignmentSolution{};
    out.solution.status = solver::SolveStatus::Infeasible;
    out.solution.note = "cluster " + std::to_string(c.id) + ": " + detail;
    seal();
    return out;
  };

  for (const Cluster& c : out.clusters) {
    std::vector<Rider> riders;
    for (AgentId rid : c.riders) riders.push_back(*inst.find_rider(rid));
    std::vector<Driver> personal, designated;
    for (AgentId did : c.personal_drivers)
      personal.push_back(*inst.find_driver(did));
    for (AgentId did : c.designated_drivers)
      designated.push_back(*inst.find_driver(did));

    if (problem == feas::Problem::MinDist) {
      std::vector<Driver> fleet = personal;
      fleet.insert(fleet.end(), designated.begin(), designated.end());
      const Hypergraph hc = timed(enum_ns, [&] {
        return feas::enumerate_hypergraph_scoped(ctx, problem, fleet, riders);
      });
      const int base = append_edges(hc);
      solver::AssignmentSolution sol = timed(solve_ns, [&] {
        return solver::run_algorithm(hc, algo, problem, opts);
      });
      if (sol.status == solver::SolveStatus::Infeasible)
        return fail(c, "no full cover exists");
      std::string why;
      if (!solver::validate_solution(hc, sol, c.riders, &why))
        return fail(c, sol.status == solver::SolveStatus::TimeLimit
                           ? "time limit before a full cover"
                           : why);
      any_time_limit |= sol.status == solver::SolveStatus::TimeLimit;
      for (int id : sol.edges) chosen.push_back(base + id);
    } else {
      // Personal drivers take a maximal share, the designated fleet covers
      // the rest.
      const Hypergraph hp = timed(enum_ns, [&] {
        return feas::enumerate_hypergraph_scoped(ctx, problem, personal,
                                                 riders);
      });
      const int pbase = append_edges(hp);
      const solver::PartialAssignment part = timed(solve_ns, [&] {
        return solver::assign_personal_maximal(hp);
      });
      for (int id : part.edges) chosen.push_back(pbase + id);

      std::vector<Rider> rest;
      for (const Rider& r : riders)
        if (std::find(part.served.begin(), part.served.end(), r.id) ==
            part.served.end())
          rest.push_back(r);
      const Hypergraph hd = timed(enum_ns, [&] {
        return feas::enumerate_hypergraph_scoped(ctx, problem, designated,
                                                 rest);
      });
      const int dbase = append_edges(hd);
      solver::AssignmentSolution sol = timed(solve_ns, [&] {
        return solver::run_algorithm(hd, algo, problem, opts);
      });
      if (sol.status == solver::SolveStatus::Infeasible)
        return fail(c, "designated fleet cannot cover the leftover riders");
      std::string why;
      if (!solver::validate_solution(hd, sol, part.unserved, &why))
        return fail(c, sol.status == solver::SolveStatus::TimeLimit
                           ? "time limit before a full cover"
                           : why);
      any_time_limit |= sol.status == solver::SolveStatus::TimeLimit;
      for (int id : sol.edges) chosen.push_back(dbase + id);
    }
  }

  std::sort(chosen.begin(), chosen.end());
  out.solution.edges = chosen;
  out.solution.objective = 0;
  for (int id : chosen) {
    const FeasibleMatch& e = out.merged.edge(id);
    out.solution.objective += e.weight;
    for (AgentId r : e.riders) out.solution.assignment[r] = e.driver;
  }
  out.solution.status = any_time_limit ? solver::SolveStatus::TimeLimit
                        : algo == "exact" ? solver::SolveStatus::Optimal
                                          : solver::SolveStatus::Feasible;
  seal();
  return out;
}

}  // namespace mtrs::cluster
