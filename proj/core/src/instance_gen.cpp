#include "mtrs/instance_gen.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "mtrs/routing.hpp"

namespace mtrs::gen {

std::uint64_t Rng::next() {
  state_ += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi) {
  // Modulo over a 64-bit draw; the bias is negligible for the small spans
  // used here and keeps the stream identical everywhere.
  const std::uint64_t span =
      static_cast<std::uint64_t>(hi - lo) + 1ULL;
  return lo + static_cast<std::int64_t>(next() % span);
}

double Rng::uniform01() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double Rng::uniform_real(double lo, double hi) {
  return lo + uniform01() * (hi - lo);
}

std::size_t Rng::weighted_index(const std::vector<double>& weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  double u = uniform01() * total;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    u -= weights[i];
    if (u < 0.0) return i;
  }
  return weights.size() - 1;
}

std::vector<std::string> validate_config(const GenConfig& cfg) {
  std::vector<std::string> out;
  if (cfg.grid_n < 2) out.push_back("grid_n must be at least 2");
  if (cfg.block_m <= 0) out.push_back("block_m must be positive");
  if (cfg.stations < 3) out.push_back("stations must be at least 3");
  if (cfg.grid_n >= 2 &&
      cfg.stations > cfg.grid_n * cfg.grid_n)
    out.push_back("stations cannot exceed the vertex count");
  if (cfg.transit_lines < 1) out.push_back("transit_lines must be positive");
  if (cfg.trips_per_line < 1) out.push_back("trips_per_line must be positive");
  if (cfg.headway_s <= 0) out.push_back("headway_s must be positive");
  if (cfg.riders < 0) out.push_back("riders cannot be negative");
  if (cfg.interval_len_s <= 0) out.push_back("interval_len_s must be positive");
  if (cfg.zone_weights.empty()) {
    out.push_back("zone_weights must not be empty");
  } else {
    double sum = 0.0;
    for (double w : cfg.zone_weights) {
      if (w < 0.0) out.push_back("zone_weights must be non-negative");
      sum += w;
    }
    if (std::fabs(sum - 1.0) > 1e-9)
      out.push_back("zone_weights must sum to 1");
    if (cfg.grid_n >= 2 &&
        static_cast<int>(cfg.zone_weights.size()) > cfg.grid_n)
      out.push_back("more zones than grid columns");
  }
  return out;
}

routing::RoadNetwork build_road_network(int n, Meters block_m,
                                        std::uint64_t seed) {
  if (n < 2) throw ConfigError("road lattice needs n >= 2");
  if (block_m <= 0) throw ConfigError("road lattice needs block_m > 0");
  Rng rng(seed);
  std::vector<Location> vertices(static_cast<std::size_t>(n) * n);
  for (int row = 0; row < n; ++row)
    for (int col = 0; col < n; ++col) {
      Location& v = vertices[static_cast<std::size_t>(row) * n + col];
      v.vertex = static_cast<VertexId>(row * n + col);
      v.x = static_cast<double>(col) * static_cast<double>(block_m);
      v.y = static_cast<double>(row) * static_cast<double>(block_m);
    }

  // Every block edge gets one sampled length, shared by both directions.
  // Driving speed is a uniform 10 m/s, so time-shortest and
  // distance-shortest routes coincide and detours are never negative.
  std::vector<routing::RoadEdge> edges;
  auto link = [&](VertexId a, VertexId b) {
    const Meters dist = 10 * rng.uniform_int(40, 60);
    const Seconds time = dist / 10;
    edges.push_back({a, b, dist, time});
    edges.push_back({b, a, dist, time});
  };
  for (int row = 0; row < n; ++row)
    for (int col = 0; col < n; ++col) {
      const VertexId v = static_cast<VertexId>(row * n + col);
      if (col + 1 < n) link(v, v + 1);
      if (row + 1 < n) link(v, v + n);
    }
  return routing::RoadNetwork(std::move(vertices), std::move(edges));
}

namespace {

constexpr Seconds kMinute = 60;
constexpr Meters kWalkCap = 4000;
constexpr Seconds kMinTransitDuration = 30 * kMinute;
constexpr Seconds kStopDwell = 30;
constexpr int kMaxConsecutiveRejects = 1000;

constexpr AgentId kPersonalBase = 100000;
constexpr AgentId kDesignatedBase = 200000;

// Vertical strips of lattice columns; strip k holds roughly n/K columns.
struct Zones {
  int n = 0;
  int count = 0;

  int zone_of_column(int col) const {
    for (int k = count - 1; k >= 0; --k)
      if (col >= first_column(k)) return k;
    return 0;
  }
  int first_column(int k) const { return k * n / count; }
  int last_column(int k) const {
    return (k + 1) * n / count - 1;
  }
  int zone_of_vertex(VertexId v) const {
    return zone_of_column(static_cast<int>(v) % n);
  }
};

VertexId random_vertex_in_zone(Rng& rng, const Zones& z, int zone) {
  const int lo = z.first_column(zone);
  const int hi = z.last_column(zone);
  const int col = static_cast<int>(rng.uniform_int(lo, hi));
  const int row = static_cast<int>(rng.uniform_int(0, z.n - 1));
  return static_cast<VertexId>(row * z.n + col);
}

Seconds round_half_up(double x) {
  return static_cast<Seconds>(std::floor(x + 0.5));
}

}  // namespace

Instance gen_interval_instance(const GenConfig& cfg, std::uint64_t seed,
                               Seconds t_a) {
  {
    const std::vector<std::string> errs = validate_config(cfg);
    if (!errs.empty()) {
      std::string joined = "invalid generation config:";
      for (const std::string& e : errs) joined += " " + e + ";";
      throw ConfigError(joined);
    }
  }

  Rng rng(seed);
  Instance inst;
  inst.interval_start = t_a;
  inst.interval_end = t_a + cfg.interval_len_s;
  inst.network = build_road_network(cfg.grid_n, cfg.block_m, rng.next());

  const Zones zones{cfg.grid_n, static_cast<int>(cfg.zone_weights.size())};

  // Stations: a distinct random draw over the lattice, kept sorted.
  std::vector<VertexId> all(inst.network.vertex_count());
  std::iota(all.begin(), all.end(), 0);
  for (int i = 0; i < cfg.stations; ++i) {
    const std::int64_t j =
        rng.uniform_int(i, static_cast<std::int64_t>(all.size()) - 1);
    std::swap(all[i], all[j]);
  }
  std::vector<VertexId> station_v(all.begin(), all.begin() + cfg.stations);
  std::sort(station_v.begin(), station_v.end());
  for (VertexId v : station_v)
    inst.stations.push_back(inst.network.location(v));

  // Transit lines: each one sweeps west to east through a handful of
  // stations at road speed, with trips in both directions at a fixed
  // headway.
  routing::RoadCache roads(inst.network);
  std::vector<routing::Trip> trips;
  int trip_id = 0;
  for (int line = 0; line < cfg.transit_lines; ++line) {
    const int max_len = std::min<int>(5, cfg.stations);
    const int len = static_cast<int>(rng.uniform_int(3, max_len));
    std::vector<int> idx(station_v.size());
    std::iota(idx.begin(), idx.end(), 0);
    for (int i = 0; i < len; ++i) {
      const std::int64_t j =
          rng.uniform_int(i, static_cast<std::int64_t>(idx.size()) - 1);
      std::swap(idx[i], idx[j]);
    }
    std::vector<VertexId> stops;
    for (int i = 0; i < len; ++i) stops.push_back(station_v[idx[i]]);
    std::sort(stops.begin(), stops.end(), [&](VertexId a, VertexId b) {
      const Location& la = inst.network.location(a);
      const Location& lb = inst.network.location(b);
      if (la.x != lb.x) return la.x < lb.x;
      if (la.y != lb.y) return la.y < lb.y;
      return a < b;
    });

    std::vector<Seconds> run(stops.size() - 1);
    for (std::size_t i = 0; i + 1 < stops.size(); ++i)
      run[i] = roads.travel_s(stops[i], stops[i + 1]);
    const Seconds offset = rng.uniform_int(0, cfg.headway_s - 1);

    auto emit = [&](const std::vector<VertexId>& seq,
                    const std::vector<Seconds>& seg) {
      for (int k = 0; k < cfg.trips_per_line; ++k) {
        routing::Trip t;
        t.id = trip_id++;
        Seconds at = offset + static_cast<Seconds>(k) * cfg.headway_s;
        for (std::size_t i = 0; i < seq.size(); ++i) {
          const bool last = i + 1 == seq.size();
          t.stops.push_back({seq[i], at, last ? at : at + kStopDwell});
          if (!last) at += kStopDwell + seg[i];
        }
        trips.push_back(std::move(t));
      }
    };
    emit(stops, run);
    std::vector<VertexId> rev(stops.rbegin(), stops.rend());
    std::vector<Seconds> rev_run(run.rbegin(), run.rend());
    emit(rev, rev_run);
  }
  inst.timetable = routing::TransitTimetable(std::move(trips));

  routing::TransitPlanner planner(inst.network, inst.timetable);
  feas::MatchContext ctx(inst);

  auto personal_alpha = [&] {
    return t_a + rng.uniform_int(30 * kMinute, 70 * kMinute);
  };
  auto personal_beta = [&](Seconds alpha) {
    return alpha + rng.uniform_int(45 * kMinute, 70 * kMinute);
  };

  // Riders: drawn until their fastest pure-transit journey is usable. Each
  // rider also draws its dedicated designated driver, and the pair must be
  // servable, so the one-designated-driver-per-rider guarantee holds in
  // every emitted instance and not just in expectation.
  int consecutive_rejects = 0;
  while (static_cast<int>(inst.riders.size()) < cfg.riders) {
    Rider r;
    r.id = static_cast<AgentId>(inst.riders.size());
    r.match_type = rng.uniform_int(0, 1) == 0 ? MatchType::FirstMile
                                              : MatchType::LastMile;
    r.earliest_departure = t_a + rng.uniform_int(45 * kMinute, 75 * kMinute);
    r.latest_arrival =
        r.earliest_departure + rng.uniform_int(45 * kMinute, 90 * kMinute);
    r.acceptance_threshold = 0.3;
    const int o_zone = static_cast<int>(rng.weighted_index(cfg.zone_weights));
    const int d_zone = static_cast<int>(rng.weighted_index(cfg.zone_weights));
    const VertexId ov = random_vertex_in_zone(rng, zones, o_zone);
    const VertexId dv = random_vertex_in_zone(rng, zones, d_zone);

    bool ok = ov != dv;
    if (ok) {
      r.origin = inst.network.location(ov);
      r.destination = inst.network.location(dv);
      const std::optional<routing::Journey> j = planner.earliest_arrival(
          r.origin, r.destination, r.earliest_departure);
      ok = j.has_value() && j->arrive <= r.latest_arrival &&
           j->duration() >= kMinTransitDuration && j->walk_m <= kWalkCap;
      if (ok) r.transit_baseline = j->duration();
    }
    Driver d;
    if (ok) {
      d.id = kDesignatedBase + r.id;
      d.kind = DriverKind::Designated;
      d.match_type = r.match_type;
      const Location& anchor =
          r.match_type == MatchType::FirstMile ? r.origin : r.destination;
      const VertexId station_side = random_vertex_in_zone(
          rng, zones, zones.zone_of_vertex(anchor.vertex));
      d.origin = inst.network.location(station_side);
      d.destination = d.origin;
      d.earliest_departure = personal_alpha();
      d.latest_arrival = personal_beta(d.earliest_departure);
      d.capacity = 3;
      d.detour_limit = 0;
      ok = feas::check_feasible_match(ctx, d, {&r, 1}).has_value();
    }
    if (!ok) {
      if (++consecutive_rejects >= kMaxConsecutiveRejects)
        throw GenerationExhaustedError(
            "rider generation rejected 1000 candidates in a row");
      continue;
    }
    consecutive_rejects = 0;
    inst.riders.push_back(r);
    inst.designated_drivers.push_back(d);
  }

  // Personal drivers: one third of the riders of each match type, spread
  // over the zones in proportion to where those riders are anchored.
  AgentId next_personal = kPersonalBase;
  for (MatchType mt : {MatchType::FirstMile, MatchType::LastMile}) {
    std::vector<int> riders_in_zone(zones.count, 0);
    int type_total = 0;
    for (const Rider& r : inst.riders) {
      if (r.match_type != mt) continue;
      const Location& anchor =
          mt == MatchType::FirstMile ? r.origin : r.destination;
      ++riders_in_zone[zones.zone_of_vertex(anchor.vertex)];
      ++type_total;
    }
    const int want = static_cast<int>(
        round_half_up(static_cast<double>(type_total) / 3.0));
    std::vector<int> quota(zones.count, 0);
    int assigned = 0;
    for (int k = 0; k < zones.count; ++k) {
      quota[k] = riders_in_zone[k] / 3;
      assigned += quota[k];
    }
    // Largest remainder keeps the per-zone counts near count/3 while the
    // total stays at the half-up rounding of the type total.
    std::vector<int> order(zones.count);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      const int ra = riders_in_zone[a] % 3;
      const int rb = riders_in_zone[b] % 3;
      if (ra != rb) return ra > rb;
      return a < b;
    });
    for (int i = 0; assigned < want; i = (i + 1) % zones.count) {
      ++quota[order[i]];
      ++assigned;
    }

    for (int k = 0; k < zones.count; ++k)
      for (int c = 0; c < quota[k]; ++c) {
        Driver d;
        d.id = next_personal++;
        d.kind = DriverKind::Personal;
        d.match_type = mt;
        const VertexId anchor = random_vertex_in_zone(rng, zones, k);
        const int far_zone =
            static_cast<int>(rng.weighted_index(cfg.zone_weights));
        const VertexId other = random_vertex_in_zone(rng, zones, far_zone);
        const VertexId ov = mt == MatchType::FirstMile ? anchor : other;
        const VertexId dv = mt == MatchType::FirstMile ? other : anchor;
        d.origin = inst.network.location(ov);
        d.destination = inst.network.location(dv);
        d.earliest_departure = personal_alpha();
        d.latest_arrival = personal_beta(d.earliest_departure);
        d.capacity = static_cast<int>(rng.uniform_int(2, 3));
        const Seconds fastest = ov == dv ? 0 : roads.travel_s(ov, dv);
        d.detour_limit =
            rng.uniform_int(20 * kMinute, std::max(20 * kMinute, fastest));
        inst.personal_drivers.push_back(d);
      }
  }

  return inst;
}

std::vector<std::string> validate_threedm(const ThreeDM& t) {
  std::vector<std::string> out;
  if (t.q < 1) out.push_back("q must be at least 1");
  if (static_cast<int>(t.A.size()) != 2 * t.q)
    out.push_back("A must hold exactly 2q elements");
  if (static_cast<int>(t.B.size()) != t.q)
    out.push_back("B must hold exactly q elements");
  if (static_cast<int>(t.C.size()) != t.q)
    out.push_back("C must hold exactly q elements");
  if (t.omega < 2) out.push_back("omega must be at least 2");
  std::set<std::string> names;
  for (const auto* side : {&t.A, &t.B, &t.C})
    for (const std::string& s : *side)
      if (!names.insert(s).second)
        out.push_back("element name '" + s + "' repeats");
  std::set<std::array<int, 3>> seen;
  for (const std::array<int, 3>& f : t.F) {
    if (f[0] < 0 || f[0] >= static_cast<int>(t.A.size()) || f[1] < 0 ||
        f[1] >= static_cast<int>(t.B.size()) || f[2] < 0 ||
        f[2] >= static_cast<int>(t.C.size()))
      out.push_back("triple index out of range");
    else if (!seen.insert(f).second)
      out.push_back("duplicate triple");
  }
  return out;
}

ThreeDM gen_random_threedm(int q, double density, std::int64_t omega,
                           std::uint64_t seed) {
  if (q < 1) throw ConfigError("3dm generation needs q >= 1");
  if (density < 0.0 || density > 1.0)
    throw ConfigError("3dm density must lie in [0, 1]");
  if (omega < 2) throw ConfigError("3dm fill weight must be at least 2");
  Rng rng(seed);
  ThreeDM t;
  t.q = q;
  t.omega = omega;
  for (int i = 0; i < 2 * q; ++i) t.A.push_back("a" + std::to_string(i + 1));
  for (int i = 0; i < q; ++i) t.B.push_back("b" + std::to_string(i + 1));
  for (int i = 0; i < q; ++i) t.C.push_back("c" + std::to_string(i + 1));
  for (int a = 0; a < 2 * q; ++a)
    for (int b = 0; b < q; ++b)
      for (int c = 0; c < q; ++c)
        if (rng.uniform01() < density) t.F.push_back({a, b, c});
  return t;
}

AgentId threedm_driver_id(int a_index) { return 1000 + a_index; }
AgentId threedm_rider_id_b(int b_index) { return 2000 + b_index; }
AgentId threedm_rider_id_c(int c_index) { return 3000 + c_index; }

Hypergraph gen_3dm_hypergraph(const ThreeDM& t, feas::Problem problem) {
  {
    const std::vector<std::string> errs = validate_threedm(t);
    if (!errs.empty())
      throw ConfigError("invalid 3dm instance: " + errs.front());
  }
  const bool unit = problem == feas::Problem::MinNum;
  std::vector<AgentId> drivers, riders;
  std::unordered_map<AgentId, int> caps;
  for (int a = 0; a < 2 * t.q; ++a) {
    drivers.push_back(threedm_driver_id(a));
    caps[threedm_driver_id(a)] = 2;
  }
  for (int b = 0; b < t.q; ++b) riders.push_back(threedm_rider_id_b(b));
  for (int c = 0; c < t.q; ++c) riders.push_back(threedm_rider_id_c(c));
  Hypergraph h(drivers, riders, caps);

  std::set<std::pair<AgentId, std::vector<AgentId>>> present;
  auto add = [&](AgentId driver, std::vector<AgentId> rs, std::int64_t w) {
    std::sort(rs.begin(), rs.end());
    if (!present.insert({driver, rs}).second) return;
    FeasibleMatch e;
    e.driver = driver;
    e.riders = std::move(rs);
    e.weight = unit ? 1 : w;
    h.add_edge(std::move(e));
  };

  for (const std::array<int, 3>& f : t.F) {
    const AgentId a = threedm_driver_id(f[0]);
    const AgentId b = threedm_rider_id_b(f[1]);
    const AgentId c = threedm_rider_id_c(f[2]);
    add(a, {b, c}, 2);
    add(a, {b}, 2);
    add(a, {c}, 2);
  }
  // Fill every absent (driver, single rider) pair so feasibility stays
  // downward closed and every rider is coverable.
  for (int a = 0; a < 2 * t.q; ++a) {
    for (int b = 0; b < t.q; ++b)
      add(threedm_driver_id(a), {threedm_rider_id_b(b)}, t.omega);
    for (int c = 0; c < t.q; ++c)
      add(threedm_driver_id(a), {threedm_rider_id_c(c)}, t.omega);
  }
  return h;
}

namespace {

int best_matching_from(const ThreeDM& t, int b, std::vector<char>& a_used,
                       std::vector<char>& c_used) {
  if (b == t.q) return 0;
  int best = best_matching_from(t, b + 1, a_used, c_used);  // skip this b
  for (const std::array<int, 3>& f : t.F) {
    if (f[1] != b || a_used[f[0]] || c_used[f[2]]) continue;
    a_used[f[0]] = 1;
    c_used[f[2]] = 1;
    best = std::max(best, 1 + best_matching_from(t, b + 1, a_used, c_used));
    a_used[f[0]] = 0;
    c_used[f[2]] = 0;
  }
  return best;
}

}  // namespace

int brute_force_3dm(const ThreeDM& t) {
  std::vector<char> a_used(t.A.size(), 0), c_used(t.C.size(), 0);
  return best_matching_from(t, 0, a_used, c_used);
}

}  // namespace mtrs::gen
