#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <set>

#include "mtrs/routing.hpp"

namespace mtrs::routing {

TransitTimetable::TransitTimetable(std::vector<Trip> trips)
    : trips_(std::move(trips)) {
  std::set<VertexId> seen;
  for (const Trip& t : trips_)
    for (const StopEvent& s : t.stops) seen.insert(s.station);
  stop_vertices_.assign(seen.begin(), seen.end());
}

int Journey::ride_count() const {
  int n = 0;
  for (const JourneyLeg& l : legs)
    if (std::holds_alternative<RideLeg>(l)) ++n;
  return n;
}

Seconds walk_seconds(Meters m, double speed_mps) {
  if (m <= 0) return 0;
  return static_cast<Seconds>(
      std::ceil(static_cast<double>(m) / speed_mps - 1e-9));
}

Meters straight_line_m(const Location& a, const Location& b) {
  double d = std::hypot(a.x - b.x, a.y - b.y);
  return static_cast<Meters>(std::ceil(d - 1e-9));
}

std::optional<Journey> JourneyProfile::earliest(Seconds tau) const {
  const Entry* best = nullptr;
  auto it = std::lower_bound(
      transit.begin(), transit.end(), tau,
      [](const Entry& e, Seconds t) { return e.depart < t; });
  if (it != transit.end()) best = &*it;
  if (walk_only) {
    Seconds walk_arr = tau + walk_only->duration();
    if (!best || walk_arr < best->arrive) {
      Journey j = *walk_only;
      j.depart = tau;
      j.arrive = walk_arr;
      return j;
    }
  }
  if (!best) return std::nullopt;
  return best->journey;
}

std::optional<Seconds> JourneyProfile::earliest_arrival(Seconds tau) const {
  auto it = std::lower_bound(
      transit.begin(), transit.end(), tau,
      [](const Entry& e, Seconds t) { return e.depart < t; });
  std::optional<Seconds> best;
  if (it != transit.end()) best = it->arrive;
  if (walk_only) {
    Seconds walk_arr = tau + walk_only->duration();
    if (!best || walk_arr < *best) best = walk_arr;
  }
  return best;
}

TransitPlanner::TransitPlanner(const RoadNetwork& net,
                               const TransitTimetable& tt, WalkParams wp)
    : net_(&net), tt_(&tt), wp_(wp) {}

namespace {

struct Label {
  Seconds time = 0;
  Meters walk = 0;
  int station = -1;  // index into stop_vertices
  int parent = -1;
  bool after_walk = false;  // forbids chaining a second walking leg
  bool rode = false;        // some ride leg lies behind this label
  JourneyLeg leg;
  bool has_leg = false;
};

struct QItem {
  Seconds time;
  Meters walk;
  int station;
  int label;
  bool operator>(const QItem& o) const {
    if (time != o.time) return time > o.time;
    if (walk != o.walk) return walk > o.walk;
    if (station != o.station) return station > o.station;
    return label > o.label;
  }
};

struct ParetoEntry {
  Seconds time;
  Meters walk;
  bool can_walk;
  bool rode;
};

// An entry only dominates labels it is at least as capable as: walking
// further, and completing a transit-only query (which needs a ride behind).
bool dominated(const std::vector<ParetoEntry>& set, Seconds time, Meters walk,
               bool can_walk, bool rode) {
  for (const ParetoEntry& e : set) {
    bool capability_ok = (e.can_walk || !can_walk) && (e.rode || !rode);
    if (e.time <= time && e.walk <= walk && capability_ok) return true;
  }
  return false;
}

}  // namespace

std::optional<Journey> TransitPlanner::search(const Location& o,
                                              const Location& d,
                                              Seconds depart,
                                              bool allow_pure_walk) const {
  const std::vector<VertexId>& stops = tt_->stop_vertices();
  const int ns = static_cast<int>(stops.size());
  std::vector<Location> stop_loc(ns);
  for (int i = 0; i < ns; ++i) stop_loc[i] = net_->location(stops[i]);

  std::vector<Label> pool;
  std::priority_queue<QItem, std::vector<QItem>, std::greater<QItem>> pq;
  std::vector<std::vector<ParetoEntry>> pareto(ns);

  auto push = [&](Label l) {
    int idx = static_cast<int>(pool.size());
    pool.push_back(std::move(l));
    pq.push({pool[idx].time, pool[idx].walk, pool[idx].station, idx});
  };

  for (int i = 0; i < ns; ++i) {
    Meters m = straight_line_m(o, stop_loc[i]);
    if (m > wp_.cap_m) continue;
    Label l;
    l.time = depart + walk_seconds(m, wp_.speed_mps);
    l.walk = m;
    l.station = i;
    l.after_walk = true;
    if (m > 0 || o.vertex != stops[i]) {
      l.leg = WalkLeg{o.vertex, stops[i], walk_seconds(m, wp_.speed_mps), m};
      l.has_leg = true;
    }
    push(std::move(l));
  }

  // Best completed journey: (arrive, total walk), first found wins ties.
  struct Final {
    Seconds arrive;
    Meters walk;
    int label;     // -1 for the direct walk
    Meters tail_m;
  };
  std::optional<Final> best;
  auto consider = [&](Seconds arrive, Meters walk, int label, Meters tail_m) {
    if (!best || arrive < best->arrive ||
        (arrive == best->arrive && walk < best->walk)) {
      best = Final{arrive, walk, label, tail_m};
    }
  };

  if (allow_pure_walk) {
    Meters m = straight_line_m(o, d);
    if (m <= wp_.cap_m)
      consider(depart + walk_seconds(m, wp_.speed_mps), m, -1, m);
  }

  while (!pq.empty()) {
    QItem q = pq.top();
    pq.pop();
    const Label& lab = pool[q.label];
    if (lab.time != q.time || lab.walk != q.walk) continue;
    if (dominated(pareto[q.station], lab.time, lab.walk, !lab.after_walk,
                  lab.rode))
      continue;
    pareto[q.station].push_back(
        {lab.time, lab.walk, !lab.after_walk, lab.rode});

    // Complete with a last walking leg; only ride arrivals may add one, and
    // ride-less completions are the pure-walk case handled above.
    Meters tail = straight_line_m(stop_loc[q.station], d);
    if ((allow_pure_walk || lab.rode) && (tail == 0 || !lab.after_walk) &&
        lab.walk + tail <= wp_.cap_m) {
      consider(lab.time + walk_seconds(tail, wp_.speed_mps), lab.walk + tail,
               q.label, tail);
    }

    // Board trips at this station.
    const VertexId sv = stops[q.station];
    for (std::size_t ti = 0; ti < tt_->trips().size(); ++ti) {
      const Trip& trip = tt_->trips()[ti];
      int board = -1;
      for (std::size_t k = 0; k < trip.stops.size(); ++k) {
        if (trip.stops[k].station == sv &&
            trip.stops[k].departure >= lab.time) {
          board = static_cast<int>(k);
          break;
        }
      }
      if (board < 0) continue;
      for (std::size_t l = board + 1; l < trip.stops.size(); ++l) {
        const StopEvent& se = trip.stops[l];
        int sidx = static_cast<int>(
            std::lower_bound(stops.begin(), stops.end(), se.station) -
            stops.begin());
        if (sidx >= ns || stops[sidx] != se.station) continue;
        if (dominated(pareto[sidx], se.arrival, lab.walk, true, true))
          continue;
        Label nl;
        nl.time = se.arrival;
        nl.walk = lab.walk;
        nl.station = sidx;
        nl.parent = q.label;
        nl.after_walk = false;
        nl.rode = true;
        nl.leg = RideLeg{trip.id, sv, se.station,
                         trip.stops[board].departure, se.arrival};
        nl.has_leg = true;
        push(std::move(nl));
      }
    }

    // Transfer on foot to another station.
    if (!lab.after_walk) {
      for (int j = 0; j < ns; ++j) {
        if (j == q.station) continue;
        Meters m = straight_line_m(stop_loc[q.station], stop_loc[j]);
        if (m == 0 || lab.walk + m > wp_.cap_m) continue;
        Seconds nt = lab.time + walk_seconds(m, wp_.speed_mps);
        if (dominated(pareto[j], nt, lab.walk + m, false, lab.rode)) continue;
        Label nl;
        nl.time = nt;
        nl.walk = lab.walk + m;
        nl.station = j;
        nl.parent = q.label;
        nl.after_walk = true;
        nl.rode = lab.rode;
        nl.leg = WalkLeg{stops[q.station], stops[j],
                         walk_seconds(m, wp_.speed_mps), m};
        nl.has_leg = true;
        push(std::move(nl));
      }
    }
  }

  if (!best) return std::nullopt;

  Journey j;
  j.arrive = best->arrive;
  j.walk_m = best->walk;
  if (best->label >= 0) {
    std::vector<int> chain;
    for (int cur = best->label; cur != -1; cur = pool[cur].parent)
      chain.push_back(cur);
    std::reverse(chain.begin(), chain.end());
    for (int idx : chain)
      if (pool[idx].has_leg) j.legs.push_back(pool[idx].leg);
    if (best->tail_m > 0) {
      j.legs.push_back(WalkLeg{stops[pool[best->label].station], d.vertex,
                               walk_seconds(best->tail_m, wp_.speed_mps),
                               best->tail_m});
    }
  } else if (best->tail_m > 0) {
    j.legs.push_back(WalkLeg{o.vertex, d.vertex,
                             walk_seconds(best->tail_m, wp_.speed_mps),
                             best->tail_m});
  }

  // Normalize the departure to the latest start catching the same trips.
  Seconds lead = 0;
  std::optional<Seconds> first_ride_depart;
  for (const JourneyLeg& leg : j.legs) {
    if (const auto* w = std::get_if<WalkLeg>(&leg)) {
      lead += w->seconds;
    } else {
      first_ride_depart = std::get<RideLeg>(leg).depart;
      break;
    }
  }
  j.depart = first_ride_depart ? *first_ride_depart - lead : depart;
  return j;
}

std::optional<Journey> TransitPlanner::earliest_arrival(const Location& o,
                                                        const Location& d,
                                                        Seconds depart) const {
  return search(o, d, depart, true);
}

const JourneyProfile& TransitPlanner::profile(VertexId o, VertexId d) {
  std::uint64_t key = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(o))
                       << 32) |
                      static_cast<std::uint32_t>(d);
  auto it = profiles_.find(key);
  if (it != profiles_.end()) return it->second;

  JourneyProfile p;
  Location lo = net_->location(o);
  Location ld = net_->location(d);
  Meters m = straight_line_m(lo, ld);
  if (m <= wp_.cap_m) {
    Journey w;
    if (m > 0)
      w.legs.push_back(WalkLeg{o, d, walk_seconds(m, wp_.speed_mps), m});
    w.depart = 0;
    w.arrive = walk_seconds(m, wp_.speed_mps);
    w.walk_m = m;
    p.walk_only = std::move(w);
  }
  Seconds tau = 0;
  for (int guard = 0; guard < 1 << 20; ++guard) {
    std::optional<Journey> j = search(lo, ld, tau, false);
    if (!j) break;
    p.transit.push_back({j->depart, j->arrive, *j});
    if (j->depart < tau) break;  // defensive; departures must advance
    tau = j->depart + 1;
  }
  return profiles_.emplace(key, std::move(p)).first->second;
}

std::optional<Journey> earliest_arrival_journey(const RoadNetwork& net,
                                                const TransitTimetable& tt,
                                                const Location& o,
                                                const Location& d,
                                                Seconds depart, WalkParams wp) {
  TransitPlanner planner(net, tt, wp);
  return planner.earliest_arrival(o, d, depart);
}

}  // namespace mtrs::routing
