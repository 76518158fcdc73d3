#include "mtrs/feasibility.hpp"

#include <algorithm>
#include <set>

namespace mtrs::feas {

MatchContext::MatchContext(const Instance& inst)
    : inst_(&inst),
      roads_(inst.network),
      transit_(inst.network, inst.timetable) {}

void MatchContext::warm_all() {
  for (const Location& s : inst_->stations) roads_.warm(s.vertex);
  for (const Driver& d : inst_->personal_drivers) roads_.warm(d.origin.vertex);
  for (const Driver& d : inst_->designated_drivers)
    roads_.warm(d.origin.vertex);
  for (const Rider& r : inst_->riders) {
    roads_.warm(r.origin.vertex);
    roads_.warm(r.destination.vertex);
  }
}

Meters incurred_travel_distance(MatchContext& ctx, const Driver& driver,
                                const FeasibleMatch& match) {
  Meters route_m = 0;
  for (std::size_t i = 1; i < match.route.size(); ++i)
    route_m += ctx.drive_m(match.route[i - 1], match.route[i]);
  if (driver.kind == DriverKind::Designated) return route_m;
  Meters fp_m = ctx.drive_m(driver.origin.vertex, driver.destination.vertex);
  Meters extra = route_m - fp_m;
  if (extra < 0)
    throw NegativeDetourError("personal driver " + std::to_string(driver.id) +
                              ": route shorter than fastest path");
  return extra;
}

namespace {

struct Candidate {
  Meters incurred = 0;
  FeasibleMatch match;
  bool found = false;
};

// Keeps the strictly better candidate; scan order (stations ascending,
// pickup orders lexicographic) already realizes the tie-break policy.
void keep_better(Candidate& best, Meters incurred, FeasibleMatch m) {
  if (!best.found || incurred < best.incurred) {
    best.found = true;
    best.incurred = incurred;
    best.match = std::move(m);
  }
}

std::vector<const Rider*> resolve_riders(const Instance& inst,
                                         std::span<const Rider> riders) {
  std::vector<const Rider*> out;
  out.reserve(riders.size());
  for (const Rider& r : riders) out.push_back(&r);
  std::sort(out.begin(), out.end(),
            [](const Rider* a, const Rider* b) { return a->id < b->id; });
  return out;
}

}  // namespace

std::optional<FeasibleMatch> check_feasible_match(
    MatchContext& ctx, const Driver& driver, std::span<const Rider> riders) {
  if (riders.empty()) return std::nullopt;
  if (static_cast<int>(riders.size()) > driver.capacity) return std::nullopt;
  for (const Rider& r : riders)
    if (r.match_type != driver.match_type) return std::nullopt;

  const Instance& inst = ctx.instance();
  const bool personal = driver.kind == DriverKind::Personal;
  const VertexId o = driver.origin.vertex;
  const VertexId dd = driver.destination.vertex;

  const Seconds fp_s = ctx.drive_s(o, dd);
  const Meters fp_m = ctx.drive_m(o, dd);
  Seconds t_max = driver.latest_arrival - driver.earliest_departure;
  if (personal) t_max = std::min(t_max, fp_s + driver.detour_limit);

  std::vector<const Rider*> rs = resolve_riders(inst, riders);
  const std::size_t k = rs.size();

  Candidate best;

  for (const Location& st : inst.stations) {
    const VertexId s = st.vertex;
    if (ctx.drive_s(o, s) + ctx.drive_s(s, dd) > t_max) continue;

    if (driver.match_type == MatchType::FirstMile) {
      // Riders are driven to s, then ride transit to their destinations.
      std::vector<const routing::JourneyProfile*> prof(k);
      std::vector<Seconds> departs;  // transit breakpoints across riders
      for (std::size_t j = 0; j < k; ++j) {
        prof[j] = &ctx.transit().profile(s, rs[j]->destination.vertex);
        for (const auto& e : prof[j]->transit) departs.push_back(e.depart);
      }
      std::sort(departs.begin(), departs.end());
      departs.erase(std::unique(departs.begin(), departs.end()),
                    departs.end());

      std::vector<int> order(k);
      for (std::size_t i = 0; i < k; ++i) order[i] = static_cast<int>(i);
      do {
        // Stop sequence o, pickups in `order`, s; then the driver heads home.
        Seconds route_s = 0;
        Meters route_m = 0;
        VertexId prev = o;
        std::vector<Seconds> suffix_to_s(k, 0);  // drive time pickup_j -> s
        std::vector<Seconds> leg_s(k, 0);
        for (std::size_t i = 0; i < k; ++i) {
          VertexId p = rs[order[i]]->origin.vertex;
          leg_s[i] = ctx.drive_s(prev, p);
          route_s += leg_s[i];
          route_m += ctx.drive_m(prev, p);
          prev = p;
        }
        Seconds last_to_s = ctx.drive_s(prev, s);
        route_s += last_to_s;
        route_m += ctx.drive_m(prev, s);
        route_s += ctx.drive_s(s, dd);
        route_m += ctx.drive_m(s, dd);
        if (route_s > t_max) continue;
        if (best.found) {
          Meters incurred = personal ? route_m - fp_m : route_m;
          if (incurred >= best.incurred) continue;
        }

        // Earliest feasible arrival at the station, honoring every window.
        Seconds cur = driver.earliest_departure;
        for (std::size_t i = 0; i < k; ++i) {
          cur += leg_s[i];
          cur = std::max(cur, rs[order[i]]->earliest_departure);
        }
        const Seconds tau_min = cur + last_to_s;
        const Seconds tau_max = driver.latest_arrival - ctx.drive_s(s, dd);
        if (tau_min > tau_max) continue;

        // Drive time from each pickup to the station under this order.
        {
          Seconds acc = last_to_s;
          for (std::size_t i = k; i-- > 0;) {
            suffix_to_s[order[i]] = acc;
            if (i > 0) acc += leg_s[i];
          }
        }

        // Candidate station arrivals: earliest possible, plus every transit
        // departure the driver could instead wait for.
        std::vector<Seconds> cands{tau_min};
        for (Seconds dep : departs)
          if (dep > tau_min && dep <= tau_max) cands.push_back(dep);

        for (Seconds tau : cands) {
          std::vector<Seconds> jd(k), ja(k);
          bool ok = true, hopeless = false;
          for (std::size_t j = 0; j < k; ++j) {
            std::optional<routing::Journey> ea = prof[j]->earliest(tau);
            if (!ea) {
              hopeless = true;
              break;
            }
            if (ea->arrive > rs[j]->latest_arrival) {
              hopeless = true;  // arrivals only grow with tau
              break;
            }
            jd[j] = ea->depart;
            ja[j] = ea->arrive;
          }
          if (hopeless) break;

          // Shift the whole drive as late as the journeys allow.
          Seconds shift_cap = tau_max - tau;
          for (std::size_t j = 0; j < k; ++j)
            shift_cap = std::min(shift_cap, jd[j] - tau);
          const Seconds tau_f = tau + shift_cap;

          std::vector<ServiceTimes> service(k);
          for (std::size_t j = 0; j < k && ok; ++j) {
            Seconds pickup = tau_f - suffix_to_s[j];
            Seconds duration = ja[j] - pickup;
            Seconds saved = rs[j]->transit_baseline - duration;
            if (!meets_saving(saved, rs[j]->acceptance_threshold,
                              rs[j]->transit_baseline))
              ok = false;
            service[j] = {pickup, jd[j], ja[j]};
          }
          if (!ok) continue;

          FeasibleMatch m;
          m.driver = driver.id;
          for (const Rider* r : rs) m.riders.push_back(r->id);
          m.station = s;
          m.route.push_back(o);
          for (std::size_t i = 0; i < k; ++i)
            m.route.push_back(rs[order[i]]->origin.vertex);
          m.route.push_back(s);
          m.route.push_back(dd);
          m.route_distance_m = route_m;
          m.route_duration_s = route_s;
          m.incurred_m = personal ? route_m - fp_m : route_m;
          if (personal && m.incurred_m < 0)
            throw NegativeDetourError(
                "personal driver " + std::to_string(driver.id) +
                ": route shorter than fastest path");
          m.weight = std::max<std::int64_t>(m.incurred_m, 1);
          m.service = std::move(service);
          keep_better(best, m.incurred_m, std::move(m));
          break;  // later candidates cannot improve this (station, order)
        }
      } while (std::next_permutation(order.begin(), order.end()));
    } else {
      // Last mile: riders ride transit to s, then are driven home.
      std::vector<routing::Journey> arr(k);
      bool station_ok = true;
      for (std::size_t j = 0; j < k; ++j) {
        const routing::JourneyProfile& p =
            ctx.transit().profile(rs[j]->origin.vertex, s);
        std::optional<routing::Journey> ea =
            p.earliest(rs[j]->earliest_departure);
        if (!ea) {
          station_ok = false;
          break;
        }
        arr[j] = *ea;
      }
      if (!station_ok) continue;

      std::vector<int> order(k);
      for (std::size_t i = 0; i < k; ++i) order[i] = static_cast<int>(i);
      do {
        Seconds route_s = ctx.drive_s(o, s);
        Meters route_m = ctx.drive_m(o, s);
        std::vector<Seconds> prefix_from_s(k, 0);  // s -> dropoff_j
        VertexId prev = s;
        Seconds acc = 0;
        for (std::size_t i = 0; i < k; ++i) {
          VertexId t = rs[order[i]]->destination.vertex;
          acc += ctx.drive_s(prev, t);
          prefix_from_s[order[i]] = acc;
          route_s += ctx.drive_s(prev, t);
          route_m += ctx.drive_m(prev, t);
          prev = t;
        }
        route_s += ctx.drive_s(prev, dd);
        route_m += ctx.drive_m(prev, dd);
        if (route_s > t_max) continue;
        if (best.found) {
          Meters incurred = personal ? route_m - fp_m : route_m;
          if (incurred >= best.incurred) continue;
        }

        Seconds tau_dep =
            driver.earliest_departure + ctx.drive_s(o, s);
        for (std::size_t j = 0; j < k; ++j)
          tau_dep = std::max(tau_dep, arr[j].arrive);
        Seconds tail_s = route_s - ctx.drive_s(o, s);
        if (tau_dep + tail_s > driver.latest_arrival) continue;

        bool ok = true;
        std::vector<ServiceTimes> service(k);
        for (std::size_t j = 0; j < k && ok; ++j) {
          Seconds drop = tau_dep + prefix_from_s[j];
          if (drop > rs[j]->latest_arrival) ok = false;
          Seconds duration = drop - arr[j].depart;
          Seconds saved = rs[j]->transit_baseline - duration;
          if (!meets_saving(saved, rs[j]->acceptance_threshold,
                            rs[j]->transit_baseline))
            ok = false;
          service[j] = {tau_dep, arr[j].depart, drop};
        }
        if (!ok) continue;

        FeasibleMatch m;
        m.driver = driver.id;
        for (const Rider* r : rs) m.riders.push_back(r->id);
        m.station = s;
        m.route.push_back(o);
        m.route.push_back(s);
        for (std::size_t i = 0; i < k; ++i)
          m.route.push_back(rs[order[i]]->destination.vertex);
        m.route.push_back(dd);
        m.route_distance_m = route_m;
        m.route_duration_s = route_s;
        m.incurred_m = personal ? route_m - fp_m : route_m;
        if (personal && m.incurred_m < 0)
          throw NegativeDetourError(
              "personal driver " + std::to_string(driver.id) +
              ": route shorter than fastest path");
        m.weight = std::max<std::int64_t>(m.incurred_m, 1);
        m.service = std::move(service);
        keep_better(best, m.incurred_m, std::move(m));
      } while (std::next_permutation(order.begin(), order.end()));
    }
  }

  if (!best.found) return std::nullopt;
  return best.match;
}

namespace {

const Rider* rider_by_id(const std::vector<const Rider*>& sorted, AgentId id) {
  auto it = std::lower_bound(
      sorted.begin(), sorted.end(), id,
      [](const Rider* r, AgentId v) { return r->id < v; });
  return it != sorted.end() && (*it)->id == id ? *it : nullptr;
}

}  // namespace

Hypergraph enumerate_hypergraph_scoped(MatchContext& ctx, Problem problem,
                                       std::span<const Driver> drivers,
                                       std::span<const Rider> riders) {
  std::vector<const Driver*> ds;
  for (const Driver& d : drivers) ds.push_back(&d);
  std::sort(ds.begin(), ds.end(),
            [](const Driver* a, const Driver* b) { return a->id < b->id; });
  std::vector<const Rider*> all = resolve_riders(ctx.instance(), riders);

  std::vector<AgentId> driver_ids, rider_ids;
  std::unordered_map<AgentId, int> caps;
  for (const Driver* d : ds) {
    driver_ids.push_back(d->id);
    caps[d->id] = d->capacity;
  }
  for (const Rider* r : all) rider_ids.push_back(r->id);

  Hypergraph h(driver_ids, rider_ids, caps);

  for (const Driver* d : ds) {
    std::vector<const Rider*> cands;
    for (const Rider* r : all)
      if (r->match_type == d->match_type) cands.push_back(r);

    // Level-wise growth: a set is tried only when every subset one smaller
    // was feasible, which is exact since feasibility is downward closed.
    std::set<std::vector<AgentId>> feasible_sets;
    std::vector<std::vector<AgentId>> level;
    for (const Rider* r : cands) {
      std::vector<Rider> one{*r};
      std::optional<FeasibleMatch> m = check_feasible_match(ctx, *d, one);
      if (!m) continue;
      if (problem == Problem::MinNum) m->weight = 1;
      h.add_edge(std::move(*m));
      level.push_back({r->id});
      feasible_sets.insert({r->id});
    }

    for (int size = 2; size <= d->capacity && !level.empty(); ++size) {
      std::vector<std::vector<AgentId>> next;
      for (std::size_t i = 0; i < level.size(); ++i) {
        for (std::size_t j = i + 1; j < level.size(); ++j) {
          // Join two sets sharing the same prefix to get a sorted candidate.
          if (!std::equal(level[i].begin(), level[i].end() - 1,
                          level[j].begin(), level[j].end() - 1))
            continue;
          std::vector<AgentId> cand = level[i];
          cand.push_back(level[j].back());
          bool all_sub = true;
          for (std::size_t drop = 0; drop + 1 < cand.size() && all_sub;
               ++drop) {
            std::vector<AgentId> sub = cand;
            sub.erase(sub.begin() + static_cast<std::ptrdiff_t>(drop));
            if (!feasible_sets.count(sub)) all_sub = false;
          }
          if (!all_sub) continue;

          std::vector<Rider> group;
          for (AgentId id : cand) group.push_back(*rider_by_id(all, id));
          std::optional<FeasibleMatch> m = check_feasible_match(ctx, *d, group);
          if (!m) continue;
          if (problem == Problem::MinNum) m->weight = 1;
          h.add_edge(std::move(*m));
          next.push_back(cand);
          feasible_sets.insert(cand);
        }
      }
      level = std::move(next);
    }
  }
  return h;
}

Hypergraph enumerate_hypergraph(MatchContext& ctx, Problem problem) {
  const Instance& inst = ctx.instance();
  std::vector<Driver> drivers;
  if (problem == Problem::MinDist)
    drivers.insert(drivers.end(), inst.personal_drivers.begin(),
                   inst.personal_drivers.end());
  drivers.insert(drivers.end(), inst.designated_drivers.begin(),
                 inst.designated_drivers.end());
  return enumerate_hypergraph_scoped(ctx, problem, drivers, inst.riders);
}

}  // namespace mtrs::feas
