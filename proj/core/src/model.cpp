#include "mtrs/model.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace mtrs {

const Driver* Instance::find_driver(AgentId id) const {
  for (const Driver& d : personal_drivers)
    if (d.id == id) return &d;
  for (const Driver& d : designated_drivers)
    if (d.id == id) return &d;
  return nullptr;
}

const Rider* Instance::find_rider(AgentId id) const {
  for (const Rider& r : riders)
    if (r.id == id) return &r;
  return nullptr;
}

namespace {

void check_driver(const Instance& inst, const Driver& d, bool designated,
                  std::vector<std::string>& out) {
  std::string who = std::string(designated ? "designated driver "
                                           : "personal driver ") +
                    std::to_string(d.id);
  if (d.earliest_departure >= d.latest_arrival)
    out.push_back(who +
                  ": earliest_departure must precede latest_arrival");
  if (d.capacity < 1) out.push_back(who + ": capacity must be at least 1");
  if (d.detour_limit < 0) out.push_back(who + ": detour_limit must be >= 0");
  if (!inst.network.has_vertex(d.origin.vertex))
    out.push_back(who + ": origin is not a network vertex");
  if (!inst.network.has_vertex(d.destination.vertex))
    out.push_back(who + ": destination is not a network vertex");
}

}  // namespace

std::vector<std::string> validate_instance(const Instance& inst) {
  std::vector<std::string> out;

  if (inst.interval_start >= inst.interval_end)
    out.push_back("interval: start must precede end");

  std::set<AgentId> driver_ids;
  for (const Driver& d : inst.personal_drivers) {
    if (!driver_ids.insert(d.id).second)
      out.push_back("personal driver " + std::to_string(d.id) +
                    ": id duplicates another driver");
    check_driver(inst, d, false, out);
    if (d.kind != DriverKind::Personal)
      out.push_back("personal driver " + std::to_string(d.id) +
                    ": kind must be personal");
  }
  for (const Driver& d : inst.designated_drivers) {
    if (!driver_ids.insert(d.id).second)
      out.push_back("designated driver " + std::to_string(d.id) +
                    ": id duplicates another driver");
    check_driver(inst, d, true, out);
    if (d.kind != DriverKind::Designated)
      out.push_back("designated driver " + std::to_string(d.id) +
                    ": kind must be designated");
  }

  std::set<AgentId> rider_ids;
  for (const Rider& r : inst.riders) {
    std::string who = "rider " + std::to_string(r.id);
    if (!rider_ids.insert(r.id).second)
      out.push_back(who + ": id duplicates another rider");
    if (r.earliest_departure >= r.latest_arrival)
      out.push_back(who + ": earliest_departure must precede latest_arrival");
    if (!(r.acceptance_threshold > 0.0 && r.acceptance_threshold <= 1.0))
      out.push_back(who + ": acceptance_threshold must lie in (0, 1]");
    if (r.transit_baseline <= 0)
      out.push_back(who + ": transit_baseline must be positive");
    if (!inst.network.has_vertex(r.origin.vertex))
      out.push_back(who + ": origin is not a network vertex");
    if (!inst.network.has_vertex(r.destination.vertex))
      out.push_back(who + ": destination is not a network vertex");
    if (r.origin.vertex == r.destination.vertex)
      out.push_back(who + ": origin equals destination");
  }

  for (const Location& s : inst.stations) {
    if (!inst.network.has_vertex(s.vertex))
      out.push_back("station " + std::to_string(s.vertex) +
                    ": not a network vertex");
  }
  for (std::size_t i = 1; i < inst.stations.size(); ++i) {
    if (inst.stations[i - 1].vertex >= inst.stations[i].vertex) {
      out.push_back("stations: vertex ids must be strictly ascending");
      break;
    }
  }

  for (const routing::Trip& t : inst.timetable.trips()) {
    for (std::size_t k = 0; k < t.stops.size(); ++k) {
      const routing::StopEvent& se = t.stops[k];
      if (se.arrival > se.departure) {
        out.push_back("trip " + std::to_string(t.id) +
                      ": stop arrival after departure");
        break;
      }
      if (k > 0 && t.stops[k - 1].departure >= se.arrival) {
        out.push_back("trip " + std::to_string(t.id) +
                      ": stop times must strictly increase");
        break;
      }
      if (!inst.network.has_vertex(se.station)) {
        out.push_back("trip " + std::to_string(t.id) +
                      ": stop station is not a network vertex");
        break;
      }
    }
  }

  return out;
}

}  // namespace mtrs
