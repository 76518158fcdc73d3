#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mtrs/routing.hpp"
#include "mtrs/types.hpp"

namespace mtrs {

enum class DriverKind { Personal, Designated };

inline const char* to_string(DriverKind k) {
  return k == DriverKind::Personal ? "personal" : "designated";
}

struct Driver {
  AgentId id = 0;
  DriverKind kind = DriverKind::Personal;
  MatchType match_type = MatchType::FirstMile;
  Location origin;
  Location destination;
  Seconds earliest_departure = 0;  // alpha
  Seconds latest_arrival = 0;      // beta
  int capacity = 1;                // seats offered to riders
  Seconds detour_limit = 0;        // ignored for designated drivers
};

struct Rider {
  AgentId id = 0;
  MatchType match_type = MatchType::FirstMile;
  Location origin;
  Location destination;
  Seconds earliest_departure = 0;
  Seconds latest_arrival = 0;
  double acceptance_threshold = 0.3;  // required fractional time saving, (0,1]
  Seconds transit_baseline = 0;       // duration of the best pure-transit route
};

/// One planning interval's worth of agents plus the shared infrastructure.
/// All times are absolute seconds on one simulation clock; the interval
/// bounds say when these requests and offers were collected.
struct Instance {
  routing::RoadNetwork network;
  routing::TransitTimetable timetable;
  std::vector<Location> stations;  // ascending vertex id
  std::vector<Driver> personal_drivers;
  std::vector<Driver> designated_drivers;
  std::vector<Rider> riders;
  Seconds interval_start = 0;
  Seconds interval_end = 0;

  const Driver* find_driver(AgentId id) const;
  const Rider* find_rider(AgentId id) const;
};

/// Structural checks; returns one human-readable violation per defect,
/// each naming the offending agent and field. Empty means well-formed.
std::vector<std::string> validate_instance(const Instance& inst);

/// True when a rider's time saving meets their acceptance threshold.
inline bool meets_saving(Seconds saved, double threshold, Seconds baseline) {
  return static_cast<double>(saved) + 1e-9 >=
         threshold * static_cast<double>(baseline);
}

}  // namespace mtrs
