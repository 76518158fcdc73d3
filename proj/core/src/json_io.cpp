#include "mtrs/json_io.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace mtrs::io {

using ordered_json = nlohmann::ordered_json;

namespace {

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

ordered_json location_json(const Location& l) {
  return ordered_json{{"vertex", l.vertex}, {"x", l.x}, {"y", l.y}};
}

Location location_from(const ordered_json& j) {
  Location l;
  l.vertex = j.at("vertex").get<VertexId>();
  l.x = j.at("x").get<double>();
  l.y = j.at("y").get<double>();
  return l;
}

MatchType parse_match_type(const std::string& s) {
  const std::optional<MatchType> mt = match_type_from_string(s);
  if (!mt) throw IoError("unknown match_type \"" + s + "\"");
  return *mt;
}

ordered_json driver_json(const Driver& d) {
  return ordered_json{{"id", d.id},
                      {"kind", to_string(d.kind)},
                      {"match_type", to_string(d.match_type)},
                      {"origin", location_json(d.origin)},
                      {"destination", location_json(d.destination)},
                      {"earliest_departure", d.earliest_departure},
                      {"latest_arrival", d.latest_arrival},
                      {"capacity", d.capacity},
                      {"detour_limit", d.detour_limit}};
}

Driver driver_from(const ordered_json& j) {
  Driver d;
  d.id = j.at("id").get<AgentId>();
  d.kind = j.at("kind").get<std::string>() == "personal"
               ? DriverKind::Personal
               : DriverKind::Designated;
  d.match_type = parse_match_type(j.at("match_type").get<std::string>());
  d.origin = location_from(j.at("origin"));
  d.destination = location_from(j.at("destination"));
  d.earliest_departure = j.at("earliest_departure").get<Seconds>();
  d.latest_arrival = j.at("latest_arrival").get<Seconds>();
  d.capacity = j.at("capacity").get<int>();
  d.detour_limit = j.at("detour_limit").get<Seconds>();
  return d;
}

ordered_json rider_json(const Rider& r) {
  return ordered_json{{"id", r.id},
                      {"match_type", to_string(r.match_type)},
                      {"origin", location_json(r.origin)},
                      {"destination", location_json(r.destination)},
                      {"earliest_departure", r.earliest_departure},
                      {"latest_arrival", r.latest_arrival},
                      {"acceptance_threshold", r.acceptance_threshold},
                      {"transit_baseline", r.transit_baseline}};
}

Rider rider_from(const ordered_json& j) {
  Rider r;
  r.id = j.at("id").get<AgentId>();
  r.match_type = parse_match_type(j.at("match_type").get<std::string>());
  r.origin = location_from(j.at("origin"));
  r.destination = location_from(j.at("destination"));
  r.earliest_departure = j.at("earliest_departure").get<Seconds>();
  r.latest_arrival = j.at("latest_arrival").get<Seconds>();
  r.acceptance_threshold = j.at("acceptance_threshold").get<double>();
  r.transit_baseline = j.at("transit_baseline").get<Seconds>();
  return r;
}

}  // namespace

std::string store_instance(const Instance& inst) {
  ordered_json j;

  ordered_json vertices = ordered_json::array();
  for (const Location& v : inst.network.vertices())
    vertices.push_back(location_json(v));
  ordered_json edges = ordered_json::array();
  for (const routing::RoadEdge& e : inst.network.edges())
    edges.push_back(ordered_json{{"from", e.from},
                                 {"to", e.to},
                                 {"distance_m", e.distance_m},
                                 {"travel_s", e.travel_s}});
  j["network"] = ordered_json{{"vertices", vertices}, {"edges", edges}};

  ordered_json trips = ordered_json::array();
  for (const routing::Trip& t : inst.timetable.trips()) {
    ordered_json stops = ordered_json::array();
    for (const routing::StopEvent& s : t.stops)
      stops.push_back(ordered_json{{"station", s.station},
                                   {"arrival", s.arrival},
                                   {"departure", s.departure}});
    trips.push_back(ordered_json{{"id", t.id}, {"stops", stops}});
  }
  j["timetable"] = ordered_json{{"trips", trips}};

  ordered_json stations = ordered_json::array();
  for (const Location& s : inst.stations) stations.push_back(location_json(s));
  j["stations"] = stations;

  ordered_json personal = ordered_json::array();
  for (const Driver& d : inst.personal_drivers)
    personal.push_back(driver_json(d));
  j["personal_drivers"] = personal;

  ordered_json designated = ordered_json::array();
  for (const Driver& d : inst.designated_drivers)
    designated.push_back(driver_json(d));
  j["designated_drivers"] = designated;

  ordered_json riders = ordered_json::array();
  for (const Rider& r : inst.riders) riders.push_back(rider_json(r));
  j["riders"] = riders;

  j["interval"] =
      ordered_json{{"start", inst.interval_start}, {"end", inst.interval_end}};
  return dump(j);
}

Instance load_instance(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("instance parse failed: ") + e.what());
  }
  try {
    Instance inst;
    std::vector<Location> vertices;
    for (const ordered_json& v : j.at("network").at("vertices"))
      vertices.push_back(location_from(v));
    std::vector<routing::RoadEdge> edges;
    for (const ordered_json& e : j.at("network").at("edges"))
      edges.push_back({e.at("from").get<VertexId>(),
                       e.at("to").get<VertexId>(),
                       e.at("distance_m").get<Meters>(),
                       e.at("travel_s").get<Seconds>()});
    inst.network = routing::RoadNetwork(std::move(vertices), std::move(edges));

    std::vector<routing::Trip> trips;
    for (const ordered_json& t : j.at("timetable").at("trips")) {
      routing::Trip trip;
      trip.id = t.at("id").get<int>();
      for (const ordered_json& s : t.at("stops"))
        trip.stops.push_back({s.at("station").get<VertexId>(),
                              s.at("arrival").get<Seconds>(),
                              s.at("departure").get<Seconds>()});
      trips.push_back(std::move(trip));
    }
    inst.timetable = routing::TransitTimetable(std::move(trips));

    for (const ordered_json& s : j.at("stations"))
      inst.stations.push_back(location_from(s));
    for (const ordered_json& d : j.at("personal_drivers"))
      inst.personal_drivers.push_back(driver_from(d));
    for (const ordered_json& d : j.at("designated_drivers"))
      inst.designated_drivers.push_back(driver_from(d));
    for (const ordered_json& r : j.at("riders"))
      inst.riders.push_back(rider_from(r));
    inst.interval_start = j.at("interval").at("start").get<Seconds>();
    inst.interval_end = j.at("interval").at("end").get<Seconds>();
    return inst;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("instance fields invalid: ") + e.what());
  }
}

std::string store_hypergraph(const Hypergraph& h) {
  ordered_json j;
  j["drivers"] = h.drivers();
  j["riders"] = h.riders();
  ordered_json caps = ordered_json::array();
  for (AgentId d : h.drivers())
    caps.push_back(ordered_json{{"driver", d}, {"capacity", h.capacity(d)}});
  j["capacities"] = caps;
  ordered_json edges = ordered_json::array();
  for (std::size_t id = 0; id < h.edge_count(); ++id) {
    const FeasibleMatch& e = h.edges()[id];
    ordered_json je{{"id", id}, {"driver", e.driver}, {"riders", e.riders}};
    if (e.station) je["station"] = *e.station;
    je["weight"] = e.weight;
    je["incurred_m"] = e.incurred_m;
    edges.push_back(std::move(je));
  }
  j["edges"] = edges;
  return dump(j);
}

std::string store_solution(const Hypergraph& h,
                           const solver::AssignmentSolution& s,
                           feas::Problem problem) {
  ordered_json j;
  j["problem"] = feas::to_string(problem);
  j["status"] = solver::to_string(s.status);
  j["objective"] = s.objective;
  ordered_json edges = ordered_json::array();
  for (int id : s.edges) {
    const FeasibleMatch& e = h.edge(id);
    edges.push_back(ordered_json{{"id", id},
                                 {"driver", e.driver},
                                 {"riders", e.riders},
                                 {"weight", e.weight}});
  }
  j["edges"] = edges;
  ordered_json assign = ordered_json::array();
  for (const auto& [rider, driver] : s.assignment)
    assign.push_back(ordered_json{{"rider", rider}, {"driver", driver}});
  j["assignment"] = assign;
  if (!s.note.empty()) j["note"] = s.note;
  return dump(j);
}

std::string store_clusters(const cluster::ClusterSet& cs) {
  ordered_json arr = ordered_json::array();
  for (const cluster::Cluster& c : cs) {
    arr.push_back(
        ordered_json{{"id", c.id},
                     {"match_type", to_string(c.match_type)},
                     {"cell", ordered_json{{"x", c.cell.x}, {"y", c.cell.y}}},
                     {"sector", c.sector},
                     {"riders", c.riders},
                     {"personal_drivers", c.personal_drivers},
                     {"designated_drivers", c.designated_drivers},
                     {"isolated", c.isolated},
                     {"size", c.size()}});
  }
  return dump(ordered_json{{"clusters", arr}});
}

std::string store_threedm(const gen::ThreeDM& t) {
  ordered_json j;
  j["q"] = t.q;
  j["A"] = t.A;
  j["B"] = t.B;
  j["C"] = t.C;
  ordered_json triples = ordered_json::array();
  for (const std::array<int, 3>& f : t.F)
    triples.push_back(ordered_json::array({f[0], f[1], f[2]}));
  j["F"] = triples;
  j["omega"] = t.omega;
  return dump(j);
}

gen::ThreeDM load_threedm(const std::string& text) {
  try {
    const ordered_json j = ordered_json::parse(text);
    gen::ThreeDM t;
    t.q = j.at("q").get<int>();
    t.A = j.at("A").get<std::vector<std::string>>();
    t.B = j.at("B").get<std::vector<std::string>>();
    t.C = j.at("C").get<std::vector<std::string>>();
    for (const ordered_json& f : j.at("F"))
      t.F.push_back({f.at(0).get<int>(), f.at(1).get<int>(),
                     f.at(2).get<int>()});
    t.omega = j.at("omega").get<std::int64_t>();
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("3dm parse failed: ") + e.what());
  }
}

gen::GenConfig load_gen_config(const std::string& text) {
  try {
    const ordered_json j = ordered_json::parse(text);
    gen::GenConfig cfg;
    if (j.contains("grid_n")) cfg.grid_n = j.at("grid_n").get<int>();
    if (j.contains("block_m")) cfg.block_m = j.at("block_m").get<Meters>();
    if (j.contains("stations")) cfg.stations = j.at("stations").get<int>();
    if (j.contains("transit_lines"))
      cfg.transit_lines = j.at("transit_lines").get<int>();
    if (j.contains("trips_per_line"))
      cfg.trips_per_line = j.at("trips_per_line").get<int>();
    if (j.contains("headway_s")) cfg.headway_s = j.at("headway_s").get<Seconds>();
    if (j.contains("riders")) cfg.riders = j.at("riders").get<int>();
    if (j.contains("zone_weights"))
      cfg.zone_weights = j.at("zone_weights").get<std::vector<double>>();
    if (j.contains("interval_len_s"))
      cfg.interval_len_s = j.at("interval_len_s").get<Seconds>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("generation config parse failed: ") + e.what());
  }
}

cluster::ClusterConfig load_cluster_config(const std::string& text) {
  try {
    const ordered_json j = ordered_json::parse(text);
    cluster::ClusterConfig cfg;
    if (j.contains("m1")) cfg.m1 = j.at("m1").get<int>();
    if (j.contains("m2")) cfg.m2 = j.at("m2").get<int>();
    if (j.contains("s_min")) cfg.s_min = j.at("s_min").get<int>();
    if (j.contains("s_max")) cfg.s_max = j.at("s_max").get<int>();
    if (j.contains("tau1")) cfg.tau1 = j.at("tau1").get<double>();
    if (j.contains("tau2")) cfg.tau2 = j.at("tau2").get<double>();
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("cluster config parse failed: ") + e.what());
  }
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot open " + p.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("read failed for " + p.string());
  return buf.str();
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + p.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("write failed for " + p.string());
}

}  // namespace mtrs::io
