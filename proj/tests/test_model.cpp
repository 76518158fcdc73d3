#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <string>
#include <vector>

#include "mtrs/model.hpp"
#include "test_support.hpp"

using namespace mtrs;
namespace ts = test_support;

namespace {

Instance small_instance() {
  Instance inst;
  inst.network = ts::line_network(6);
  inst.stations = {inst.network.vertices()[2], inst.network.vertices()[4]};
  inst.timetable = ts::simple_timetable({2, 4}, 3, 600, 900, 300);
  inst.interval_start = 0;
  inst.interval_end = 1800;

  Driver p;
  p.id = 10;
  p.kind = DriverKind::Personal;
  p.origin = inst.network.vertices()[0];
  p.destination = inst.network.vertices()[5];
  p.earliest_departure = 0;
  p.latest_arrival = 4000;
  p.capacity = 2;
  p.detour_limit = 600;
  inst.personal_drivers.push_back(p);

  Driver d;
  d.id = 20;
  d.kind = DriverKind::Designated;
  d.origin = inst.network.vertices()[1];
  d.destination = inst.network.vertices()[1];
  d.earliest_departure = 0;
  d.latest_arrival = 4000;
  d.capacity = 3;
  inst.designated_drivers.push_back(d);

  Rider r;
  r.id = 30;
  r.origin = inst.network.vertices()[0];
  r.destination = inst.network.vertices()[5];
  r.earliest_departure = 0;
  r.latest_arrival = 4000;
  r.acceptance_threshold = 0.3;
  r.transit_baseline = 2000;
  inst.riders.push_back(r);
  return inst;
}

bool mentions(const std::vector<std::string>& msgs, const std::string& needle) {
  return std::any_of(msgs.begin(), msgs.end(), [&](const std::string& m) {
    return m.find(needle) != std::string::npos;
  });
}

}  // namespace

TEST_CASE("well-formed instance validates cleanly") {
  const Instance inst = small_instance();
  CHECK(validate_instance(inst).empty());
}

TEST_CASE("agent lookup spans both driver lists") {
  const Instance inst = small_instance();
  REQUIRE(inst.find_driver(10) != nullptr);
  CHECK(inst.find_driver(10)->kind == DriverKind::Personal);
  REQUIRE(inst.find_driver(20) != nullptr);
  CHECK(inst.find_driver(20)->kind == DriverKind::Designated);
  CHECK(inst.find_driver(99) == nullptr);
  REQUIRE(inst.find_rider(30) != nullptr);
  CHECK(inst.find_rider(30)->id == 30);
  CHECK(inst.find_rider(10) == nullptr);
}

TEST_CASE("saving test applies the threshold against the baseline") {
  CHECK(meets_saving(600, 0.3, 2000));   // exactly 30 percent
  CHECK(meets_saving(601, 0.3, 2000));
  CHECK_FALSE(meets_saving(599, 0.3, 2000));
  CHECK(meets_saving(0, 0.3, 0));        // degenerate baseline never blocks
}

TEST_CASE("validation flags each structural defect") {
  SUBCASE("duplicate driver id across lists") {
    Instance inst = small_instance();
    Driver d = inst.designated_drivers[0];
    d.id = 10;
    inst.designated_drivers.push_back(d);
    CHECK(mentions(validate_instance(inst), "duplicates another driver"));
  }
  SUBCASE("inverted time window") {
    Instance inst = small_instance();
    inst.riders[0].latest_arrival = inst.riders[0].earliest_departure;
    CHECK(mentions(validate_instance(inst), "earliest_departure"));
  }
  SUBCASE("capacity below one") {
    Instance inst = small_instance();
    inst.personal_drivers[0].capacity = 0;
    CHECK(mentions(validate_instance(inst), "capacity"));
  }
  SUBCASE("negative detour limit") {
    Instance inst = small_instance();
    inst.personal_drivers[0].detour_limit = -1;
    CHECK(mentions(validate_instance(inst), "detour_limit"));
  }
  SUBCASE("origin off the network") {
    Instance inst = small_instance();
    inst.riders[0].origin.vertex = 77;
    CHECK(mentions(validate_instance(inst), "origin is not a network vertex"));
  }
  SUBCASE("acceptance threshold outside (0,1]") {
    Instance inst = small_instance();
    inst.riders[0].acceptance_threshold = 0.0;
    CHECK(mentions(validate_instance(inst), "acceptance_threshold"));
    inst.riders[0].acceptance_threshold = 1.5;
    CHECK(mentions(validate_instance(inst), "acceptance_threshold"));
  }
  SUBCASE("nonpositive transit baseline") {
    Instance inst = small_instance();
    inst.riders[0].transit_baseline = 0;
    CHECK(mentions(validate_instance(inst), "transit_baseline"));
  }
  SUBCASE("rider origin equals destination") {
    Instance inst = small_instance();
    inst.riders[0].destination = inst.riders[0].origin;
    CHECK(mentions(validate_instance(inst), "origin equals destination"));
  }
  SUBCASE("stations out of order") {
    Instance inst = small_instance();
    std::swap(inst.stations[0], inst.stations[1]);
    CHECK(mentions(validate_instance(inst), "strictly ascending"));
  }
  SUBCASE("trip with non-increasing stop times") {
    Instance inst = small_instance();
    routing::Trip t;
    t.id = 99;
    t.stops.push_back({2, 1000, 1000});
    t.stops.push_back({4, 900, 900});
    std::vector<routing::Trip> trips = inst.timetable.trips();
    trips.push_back(t);
    inst.timetable = routing::TransitTimetable(std::move(trips));
    CHECK(mentions(validate_instance(inst), "strictly increase"));
  }
  SUBCASE("mislabelled driver kind") {
    Instance inst = small_instance();
    inst.personal_drivers[0].kind = DriverKind::Designated;
    CHECK(mentions(validate_instance(inst), "kind must be personal"));
  }
  SUBCASE("interval start not before end") {
    Instance inst = small_instance();
    inst.interval_end = inst.interval_start;
    CHECK(mentions(validate_instance(inst), "interval"));
  }
}
