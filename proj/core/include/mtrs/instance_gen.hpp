#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "mtrs/feasibility.hpp"
#include "mtrs/hypergraph.hpp"
#include "mtrs/model.hpp"

namespace mtrs::gen {

/// Deterministic RNG helpers over a fixed-width engine. The distribution
/// arithmetic is spelled out here so streams are identical across platforms
/// and standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}

  std::uint64_t next();
  /// Uniform integer in [lo, hi], inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  /// Uniform real in [0, 1).
  double uniform01();
  double uniform_real(double lo, double hi);
  /// Index drawn according to non-negative weights.
  std::size_t weighted_index(const std::vector<double>& weights);

 private:
  std::uint64_t state_;
};

struct GenConfig {
  int grid_n = 16;            // road network is an n x n lattice
  Meters block_m = 500;       // nominal lattice spacing
  int stations = 12;
  int transit_lines = 3;
  int trips_per_line = 24;
  Seconds headway_s = 600;
  int riders = 60;
  std::vector<double> zone_weights = {0.3, 0.25, 0.2, 0.15, 0.1};
  Seconds interval_len_s = 1800;
  std::uint64_t seed = 1;
};

std::vector<std::string> validate_config(const GenConfig& cfg);

/// Road lattice used by generated instances; exposed for tests that need a
/// small reproducible network.
routing::RoadNetwork build_road_network(int n, Meters block_m,
                                        std::uint64_t seed);

/// One planning interval: riders drawn against the transit baseline rules,
/// roughly one personal driver per three riders of each match type, and one
/// designated driver per rider placed near that rider's service zone.
/// Throws GenerationExhaustedError after 1000 consecutive rejected draws.
Instance gen_interval_instance(const GenConfig& cfg, std::uint64_t seed,
                               Seconds t_a = 0);

/// Three-dimensional matching instance: disjoint element sets A, B, C and
/// triple set F, with |A| == 2q and |B| == |C| == q.
struct ThreeDM {
  int q = 0;
  std::vector<std::string> A, B, C;
  std::vector<std::array<int, 3>> F;  // indices into A, B, C
  std::int64_t omega = 3;             // filler edge weight, >= 2
};

std::vector<std::string> validate_threedm(const ThreeDM& t);

/// Random ThreeDM with each triple kept with probability `density`.
ThreeDM gen_random_threedm(int q, double density, std::int64_t omega,
                           std::uint64_t seed);

/// Hypergraph reduction: drivers A with capacity 2, riders B and C. Per
/// triple (a,b,c): edge {a,b,c} and its pair edges at weight 2; all missing
/// (a,b) and (a,c) pairs are filled at weight omega. The distance-sum
/// optimum equals 2q exactly when a perfect 3D matching exists. With every
/// weight forced to 1 (the fleet-size variant) the optimum equals q exactly
/// under the same condition.
Hypergraph gen_3dm_hypergraph(const ThreeDM& t, feas::Problem problem);

/// Maximum number of pairwise disjoint triples, by exhaustive search over
/// the B elements. Exact for the small q used in validation.
int brute_force_3dm(const ThreeDM& t);

/// Agent ids used by the 3DM reduction, shared with tests that wrap the
/// synthetic hypergraph in a skeleton instance.
AgentId threedm_driver_id(int a_index);
AgentId threedm_rider_id_b(int b_index);
AgentId threedm_rider_id_c(int c_index);

}  // namespace mtrs::gen
