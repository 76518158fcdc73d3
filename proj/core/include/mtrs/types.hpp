#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mtrs {

using AgentId = std::int64_t;
using VertexId = std::int32_t;
using Seconds = std::int64_t;
using Meters = std::int64_t;

/// First-mile riders are driven from home to a transit station; last-mile
/// riders are picked up at a station and driven to their final destination.
enum class MatchType { FirstMile, LastMile };

inline const char* to_string(MatchType mt) {
  return mt == MatchType::FirstMile ? "FM" : "LM";
}

inline std::optional<MatchType> match_type_from_string(std::string_view s) {
  if (s == "FM") return MatchType::FirstMile;
  if (s == "LM") return MatchType::LastMile;
  return std::nullopt;
}

/// A point tied to a road-network vertex, with its planar position in meters.
struct Location {
  VertexId vertex = -1;
  double x = 0.0;
  double y = 0.0;
};

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// No path between two road vertices that feasibility math relies on.
struct UnreachableError : Error {
  using Error::Error;
};

/// A point fell outside the clustering grid's bounding box.
struct OutOfBoundsError : Error {
  using Error::Error;
};

/// A personal driver's route came out shorter than their fastest path;
/// signals corrupt routing data, not a normal infeasibility.
struct NegativeDetourError : Error {
  using Error::Error;
};

/// Designated-driver count does not match rider count where a one-to-one
/// pairing is required.
struct CardinalityMismatchError : Error {
  using Error::Error;
};

/// Instance generation rejected too many consecutive draws.
struct GenerationExhaustedError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace mtrs
