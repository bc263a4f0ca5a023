#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "osmoracle/errors.hpp"

namespace osmo {

// OSM object identifier. IDs are positive; 0 is never a valid id.
using ObjectId = std::uint64_t;

// Numeric codes are part of the wire contract (0 = node, 1 = way).
enum class ObjectType : int { Node = 0, Way = 1 };

std::string_view object_type_name(ObjectType t);

// Coordinates are stored as degrees scaled by 1e8 in signed 64-bit
// integers; the EVM has no floating point, so this is the wire unit too.
inline constexpr std::int64_t kCoordScale = 100'000'000;
inline constexpr std::int64_t kMaxLat = 90 * kCoordScale;
inline constexpr std::int64_t kMaxLon = 180 * kCoordScale;

struct ScaledCoord {
  std::int64_t lat = 0;
  std::int64_t lon = 0;

  friend auto operator<=>(const ScaledCoord&, const ScaledCoord&) = default;
};

inline bool valid_lat(std::int64_t v) { return v >= -kMaxLat && v <= kMaxLat; }
inline bool valid_lon(std::int64_t v) { return v >= -kMaxLon && v <= kMaxLon; }
inline bool valid_coord(ScaledCoord c) {
  return valid_lat(c.lat) && valid_lon(c.lon);
}

using TagMap = std::map<std::string, std::string>;

struct Node {
  ObjectId id = 0;
  ScaledCoord coord;
  TagMap tags;

  friend bool operator==(const Node&, const Node&) = default;
};

struct Way {
  ObjectId id = 0;
  std::vector<ObjectId> node_refs;
  TagMap tags;

  friend bool operator==(const Way&, const Way&) = default;
};

// Axis-aligned region; all four edges are inclusive. Boxes never wrap the
// antimeridian: west <= east is required.
struct BoundingBox {
  std::int64_t south = 0;
  std::int64_t west = 0;
  std::int64_t north = 0;
  std::int64_t east = 0;

  bool contains(ScaledCoord c) const {
    return c.lat >= south && c.lat <= north && c.lon >= west && c.lon <= east;
  }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

bool valid_bbox(const BoundingBox& bb);
// Throws InvalidBoundingBox with a description of the offending field.
void check_bbox(const BoundingBox& bb);

// A named polygon resolved from a closed way. The ring repeats its first
// coordinate at the end and has been checked to be non-self-intersecting.
struct AreaDefinition {
  std::string name;          // normalized (case-folded, whitespace-collapsed)
  std::string display_name;  // as authored
  std::vector<ScaledCoord> ring;
  ObjectId source_way = 0;

  friend bool operator==(const AreaDefinition&, const AreaDefinition&) = default;
};

// Parses a signed decimal-degree string and returns the value scaled by
// 1e8, computed in integer arithmetic so the 8th decimal is exact. At most
// 8 fractional digits are accepted. Throws InvalidCoordinate on malformed
// input, > 8 fractional digits, or 64-bit overflow.
std::int64_t scale_decimal_degrees(std::string_view text);

// Inverse of scale_decimal_degrees for display: emits only the significant
// fractional digits ("40.7719", "0", "-0.1582367"). Accepts values within
// the longitude range (+-180e8); throws InvalidCoordinate outside it.
std::string unscale_to_decimal(std::int64_t v);

// True iff the way's first and last refs coincide and it has at least 4
// refs (3 distinct vertices plus the closure).
bool is_closed_way(const Way& w);

inline constexpr double kEarthRadiusMeters = 6'371'000.0;

// Great-circle distance in meters on a sphere of radius 6371 km.
double haversine_distance(ScaledCoord a, ScaledCoord b);

// Case-folds, trims, and collapses internal whitespace runs to one space.
std::string normalize_area_name(std::string_view name);

}  // namespace osmo
