#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "osmoracle/spatial.hpp"

namespace osmo {

struct GeocodeResult {
  ObjectType type = ObjectType::Node;
  ObjectId id = 0;
  ScaledCoord coord;

  friend bool operator==(const GeocodeResult&, const GeocodeResult&) = default;
};

struct ReverseGeocodeResult {
  ObjectType type = ObjectType::Node;
  ObjectId id = 0;
  std::string description;

  friend bool operator==(const ReverseGeocodeResult&,
                         const ReverseGeocodeResult&) = default;
};

// Case-folded, punctuation-stripped, whitespace-split tokens. Bytes >= 0x80
// pass through unchanged so UTF-8 names stay intact.
std::vector<std::string> normalize_address(std::string_view text);

// The member-node coordinate minimizing summed haversine distance to the
// other member nodes (the medoid); ties break to the earliest ref.
ScaledCoord way_representative_point(const ObjectStore& store, const Way& way);

// "name, housenumber street, city, postcode" from whichever parts exist,
// falling back to "<type> <id>". Stable: the string is ABI-encoded on the
// wire.
std::string describe_object(const TagMap& tags, ObjectType type, ObjectId id);

class Geocoder {
 public:
  explicit Geocoder(const SpatialIndex& index) : index_(&index) {}

  // Object whose address-tag tokens (addr:housenumber, addr:street,
  // addr:city, addr:postcode, name) overlap the query tokens the most;
  // ties prefer nodes, then smaller ids. Throws NoMatch when nothing
  // shares a token.
  GeocodeResult geocode(std::string_view address) const;

  // Nearest object plus its description. Throws InvalidCoordinate for
  // out-of-range input and NoObjects on an empty store.
  ReverseGeocodeResult reverse_geocode(std::int64_t lat, std::int64_t lon) const;

 private:
  const SpatialIndex* index_;
};

}  // namespace osmo
