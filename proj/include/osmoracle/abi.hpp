#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "osmoracle/geo.hpp"
#include "osmoracle/geocode.hpp"

namespace osmo {

// Response layouts carried on the wire. All payloads are function
// return-style encodings (no 4-byte selector) and are a multiple of 32
// bytes long.
enum class AbiLayout {
  Int64Scalar,    // counts
  Int64Array,     // search results
  StringArray,    // tag queries
  CoordPairList,  // way geometry: (int64 lat, int64 lon)[]
  GeocodeTuple,   // (int64 flag, int64 id, int64 lat, int64 lon)
  ReverseTuple,   // (int64 flag, int64 id, string description)
};

std::string_view abi_layout_name(AbiLayout layout);

struct AbiPayload {
  std::vector<std::uint8_t> bytes;
  AbiLayout layout = AbiLayout::Int64Scalar;

  friend bool operator==(const AbiPayload&, const AbiPayload&) = default;
};

AbiPayload encode_int64(std::int64_t v);
AbiPayload encode_int64_array(std::span<const std::int64_t> vs);
AbiPayload encode_string_array(std::span<const std::string> ss);
AbiPayload encode_coord_pairs(std::span<const ScaledCoord> cs);
// Throws IdOverflow when the id does not fit a signed 64-bit word.
AbiPayload encode_geocode(const GeocodeResult& r);
AbiPayload encode_reverse(const ReverseGeocodeResult& r);

using AbiValue =
    std::variant<std::int64_t, std::vector<std::int64_t>,
                 std::vector<std::string>, std::vector<ScaledCoord>,
                 GeocodeResult, ReverseGeocodeResult>;

// Exact inverse of the encoder for the payload's layout; anything the
// encoders cannot produce raises MalformedPayload.
AbiValue decode(const AbiPayload& payload);

// Checked narrowing for ids crossing onto the int64 wire.
std::int64_t id_to_int64(std::uint64_t id);

std::string to_hex(std::span<const std::uint8_t> bytes);  // "0x" + lowercase
std::string to_hex(const AbiPayload& payload);
std::vector<std::uint8_t> from_hex(std::string_view hex);

}  // namespace osmo
