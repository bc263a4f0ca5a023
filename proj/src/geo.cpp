#include "osmoracle/geo.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>

namespace osmo {

std::string_view object_type_name(ObjectType t) {
  return t == ObjectType::Node ? "node" : "way";
}

bool valid_bbox(const BoundingBox& bb) {
  return valid_lat(bb.south) && valid_lat(bb.north) && valid_lon(bb.west) &&
         valid_lon(bb.east) && bb.south <= bb.north && bb.west <= bb.east;
}

void check_bbox(const BoundingBox& bb) {
  if (!valid_lat(bb.south) || !valid_lat(bb.north)) {
    fail(Errc::InvalidBoundingBox, "latitude bound out of range");
  }
  if (!valid_lon(bb.west) || !valid_lon(bb.east)) {
    fail(Errc::InvalidBoundingBox, "longitude bound out of range");
  }
  if (bb.south > bb.north) {
    fail(Errc::InvalidBoundingBox, "south exceeds north");
  }
  if (bb.west > bb.east) {
    fail(Errc::InvalidBoundingBox,
         "west exceeds east (boxes do not wrap the antimeridian; split the "
         "query into two boxes)");
  }
}

std::int64_t scale_decimal_degrees(std::string_view text) {
  std::size_t i = 0;
  const std::size_t n = text.size();
  bool negative = false;
  if (i < n && (text[i] == '+' || text[i] == '-')) {
    negative = text[i] == '-';
    ++i;
  }

  const std::size_t int_begin = i;
  while (i < n && text[i] >= '0' && text[i] <= '9') ++i;
  const std::size_t int_len = i - int_begin;
  if (int_len == 0) {
    fail(Errc::InvalidCoordinate,
         "malformed decimal number: '" + std::string(text) + "'");
  }

  unsigned __int128 magnitude = 0;
  constexpr unsigned __int128 kLimit =
      static_cast<unsigned __int128>(1) << 100;  // overflow guard only
  for (std::size_t k = int_begin; k < int_begin + int_len; ++k) {
    magnitude = magnitude * 10 + static_cast<unsigned>(text[k] - '0');
    if (magnitude > kLimit) {
      fail(Errc::InvalidCoordinate,
           "value outside 64-bit range: '" + std::string(text) + "'");
    }
  }

  std::size_t frac_len = 0;
  if (i < n && text[i] == '.') {
    ++i;
    const std::size_t frac_begin = i;
    while (i < n && text[i] >= '0' && text[i] <= '9') ++i;
    frac_len = i - frac_begin;
    if (frac_len == 0) {
      fail(Errc::InvalidCoordinate,
           "malformed decimal number: '" + std::string(text) + "'");
    }
    if (frac_len > 8) {
      fail(Errc::InvalidCoordinate,
           "more than 8 fractional digits: '" + std::string(text) + "'");
    }
    std::uint64_t frac = 0;
    for (std::size_t k = frac_begin; k < frac_begin + frac_len; ++k) {
      frac = frac * 10 + static_cast<unsigned>(text[k] - '0');
    }
    for (std::size_t k = frac_len; k < 8; ++k) frac *= 10;
    magnitude = magnitude * kCoordScale + frac;
  } else {
    magnitude = magnitude * kCoordScale;
  }

  if (i != n) {
    fail(Errc::InvalidCoordinate,
         "malformed decimal number: '" + std::string(text) + "'");
  }

  const unsigned __int128 max_magnitude =
      negative ? (static_cast<unsigned __int128>(1) << 63)
               : static_cast<unsigned __int128>(
                     std::numeric_limits<std::int64_t>::max());
  if (magnitude > max_magnitude) {
    fail(Errc::InvalidCoordinate,
         "value outside 64-bit range: '" + std::string(text) + "'");
  }
  if (negative) {
    return static_cast<std::int64_t>(
        -static_cast<__int128>(magnitude));
  }
  return static_cast<std::int64_t>(magnitude);
}

std::string unscale_to_decimal(std::int64_t v) {
  if (!valid_lon(v)) {
    fail(Errc::InvalidCoordinate,
         "scaled value out of coordinate range: " + std::to_string(v));
  }
  const std::uint64_t mag =
      v < 0 ? static_cast<std::uint64_t>(-(v + 1)) + 1
            : static_cast<std::uint64_t>(v);
  const std::uint64_t int_part = mag / kCoordScale;
  std::uint64_t frac = mag % kCoordScale;

  std::string out;
  if (v < 0) out.push_back('-');
  out += std::to_string(int_part);
  if (frac != 0) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%08llu",
                  static_cast<unsigned long long>(frac));
    std::string_view digits(buf, 8);
    while (digits.back() == '0') digits.remove_suffix(1);
    out.push_back('.');
    out.append(digits);
  }
  return out;
}

bool is_closed_way(const Way& w) {
  return w.node_refs.size() >= 4 && w.node_refs.front() == w.node_refs.back();
}

double haversine_distance(ScaledCoord a, ScaledCoord b) {
  if (a == b) return 0.0;
  constexpr double kDegPerUnit = 1.0 / static_cast<double>(kCoordScale);
  constexpr double kRad = 3.14159265358979323846 / 180.0;
  const double phi1 = static_cast<double>(a.lat) * kDegPerUnit * kRad;
  const double phi2 = static_cast<double>(b.lat) * kDegPerUnit * kRad;
  const double dphi = phi2 - phi1;
  const double dlmb =
      static_cast<double>(b.lon - a.lon) * kDegPerUnit * kRad;
  const double sp = std::sin(dphi / 2.0);
  const double sl = std::sin(dlmb / 2.0);
  const double h = sp * sp + std::cos(phi1) * std::cos(phi2) * sl * sl;
  return 2.0 * kEarthRadiusMeters * std::asin(std::min(1.0, std::sqrt(h)));
}

std::string normalize_area_name(std::string_view name) {
  std::string out;
  out.reserve(name.size());
  bool pending_space = false;
  for (char ch : name) {
    const unsigned char uc = static_cast<unsigned char>(ch);
    if (uc == ' ' || uc == '\t' || uc == '\n' || uc == '\r' || uc == '\f' ||
        uc == '\v') {
      if (!out.empty()) pending_space = true;
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(static_cast<char>(std::tolower(uc)));
  }
  return out;
}

}  // namespace osmo
