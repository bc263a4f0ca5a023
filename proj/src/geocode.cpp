#include "osmoracle/geocode.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace osmo {

namespace {

constexpr std::array<std::string_view, 5> kAddressKeys = {
    "addr:housenumber", "addr:street", "addr:city", "addr:postcode", "name"};

std::vector<std::string> tokens_of_tags(const TagMap& tags) {
  std::vector<std::string> out;
  for (std::string_view key : kAddressKeys) {
    auto it = tags.find(std::string(key));
    if (it == tags.end()) continue;
    for (std::string& tok : normalize_address(it->second)) {
      out.push_back(std::move(tok));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::size_t overlap(const std::vector<std::string>& sorted_a,
                    const std::vector<std::string>& sorted_b) {
  std::size_t count = 0;
  auto ia = sorted_a.begin();
  auto ib = sorted_b.begin();
  while (ia != sorted_a.end() && ib != sorted_b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++count;
      ++ia;
      ++ib;
    }
  }
  return count;
}

}  // namespace

std::vector<std::string> normalize_address(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char ch : text) {
    const unsigned char uc = static_cast<unsigned char>(ch);
    if (uc >= 0x80 || std::isalnum(uc)) {
      current.push_back(uc >= 0x80 ? ch
                                   : static_cast<char>(std::tolower(uc)));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

ScaledCoord way_representative_point(const ObjectStore& store, const Way& way) {
  std::vector<ScaledCoord> coords;
  coords.reserve(way.node_refs.size());
  for (ObjectId ref : way.node_refs) {
    const Node* node = store.find_node(ref);
    if (node == nullptr) {
      fail(Errc::DanglingReference, "way " + std::to_string(way.id) +
                                        " references missing node " +
                                        std::to_string(ref));
    }
    coords.push_back(node->coord);
  }
  std::size_t best = 0;
  double best_sum = 0.0;
  for (std::size_t i = 0; i < coords.size(); ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < coords.size(); ++j) {
      if (j != i) sum += haversine_distance(coords[i], coords[j]);
    }
    if (i == 0 || sum < best_sum) {
      best = i;
      best_sum = sum;
    }
  }
  return coords[best];
}

std::string describe_object(const TagMap& tags, ObjectType type, ObjectId id) {
  auto value_of = [&tags](std::string_view key) -> std::string_view {
    auto it = tags.find(std::string(key));
    return it == tags.end() ? std::string_view() : std::string_view(it->second);
  };

  std::vector<std::string> parts;
  if (auto name = value_of("name"); !name.empty()) {
    parts.emplace_back(name);
  }
  {
    const std::string_view number = value_of("addr:housenumber");
    const std::string_view street = value_of("addr:street");
    std::string street_part;
    if (!number.empty()) street_part += number;
    if (!street.empty()) {
      if (!street_part.empty()) street_part.push_back(' ');
      street_part += street;
    }
    if (!street_part.empty()) parts.push_back(std::move(street_part));
  }
  if (auto city = value_of("addr:city"); !city.empty()) {
    parts.emplace_back(city);
  }
  if (auto postcode = value_of("addr:postcode"); !postcode.empty()) {
    parts.emplace_back(postcode);
  }

  if (parts.empty()) {
    return std::string(object_type_name(type)) + " " + std::to_string(id);
  }
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += ", ";
    out += parts[i];
  }
  return out;
}

GeocodeResult Geocoder::geocode(std::string_view address) const {
  std::vector<std::string> query = normalize_address(address);
  std::sort(query.begin(), query.end());
  query.erase(std::unique(query.begin(), query.end()), query.end());

  const ObjectStore& store = index_->store();
  std::size_t best_score = 0;
  GeocodeResult best;
  bool have_best = false;

  auto consider = [&](ObjectType type, ObjectId id, const TagMap& tags) {
    const std::size_t score = overlap(query, tokens_of_tags(tags));
    if (score == 0) return;
    const bool wins =
        !have_best || score > best_score ||
        (score == best_score &&
         (static_cast<int>(type) < static_cast<int>(best.type) ||
          (type == best.type && id < best.id)));
    if (!wins) return;
    best_score = score;
    best.type = type;
    best.id = id;
    have_best = true;
  };

  if (!query.empty()) {
    for (const auto& [id, node] : store.nodes) {
      consider(ObjectType::Node, id, node.tags);
    }
    for (const auto& [id, way] : store.ways) {
      consider(ObjectType::Way, id, way.tags);
    }
  }
  if (!have_best) {
    fail(Errc::NoMatch,
         "no object matches address '" + std::string(address) + "'");
  }
  if (best.type == ObjectType::Node) {
    best.coord = store.find_node(best.id)->coord;
  } else {
    best.coord = way_representative_point(store, *store.find_way(best.id));
  }
  return best;
}

ReverseGeocodeResult Geocoder::reverse_geocode(std::int64_t lat,
                                               std::int64_t lon) const {
  if (!valid_lat(lat)) {
    fail(Errc::InvalidCoordinate,
         "latitude out of range: " + std::to_string(lat));
  }
  if (!valid_lon(lon)) {
    fail(Errc::InvalidCoordinate,
         "longitude out of range: " + std::to_string(lon));
  }
  const NearestResult nearest = index_->nearest_object(ScaledCoord{lat, lon});
  const ObjectStore& store = index_->store();
  const TagMap& tags = nearest.type == ObjectType::Node
                           ? store.find_node(nearest.id)->tags
                           : store.find_way(nearest.id)->tags;
  return ReverseGeocodeResult{nearest.type, nearest.id,
                              describe_object(tags, nearest.type, nearest.id)};
}

}  // namespace osmo
