#pragma once

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "osmoracle/geocode.hpp"
#include "osmoracle/query.hpp"
#include "osmoracle/store.hpp"

namespace osmo::test {

inline const std::vector<std::pair<std::string, std::string>>& tag_vocab() {
  static const std::vector<std::pair<std::string, std::string>> kVocab = {
      {"amenity", "cafe"},          {"amenity", "restaurant"},
      {"shop", "bakery"},           {"public_transport", "station"},
      {"highway", "bus_stop"},      {"tourism", "museum"},
  };
  return kVocab;
}

struct RandomStoreConfig {
  std::size_t n_nodes = 1000;
  std::size_t n_ways = 100;
  std::int64_t lat_min = 4100000000;   // 41 deg
  std::int64_t lat_max = 4300000000;   // 43 deg
  std::int64_t lon_min = -7200000000;  // -72 deg
  std::int64_t lon_max = -7000000000;  // -70 deg
  std::size_t n_areas = 0;  // rectangular named areas "zone0", "zone1", ...
};

// Deterministic synthetic store. Ways reference existing nodes only; area
// rings are axis-aligned rectangles (convex by construction) so tests can
// check containment against an independent half-plane oracle.
inline ObjectStore random_store(std::mt19937_64& rng,
                                const RandomStoreConfig& cfg = {}) {
  ObjectStore store;
  std::uniform_int_distribution<std::int64_t> lat_dist(cfg.lat_min, cfg.lat_max);
  std::uniform_int_distribution<std::int64_t> lon_dist(cfg.lon_min, cfg.lon_max);
  std::uniform_int_distribution<int> tag_count_dist(0, 2);
  std::uniform_int_distribution<std::size_t> vocab_dist(0, tag_vocab().size() - 1);

  std::vector<ObjectId> node_ids;
  node_ids.reserve(cfg.n_nodes);
  ObjectId next_id = 1;
  for (std::size_t i = 0; i < cfg.n_nodes; ++i) {
    next_id += 1 + rng() % 997;
    Node node;
    node.id = next_id;
    node.coord = ScaledCoord{lat_dist(rng), lon_dist(rng)};
    const int n_tags = tag_count_dist(rng);
    for (int t = 0; t < n_tags; ++t) {
      const auto& [k, v] = tag_vocab()[vocab_dist(rng)];
      node.tags[k] = v;
    }
    node_ids.push_back(next_id);
    store.nodes.emplace(next_id, std::move(node));
  }

  if (!node_ids.empty()) {
    std::uniform_int_distribution<std::size_t> pick(0, node_ids.size() - 1);
    std::uniform_int_distribution<std::size_t> len_dist(2, 12);
    for (std::size_t i = 0; i < cfg.n_ways; ++i) {
      next_id += 1 + rng() % 997;
      Way way;
      way.id = next_id;
      const std::size_t len = len_dist(rng);
      for (std::size_t k = 0; k < len; ++k) {
        way.node_refs.push_back(node_ids[pick(rng)]);
      }
      const int n_tags = tag_count_dist(rng);
      for (int t = 0; t < n_tags; ++t) {
        const auto& [k, v] = tag_vocab()[vocab_dist(rng)];
        way.tags[k] = v;
      }
      store.ways.emplace(next_id, std::move(way));
    }
  }

  for (std::size_t a = 0; a < cfg.n_areas; ++a) {
    const std::int64_t lat_span = cfg.lat_max - cfg.lat_min;
    const std::int64_t lon_span = cfg.lon_max - cfg.lon_min;
    const std::int64_t s = cfg.lat_min + std::int64_t(rng() % (lat_span / 2));
    const std::int64_t n = s + lat_span / 8 + std::int64_t(rng() % (lat_span / 3));
    const std::int64_t w = cfg.lon_min + std::int64_t(rng() % (lon_span / 2));
    const std::int64_t e = w + lon_span / 8 + std::int64_t(rng() % (lon_span / 3));
    ObjectId corner_ids[4];
    const ScaledCoord corners[4] = {{s, w}, {s, e}, {n, e}, {n, w}};
    for (int c = 0; c < 4; ++c) {
      next_id += 1 + rng() % 997;
      corner_ids[c] = next_id;
      store.nodes.emplace(next_id, Node{next_id, corners[c], {}});
    }
    next_id += 1 + rng() % 997;
    Way ring_way;
    ring_way.id = next_id;
    ring_way.node_refs = {corner_ids[0], corner_ids[1], corner_ids[2],
                          corner_ids[3], corner_ids[0]};
    store.ways.emplace(next_id, std::move(ring_way));
    register_area(store, "zone" + std::to_string(a), next_id);
  }
  return store;
}

// ---------------------------------------------------------------------------
// Independent oracles (kept deliberately separate from the library's query
// path: plain linear scans, and a half-plane test for convex rings).

inline bool oracle_has_tag(const TagMap& tags, const TagFilter& f) {
  auto it = tags.find(f.key);
  return it != tags.end() && it->second == f.value;
}

inline bool oracle_in_bbox(ScaledCoord c, const BoundingBox& bb) {
  return c.lat >= bb.south && c.lat <= bb.north && c.lon >= bb.west &&
         c.lon <= bb.east;
}

// Convex-ring containment via half-plane signs (boundary counts as inside).
inline bool oracle_convex_contains(ScaledCoord p,
                                   const std::vector<ScaledCoord>& ring) {
  auto cross = [](ScaledCoord a, ScaledCoord b, ScaledCoord c) -> __int128 {
    return static_cast<__int128>(b.lon - a.lon) * (c.lat - a.lat) -
           static_cast<__int128>(b.lat - a.lat) * (c.lon - a.lon);
  };
  int orientation = 0;
  for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
    const __int128 cr =
        cross(ring[i], ring[i + 1], ring[(i + 2) % (ring.size() - 1)]);
    if (cr != 0) {
      orientation = cr > 0 ? 1 : -1;
      break;
    }
  }
  for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
    const __int128 cr = cross(ring[i], ring[i + 1], p);
    if (cr != 0 && (cr > 0 ? 1 : -1) != orientation) return false;
  }
  return true;
}

template <typename InsideFn>
std::vector<ObjectId> oracle_search(const ObjectStore& store, ObjectType type,
                                    const TagFilter& filter, InsideFn inside) {
  std::vector<ObjectId> out;
  if (type == ObjectType::Node) {
    for (const auto& [id, node] : store.nodes) {
      if (oracle_has_tag(node.tags, filter) && inside(node.coord)) {
        out.push_back(id);
      }
    }
  } else {
    for (const auto& [id, way] : store.ways) {
      if (!oracle_has_tag(way.tags, filter)) continue;
      for (ObjectId ref : way.node_refs) {
        if (inside(store.find_node(ref)->coord)) {
          out.push_back(id);
          break;
        }
      }
    }
  }
  return out;  // ascending by map order
}

inline std::vector<ObjectId> oracle_in_bbox_search(const ObjectStore& store,
                                                   ObjectType type,
                                                   const TagFilter& filter,
                                                   const BoundingBox& bb) {
  return oracle_search(store, type, filter,
                       [&](ScaledCoord c) { return oracle_in_bbox(c, bb); });
}

inline NearestResult oracle_nearest(const ObjectStore& store, ScaledCoord p) {
  bool have = false;
  NearestResult best;
  auto consider = [&](ObjectType type, ObjectId id, double d) {
    const bool wins =
        !have || d < best.distance_m ||
        (d == best.distance_m &&
         (static_cast<int>(type) < static_cast<int>(best.type) ||
          (type == best.type && id < best.id)));
    if (wins) {
      best = NearestResult{type, id, d};
      have = true;
    }
  };
  for (const auto& [id, node] : store.nodes) {
    consider(ObjectType::Node, id, haversine_distance(p, node.coord));
  }
  for (const auto& [id, way] : store.ways) {
    double d = haversine_distance(p, store.find_node(way.node_refs[0])->coord);
    for (std::size_t i = 1; i < way.node_refs.size(); ++i) {
      d = std::min(
          d, haversine_distance(p, store.find_node(way.node_refs[i])->coord));
    }
    consider(ObjectType::Way, id, d);
  }
  return best;
}

inline std::string fixture_path(const char* name) {
  return std::string(OSMORACLE_FIXTURE_DIR) + "/" + name;
}

}  // namespace osmo::test
