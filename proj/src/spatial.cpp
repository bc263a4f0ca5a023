#include "osmoracle/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace osmo {

namespace {

using int128 = __int128;

int sign_of(int128 v) { return v < 0 ? -1 : (v > 0 ? 1 : 0); }

// Orientation of b and c around a: > 0 when c lies left of a->b (lon as x,
// lat as y).
int128 cross(ScaledCoord a, ScaledCoord b, ScaledCoord c) {
  return static_cast<int128>(b.lon - a.lon) * (c.lat - a.lat) -
         static_cast<int128>(b.lat - a.lat) * (c.lon - a.lon);
}

// p collinear with a-b assumed; checks the bounding box.
bool within_span(ScaledCoord p, ScaledCoord a, ScaledCoord b) {
  return p.lat >= std::min(a.lat, b.lat) && p.lat <= std::max(a.lat, b.lat) &&
         p.lon >= std::min(a.lon, b.lon) && p.lon <= std::max(a.lon, b.lon);
}

bool on_segment(ScaledCoord p, ScaledCoord a, ScaledCoord b) {
  return cross(a, b, p) == 0 && within_span(p, a, b);
}

bool segments_intersect(ScaledCoord a, ScaledCoord b, ScaledCoord c,
                        ScaledCoord d) {
  const int d1 = sign_of(cross(c, d, a));
  const int d2 = sign_of(cross(c, d, b));
  const int d3 = sign_of(cross(a, b, c));
  const int d4 = sign_of(cross(a, b, d));
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
      ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return true;
  }
  if (d1 == 0 && within_span(a, c, d)) return true;
  if (d2 == 0 && within_span(b, c, d)) return true;
  if (d3 == 0 && within_span(c, a, b)) return true;
  if (d4 == 0 && within_span(d, a, b)) return true;
  return false;
}

constexpr double kPi = 3.14159265358979323846;
constexpr double kRadPerUnit = kPi / 180.0 / static_cast<double>(kCoordScale);

}  // namespace

bool point_in_polygon(ScaledCoord p, std::span<const ScaledCoord> ring) {
  bool inside = false;
  for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
    const ScaledCoord a = ring[i];
    const ScaledCoord b = ring[i + 1];
    if (on_segment(p, a, b)) return true;
    if ((a.lat > p.lat) != (b.lat > p.lat)) {
      const int128 cr = cross(a, b, p);
      if (b.lat > a.lat ? cr > 0 : cr < 0) inside = !inside;
    }
  }
  return inside;
}

bool ring_is_simple(std::span<const ScaledCoord> ring) {
  const std::size_t m = ring.size();
  if (m < 4 || ring.front() != ring.back()) return false;
  const std::size_t k = m - 1;  // edge count; vertices 0..k-1 are distinct

  for (std::size_t i = 0; i < k; ++i) {
    if (ring[i] == ring[i + 1]) return false;  // zero-length edge
  }
  {
    std::vector<ScaledCoord> verts(ring.begin(), ring.begin() + k);
    std::sort(verts.begin(), verts.end());
    if (std::adjacent_find(verts.begin(), verts.end()) != verts.end()) {
      return false;  // repeated vertex
    }
  }

  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      const bool adjacent = (j == i + 1) || (i == 0 && j == k - 1);
      if (adjacent) {
        // Shared vertex v; a spike (the far endpoints collinear on the same
        // side of v) makes the edges overlap.
        ScaledCoord u, v, w;
        if (j == i + 1) {
          u = ring[i];
          v = ring[i + 1];
          w = ring[j + 1];
        } else {
          u = ring[j];
          v = ring[0];
          w = ring[1];
        }
        if (cross(v, u, w) == 0) {
          const int128 dot =
              static_cast<int128>(u.lon - v.lon) * (w.lon - v.lon) +
              static_cast<int128>(u.lat - v.lat) * (w.lat - v.lat);
          if (dot > 0) return false;
        }
      } else if (segments_intersect(ring[i], ring[i + 1], ring[j],
                                    ring[j + 1])) {
        return false;
      }
    }
  }
  return true;
}

double min_distance_to_rect_m(ScaledCoord p, const Rect& r) {
  if (r.contains(p)) return 0.0;

  const double phi = static_cast<double>(p.lat) * kRadPerUnit;
  const double sin_phi = std::sin(phi);
  const double cos_phi = std::cos(phi);
  const double south = static_cast<double>(r.south) * kRadPerUnit;
  const double north = static_cast<double>(r.north) * kRadPerUnit;

  double best_cos = -2.0;

  // Parallel (constant-latitude) edges: the nearest point has the probe's
  // longitude whenever that longitude falls inside the edge, possibly after
  // a 360-degree shift.
  constexpr std::int64_t kFullTurn = 360 * kCoordScale;
  for (const std::int64_t shift : {std::int64_t{0}, -kFullTurn, kFullTurn}) {
    const std::int64_t lon = p.lon + shift;
    if (lon >= r.west && lon <= r.east) {
      for (const double edge : {south, north}) {
        best_cos = std::max(
            best_cos, sin_phi * std::sin(edge) + cos_phi * std::cos(edge));
      }
      break;
    }
  }

  // Meridian (constant-longitude) edges: cos(sigma) = A sin(lat) +
  // B cos(lat); the unconstrained optimum clamps to the edge's span.
  for (const std::int64_t lon : {r.west, r.east}) {
    const double dlam = static_cast<double>(p.lon - lon) * kRadPerUnit;
    const double a = sin_phi;
    const double b = cos_phi * std::cos(dlam);
    best_cos = std::max(best_cos, a * std::sin(south) + b * std::cos(south));
    best_cos = std::max(best_cos, a * std::sin(north) + b * std::cos(north));
    const double opt = std::atan2(a, b);
    if (opt >= south && opt <= north) {
      best_cos = std::max(best_cos, std::hypot(a, b));
    }
  }

  const double sigma = std::acos(std::clamp(best_cos, -1.0, 1.0));
  // One-meter slack absorbs acos rounding near zero; the bound is only used
  // for pruning.
  return std::max(0.0, kEarthRadiusMeters * sigma - 1.0);
}

StaticRTree StaticRTree::build(std::vector<Entry> entries) {
  StaticRTree tree;
  if (entries.empty()) return tree;

  constexpr std::uint32_t kFanout = 16;

  // STR packing: order by longitude slices, then latitude within a slice.
  auto center_lon = [](const Entry& e) { return e.rect.west / 2 + e.rect.east / 2; };
  auto center_lat = [](const Entry& e) { return e.rect.south / 2 + e.rect.north / 2; };
  std::sort(entries.begin(), entries.end(),
            [&](const Entry& x, const Entry& y) {
              if (center_lon(x) != center_lon(y))
                return center_lon(x) < center_lon(y);
              if (center_lat(x) != center_lat(y))
                return center_lat(x) < center_lat(y);
              return x.id < y.id;
            });
  const std::size_t n = entries.size();
  const std::size_t n_leaves = (n + kFanout - 1) / kFanout;
  const std::size_t n_slices = static_cast<std::size_t>(
      std::ceil(std::sqrt(static_cast<double>(n_leaves))));
  const std::size_t slice_len = (n + n_slices - 1) / n_slices;
  for (std::size_t begin = 0; begin < n; begin += slice_len) {
    const std::size_t end = std::min(n, begin + slice_len);
    std::sort(entries.begin() + static_cast<std::ptrdiff_t>(begin),
              entries.begin() + static_cast<std::ptrdiff_t>(end),
              [&](const Entry& x, const Entry& y) {
                if (center_lat(x) != center_lat(y))
                  return center_lat(x) < center_lat(y);
                if (center_lon(x) != center_lon(y))
                  return center_lon(x) < center_lon(y);
                return x.id < y.id;
              });
  }

  tree.entries_ = std::move(entries);

  // Leaf level.
  std::uint32_t level_begin = 0;
  for (std::size_t begin = 0; begin < n; begin += kFanout) {
    const std::size_t end = std::min(n, begin + kFanout);
    TreeNode node;
    node.leaf = true;
    node.first = static_cast<std::uint32_t>(begin);
    node.count = static_cast<std::uint32_t>(end - begin);
    node.rect = tree.entries_[begin].rect;
    for (std::size_t i = begin + 1; i < end; ++i) {
      node.rect.expand(tree.entries_[i].rect);
    }
    tree.nodes_.push_back(node);
  }

  // Interior levels group consecutive children, which the STR order keeps
  // spatially coherent.
  std::uint32_t level_end = static_cast<std::uint32_t>(tree.nodes_.size());
  while (level_end - level_begin > 1) {
    const std::uint32_t next_begin = level_end;
    for (std::uint32_t begin = level_begin; begin < level_end;
         begin += kFanout) {
      const std::uint32_t end = std::min(level_end, begin + kFanout);
      TreeNode node;
      node.leaf = false;
      node.first = begin;
      node.count = end - begin;
      node.rect = tree.nodes_[begin].rect;
      for (std::uint32_t i = begin + 1; i < end; ++i) {
        node.rect.expand(tree.nodes_[i].rect);
      }
      tree.nodes_.push_back(node);
    }
    level_begin = next_begin;
    level_end = static_cast<std::uint32_t>(tree.nodes_.size());
  }
  tree.root_ = level_end - 1;
  return tree;
}

SpatialIndex SpatialIndex::build(const ObjectStore& store) {
  const std::vector<Violation> violations = validate_store(store);
  if (!violations.empty()) {
    fail(Errc::BuildRejected,
         "store failed validation (" + std::to_string(violations.size()) +
             " violation(s)); first: " + violations.front().message);
  }

  SpatialIndex index;
  index.store_ = &store;

  std::vector<StaticRTree::Entry> node_entries;
  node_entries.reserve(store.nodes.size());
  for (const auto& [id, node] : store.nodes) {
    node_entries.push_back({Rect::of_point(node.coord), id});
  }
  index.node_tree_ = StaticRTree::build(std::move(node_entries));

  std::vector<StaticRTree::Entry> way_entries;
  way_entries.reserve(store.ways.size());
  for (const auto& [id, way] : store.ways) {
    Rect rect = Rect::of_point(store.find_node(way.node_refs.front())->coord);
    for (ObjectId ref : way.node_refs) {
      rect.expand(store.find_node(ref)->coord);
    }
    way_entries.push_back({rect, id});
  }
  index.way_tree_ = StaticRTree::build(std::move(way_entries));
  return index;
}

std::vector<ObjectId> SpatialIndex::nodes_in_bbox(const BoundingBox& bb) const {
  check_bbox(bb);
  std::vector<ObjectId> out;
  node_tree_.visit_overlapping(rect_of(bb), [&](const StaticRTree::Entry& e) {
    out.push_back(e.id);
  });
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<ObjectId> SpatialIndex::ways_in_bbox(const BoundingBox& bb) const {
  check_bbox(bb);
  std::vector<ObjectId> out;
  way_tree_.visit_overlapping(rect_of(bb), [&](const StaticRTree::Entry& e) {
    const Way& way = *store_->find_way(e.id);
    for (ObjectId ref : way.node_refs) {
      if (bb.contains(store_->find_node(ref)->coord)) {
        out.push_back(e.id);
        break;
      }
    }
  });
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

Rect ring_envelope(std::span<const ScaledCoord> ring) {
  Rect rect = Rect::of_point(ring.front());
  for (ScaledCoord c : ring) rect.expand(c);
  return rect;
}

}  // namespace

std::vector<ObjectId> SpatialIndex::nodes_in_polygon(
    std::span<const ScaledCoord> ring) const {
  std::vector<ObjectId> out;
  if (ring.empty()) return out;
  node_tree_.visit_overlapping(ring_envelope(ring),
                               [&](const StaticRTree::Entry& e) {
                                 const ScaledCoord c{e.rect.south, e.rect.west};
                                 if (point_in_polygon(c, ring)) {
                                   out.push_back(e.id);
                                 }
                               });
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<ObjectId> SpatialIndex::ways_in_polygon(
    std::span<const ScaledCoord> ring) const {
  std::vector<ObjectId> out;
  if (ring.empty()) return out;
  way_tree_.visit_overlapping(
      ring_envelope(ring), [&](const StaticRTree::Entry& e) {
        const Way& way = *store_->find_way(e.id);
        for (ObjectId ref : way.node_refs) {
          if (point_in_polygon(store_->find_node(ref)->coord, ring)) {
            out.push_back(e.id);
            break;
          }
        }
      });
  std::sort(out.begin(), out.end());
  return out;
}

const AreaDefinition& SpatialIndex::resolve_named_area(
    std::string_view name) const {
  const std::string normalized = normalize_area_name(name);
  auto it = store_->areas.find(normalized);
  if (it == store_->areas.end() || it->second.empty()) {
    fail(Errc::AreaNotFound, "unknown area '" + std::string(name) + "'");
  }
  if (it->second.size() > 1) {
    std::string candidates;
    for (const AreaDefinition& def : it->second) {
      if (!candidates.empty()) candidates += ", ";
      candidates += "way " + std::to_string(def.source_way);
    }
    fail(Errc::AmbiguousArea, "area '" + std::string(name) +
                                  "' is ambiguous between: " + candidates);
  }
  return it->second.front();
}

NearestResult SpatialIndex::nearest_object(ScaledCoord p) const {
  if (store_->empty()) {
    fail(Errc::NoObjects, "store holds no objects");
  }

  struct HeapItem {
    double bound;
    bool way_tree;
    std::uint32_t node_index;
    bool operator>(const HeapItem& o) const { return bound > o.bound; }
  };
  std::priority_queue<HeapItem, std::vector<HeapItem>, std::greater<>> heap;

  bool have_best = false;
  NearestResult best;
  auto better = [&](double d, ObjectType t, ObjectId id) {
    if (!have_best) return true;
    if (d != best.distance_m) return d < best.distance_m;
    if (t != best.type) return static_cast<int>(t) < static_cast<int>(best.type);
    return id < best.id;
  };

  auto push_root = [&](const StaticRTree& tree, bool is_way) {
    if (!tree.empty()) {
      heap.push({min_distance_to_rect_m(p, tree.nodes()[tree.root()].rect),
                 is_way, tree.root()});
    }
  };
  push_root(node_tree_, false);
  push_root(way_tree_, true);

  while (!heap.empty()) {
    const HeapItem item = heap.top();
    heap.pop();
    if (have_best && item.bound > best.distance_m) break;

    const StaticRTree& tree = item.way_tree ? way_tree_ : node_tree_;
    const StaticRTree::TreeNode& node = tree.nodes()[item.node_index];
    if (node.leaf) {
      for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
        const StaticRTree::Entry& entry = tree.entries()[i];
        double d;
        ObjectType type;
        if (item.way_tree) {
          type = ObjectType::Way;
          const Way& way = *store_->find_way(entry.id);
          d = haversine_distance(p, store_->find_node(way.node_refs.front())->coord);
          for (std::size_t k = 1; k < way.node_refs.size(); ++k) {
            d = std::min(d, haversine_distance(
                                p, store_->find_node(way.node_refs[k])->coord));
          }
        } else {
          type = ObjectType::Node;
          d = haversine_distance(p, ScaledCoord{entry.rect.south, entry.rect.west});
        }
        if (better(d, type, entry.id)) {
          best = NearestResult{type, entry.id, d};
          have_best = true;
        }
      }
    } else {
      for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
        const double bound = min_distance_to_rect_m(p, tree.nodes()[i].rect);
        if (!have_best || bound <= best.distance_m) {
          heap.push({bound, item.way_tree, i});
        }
      }
    }
  }
  return best;
}

}  // namespace osmo
