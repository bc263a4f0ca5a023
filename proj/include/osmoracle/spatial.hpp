#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "osmoracle/store.hpp"

namespace osmo {

struct Rect {
  std::int64_t south = 0;
  std::int64_t west = 0;
  std::int64_t north = 0;
  std::int64_t east = 0;

  bool contains(ScaledCoord c) const {
    return c.lat >= south && c.lat <= north && c.lon >= west && c.lon <= east;
  }
  bool intersects(const Rect& o) const {
    return south <= o.north && o.south <= north && west <= o.east &&
           o.west <= east;
  }
  void expand(ScaledCoord c) {
    south = std::min(south, c.lat);
    north = std::max(north, c.lat);
    west = std::min(west, c.lon);
    east = std::max(east, c.lon);
  }
  void expand(const Rect& o) {
    south = std::min(south, o.south);
    north = std::max(north, o.north);
    west = std::min(west, o.west);
    east = std::max(east, o.east);
  }
  static Rect of_point(ScaledCoord c) { return Rect{c.lat, c.lon, c.lat, c.lon}; }

  friend bool operator==(const Rect&, const Rect&) = default;
};

inline Rect rect_of(const BoundingBox& bb) {
  return Rect{bb.south, bb.west, bb.north, bb.east};
}

// Even-odd containment with boundary points counting as inside; exact
// integer arithmetic throughout. `ring` must be closed (front == back).
bool point_in_polygon(ScaledCoord p, std::span<const ScaledCoord> ring);

// Closed, >= 4 points, no zero-length edges, no repeated vertices besides
// the closure, and no two edges intersecting except at shared endpoints
// (collinear continuations allowed).
bool ring_is_simple(std::span<const ScaledCoord> ring);

// Lower bound (in meters) on the great-circle distance from p to any point
// of the rectangle; exact up to floating-point rounding.
double min_distance_to_rect_m(ScaledCoord p, const Rect& r);

// Static STR-packed rectangle tree. Built once over (rect, id) entries,
// immutable afterwards; safe for concurrent readers.
class StaticRTree {
 public:
  struct Entry {
    Rect rect;
    std::uint64_t id = 0;
  };

  StaticRTree() = default;
  static StaticRTree build(std::vector<Entry> entries);

  std::size_t size() const { return entries_.size(); }

  template <typename Fn>
  void visit_overlapping(const Rect& query, Fn&& fn) const {
    if (nodes_.empty()) return;
    visit_impl(root_, query, fn);
  }

  // Best-first traversal hooks used by nearest-object search.
  struct TreeNode {
    Rect rect;
    std::uint32_t first = 0;  // child node index or entry index
    std::uint32_t count = 0;
    bool leaf = true;
  };
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  const std::vector<Entry>& entries() const { return entries_; }
  std::uint32_t root() const { return root_; }
  bool empty() const { return entries_.empty(); }

 private:
  template <typename Fn>
  void visit_impl(std::uint32_t index, const Rect& query, Fn& fn) const {
    const TreeNode& node = nodes_[index];
    if (!node.rect.intersects(query)) return;
    if (node.leaf) {
      for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
        if (entries_[i].rect.intersects(query)) {
          fn(entries_[i]);
        }
      }
      return;
    }
    for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
      visit_impl(i, query, fn);
    }
  }

  std::vector<Entry> entries_;
  std::vector<TreeNode> nodes_;
  std::uint32_t root_ = 0;
};

struct NearestResult {
  ObjectType type = ObjectType::Node;
  ObjectId id = 0;
  double distance_m = 0.0;
};

// Read-only spatial views over a validated store: rectangle trees for nodes
// and way envelopes, the named-area registry, and nearest-object search.
class SpatialIndex {
 public:
  // Throws BuildRejected when validate_store reports violations.
  static SpatialIndex build(const ObjectStore& store);

  const ObjectStore& store() const { return *store_; }

  // Ascending ids of nodes with south <= lat <= north and west <= lon <=
  // east; all edges inclusive.
  std::vector<ObjectId> nodes_in_bbox(const BoundingBox& bb) const;

  // Ascending ids of ways with at least one member node inside the box.
  std::vector<ObjectId> ways_in_bbox(const BoundingBox& bb) const;

  std::vector<ObjectId> nodes_in_polygon(
      std::span<const ScaledCoord> ring) const;
  std::vector<ObjectId> ways_in_polygon(
      std::span<const ScaledCoord> ring) const;

  // Throws AreaNotFound / AmbiguousArea.
  const AreaDefinition& resolve_named_area(std::string_view name) const;

  // Object minimizing (haversine distance, type code, id); for ways the
  // distance is the minimum over member nodes. Throws NoObjects on an
  // empty store.
  NearestResult nearest_object(ScaledCoord p) const;

  std::size_t node_entries() const { return node_tree_.size(); }
  std::size_t way_entries() const { return way_tree_.size(); }
  const StaticRTree& node_tree() const { return node_tree_; }
  const StaticRTree& way_tree() const { return way_tree_; }

 private:
  SpatialIndex() = default;

  const ObjectStore* store_ = nullptr;
  StaticRTree node_tree_;
  StaticRTree way_tree_;
};

}  // namespace osmo
