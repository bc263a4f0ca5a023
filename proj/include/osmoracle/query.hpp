#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "osmoracle/spatial.hpp"

namespace osmo {

// Exact key=value match; no wildcards.
struct TagFilter {
  std::string key;
  std::string value;
};

// Search responses are ascending object ids with no duplicates, so a
// truncated query is always a prefix of a larger one.
struct QueryResult {
  std::vector<ObjectId> ids;
};

// The query surface: area and bounding-box searches with their count
// variants, per-object tag filtering, and way geometry. Stateless over an
// immutable index; all operations are safe to call concurrently.
//
// A way counts as inside a region iff at least one member node is inside.
// Results are truncated to the first `limit` ids in ascending order;
// counts ignore limits entirely.
class QueryEngine {
 public:
  explicit QueryEngine(const SpatialIndex& index, bool linear_scan = false)
      : index_(&index), linear_scan_(linear_scan) {}

  QueryResult objects_in_area(ObjectType type, const TagFilter& filter,
                              std::string_view area,
                              std::int64_t limit) const;
  std::uint64_t object_count_in_area(ObjectType type, const TagFilter& filter,
                                     std::string_view area) const;

  QueryResult objects_in_bbox(ObjectType type, const TagFilter& filter,
                              const BoundingBox& bb, std::int64_t limit) const;
  std::uint64_t object_count_in_bbox(ObjectType type, const TagFilter& filter,
                                     const BoundingBox& bb) const;

  // values[i] is the object's value for keys[i], or "" when absent.
  std::vector<std::string> object_tag_query(
      ObjectType type, ObjectId id, std::span<const std::string> keys) const;

  // Member-node coordinates in way order, duplicates (the closing node)
  // preserved.
  std::vector<ScaledCoord> way_geometry(ObjectId id) const;
  std::uint64_t way_node_count(ObjectId id) const;

  const SpatialIndex& index() const { return *index_; }

 private:
  std::vector<ObjectId> match_in_bbox(ObjectType type, const TagFilter& filter,
                                      const BoundingBox& bb) const;
  std::vector<ObjectId> match_in_area(ObjectType type, const TagFilter& filter,
                                      std::string_view area) const;

  const SpatialIndex* index_;
  bool linear_scan_;  // bypasses the trees; used for index-effectiveness runs
};

}  // namespace osmo
