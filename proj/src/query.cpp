#include "osmoracle/query.hpp"

#include <algorithm>

namespace osmo {

namespace {

bool has_tag(const TagMap& tags, const TagFilter& filter) {
  auto it = tags.find(filter.key);
  return it != tags.end() && it->second == filter.value;
}

void check_filter(const TagFilter& filter) {
  if (filter.key.empty()) {
    fail(Errc::BadRequest, "tag filter key must not be empty");
  }
}

void check_limit(std::int64_t limit) {
  if (limit < 1) {
    fail(Errc::InvalidLimit, "limit must be >= 1, got " + std::to_string(limit));
  }
}

QueryResult truncate(std::vector<ObjectId> ids, std::int64_t limit) {
  const std::size_t cap = static_cast<std::size_t>(limit);
  if (ids.size() > cap) ids.resize(cap);
  return QueryResult{std::move(ids)};
}

}  // namespace

std::vector<ObjectId> QueryEngine::match_in_bbox(ObjectType type,
                                                 const TagFilter& filter,
                                                 const BoundingBox& bb) const {
  check_bbox(bb);
  const ObjectStore& store = index_->store();
  std::vector<ObjectId> out;

  if (linear_scan_) {
    if (type == ObjectType::Node) {
      for (const auto& [id, node] : store.nodes) {
        if (has_tag(node.tags, filter) && bb.contains(node.coord)) {
          out.push_back(id);
        }
      }
    } else {
      for (const auto& [id, way] : store.ways) {
        if (!has_tag(way.tags, filter)) continue;
        for (ObjectId ref : way.node_refs) {
          if (bb.contains(store.find_node(ref)->coord)) {
            out.push_back(id);
            break;
          }
        }
      }
    }
    return out;  // map iteration is already ascending
  }

  std::vector<ObjectId> candidates = type == ObjectType::Node
                                         ? index_->nodes_in_bbox(bb)
                                         : index_->ways_in_bbox(bb);
  for (ObjectId id : candidates) {
    const TagMap& tags = type == ObjectType::Node ? store.find_node(id)->tags
                                                  : store.find_way(id)->tags;
    if (has_tag(tags, filter)) out.push_back(id);
  }
  return out;
}

std::vector<ObjectId> QueryEngine::match_in_area(ObjectType type,
                                                 const TagFilter& filter,
                                                 std::string_view area) const {
  const AreaDefinition& def = index_->resolve_named_area(area);
  const ObjectStore& store = index_->store();
  std::vector<ObjectId> out;

  if (linear_scan_) {
    if (type == ObjectType::Node) {
      for (const auto& [id, node] : store.nodes) {
        if (has_tag(node.tags, filter) &&
            point_in_polygon(node.coord, def.ring)) {
          out.push_back(id);
        }
      }
    } else {
      for (const auto& [id, way] : store.ways) {
        if (!has_tag(way.tags, filter)) continue;
        for (ObjectId ref : way.node_refs) {
          if (point_in_polygon(store.find_node(ref)->coord, def.ring)) {
            out.push_back(id);
            break;
          }
        }
      }
    }
    return out;
  }

  std::vector<ObjectId> candidates = type == ObjectType::Node
                                         ? index_->nodes_in_polygon(def.ring)
                                         : index_->ways_in_polygon(def.ring);
  for (ObjectId id : candidates) {
    const TagMap& tags = type == ObjectType::Node ? store.find_node(id)->tags
                                                  : store.find_way(id)->tags;
    if (has_tag(tags, filter)) out.push_back(id);
  }
  return out;
}

QueryResult QueryEngine::objects_in_area(ObjectType type,
                                         const TagFilter& filter,
                                         std::string_view area,
                                         std::int64_t limit) const {
  check_limit(limit);
  check_filter(filter);
  return truncate(match_in_area(type, filter, area), limit);
}

std::uint64_t QueryEngine::object_count_in_area(ObjectType type,
                                                const TagFilter& filter,
                                                std::string_view area) const {
  check_filter(filter);
  return match_in_area(type, filter, area).size();
}

QueryResult QueryEngine::objects_in_bbox(ObjectType type,
                                         const TagFilter& filter,
                                         const BoundingBox& bb,
                                         std::int64_t limit) const {
  check_limit(limit);
  check_filter(filter);
  return truncate(match_in_bbox(type, filter, bb), limit);
}

std::uint64_t QueryEngine::object_count_in_bbox(ObjectType type,
                                                const TagFilter& filter,
                                                const BoundingBox& bb) const {
  check_filter(filter);
  return match_in_bbox(type, filter, bb).size();
}

std::vector<std::string> QueryEngine::object_tag_query(
    ObjectType type, ObjectId id, std::span<const std::string> keys) const {
  if (keys.empty()) {
    fail(Errc::BadRequest, "tag query needs at least one key");
  }
  const ObjectStore& store = index_->store();
  const TagMap* tags = nullptr;
  if (type == ObjectType::Node) {
    const Node* node = store.find_node(id);
    if (node != nullptr) tags = &node->tags;
  } else {
    const Way* way = store.find_way(id);
    if (way != nullptr) tags = &way->tags;
  }
  if (tags == nullptr) {
    fail(Errc::ObjectNotFound, std::string(object_type_name(type)) + " " +
                                   std::to_string(id) + " not found");
  }
  std::vector<std::string> values;
  values.reserve(keys.size());
  for (const std::string& key : keys) {
    auto it = tags->find(key);
    values.push_back(it == tags->end() ? std::string() : it->second);
  }
  return values;
}

std::vector<ScaledCoord> QueryEngine::way_geometry(ObjectId id) const {
  const ObjectStore& store = index_->store();
  const Way* way = store.find_way(id);
  if (way == nullptr) {
    fail(Errc::ObjectNotFound, "way " + std::to_string(id) + " not found");
  }
  std::vector<ScaledCoord> coords;
  coords.reserve(way->node_refs.size());
  for (ObjectId ref : way->node_refs) {
    coords.push_back(store.find_node(ref)->coord);
  }
  return coords;
}

std::uint64_t QueryEngine::way_node_count(ObjectId id) const {
  const Way* way = index_->store().find_way(id);
  if (way == nullptr) {
    fail(Errc::ObjectNotFound, "way " + std::to_string(id) + " not found");
  }
  return way->node_refs.size();
}

}  // namespace osmo
