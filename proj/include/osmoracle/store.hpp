#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "osmoracle/geo.hpp"

namespace osmo {

struct Violation {
  Errc code;
  ObjectId id = 0;
  std::string message;
};

// Immutable after ingest. Ways only reference nodes present in `nodes`;
// `areas` is keyed by normalized name and may hold several definitions per
// name (resolution reports ambiguity).
struct ObjectStore {
  std::map<ObjectId, Node> nodes;
  std::map<ObjectId, Way> ways;
  std::map<std::string, std::vector<AreaDefinition>> areas;

  const Node* find_node(ObjectId id) const {
    auto it = nodes.find(id);
    return it == nodes.end() ? nullptr : &it->second;
  }
  const Way* find_way(ObjectId id) const {
    auto it = ways.find(id);
    return it == ways.end() ? nullptr : &it->second;
  }
  bool empty() const { return nodes.empty() && ways.empty(); }

  friend bool operator==(const ObjectStore&, const ObjectStore&) = default;
};

// Registers `way` as the polygon for `display_name`. The ring is built from
// the way's member nodes; the way must be closed and the ring simple.
// Re-registering the same (name, way) pair replaces the earlier entry.
void register_area(ObjectStore& store, std::string_view display_name,
                   ObjectId way_id);

// Parses an OSM XML extract (<osm> root with <node>/<way>/<tag>/<nd>).
// Unknown elements such as <relation> or <bounds> are skipped. Closed ways
// carrying a name tag register as named areas when their ring is simple.
ObjectStore parse_osm_xml(std::string_view xml);

// Line-delimited fixture format; see README for the exact grammar:
//   node <id> <lat> <lon> [k=v ...]
//   way <id> <ref,ref,...> [k=v ...]
//   area <name> <way-id>
ObjectStore parse_fixture(std::string_view text,
                          std::string_view source_name = "<memory>");

ObjectStore load_fixture(const std::filesystem::path& path);

// Canonical fixture serialization; parse_fixture(write_fixture(s)) == s.
std::string write_fixture(const ObjectStore& store);

// Empty result iff all store invariants hold. Violations are data, not
// failures: each names the rule and the offending id.
std::vector<Violation> validate_store(const ObjectStore& store);

enum class StoreFormat { Binary, Text };

// Store snapshots: Text is the fixture format; Binary is a versioned
// little-endian record stream (magic "OSSB"). load_store sniffs the format.
void save_store(const ObjectStore& store, const std::filesystem::path& path,
                StoreFormat format = StoreFormat::Binary);
ObjectStore load_store(const std::filesystem::path& path);

// Convenience for the CLI and service: reads a store snapshot, a fixture
// file, or an OSM XML extract, deciding by content (XML sniffed by '<').
ObjectStore load_any(const std::filesystem::path& path);

}  // namespace osmo
