#include "osmoracle/store.hpp"

#include <algorithm>
#include <charconv>
#include <cstring>
#include <fstream>
#include <optional>
#include <sstream>

#include "osmoracle/spatial.hpp"

namespace osmo {

namespace {

std::uint64_t parse_u64(std::string_view text) {
  std::uint64_t value = 0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || text.empty()) {
    fail(Errc::ParseError, "invalid unsigned integer '" + std::string(text) + "'");
  }
  return value;
}

ObjectId parse_object_id(std::string_view text) {
  const std::uint64_t v = parse_u64(text);
  if (v == 0) fail(Errc::ParseError, "object id must be positive");
  return v;
}

std::int64_t parse_scaled(std::string_view text, bool is_lat,
                          const std::string& where) {
  std::int64_t v = 0;
  try {
    v = scale_decimal_degrees(text);
  } catch (const Error& e) {
    fail(Errc::InvalidCoordinate, where + ": " + e.what());
  }
  if (is_lat ? !valid_lat(v) : !valid_lon(v)) {
    fail(Errc::InvalidCoordinate,
         where + ": coordinate out of range: '" + std::string(text) + "'");
  }
  return v;
}

std::vector<ScaledCoord> ring_from_way(const ObjectStore& store, const Way& w) {
  std::vector<ScaledCoord> ring;
  ring.reserve(w.node_refs.size());
  for (ObjectId ref : w.node_refs) {
    const Node* n = store.find_node(ref);
    if (n == nullptr) {
      fail(Errc::DanglingReference, "way " + std::to_string(w.id) +
                                        " references missing node " +
                                        std::to_string(ref));
    }
    ring.push_back(n->coord);
  }
  return ring;
}

// Inserts keeping each name's definitions sorted by source way; replaces an
// existing definition from the same way.
void insert_area(ObjectStore& store, AreaDefinition def) {
  auto& defs = store.areas[def.name];
  auto it = std::lower_bound(defs.begin(), defs.end(), def.source_way,
                             [](const AreaDefinition& d, ObjectId id) {
                               return d.source_way < id;
                             });
  if (it != defs.end() && it->source_way == def.source_way) {
    *it = std::move(def);
  } else {
    defs.insert(it, std::move(def));
  }
}

// Closed ways with a name tag become named areas when their ring is simple.
void register_implicit_areas(ObjectStore& store) {
  for (const auto& [id, way] : store.ways) {
    if (!is_closed_way(way)) continue;
    auto name_it = way.tags.find("name");
    if (name_it == way.tags.end() || name_it->second.empty()) continue;
    std::string normalized = normalize_area_name(name_it->second);
    if (normalized.empty()) continue;
    std::vector<ScaledCoord> ring = ring_from_way(store, way);
    if (!ring_is_simple(ring)) continue;
    insert_area(store, AreaDefinition{std::move(normalized), name_it->second,
                                      std::move(ring), id});
  }
}

void check_way_refs(const ObjectStore& store) {
  for (const auto& [id, way] : store.ways) {
    for (ObjectId ref : way.node_refs) {
      if (store.find_node(ref) == nullptr) {
        fail(Errc::DanglingReference, "way " + std::to_string(id) +
                                          " references missing node " +
                                          std::to_string(ref));
      }
    }
  }
}

// ---------------------------------------------------------------------------
// OSM XML

struct XmlAttrs {
  std::vector<std::pair<std::string, std::string>> items;

  const std::string* find(std::string_view name) const {
    for (const auto& [k, v] : items) {
      if (k == name) return &v;
    }
    return nullptr;
  }
  const std::string& require(std::string_view name,
                             const std::string& where) const {
    const std::string* v = find(name);
    if (v == nullptr) {
      fail(Errc::ParseError,
           where + ": missing attribute '" + std::string(name) + "'");
    }
    return *v;
  }
};

struct XmlTag {
  std::string name;
  XmlAttrs attrs;
  bool closing = false;
  bool self_closing = false;
};

class XmlScanner {
 public:
  explicit XmlScanner(std::string_view text) : s_(text) {}

  // Next start or end element tag; processing instructions, comments,
  // DOCTYPE, CDATA, and character data are skipped.
  std::optional<XmlTag> next() {
    for (;;) {
      const std::size_t lt = s_.find('<', pos_);
      if (lt == std::string_view::npos) {
        pos_ = s_.size();
        return std::nullopt;
      }
      pos_ = lt + 1;
      if (starts_with("?")) {
        skip_until("?>", "processing instruction");
        continue;
      }
      if (starts_with("!--")) {
        skip_until("-->", "comment");
        continue;
      }
      if (starts_with("![CDATA[")) {
        skip_until("]]>", "CDATA section");
        continue;
      }
      if (starts_with("!")) {
        skip_until(">", "declaration");
        continue;
      }
      return parse_tag();
    }
  }

 private:
  bool starts_with(std::string_view prefix) const {
    return s_.compare(pos_, prefix.size(), prefix) == 0;
  }

  void skip_until(std::string_view terminator, const char* what) {
    const std::size_t end = s_.find(terminator, pos_);
    if (end == std::string_view::npos) {
      fail(Errc::ParseError, std::string("unterminated ") + what);
    }
    pos_ = end + terminator.size();
  }

  static bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n';
  }
  static bool is_name_char(char c) {
    return !is_space(c) && c != '>' && c != '/' && c != '=' && c != '<' &&
           c != '"' && c != '\'';
  }

  void skip_space() {
    while (pos_ < s_.size() && is_space(s_[pos_])) ++pos_;
  }

  char peek() const {
    if (pos_ >= s_.size()) fail(Errc::ParseError, "unexpected end of XML");
    return s_[pos_];
  }

  std::string read_name() {
    const std::size_t begin = pos_;
    while (pos_ < s_.size() && is_name_char(s_[pos_])) ++pos_;
    if (pos_ == begin) fail(Errc::ParseError, "expected XML name");
    return std::string(s_.substr(begin, pos_ - begin));
  }

  std::string decode_entities(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size();) {
      const char c = raw[i];
      if (c == '<') fail(Errc::ParseError, "raw '<' in attribute value");
      if (c != '&') {
        out.push_back(c);
        ++i;
        continue;
      }
      const std::size_t semi = raw.find(';', i + 1);
      if (semi == std::string_view::npos || semi - i > 12) {
        fail(Errc::ParseError, "unterminated entity reference");
      }
      const std::string_view ent = raw.substr(i + 1, semi - i - 1);
      if (ent == "amp") {
        out.push_back('&');
      } else if (ent == "lt") {
        out.push_back('<');
      } else if (ent == "gt") {
        out.push_back('>');
      } else if (ent == "quot") {
        out.push_back('"');
      } else if (ent == "apos") {
        out.push_back('\'');
      } else if (!ent.empty() && ent[0] == '#') {
        std::uint32_t cp = 0;
        std::string_view digits = ent.substr(1);
        int base = 10;
        if (!digits.empty() && (digits[0] == 'x' || digits[0] == 'X')) {
          base = 16;
          digits.remove_prefix(1);
        }
        auto [ptr, ec] = std::from_chars(
            digits.data(), digits.data() + digits.size(), cp, base);
        if (ec != std::errc() || ptr != digits.data() + digits.size() ||
            digits.empty() || cp > 0x10FFFF) {
          fail(Errc::ParseError,
               "invalid character reference '&" + std::string(ent) + ";'");
        }
        append_utf8(out, cp);
      } else {
        fail(Errc::ParseError,
             "unknown entity '&" + std::string(ent) + ";'");
      }
      i = semi + 1;
    }
    return out;
  }

  static void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp < 0x80) {
      out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
  }

  XmlTag parse_tag() {
    XmlTag tag;
    if (peek() == '/') {
      ++pos_;
      tag.closing = true;
      tag.name = read_name();
      skip_space();
      if (peek() != '>') {
        fail(Errc::ParseError, "malformed closing tag </" + tag.name + ">");
      }
      ++pos_;
      return tag;
    }
    tag.name = read_name();
    for (;;) {
      skip_space();
      const char c = peek();
      if (c == '>') {
        ++pos_;
        return tag;
      }
      if (c == '/') {
        ++pos_;
        if (peek() != '>') fail(Errc::ParseError, "malformed tag end '/'");
        ++pos_;
        tag.self_closing = true;
        return tag;
      }
      std::string attr_name = read_name();
      skip_space();
      if (peek() != '=') {
        fail(Errc::ParseError,
             "attribute '" + attr_name + "' missing '=' in <" + tag.name + ">");
      }
      ++pos_;
      skip_space();
      const char quote = peek();
      if (quote != '"' && quote != '\'') {
        fail(Errc::ParseError, "attribute value must be quoted in <" +
                                   tag.name + ">");
      }
      ++pos_;
      const std::size_t vbegin = pos_;
      const std::size_t vend = s_.find(quote, pos_);
      if (vend == std::string_view::npos) {
        fail(Errc::ParseError, "unterminated attribute value in <" +
                                   tag.name + ">");
      }
      pos_ = vend + 1;
      if (tag.attrs.find(attr_name) != nullptr) {
        fail(Errc::ParseError, "duplicate attribute '" + attr_name +
                                   "' in <" + tag.name + ">");
      }
      tag.attrs.items.emplace_back(
          std::move(attr_name),
          decode_entities(s_.substr(vbegin, vend - vbegin)));
    }
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

// Consumes everything up to and including the matching close of `open`.
void skip_subtree(XmlScanner& scanner, const XmlTag& open) {
  if (open.self_closing) return;
  std::vector<std::string> stack{open.name};
  while (!stack.empty()) {
    auto tag = scanner.next();
    if (!tag) {
      fail(Errc::ParseError, "unterminated <" + stack.front() + "> element");
    }
    if (tag->closing) {
      if (tag->name != stack.back()) {
        fail(Errc::ParseError, "mismatched closing tag </" + tag->name + ">");
      }
      stack.pop_back();
    } else if (!tag->self_closing) {
      stack.push_back(tag->name);
    }
  }
}

void add_tag_pair(TagMap& tags, const XmlAttrs& attrs, const std::string& where) {
  const std::string& k = attrs.require("k", where);
  const std::string& v = attrs.require("v", where);
  if (k.empty()) fail(Errc::ParseError, where + ": empty tag key");
  if (!tags.emplace(k, v).second) {
    fail(Errc::ParseError, where + ": duplicate tag key '" + k + "'");
  }
}

// Reads child elements of <node>/<way> until the close tag. Only <tag> (and
// <nd> when `refs` is given) are interpreted; other children are skipped.
void parse_children(XmlScanner& scanner, const std::string& parent,
                    const std::string& where, TagMap& tags,
                    std::vector<ObjectId>* refs) {
  for (;;) {
    auto tag = scanner.next();
    if (!tag) fail(Errc::ParseError, "unterminated <" + parent + "> element");
    if (tag->closing) {
      if (tag->name != parent) {
        fail(Errc::ParseError, "mismatched closing tag </" + tag->name + ">");
      }
      return;
    }
    if (tag->name == "tag") {
      add_tag_pair(tags, tag->attrs, where);
      if (!tag->self_closing) {
        auto close = scanner.next();
        if (!close || !close->closing || close->name != "tag") {
          fail(Errc::ParseError, where + ": malformed <tag> element");
        }
      }
    } else if (refs != nullptr && tag->name == "nd") {
      const std::string& ref = tag->attrs.require("ref", where);
      try {
        refs->push_back(parse_object_id(ref));
      } catch (const Error&) {
        fail(Errc::ParseError, where + ": invalid <nd> ref '" + ref + "'");
      }
      if (!tag->self_closing) {
        auto close = scanner.next();
        if (!close || !close->closing || close->name != "nd") {
          fail(Errc::ParseError, where + ": malformed <nd> element");
        }
      }
    } else {
      skip_subtree(scanner, *tag);
    }
  }
}

// ---------------------------------------------------------------------------
// Fixture text format

struct FixtureAreaLine {
  std::string name;
  ObjectId way_id = 0;
  int line = 0;
};

std::vector<std::string> tokenize_line(std::string_view line,
                                       const std::string& where) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  const std::size_t n = line.size();
  while (i < n) {
    while (i < n && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    if (i >= n) break;
    if (line[i] == '#') break;  // comment to end of line
    std::string token;
    bool in_quotes = false;
    for (; i < n; ++i) {
      const char c = line[i];
      if (in_quotes) {
        if (c == '\\') {
          if (i + 1 >= n) fail(Errc::ParseError, where + ": dangling escape");
          token.push_back(line[++i]);
        } else if (c == '"') {
          in_quotes = false;
        } else {
          token.push_back(c);
        }
      } else if (c == '"') {
        in_quotes = true;
      } else if (c == ' ' || c == '\t' || c == '\r') {
        break;
      } else {
        token.push_back(c);
      }
    }
    if (in_quotes) fail(Errc::ParseError, where + ": unterminated quote");
    tokens.push_back(std::move(token));
  }
  return tokens;
}

TagMap parse_tag_tokens(const std::vector<std::string>& tokens,
                        std::size_t first, const std::string& where) {
  TagMap tags;
  for (std::size_t i = first; i < tokens.size(); ++i) {
    const std::string& t = tokens[i];
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos || eq == 0) {
      fail(Errc::ParseError, where + ": expected k=v tag, got '" + t + "'");
    }
    std::string key = t.substr(0, eq);
    if (!tags.emplace(std::move(key), t.substr(eq + 1)).second) {
      fail(Errc::ParseError,
           where + ": duplicate tag key '" + t.substr(0, eq) + "'");
    }
  }
  return tags;
}

std::string quote_token(const std::string& s) {
  const bool needs_quotes =
      s.empty() || s.front() == '#' ||
      s.find_first_of(" \t\r\"\\") != std::string::npos;
  if (!needs_quotes) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void append_tags(std::string& out, const TagMap& tags) {
  for (const auto& [k, v] : tags) {
    if (k.find('=') != std::string::npos) {
      fail(Errc::ParseError,
           "tag key '" + k + "' contains '=', not representable in the "
           "fixture format");
    }
    out.push_back(' ');
    out += quote_token(k);
    out.push_back('=');
    out += quote_token(v);
  }
}

// ---------------------------------------------------------------------------
// Binary snapshot

constexpr char kSnapshotMagic[4] = {'O', 'S', 'S', 'B'};
constexpr std::uint32_t kSnapshotVersion = 1;

class ByteWriter {
 public:
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<char>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<char>(v >> (8 * i)));
  }
  void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    out_.append(s);
  }
  const std::string& data() const { return out_; }

 private:
  std::string out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::string_view data) : s_(data) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(s_[pos_ + i]))
           << (8 * i);
    }
    pos_ += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(s_[pos_ + i]))
           << (8 * i);
    }
    pos_ += 8;
    return v;
  }
  std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
  std::string str() {
    const std::uint32_t len = u32();
    need(len);
    std::string v(s_.substr(pos_, len));
    pos_ += len;
    return v;
  }
  bool at_end() const { return pos_ == s_.size(); }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > s_.size()) {
      fail(Errc::ParseError, "truncated store snapshot");
    }
  }
  std::string_view s_;
  std::size_t pos_ = 0;
};

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    fail(Errc::ParseError, "cannot open '" + path.string() + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  if (!in.good() && !in.eof()) {
    fail(Errc::ParseError, "error reading '" + path.string() + "'");
  }
  return std::move(buf).str();
}

}  // namespace

void register_area(ObjectStore& store, std::string_view display_name,
                   ObjectId way_id) {
  const Way* way = store.find_way(way_id);
  if (way == nullptr) {
    fail(Errc::DanglingReference,
         "area '" + std::string(display_name) + "' references missing way " +
             std::to_string(way_id));
  }
  if (!is_closed_way(*way)) {
    fail(Errc::ParseError, "area '" + std::string(display_name) + "': way " +
                               std::to_string(way_id) + " is not closed");
  }
  std::vector<ScaledCoord> ring = ring_from_way(store, *way);
  if (!ring_is_simple(ring)) {
    fail(Errc::ParseError, "area '" + std::string(display_name) + "': way " +
                               std::to_string(way_id) +
                               " is degenerate or self-intersecting");
  }
  std::string normalized = normalize_area_name(display_name);
  if (normalized.empty()) {
    fail(Errc::ParseError, "area name must not be empty");
  }
  insert_area(store, AreaDefinition{std::move(normalized),
                                    std::string(display_name), std::move(ring),
                                    way_id});
}

ObjectStore parse_osm_xml(std::string_view xml) {
  XmlScanner scanner(xml);
  auto root = scanner.next();
  if (!root || root->closing) {
    fail(Errc::ParseError, "missing <osm> root element");
  }
  if (root->name != "osm") {
    fail(Errc::ParseError, "unexpected root element <" + root->name + ">");
  }

  ObjectStore store;
  bool root_closed = root->self_closing;
  while (!root_closed) {
    auto tag = scanner.next();
    if (!tag) fail(Errc::ParseError, "unterminated <osm> element");
    if (tag->closing) {
      if (tag->name != "osm") {
        fail(Errc::ParseError, "mismatched closing tag </" + tag->name + ">");
      }
      root_closed = true;
    } else if (tag->name == "node") {
      const std::string& id_text = tag->attrs.require("id", "<node>");
      ObjectId id = 0;
      try {
        id = parse_object_id(id_text);
      } catch (const Error&) {
        fail(Errc::ParseError, "invalid node id '" + id_text + "'");
      }
      const std::string where = "node " + id_text;
      Node node;
      node.id = id;
      node.coord.lat =
          parse_scaled(tag->attrs.require("lat", where), true, where);
      node.coord.lon =
          parse_scaled(tag->attrs.require("lon", where), false, where);
      if (!tag->self_closing) {
        parse_children(scanner, "node", where, node.tags, nullptr);
      }
      if (!store.nodes.emplace(id, std::move(node)).second) {
        fail(Errc::DuplicateObject, "duplicate node id " + id_text);
      }
    } else if (tag->name == "way") {
      const std::string& id_text = tag->attrs.require("id", "<way>");
      ObjectId id = 0;
      try {
        id = parse_object_id(id_text);
      } catch (const Error&) {
        fail(Errc::ParseError, "invalid way id '" + id_text + "'");
      }
      const std::string where = "way " + id_text;
      Way way;
      way.id = id;
      if (!tag->self_closing) {
        parse_children(scanner, "way", where, way.tags, &way.node_refs);
      }
      if (way.node_refs.size() < 2) {
        fail(Errc::ParseError, where + ": fewer than 2 node refs");
      }
      if (!store.ways.emplace(id, std::move(way)).second) {
        fail(Errc::DuplicateObject, "duplicate way id " + id_text);
      }
    } else {
      skip_subtree(scanner, *tag);
    }
  }
  if (scanner.next()) {
    fail(Errc::ParseError, "content after </osm>");
  }

  check_way_refs(store);
  register_implicit_areas(store);
  return store;
}

ObjectStore parse_fixture(std::string_view text, std::string_view source_name) {
  ObjectStore store;
  std::vector<FixtureAreaLine> area_lines;

  int lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view line = eol == std::string_view::npos
                                ? text.substr(pos)
                                : text.substr(pos, eol - pos);
    ++lineno;
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;

    const std::string where =
        std::string(source_name) + ":" + std::to_string(lineno);
    std::vector<std::string> tokens = tokenize_line(line, where);
    if (tokens.empty()) continue;

    const std::string& directive = tokens[0];
    if (directive == "node") {
      if (tokens.size() < 4) {
        fail(Errc::ParseError, where + ": node needs <id> <lat> <lon>");
      }
      Node node;
      try {
        node.id = parse_object_id(tokens[1]);
      } catch (const Error& e) {
        fail(Errc::ParseError, where + ": " + e.what());
      }
      node.coord.lat = parse_scaled(tokens[2], true, where);
      node.coord.lon = parse_scaled(tokens[3], false, where);
      node.tags = parse_tag_tokens(tokens, 4, where);
      const ObjectId id = node.id;
      if (!store.nodes.emplace(id, std::move(node)).second) {
        fail(Errc::DuplicateObject,
             where + ": duplicate node id " + std::to_string(id));
      }
    } else if (directive == "way") {
      if (tokens.size() < 3) {
        fail(Errc::ParseError, where + ": way needs <id> <ref,ref,...>");
      }
      Way way;
      try {
        way.id = parse_object_id(tokens[1]);
      } catch (const Error& e) {
        fail(Errc::ParseError, where + ": " + e.what());
      }
      std::string_view refs(tokens[2]);
      while (!refs.empty()) {
        const std::size_t comma = refs.find(',');
        const std::string_view piece = refs.substr(0, comma);
        try {
          way.node_refs.push_back(parse_object_id(piece));
        } catch (const Error& e) {
          fail(Errc::ParseError, where + ": " + e.what());
        }
        if (comma == std::string_view::npos) break;
        refs.remove_prefix(comma + 1);
        if (refs.empty()) {
          fail(Errc::ParseError, where + ": trailing comma in ref list");
        }
      }
      if (way.node_refs.size() < 2) {
        fail(Errc::ParseError, where + ": fewer than 2 node refs");
      }
      way.tags = parse_tag_tokens(tokens, 3, where);
      const ObjectId id = way.id;
      if (!store.ways.emplace(id, std::move(way)).second) {
        fail(Errc::DuplicateObject,
             where + ": duplicate way id " + std::to_string(id));
      }
    } else if (directive == "area") {
      if (tokens.size() != 3) {
        fail(Errc::ParseError, where + ": area needs <name> <way-id>");
      }
      FixtureAreaLine area;
      area.name = tokens[1];
      try {
        area.way_id = parse_object_id(tokens[2]);
      } catch (const Error& e) {
        fail(Errc::ParseError, where + ": " + e.what());
      }
      area.line = lineno;
      area_lines.push_back(std::move(area));
    } else {
      fail(Errc::ParseError,
           where + ": unknown directive '" + directive + "'");
    }
  }

  check_way_refs(store);
  register_implicit_areas(store);
  for (const FixtureAreaLine& area : area_lines) {
    try {
      register_area(store, area.name, area.way_id);
    } catch (const Error& e) {
      fail(e.code(), std::string(source_name) + ":" +
                         std::to_string(area.line) + ": " + e.what());
    }
  }
  return store;
}

ObjectStore load_fixture(const std::filesystem::path& path) {
  return parse_fixture(read_file(path), path.filename().string());
}

std::string write_fixture(const ObjectStore& store) {
  std::string out = "# osmoracle store v1\n";
  for (const auto& [id, node] : store.nodes) {
    out += "node " + std::to_string(id) + " " +
           unscale_to_decimal(node.coord.lat) + " " +
           unscale_to_decimal(node.coord.lon);
    append_tags(out, node.tags);
    out.push_back('\n');
  }
  for (const auto& [id, way] : store.ways) {
    out += "way " + std::to_string(id) + " ";
    for (std::size_t i = 0; i < way.node_refs.size(); ++i) {
      if (i > 0) out.push_back(',');
      out += std::to_string(way.node_refs[i]);
    }
    append_tags(out, way.tags);
    out.push_back('\n');
  }
  for (const auto& [name, defs] : store.areas) {
    for (const AreaDefinition& def : defs) {
      out += "area " + quote_token(def.display_name) + " " +
             std::to_string(def.source_way) + "\n";
    }
  }
  return out;
}

std::vector<Violation> validate_store(const ObjectStore& store) {
  std::vector<Violation> out;
  auto flag = [&out](Errc code, ObjectId id, std::string message) {
    out.push_back(Violation{code, id, std::move(message)});
  };

  for (const auto& [id, node] : store.nodes) {
    if (id == 0 || node.id != id) {
      flag(Errc::ParseError, id, "node id mismatch or zero");
    }
    if (!valid_lat(node.coord.lat)) {
      flag(Errc::InvalidCoordinate, id,
           "node " + std::to_string(id) + " latitude out of range");
    }
    if (!valid_lon(node.coord.lon)) {
      flag(Errc::InvalidCoordinate, id,
           "node " + std::to_string(id) + " longitude out of range");
    }
    if (node.tags.count("")) {
      flag(Errc::ParseError, id, "node " + std::to_string(id) + " empty tag key");
    }
  }
  for (const auto& [id, way] : store.ways) {
    if (id == 0 || way.id != id) {
      flag(Errc::ParseError, id, "way id mismatch or zero");
    }
    if (way.node_refs.size() < 2) {
      flag(Errc::ParseError, id,
           "way " + std::to_string(id) + " has fewer than 2 node refs");
    }
    for (ObjectId ref : way.node_refs) {
      if (store.find_node(ref) == nullptr) {
        flag(Errc::DanglingReference, id,
             "way " + std::to_string(id) + " references missing node " +
                 std::to_string(ref));
      }
    }
    if (way.tags.count("")) {
      flag(Errc::ParseError, id, "way " + std::to_string(id) + " empty tag key");
    }
  }
  for (const auto& [name, defs] : store.areas) {
    for (const AreaDefinition& def : defs) {
      if (name != def.name || def.name != normalize_area_name(def.display_name)) {
        // Explicit area lines may register under a name unrelated to way
        // tags, so only key consistency is checked.
        if (name != def.name) {
          flag(Errc::ParseError, def.source_way,
               "area '" + def.name + "' stored under wrong key");
        }
      }
      if (def.ring.size() < 4 || def.ring.front() != def.ring.back()) {
        flag(Errc::ParseError, def.source_way,
             "area '" + def.name + "' ring is not closed");
        continue;
      }
      if (!ring_is_simple(def.ring)) {
        flag(Errc::ParseError, def.source_way,
             "area '" + def.name + "' ring is degenerate or self-intersecting");
      }
      if (store.find_way(def.source_way) == nullptr) {
        flag(Errc::DanglingReference, def.source_way,
             "area '" + def.name + "' references missing way " +
                 std::to_string(def.source_way));
      }
    }
  }
  return out;
}

void save_store(const ObjectStore& store, const std::filesystem::path& path,
                StoreFormat format) {
  std::string data;
  if (format == StoreFormat::Text) {
    data = write_fixture(store);
  } else {
    data.assign(kSnapshotMagic, sizeof(kSnapshotMagic));
    ByteWriter body;
    body.u32(kSnapshotVersion);
    body.u64(store.nodes.size());
    for (const auto& [id, node] : store.nodes) {
      body.u64(id);
      body.i64(node.coord.lat);
      body.i64(node.coord.lon);
      body.u32(static_cast<std::uint32_t>(node.tags.size()));
      for (const auto& [k, v] : node.tags) {
        body.str(k);
        body.str(v);
      }
    }
    body.u64(store.ways.size());
    for (const auto& [id, way] : store.ways) {
      body.u64(id);
      body.u32(static_cast<std::uint32_t>(way.node_refs.size()));
      for (ObjectId ref : way.node_refs) body.u64(ref);
      body.u32(static_cast<std::uint32_t>(way.tags.size()));
      for (const auto& [k, v] : way.tags) {
        body.str(k);
        body.str(v);
      }
    }
    std::uint64_t area_count = 0;
    for (const auto& [name, defs] : store.areas) area_count += defs.size();
    body.u64(area_count);
    for (const auto& [name, defs] : store.areas) {
      for (const AreaDefinition& def : defs) {
        body.str(def.display_name);
        body.u64(def.source_way);
      }
    }
    data += body.data();
  }

  std::ofstream outf(path, std::ios::binary | std::ios::trunc);
  if (!outf) {
    fail(Errc::ParseError, "cannot write '" + path.string() + "'");
  }
  outf.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!outf.good()) {
    fail(Errc::ParseError, "error writing '" + path.string() + "'");
  }
}

namespace {

ObjectStore parse_snapshot_binary(std::string_view data,
                                  const std::string& name) {
  ByteReader r(data.substr(sizeof(kSnapshotMagic)));
  const std::uint32_t version = r.u32();
  if (version != kSnapshotVersion) {
    fail(Errc::ParseError, name + ": unsupported snapshot version " +
                               std::to_string(version));
  }
  ObjectStore store;
  const std::uint64_t nnodes = r.u64();
  for (std::uint64_t i = 0; i < nnodes; ++i) {
    Node node;
    node.id = r.u64();
    node.coord.lat = r.i64();
    node.coord.lon = r.i64();
    const std::uint32_t ntags = r.u32();
    for (std::uint32_t t = 0; t < ntags; ++t) {
      std::string k = r.str();
      node.tags.emplace(std::move(k), r.str());
    }
    const ObjectId id = node.id;
    if (id == 0 || !store.nodes.emplace(id, std::move(node)).second) {
      fail(Errc::DuplicateObject,
           name + ": bad or duplicate node id " + std::to_string(id));
    }
  }
  const std::uint64_t nways = r.u64();
  for (std::uint64_t i = 0; i < nways; ++i) {
    Way way;
    way.id = r.u64();
    const std::uint32_t nrefs = r.u32();
    way.node_refs.reserve(nrefs);
    for (std::uint32_t k = 0; k < nrefs; ++k) way.node_refs.push_back(r.u64());
    const std::uint32_t ntags = r.u32();
    for (std::uint32_t t = 0; t < ntags; ++t) {
      std::string k = r.str();
      way.tags.emplace(std::move(k), r.str());
    }
    const ObjectId id = way.id;
    if (id == 0 || !store.ways.emplace(id, std::move(way)).second) {
      fail(Errc::DuplicateObject,
           name + ": bad or duplicate way id " + std::to_string(id));
    }
  }
  check_way_refs(store);
  const std::uint64_t nareas = r.u64();
  for (std::uint64_t i = 0; i < nareas; ++i) {
    std::string display = r.str();
    const ObjectId way_id = r.u64();
    register_area(store, display, way_id);
  }
  if (!r.at_end()) {
    fail(Errc::ParseError, name + ": trailing bytes in snapshot");
  }
  return store;
}

bool has_snapshot_magic(std::string_view data) {
  return data.size() >= sizeof(kSnapshotMagic) &&
         std::memcmp(data.data(), kSnapshotMagic, sizeof(kSnapshotMagic)) == 0;
}

}  // namespace

ObjectStore load_store(const std::filesystem::path& path) {
  const std::string data = read_file(path);
  const std::string name = path.filename().string();
  if (has_snapshot_magic(data)) {
    return parse_snapshot_binary(data, name);
  }
  return parse_fixture(data, name);
}

ObjectStore load_any(const std::filesystem::path& path) {
  const std::string data = read_file(path);
  const std::string name = path.filename().string();
  if (has_snapshot_magic(data)) {
    return parse_snapshot_binary(data, name);
  }
  for (char c : data) {
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') continue;
    if (c == '<') return parse_osm_xml(data);
    break;
  }
  return parse_fixture(data, name);
}

}  // namespace osmo
