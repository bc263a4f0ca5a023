#include "osmoracle/abi.hpp"

#include <limits>

namespace osmo {

namespace {

constexpr std::size_t kWord = 32;

void append_uint_word(std::vector<std::uint8_t>& out, std::uint64_t v) {
  out.insert(out.end(), 24, 0x00);
  for (int i = 7; i >= 0; --i) {
    out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
}

void append_int_word(std::vector<std::uint8_t>& out, std::int64_t v) {
  const std::uint8_t fill = v < 0 ? 0xFF : 0x00;
  out.insert(out.end(), 24, fill);
  const std::uint64_t u = static_cast<std::uint64_t>(v);
  for (int i = 7; i >= 0; --i) {
    out.push_back(static_cast<std::uint8_t>(u >> (8 * i)));
  }
}

void append_padded(std::vector<std::uint8_t>& out, std::string_view data) {
  out.insert(out.end(), data.begin(), data.end());
  const std::size_t rem = data.size() % kWord;
  if (rem != 0) out.insert(out.end(), kWord - rem, 0x00);
}

[[noreturn]] void malformed(const std::string& why) {
  fail(Errc::MalformedPayload, why);
}

class WordReader {
 public:
  explicit WordReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {
    if (bytes_.size() % kWord != 0) {
      malformed("payload length is not a multiple of 32");
    }
  }

  std::uint64_t read_uint(const char* what) {
    const std::span<const std::uint8_t> w = next_word(what);
    for (std::size_t i = 0; i < 24; ++i) {
      if (w[i] != 0x00) malformed(std::string(what) + ": not a canonical uint");
    }
    return big_endian_tail(w);
  }

  std::int64_t read_int(const char* what) {
    const std::span<const std::uint8_t> w = next_word(what);
    const bool negative = (w[24] & 0x80) != 0;
    const std::uint8_t fill = negative ? 0xFF : 0x00;
    for (std::size_t i = 0; i < 24; ++i) {
      if (w[i] != fill) {
        malformed(std::string(what) + ": not a canonically sign-extended int64");
      }
    }
    return static_cast<std::int64_t>(big_endian_tail(w));
  }

  std::string read_string_tail(std::size_t length, const char* what) {
    const std::size_t padded = (length + kWord - 1) / kWord * kWord;
    if (pos_ + padded > bytes_.size()) {
      malformed(std::string(what) + ": string data past payload end");
    }
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), length);
    for (std::size_t i = length; i < padded; ++i) {
      if (bytes_[pos_ + i] != 0x00) {
        malformed(std::string(what) + ": nonzero padding");
      }
    }
    pos_ += padded;
    return s;
  }

  std::size_t position() const { return pos_; }
  bool at_end() const { return pos_ == bytes_.size(); }
  void expect_end() const {
    if (!at_end()) malformed("trailing bytes after payload value");
  }

 private:
  std::span<const std::uint8_t> next_word(const char* what) {
    if (pos_ + kWord > bytes_.size()) {
      malformed(std::string(what) + ": payload truncated");
    }
    auto w = bytes_.subspan(pos_, kWord);
    pos_ += kWord;
    return w;
  }

  static std::uint64_t big_endian_tail(std::span<const std::uint8_t> w) {
    std::uint64_t v = 0;
    for (std::size_t i = 24; i < kWord; ++i) {
      v = (v << 8) | w[i];
    }
    return v;
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

std::uint64_t read_length(WordReader& r, const char* what,
                          std::size_t payload_size) {
  const std::uint64_t len = r.read_uint(what);
  // Any plausible length fits the payload; reject early to avoid overflow.
  if (len > payload_size) malformed(std::string(what) + ": length too large");
  return len;
}

}  // namespace

std::string_view abi_layout_name(AbiLayout layout) {
  switch (layout) {
    case AbiLayout::Int64Scalar: return "int64";
    case AbiLayout::Int64Array: return "int64[]";
    case AbiLayout::StringArray: return "string[]";
    case AbiLayout::CoordPairList: return "(int64,int64)[]";
    case AbiLayout::GeocodeTuple: return "(int64,int64,int64,int64)";
    case AbiLayout::ReverseTuple: return "(int64,int64,string)";
  }
  return "?";
}

AbiPayload encode_int64(std::int64_t v) {
  AbiPayload p;
  p.layout = AbiLayout::Int64Scalar;
  append_int_word(p.bytes, v);
  return p;
}

AbiPayload encode_int64_array(std::span<const std::int64_t> vs) {
  AbiPayload p;
  p.layout = AbiLayout::Int64Array;
  append_uint_word(p.bytes, 0x20);
  append_uint_word(p.bytes, vs.size());
  for (std::int64_t v : vs) append_int_word(p.bytes, v);
  return p;
}

AbiPayload encode_string_array(std::span<const std::string> ss) {
  AbiPayload p;
  p.layout = AbiLayout::StringArray;
  append_uint_word(p.bytes, 0x20);
  append_uint_word(p.bytes, ss.size());
  // Offsets are relative to the start of the array data (after the length
  // word).
  std::uint64_t offset = ss.size() * kWord;
  for (const std::string& s : ss) {
    append_uint_word(p.bytes, offset);
    offset += kWord + (s.size() + kWord - 1) / kWord * kWord;
  }
  for (const std::string& s : ss) {
    append_uint_word(p.bytes, s.size());
    append_padded(p.bytes, s);
  }
  return p;
}

AbiPayload encode_coord_pairs(std::span<const ScaledCoord> cs) {
  AbiPayload p;
  p.layout = AbiLayout::CoordPairList;
  append_uint_word(p.bytes, 0x20);
  append_uint_word(p.bytes, cs.size());
  for (const ScaledCoord& c : cs) {
    append_int_word(p.bytes, c.lat);
    append_int_word(p.bytes, c.lon);
  }
  return p;
}

AbiPayload encode_geocode(const GeocodeResult& r) {
  AbiPayload p;
  p.layout = AbiLayout::GeocodeTuple;
  append_int_word(p.bytes, static_cast<std::int64_t>(r.type));
  append_int_word(p.bytes, id_to_int64(r.id));
  append_int_word(p.bytes, r.coord.lat);
  append_int_word(p.bytes, r.coord.lon);
  return p;
}

AbiPayload encode_reverse(const ReverseGeocodeResult& r) {
  if (r.description.empty()) {
    fail(Errc::BadRequest, "reverse-geocode description must not be empty");
  }
  AbiPayload p;
  p.layout = AbiLayout::ReverseTuple;
  append_int_word(p.bytes, static_cast<std::int64_t>(r.type));
  append_int_word(p.bytes, id_to_int64(r.id));
  append_uint_word(p.bytes, 0x60);  // offset of the string within the tuple
  append_uint_word(p.bytes, r.description.size());
  append_padded(p.bytes, r.description);
  return p;
}

std::int64_t id_to_int64(std::uint64_t id) {
  if (id >
      static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
    fail(Errc::IdOverflow,
         "object id " + std::to_string(id) + " exceeds the signed 64-bit wire");
  }
  return static_cast<std::int64_t>(id);
}

namespace {

ObjectType decode_type_flag(std::int64_t flag) {
  if (flag == 0) return ObjectType::Node;
  if (flag == 1) return ObjectType::Way;
  malformed("type flag must be 0 or 1, got " + std::to_string(flag));
}

std::uint64_t decode_wire_id(std::int64_t v) {
  if (v < 1) malformed("object id on the wire must be positive");
  return static_cast<std::uint64_t>(v);
}

}  // namespace

AbiValue decode(const AbiPayload& payload) {
  WordReader r(payload.bytes);
  const std::size_t size = payload.bytes.size();

  switch (payload.layout) {
    case AbiLayout::Int64Scalar: {
      const std::int64_t v = r.read_int("int64");
      r.expect_end();
      return v;
    }
    case AbiLayout::Int64Array: {
      if (r.read_uint("array offset") != 0x20) {
        malformed("array offset: expected 0x20");
      }
      const std::uint64_t len = read_length(r, "array length", size);
      std::vector<std::int64_t> out;
      out.reserve(len);
      for (std::uint64_t i = 0; i < len; ++i) {
        out.push_back(r.read_int("array element"));
      }
      r.expect_end();
      return out;
    }
    case AbiLayout::StringArray: {
      if (r.read_uint("array offset") != 0x20) {
        malformed("array offset: expected 0x20");
      }
      const std::uint64_t len = read_length(r, "array length", size);
      std::vector<std::uint64_t> offsets;
      offsets.reserve(len);
      for (std::uint64_t i = 0; i < len; ++i) {
        offsets.push_back(r.read_uint("string offset"));
      }
      std::vector<std::string> out;
      out.reserve(len);
      std::uint64_t canonical = len * kWord;
      for (std::uint64_t i = 0; i < len; ++i) {
        if (offsets[i] != canonical) {
          malformed("string offset: expected " + std::to_string(canonical) +
                    ", got " + std::to_string(offsets[i]));
        }
        const std::uint64_t slen = read_length(r, "string length", size);
        out.push_back(r.read_string_tail(slen, "string data"));
        canonical += kWord + (slen + kWord - 1) / kWord * kWord;
      }
      r.expect_end();
      return out;
    }
    case AbiLayout::CoordPairList: {
      if (r.read_uint("array offset") != 0x20) {
        malformed("array offset: expected 0x20");
      }
      const std::uint64_t len = read_length(r, "array length", size);
      std::vector<ScaledCoord> out;
      out.reserve(len);
      for (std::uint64_t i = 0; i < len; ++i) {
        const std::int64_t lat = r.read_int("pair latitude");
        const std::int64_t lon = r.read_int("pair longitude");
        out.push_back(ScaledCoord{lat, lon});
      }
      r.expect_end();
      return out;
    }
    case AbiLayout::GeocodeTuple: {
      GeocodeResult g;
      g.type = decode_type_flag(r.read_int("type flag"));
      g.id = decode_wire_id(r.read_int("object id"));
      g.coord.lat = r.read_int("latitude");
      g.coord.lon = r.read_int("longitude");
      r.expect_end();
      return g;
    }
    case AbiLayout::ReverseTuple: {
      ReverseGeocodeResult g;
      g.type = decode_type_flag(r.read_int("type flag"));
      g.id = decode_wire_id(r.read_int("object id"));
      if (r.read_uint("string offset") != 0x60) {
        malformed("string offset: expected 0x60");
      }
      const std::uint64_t slen = read_length(r, "string length", size);
      g.description = r.read_string_tail(slen, "description");
      if (g.description.empty()) {
        malformed("description must not be empty");
      }
      r.expect_end();
      return g;
    }
  }
  malformed("unknown layout tag");
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out = "0x";
  out.reserve(2 + bytes.size() * 2);
  for (std::uint8_t b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0x0F]);
  }
  return out;
}

std::string to_hex(const AbiPayload& payload) { return to_hex(payload.bytes); }

std::vector<std::uint8_t> from_hex(std::string_view hex) {
  if (hex.starts_with("0x") || hex.starts_with("0X")) {
    hex.remove_prefix(2);
  }
  if (hex.size() % 2 != 0) {
    fail(Errc::MalformedPayload, "hex string has odd length");
  }
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    fail(Errc::MalformedPayload, std::string("invalid hex digit '") + c + "'");
  };
  std::vector<std::uint8_t> out;
  out.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    out.push_back(
        static_cast<std::uint8_t>(nibble(hex[i]) << 4 | nibble(hex[i + 1])));
  }
  return out;
}

}  // namespace osmo
