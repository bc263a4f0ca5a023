#!/usr/bin/env python3
"""Golden-vector generator for the ABI payload layouts.

This is an independent reference encoder: it implements the EVM ABI rules
for the six response layouts directly from the ABI specification, with no
code shared with the C++ library. Inputs are derived from a splitmix64
stream so the C++ golden test can regenerate the exact same inputs, encode
them through the library, and compare byte-for-byte.

Run from the repository root:

    python3 scripts/make_abi_golden.py

Output: golden/abi_<layout>.txt, one 0x-prefixed lowercase hex payload per
line, 100 lines per layout.

Input derivation (shared contract with tests/test_abi.cpp -- keep in sync):
  - stream: splitmix64 seeded per layout (seeds below); one draw per item
    in the documented order
  - int64 from a draw u: two's-complement reinterpretation of u
  - lat from u: (u % 18000000001) - 9000000000
  - lon from u: (u % 36000000001) - 18000000000
  - id from u:  (u % 0x7fffffffffffffff) + 1
  - flag from u: u & 1
  - string from draws: length = u0 % 41 (or %40+1 where nonempty), then one
    alphabet pick per character
  - arrays: length draw first, then element draws in order; coordinate
    pairs draw lat then lon
  The first vectors of every layout are fixed specials (see build_*).
"""

import os

MASK64 = (1 << 64) - 1
INT64_MAX = (1 << 63) - 1
INT64_MIN = -(1 << 63)
MAX_LAT = 90 * 10**8
MAX_LON = 180 * 10**8

SEEDS = {
    "int64": 101,
    "int64_array": 202,
    "string_array": 303,
    "coord_pairs": 404,
    "geocode": 505,
    "reverse": 606,
}

ALPHABET = (
    [chr(c) for c in range(ord("a"), ord("z") + 1)]
    + [chr(c) for c in range(ord("A"), ord("Z") + 1)]
    + [chr(c) for c in range(ord("0"), ord("9") + 1)]
    + [" ", "_", "-", ".", ",", ":", "#", "/"]
    + ["é", "€", "中", "Д"]
)
assert len(ALPHABET) == 74


class SplitMix64:
    def __init__(self, seed):
        self.state = seed & MASK64

    def next(self):
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)


def to_int64(u):
    return u if u < (1 << 63) else u - (1 << 64)


def draw_lat(rng):
    return rng.next() % (2 * MAX_LAT + 1) - MAX_LAT


def draw_lon(rng):
    return rng.next() % (2 * MAX_LON + 1) - MAX_LON


def draw_id(rng):
    return rng.next() % INT64_MAX + 1


def draw_string(rng, min_len=0):
    if min_len == 0:
        length = rng.next() % 41
    else:
        length = rng.next() % 40 + 1
    return "".join(ALPHABET[rng.next() % len(ALPHABET)] for _ in range(length))


# --- reference ABI encoding (return-data style, no selector) ----------------


def word_uint(v):
    return v.to_bytes(32, "big")


def word_int(v):
    return (v % (1 << 256)).to_bytes(32, "big")


def pad32(data):
    rem = len(data) % 32
    return data + b"\x00" * (32 - rem if rem else 0)


def enc_int64(v):
    return word_int(v)


def enc_int64_array(vs):
    out = word_uint(0x20) + word_uint(len(vs))
    for v in vs:
        out += word_int(v)
    return out


def enc_string_array(ss):
    encoded = [s.encode("utf-8") for s in ss]
    out = word_uint(0x20) + word_uint(len(ss))
    offset = 32 * len(ss)
    for b in encoded:
        out += word_uint(offset)
        offset += 32 + len(pad32(b))
    for b in encoded:
        out += word_uint(len(b)) + pad32(b)
    return out


def enc_coord_pairs(cs):
    out = word_uint(0x20) + word_uint(len(cs))
    for lat, lon in cs:
        out += word_int(lat) + word_int(lon)
    return out


def enc_geocode(flag, oid, lat, lon):
    return word_int(flag) + word_int(oid) + word_int(lat) + word_int(lon)


def enc_reverse(flag, oid, description):
    b = description.encode("utf-8")
    return (
        word_int(flag)
        + word_int(oid)
        + word_uint(0x60)
        + word_uint(len(b))
        + pad32(b)
    )


# --- input derivation --------------------------------------------------------


def build_int64(i, rng):
    specials = [0, 1, -1, INT64_MAX, INT64_MIN]
    if i < len(specials):
        return enc_int64(specials[i])
    return enc_int64(to_int64(rng.next()))


def build_int64_array(i, rng):
    specials = [[], [0], [1, -1], [INT64_MAX, INT64_MIN]]
    if i < len(specials):
        return enc_int64_array(specials[i])
    length = rng.next() % 9
    return enc_int64_array([to_int64(rng.next()) for _ in range(length)])


def build_string_array(i, rng):
    specials = [[], [""], ["Paris", "324"]]
    if i < len(specials):
        return enc_string_array(specials[i])
    length = rng.next() % 6
    return enc_string_array([draw_string(rng) for _ in range(length)])


def build_coord_pairs(i, rng):
    specials = [[], [(0, 0)], [(4077190000, -7397460000)]]
    if i < len(specials):
        return enc_coord_pairs(specials[i])
    length = rng.next() % 11
    return enc_coord_pairs([(draw_lat(rng), draw_lon(rng)) for _ in range(length)])


def build_geocode(i, rng):
    specials = [(0, 1, 0, 0), (1, 1, MAX_LAT, -MAX_LON)]
    if i < len(specials):
        return enc_geocode(*specials[i])
    return enc_geocode(rng.next() & 1, draw_id(rng), draw_lat(rng), draw_lon(rng))


def build_reverse(i, rng):
    specials = [(0, 1, "X"), (1, 7, "way 7")]
    if i < len(specials):
        return enc_reverse(*specials[i])
    return enc_reverse(rng.next() & 1, draw_id(rng), draw_string(rng, min_len=1))


BUILDERS = {
    "int64": build_int64,
    "int64_array": build_int64_array,
    "string_array": build_string_array,
    "coord_pairs": build_coord_pairs,
    "geocode": build_geocode,
    "reverse": build_reverse,
}

VECTORS_PER_LAYOUT = 100


def main():
    root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    out_dir = os.path.join(root, "golden")
    os.makedirs(out_dir, exist_ok=True)
    for name, builder in BUILDERS.items():
        rng = SplitMix64(SEEDS[name])
        lines = []
        for i in range(VECTORS_PER_LAYOUT):
            payload = builder(i, rng)
            assert len(payload) % 32 == 0
            lines.append("0x" + payload.hex())
        path = os.path.join(out_dir, f"abi_{name}.txt")
        with open(path, "w") as f:
            f.write("\n".join(lines) + "\n")
        print(f"wrote {path} ({len(lines)} vectors)")


if __name__ == "__main__":
    main()
