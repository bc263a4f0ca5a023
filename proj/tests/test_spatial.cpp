#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "osmoracle/spatial.hpp"

using namespace osmo;

namespace {

std::vector<ScaledCoord> square_ring(std::int64_t s, std::int64_t w,
                                     std::int64_t n, std::int64_t e) {
  return {{s, w}, {s, e}, {n, e}, {n, w}, {s, w}};
}

}  // namespace

TEST_CASE("build_index on an empty store answers every query with nothing") {
  const ObjectStore store;
  const SpatialIndex index = SpatialIndex::build(store);
  CHECK(index.node_entries() == 0);
  CHECK(index.nodes_in_bbox(BoundingBox{-kMaxLat, -kMaxLon, kMaxLat, kMaxLon})
            .empty());
  CHECK(index.ways_in_bbox(BoundingBox{-kMaxLat, -kMaxLon, kMaxLat, kMaxLon})
            .empty());
  CHECK_THROWS_AS((void)index.nearest_object(ScaledCoord{0, 0}), Error);
}

TEST_CASE("build_index rejects invalid stores") {
  ObjectStore store;
  store.nodes[1] = Node{1, ScaledCoord{9100000000, 0}, {}};
  try {
    (void)SpatialIndex::build(store);
    FAIL("expected BuildRejected");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::BuildRejected);
  }
}

TEST_CASE("tree packing is correct at fanout boundaries") {
  // Sizes around the leaf/interior fanout catch grouping off-by-ones.
  for (const std::size_t n : {1u, 2u, 15u, 16u, 17u, 255u, 256u, 257u}) {
    ObjectStore store;
    for (std::size_t i = 0; i < n; ++i) {
      const ObjectId id = i + 1;
      store.nodes[id] =
          Node{id, ScaledCoord{std::int64_t(i) * 1000, std::int64_t(i) * 500}, {}};
    }
    const SpatialIndex index = SpatialIndex::build(store);
    REQUIRE(index.node_entries() == n);

    const BoundingBox everything{-kMaxLat, -kMaxLon, kMaxLat, kMaxLon};
    CHECK(index.nodes_in_bbox(everything).size() == n);

    // Each point is individually retrievable.
    const ObjectId probe_id = n / 2 + 1;
    const ScaledCoord c = store.find_node(probe_id)->coord;
    const BoundingBox point{c.lat, c.lon, c.lat, c.lon};
    CHECK(index.nodes_in_bbox(point) == std::vector<ObjectId>{probe_id});
  }
}

TEST_CASE("index cardinality matches the store") {
  std::mt19937_64 rng(20240606);
  test::RandomStoreConfig cfg;
  cfg.n_nodes = 10000;
  cfg.n_ways = 0;
  const ObjectStore store = test::random_store(rng, cfg);
  const SpatialIndex index = SpatialIndex::build(store);
  CHECK(index.node_entries() == 10000);
}

TEST_CASE("a way's tree rectangle is the min/max of its member coords") {
  ObjectStore store;
  std::mt19937_64 rng(20240607);
  std::uniform_int_distribution<std::int64_t> lat(-kMaxLat, kMaxLat);
  std::uniform_int_distribution<std::int64_t> lon(-kMaxLon, kMaxLon);
  Way way;
  way.id = 100;
  Rect expected{};
  for (ObjectId id = 1; id <= 10; ++id) {
    const ScaledCoord c{lat(rng), lon(rng)};
    store.nodes[id] = Node{id, c, {}};
    way.node_refs.push_back(id);
    if (id == 1) {
      expected = Rect::of_point(c);
    } else {
      expected.expand(c);
    }
  }
  store.ways[100] = way;
  const SpatialIndex index = SpatialIndex::build(store);
  REQUIRE(index.way_entries() == 1);
  CHECK(index.way_tree().entries()[0].rect == expected);
}

TEST_CASE("bbox node queries equal a linear scan") {
  std::mt19937_64 rng(20240608);
  for (int trial = 0; trial < 20; ++trial) {
    test::RandomStoreConfig cfg;
    cfg.n_nodes = 500 + rng() % 1500;
    cfg.n_ways = 100;
    const ObjectStore store = test::random_store(rng, cfg);
    const SpatialIndex index = SpatialIndex::build(store);

    std::uniform_int_distribution<std::int64_t> lat(cfg.lat_min, cfg.lat_max);
    std::uniform_int_distribution<std::int64_t> lon(cfg.lon_min, cfg.lon_max);
    for (int q = 0; q < 20; ++q) {
      std::int64_t s = lat(rng), n = lat(rng);
      std::int64_t w = lon(rng), e = lon(rng);
      if (s > n) std::swap(s, n);
      if (w > e) std::swap(w, e);
      const BoundingBox bb{s, w, n, e};

      std::vector<ObjectId> expected_nodes;
      for (const auto& [id, node] : store.nodes) {
        if (test::oracle_in_bbox(node.coord, bb)) expected_nodes.push_back(id);
      }
      CHECK(index.nodes_in_bbox(bb) == expected_nodes);

      std::vector<ObjectId> expected_ways;
      for (const auto& [id, way] : store.ways) {
        for (ObjectId ref : way.node_refs) {
          if (test::oracle_in_bbox(store.find_node(ref)->coord, bb)) {
            expected_ways.push_back(id);
            break;
          }
        }
      }
      CHECK(index.ways_in_bbox(bb) == expected_ways);
    }
  }
}

TEST_CASE("bbox edges are inclusive") {
  ObjectStore store;
  store.nodes[5] = Node{5, ScaledCoord{4200000000, -7100000000}, {}};
  const SpatialIndex index = SpatialIndex::build(store);
  const BoundingBox degenerate{4200000000, -7100000000, 4200000000,
                               -7100000000};
  CHECK(index.nodes_in_bbox(degenerate) == std::vector<ObjectId>{5});
  const BoundingBox whole{-kMaxLat, -kMaxLon, kMaxLat, kMaxLon};
  CHECK(index.nodes_in_bbox(whole) == std::vector<ObjectId>{5});
}

TEST_CASE("a way is in a bbox when at least one member node is") {
  ObjectStore store;
  store.nodes[1] = Node{1, ScaledCoord{0, 0}, {}};
  store.nodes[2] = Node{2, ScaledCoord{0, 5000000000}, {}};
  store.ways[10] = Way{10, {1, 2}, {}};
  const SpatialIndex index = SpatialIndex::build(store);

  // Only node 1 inside.
  CHECK(index.ways_in_bbox(BoundingBox{-1000, -1000, 1000, 1000}) ==
        std::vector<ObjectId>{10});
  // Both inside.
  CHECK(index.ways_in_bbox(BoundingBox{-1000, -1000, 1000, 5000000000}) ==
        std::vector<ObjectId>{10});
  // Box covers the middle of the segment but neither endpoint.
  CHECK(index.ways_in_bbox(BoundingBox{-1000, 2000000000, 1000, 3000000000})
            .empty());
}

TEST_CASE("point_in_polygon basics") {
  const auto ring = square_ring(0, 0, 1000, 1000);
  CHECK(point_in_polygon(ScaledCoord{500, 500}, ring));
  CHECK(!point_in_polygon(ScaledCoord{500, 100000500}, ring));  // 1 deg east
  // Boundary: vertices, edge midpoints.
  CHECK(point_in_polygon(ScaledCoord{0, 0}, ring));
  CHECK(point_in_polygon(ScaledCoord{0, 500}, ring));
  CHECK(point_in_polygon(ScaledCoord{1000, 1000}, ring));
  CHECK(point_in_polygon(ScaledCoord{500, 1000}, ring));
  CHECK(!point_in_polygon(ScaledCoord{1001, 500}, ring));
}

TEST_CASE("point_in_polygon agrees with a half-plane oracle on convex rings") {
  std::mt19937_64 rng(20240609);
  // A convex hexagon.
  const std::vector<ScaledCoord> ring = {
      {0, 2000},    {1500, 3000}, {3000, 2000}, {3000, -1000},
      {1500, -2000}, {0, -1000},  {0, 2000}};
  std::uniform_int_distribution<std::int64_t> lat(-500, 3500);
  std::uniform_int_distribution<std::int64_t> lon(-2500, 3500);
  for (int i = 0; i < 1000; ++i) {
    const ScaledCoord p{lat(rng), lon(rng)};
    CHECK(point_in_polygon(p, ring) == test::oracle_convex_contains(p, ring));
  }
}

TEST_CASE("point_in_polygon is invariant under ring rotation and reversal") {
  std::mt19937_64 rng(20240610);
  // Concave quadrilateral (arrowhead).
  const std::vector<ScaledCoord> base = {
      {0, 0}, {2000, 800}, {4000, 0}, {2000, 3000}, {0, 0}};
  std::uniform_int_distribution<std::int64_t> lat(-500, 4500);
  std::uniform_int_distribution<std::int64_t> lon(-500, 3500);

  const std::size_t k = base.size() - 1;
  for (int i = 0; i < 500; ++i) {
    const ScaledCoord p{lat(rng), lon(rng)};
    const bool expected = point_in_polygon(p, base);
    for (std::size_t shift = 1; shift < k; ++shift) {
      std::vector<ScaledCoord> rotated;
      for (std::size_t j = 0; j < k; ++j) {
        rotated.push_back(base[(j + shift) % k]);
      }
      rotated.push_back(rotated.front());
      CHECK(point_in_polygon(p, rotated) == expected);
    }
    std::vector<ScaledCoord> reversed(base.rbegin(), base.rend());
    CHECK(point_in_polygon(p, reversed) == expected);
  }
}

TEST_CASE("ring_is_simple accepts squares and rejects degenerate rings") {
  CHECK(ring_is_simple(square_ring(0, 0, 1000, 1000)));
  // Collinear continuation is fine.
  const std::vector<ScaledCoord> with_midpoint = {
      {0, 0}, {0, 500}, {0, 1000}, {1000, 1000}, {1000, 0}, {0, 0}};
  CHECK(ring_is_simple(with_midpoint));
  // Bowtie self-intersection.
  const std::vector<ScaledCoord> bowtie = {
      {0, 0}, {1000, 1000}, {0, 1000}, {1000, 0}, {0, 0}};
  CHECK(!ring_is_simple(bowtie));
  // Spike: doubled-back collinear edge.
  const std::vector<ScaledCoord> spike = {
      {0, 0}, {0, 1000}, {0, 400}, {1000, 400}, {0, 0}};
  CHECK(!ring_is_simple(spike));
  // Repeated vertex.
  const std::vector<ScaledCoord> pinched = {
      {0, 0}, {0, 1000}, {500, 500}, {1000, 1000}, {1000, 0}, {500, 500},
      {0, 0}};
  CHECK(!ring_is_simple(pinched));
  // Open or too-short rings.
  CHECK(!ring_is_simple(std::vector<ScaledCoord>{{0, 0}, {0, 1}, {1, 1}}));
  CHECK(!ring_is_simple(std::vector<ScaledCoord>{{0, 0}, {0, 1}, {1, 1}, {1, 0}}));
  // Zero-length edge.
  const std::vector<ScaledCoord> stutter = {
      {0, 0}, {0, 1000}, {0, 1000}, {1000, 0}, {0, 0}};
  CHECK(!ring_is_simple(stutter));
}

TEST_CASE("resolve_named_area normalizes and reports failures") {
  const ObjectStore store = load_fixture(test::fixture_path("boston_mini.txt"));
  const SpatialIndex index = SpatialIndex::build(store);

  const AreaDefinition& boston = index.resolve_named_area("Boston");
  CHECK(boston.source_way == 800);
  CHECK(boston.ring.size() == 5);
  CHECK(&index.resolve_named_area(" boston ") == &boston);
  CHECK(&index.resolve_named_area("BOSTON") == &boston);

  try {
    (void)index.resolve_named_area("Atlantis");
    FAIL("expected AreaNotFound");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::AreaNotFound);
  }
}

TEST_CASE("two same-named polygons make the name ambiguous") {
  // Two disjoint triangles, both called Twin.
  ObjectStore store;
  store.nodes[11] = Node{11, ScaledCoord{0, 0}, {}};
  store.nodes[12] = Node{12, ScaledCoord{0, 1000}, {}};
  store.nodes[13] = Node{13, ScaledCoord{1000, 500}, {}};
  store.ways[20] = Way{20, {11, 12, 13, 11}, {{"name", "Twin"}}};
  store.nodes[14] = Node{14, ScaledCoord{5000, 0}, {}};
  store.nodes[15] = Node{15, ScaledCoord{5000, 1000}, {}};
  store.nodes[16] = Node{16, ScaledCoord{6000, 500}, {}};
  store.ways[21] = Way{21, {14, 15, 16, 14}, {{"name", "Twin"}}};
  register_area(store, "Twin", 20);
  register_area(store, "Twin", 21);
  const SpatialIndex index = SpatialIndex::build(store);
  try {
    (void)index.resolve_named_area("twin");
    FAIL("expected AmbiguousArea");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::AmbiguousArea);
    CHECK(std::string(e.what()).find("way 20") != std::string::npos);
    CHECK(std::string(e.what()).find("way 21") != std::string::npos);
  }
}

TEST_CASE("nearest_object tie-breaks deterministically") {
  ObjectStore store;
  store.nodes[2] = Node{2, ScaledCoord{0, 1000}, {}};
  store.nodes[7] = Node{7, ScaledCoord{0, -1000}, {}};  // equidistant from 0
  const SpatialIndex index = SpatialIndex::build(store);
  const NearestResult r = index.nearest_object(ScaledCoord{0, 0});
  CHECK(r.type == ObjectType::Node);
  CHECK(r.id == 2);  // lower id wins the tie

  const NearestResult exact = index.nearest_object(ScaledCoord{0, 1000});
  CHECK(exact.id == 2);
  CHECK(exact.distance_m == 0.0);
}

TEST_CASE("a node on a way beats the way at equal distance") {
  ObjectStore store;
  store.nodes[10] = Node{10, ScaledCoord{0, 0}, {}};
  store.nodes[11] = Node{11, ScaledCoord{0, 1000}, {}};
  store.ways[1] = Way{1, {10, 11}, {}};  // way id below node ids
  const SpatialIndex index = SpatialIndex::build(store);
  const NearestResult r = index.nearest_object(ScaledCoord{0, 0});
  CHECK(r.type == ObjectType::Node);  // type code 0 beats way despite id 1
  CHECK(r.id == 10);
}

TEST_CASE("nearest_object equals the brute-force argmin") {
  std::mt19937_64 rng(20240611);
  test::RandomStoreConfig cfg;
  cfg.n_nodes = 1000;
  cfg.n_ways = 100;
  const ObjectStore store = test::random_store(rng, cfg);
  const SpatialIndex index = SpatialIndex::build(store);

  std::uniform_int_distribution<std::int64_t> lat(cfg.lat_min - 100000000,
                                                  cfg.lat_max + 100000000);
  std::uniform_int_distribution<std::int64_t> lon(cfg.lon_min - 100000000,
                                                  cfg.lon_max + 100000000);
  for (int probe = 0; probe < 100; ++probe) {
    const ScaledCoord p{lat(rng), lon(rng)};
    const NearestResult got = index.nearest_object(p);
    const NearestResult expected = test::oracle_nearest(store, p);
    CHECK(got.type == expected.type);
    CHECK(got.id == expected.id);
    CHECK(got.distance_m == expected.distance_m);
  }
}

TEST_CASE("min_distance_to_rect_m is a valid lower bound") {
  std::mt19937_64 rng(20240612);
  std::uniform_int_distribution<std::int64_t> lat(-kMaxLat, kMaxLat);
  std::uniform_int_distribution<std::int64_t> lon(-kMaxLon, kMaxLon);
  for (int trial = 0; trial < 2000; ++trial) {
    std::int64_t s = lat(rng), n = lat(rng);
    std::int64_t w = lon(rng), e = lon(rng);
    if (s > n) std::swap(s, n);
    if (w > e) std::swap(w, e);
    const Rect rect{s, w, n, e};
    const ScaledCoord p{lat(rng), lon(rng)};
    const double bound = min_distance_to_rect_m(p, rect);

    // Sample points inside the rectangle; all must be at least `bound` away.
    for (int k = 0; k < 10; ++k) {
      const ScaledCoord q{s + std::int64_t(rng() % std::uint64_t(n - s + 1)),
                          w + std::int64_t(rng() % std::uint64_t(e - w + 1))};
      CHECK(haversine_distance(p, q) >= bound);
    }
  }
}
