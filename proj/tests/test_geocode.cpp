#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "osmoracle/geocode.hpp"

using namespace osmo;

namespace {

constexpr const char* kBakerStreetAddress = "221B Baker St, London NW1 6XE, UK";
constexpr std::int64_t kMuseumLat = 5152338790;
constexpr std::int64_t kMuseumLon = -15823670;

}  // namespace

TEST_CASE("normalize_address tokenizes deterministically") {
  CHECK(normalize_address(kBakerStreetAddress) ==
        std::vector<std::string>{"221b", "baker", "st", "london", "nw1", "6xe",
                                 "uk"});
  CHECK(normalize_address("").empty());
  CHECK(normalize_address("  A,,B  ") == std::vector<std::string>{"a", "b"});
  CHECK(normalize_address("Caf\xC3\xA9 #1!") ==
        std::vector<std::string>{"caf\xC3\xA9", "1"});
}

TEST_CASE("geocode finds the Baker Street museum") {
  const ObjectStore store = load_fixture(test::fixture_path("london_mini.txt"));
  const SpatialIndex index = SpatialIndex::build(store);
  const Geocoder geocoder(index);

  const GeocodeResult r = geocoder.geocode(kBakerStreetAddress);
  CHECK(r.type == ObjectType::Node);
  CHECK(r.id == 3100);
  CHECK(r.coord == ScaledCoord{kMuseumLat, kMuseumLon});

  // Normalization property: case and punctuation do not matter.
  const GeocodeResult noisy =
      geocoder.geocode("221b BAKER st?? LONDON... nw1-6xe (uk)!!");
  CHECK(noisy == r);

  // An address equal to a unique name tag resolves to that object.
  const GeocodeResult named = geocoder.geocode("Madame Tussauds");
  CHECK(named.type == ObjectType::Node);
  CHECK(named.id == 3103);

  try {
    (void)geocoder.geocode("zzz qqq");
    FAIL("expected NoMatch");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NoMatch);
  }
  CHECK_THROWS_AS((void)geocoder.geocode(""), Error);
}

TEST_CASE("geocode can resolve to a way, using its representative point") {
  const ObjectStore store = load_fixture(test::fixture_path("paris_mini.txt"));
  const SpatialIndex index = SpatialIndex::build(store);
  const Geocoder geocoder(index);

  const GeocodeResult r =
      geocoder.geocode("5 Avenue Anatole France, 75007 Paris");
  CHECK(r.type == ObjectType::Way);
  CHECK(r.id == 5013364);

  const Way& tower = *store.find_way(5013364);
  CHECK(r.coord == way_representative_point(store, tower));
  bool is_member_coord = false;
  for (ObjectId ref : tower.node_refs) {
    if (store.find_node(ref)->coord == r.coord) is_member_coord = true;
  }
  CHECK(is_member_coord);
}

TEST_CASE("way_representative_point is the medoid and deterministic") {
  const ObjectStore store = load_fixture(test::fixture_path("giza_mini.txt"));
  const Way& pyramid = *store.find_way(4420397);
  const ScaledCoord rep = way_representative_point(store, pyramid);
  CHECK(rep == way_representative_point(store, pyramid));

  // Recompute the argmin directly.
  double best_sum = 0.0;
  ScaledCoord best{};
  bool first = true;
  for (ObjectId ref : pyramid.node_refs) {
    const ScaledCoord c = store.find_node(ref)->coord;
    double sum = 0.0;
    for (ObjectId other : pyramid.node_refs) {
      if (other != ref) {
        sum += haversine_distance(c, store.find_node(other)->coord);
      }
    }
    if (first || sum < best_sum) {
      best = c;
      best_sum = sum;
      first = false;
    }
  }
  CHECK(rep == best);

  // Two-node way: equal sums, earliest ref wins.
  const ObjectStore london = load_fixture(test::fixture_path("london_mini.txt"));
  const Way& street = *london.find_way(3200);
  CHECK(way_representative_point(london, street) ==
        london.find_node(3201)->coord);
}

TEST_CASE("reverse_geocode maps the museum coordinates to its description") {
  const ObjectStore store = load_fixture(test::fixture_path("london_mini.txt"));
  const SpatialIndex index = SpatialIndex::build(store);
  const Geocoder geocoder(index);

  const ReverseGeocodeResult r = geocoder.reverse_geocode(kMuseumLat, kMuseumLon);
  CHECK(r.type == ObjectType::Node);
  CHECK(r.id == 3100);
  CHECK(r.description ==
        "Sherlock Holmes Museum, 221B Baker Street, London, NW1 6XE");

  CHECK_THROWS_AS((void)geocoder.reverse_geocode(9100000000, 0), Error);
  CHECK_THROWS_AS((void)geocoder.reverse_geocode(0, 18100000000), Error);
}

TEST_CASE("description assembly and fallbacks") {
  CHECK(describe_object(TagMap{{"name", "X"}}, ObjectType::Node, 7) == "X");
  CHECK(describe_object(TagMap{}, ObjectType::Node, 7) == "node 7");
  CHECK(describe_object(TagMap{}, ObjectType::Way, 12) == "way 12");
  CHECK(describe_object(TagMap{{"addr:street", "Baker Street"}},
                        ObjectType::Node, 7) == "Baker Street");
  CHECK(describe_object(TagMap{{"addr:housenumber", "5"},
                               {"addr:city", "Paris"}},
                        ObjectType::Way, 9) == "5, Paris");
  CHECK(describe_object(TagMap{{"name", "Eiffel Tower"},
                               {"addr:housenumber", "5"},
                               {"addr:street", "Avenue Anatole France"},
                               {"addr:city", "Paris"},
                               {"addr:postcode", "75007"}},
                        ObjectType::Way, 5013364) ==
        "Eiffel Tower, 5 Avenue Anatole France, Paris, 75007");

  ObjectStore store;
  store.nodes[42] = Node{42, ScaledCoord{0, 0}, {}};
  const SpatialIndex index = SpatialIndex::build(store);
  const Geocoder geocoder(index);
  CHECK(geocoder.reverse_geocode(100, 100).description == "node 42");
}

TEST_CASE("reverse_geocode agrees with nearest_object on random probes") {
  std::mt19937_64 rng(20240618);
  test::RandomStoreConfig cfg;
  cfg.n_nodes = 500;
  cfg.n_ways = 80;
  const ObjectStore store = test::random_store(rng, cfg);
  const SpatialIndex index = SpatialIndex::build(store);
  const Geocoder geocoder(index);

  std::uniform_int_distribution<std::int64_t> lat(cfg.lat_min, cfg.lat_max);
  std::uniform_int_distribution<std::int64_t> lon(cfg.lon_min, cfg.lon_max);
  for (int i = 0; i < 100; ++i) {
    const std::int64_t plat = lat(rng);
    const std::int64_t plon = lon(rng);
    const NearestResult nearest =
        index.nearest_object(ScaledCoord{plat, plon});
    const ReverseGeocodeResult r = geocoder.reverse_geocode(plat, plon);
    CHECK(r.type == nearest.type);
    CHECK(r.id == nearest.id);
  }
}

TEST_CASE("reverse after geocode is the identity for fully-addressed nodes") {
  const ObjectStore store = load_fixture(test::fixture_path("london_mini.txt"));
  const SpatialIndex index = SpatialIndex::build(store);
  const Geocoder geocoder(index);

  auto fully_addressed = [](const TagMap& tags) {
    for (const char* key : {"addr:housenumber", "addr:street", "addr:city",
                            "addr:postcode"}) {
      if (tags.find(key) == tags.end()) return false;
    }
    return true;
  };

  std::size_t checked = 0;
  for (const auto& [id, node] : store.nodes) {
    if (!fully_addressed(node.tags)) continue;
    const std::string address = node.tags.at("addr:housenumber") + " " +
                                node.tags.at("addr:street") + ", " +
                                node.tags.at("addr:city") + " " +
                                node.tags.at("addr:postcode");
    const GeocodeResult forward = geocoder.geocode(address);
    CHECK(forward.type == ObjectType::Node);
    CHECK(forward.id == id);
    const ReverseGeocodeResult back =
        geocoder.reverse_geocode(forward.coord.lat, forward.coord.lon);
    CHECK(back.type == forward.type);
    CHECK(back.id == forward.id);
    ++checked;
  }
  CHECK(checked == 2);  // the museum and the cafe
}
