"""Smoke tests for the python module against the shipped fixtures."""

import os

import pytest

import osmoracle

FIXTURES = os.environ.get(
    "OSMORACLE_FIXTURES",
    os.path.join(os.path.dirname(__file__), "..", "..", "fixtures"),
)


def fixture(name):
    return os.path.join(FIXTURES, name)


def test_coordinate_scaling_round_trip():
    assert osmoracle.scale_decimal_degrees("40.7719") == 4077190000
    assert osmoracle.scale_decimal_degrees("-73.9746") == -7397460000
    assert osmoracle.unscale_to_decimal(4077190000) == "40.7719"
    with pytest.raises(osmoracle.OracleError):
        osmoracle.scale_decimal_degrees("1.123456789")


def test_haversine_one_degree():
    d = osmoracle.haversine_distance(0, 0, 0, 100000000)
    assert abs(d - 111194.9) < 1.0


def test_abi_helpers():
    assert osmoracle.encode_int64(10) == (
        b"0x000000000000000000000000000000000000000000000000000000000000000a"
    )
    assert osmoracle.estimate_gas("0x" + "00" * 32) == 128
    assert osmoracle.estimate_gas(osmoracle.encode_int64(10).decode()) == 140


def test_engine_queries_boston():
    engine = osmoracle.Engine(fixture("boston_mini.txt"))
    assert engine.node_count == 27
    assert engine.way_count == 4

    count = engine.query(
        {
            "function": "nodeCountInArea",
            "key": "amenity",
            "value": "cafe",
            "area": "Boston",
        }
    )
    assert count["match_count"] == 10
    assert count["payload_hex"].startswith("0x")
    assert count["estimated_gas"] == 140

    search = engine.query(
        {
            "function": "nodesInArea",
            "key": "amenity",
            "value": "cafe",
            "area": "Boston",
            "limit": 3,
        }
    )
    assert search["match_count"] == 10
    assert len(search["payload_hex"]) == 2 + 2 * 32 * 5  # head+len+3 ids

    # Determinism: repeated queries return identical responses.
    again = engine.query(
        {
            "function": "nodesInArea",
            "key": "amenity",
            "value": "cafe",
            "area": "Boston",
            "limit": 3,
        }
    )
    assert again == search


def test_engine_way_count_pyramid():
    engine = osmoracle.Engine(fixture("giza_mini.txt"))
    response = engine.query({"function": "wayCount", "ID": 4420397})
    assert response["payload_hex"].endswith("0a")  # 10 nodes


def test_geocoding_round_trip():
    engine = osmoracle.Engine(fixture("london_mini.txt"))
    forward = engine.geocode("221B Baker St, London NW1 6XE, UK")
    assert forward["type"] == "node"
    assert forward["id"] == 3100
    assert forward["lat"] == 5152338790
    assert forward["lon"] == -15823670

    backward = engine.reverse_geocode(forward["lat"], forward["lon"])
    assert backward["id"] == forward["id"]
    assert backward["description"].startswith("Sherlock Holmes Museum")


def test_errors_carry_their_code():
    engine = osmoracle.Engine(fixture("boston_mini.txt"))
    with pytest.raises(osmoracle.OracleError, match="unknown area"):
        engine.query(
            {
                "function": "nodeCountInArea",
                "key": "amenity",
                "value": "cafe",
                "area": "Atlantis",
            }
        )
