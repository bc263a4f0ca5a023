"""OSM location oracle: query a local extract and get EVM ABI payloads."""

import json as _json

from ._core import (
    Engine as _CoreEngine,
    OracleError,
    encode_int64,
    encode_int64_array,
    encode_string_array,
    estimate_gas,
    haversine_distance,
    scale_decimal_degrees,
    unscale_to_decimal,
)

__all__ = [
    "Engine",
    "OracleError",
    "encode_int64",
    "encode_int64_array",
    "encode_string_array",
    "estimate_gas",
    "haversine_distance",
    "scale_decimal_degrees",
    "unscale_to_decimal",
]


class Engine(_CoreEngine):
    """Adds dict-request convenience over the core engine."""

    def query(self, request):
        if isinstance(request, dict):
            request = _json.dumps(request)
        return super().query(request)
