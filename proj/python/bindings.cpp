#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "osmoracle/service.hpp"

namespace py = pybind11;
using namespace osmo;

namespace {

// Oracle requests and responses cross the boundary as JSON text; the
// python wrapper turns dicts into JSON before calling in.
py::dict response_to_dict(const OracleResponse& response) {
  py::dict out;
  out["payload_hex"] = to_hex(response.payload);
  out["estimated_gas"] = response.estimated_calldata_gas;
  if (response.match_count.has_value()) {
    out["match_count"] = *response.match_count;
  }
  return out;
}

class PyEngine {
 public:
  explicit PyEngine(const std::string& path, std::uint64_t max_results,
                    bool linear_scan) {
    DispatchOptions options;
    options.max_results = max_results;
    state_ = ServiceState::from_file(path, options, linear_scan);
  }

  py::dict query(const std::string& document) const {
    return response_to_dict(state_->handle(document));
  }

  py::dict geocode(const std::string& address) const {
    const GeocodeResult r = state_->geocoder().geocode(address);
    py::dict out;
    out["type"] = std::string(object_type_name(r.type));
    out["id"] = r.id;
    out["lat"] = r.coord.lat;
    out["lon"] = r.coord.lon;
    return out;
  }

  py::dict reverse_geocode(std::int64_t lat, std::int64_t lon) const {
    const ReverseGeocodeResult r = state_->geocoder().reverse_geocode(lat, lon);
    py::dict out;
    out["type"] = std::string(object_type_name(r.type));
    out["id"] = r.id;
    out["description"] = r.description;
    return out;
  }

  std::size_t node_count() const { return state_->store().nodes.size(); }
  std::size_t way_count() const { return state_->store().ways.size(); }

 private:
  std::shared_ptr<const ServiceState> state_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "OSM location oracle: fixed-point coordinates, location queries, "
            "and EVM ABI payloads";

  py::register_exception<Error>(m, "OracleError");

  m.def("scale_decimal_degrees",
        [](const std::string& text) { return scale_decimal_degrees(text); },
        py::arg("text"),
        "Parse a decimal-degree string into an exact degrees*1e8 integer");
  m.def("unscale_to_decimal", &unscale_to_decimal, py::arg("value"),
        "Render a scaled coordinate back to a decimal-degree string");
  m.def(
      "haversine_distance",
      [](std::int64_t lat1, std::int64_t lon1, std::int64_t lat2,
         std::int64_t lon2) {
        return haversine_distance(ScaledCoord{lat1, lon1},
                                  ScaledCoord{lat2, lon2});
      },
      py::arg("lat1"), py::arg("lon1"), py::arg("lat2"), py::arg("lon2"),
      "Great-circle distance in meters between two scaled coordinates");

  m.def(
      "encode_int64",
      [](std::int64_t v) { return py::bytes(to_hex(encode_int64(v))); },
      py::arg("value"), "ABI-encode one int64; returns the 0x-hex payload");
  m.def(
      "encode_int64_array",
      [](const std::vector<std::int64_t>& vs) {
        return py::bytes(to_hex(encode_int64_array(vs)));
      },
      py::arg("values"));
  m.def(
      "encode_string_array",
      [](const std::vector<std::string>& ss) {
        return py::bytes(to_hex(encode_string_array(ss)));
      },
      py::arg("values"));
  m.def(
      "estimate_gas",
      [](const std::string& payload_hex, std::int64_t zero_byte,
         std::int64_t nonzero_byte) {
        const std::vector<std::uint8_t> bytes = from_hex(payload_hex);
        return estimate_gas(std::span<const std::uint8_t>(bytes),
                            GasParams{zero_byte, nonzero_byte});
      },
      py::arg("payload_hex"), py::arg("zero_byte") = 4,
      py::arg("nonzero_byte") = 16,
      "Calldata gas for a 0x-hex payload under the given byte prices");

  py::class_<PyEngine>(m, "Engine")
      .def(py::init<const std::string&, std::uint64_t, bool>(), py::arg("path"),
           py::arg("max_results") = 100000, py::arg("linear_scan") = false,
           "Load a store snapshot, fixture file, or OSM XML extract")
      .def("query", &PyEngine::query, py::arg("document"),
           "Handle a JSON request document; returns payload_hex, "
           "estimated_gas, and match_count when applicable")
      .def("geocode", &PyEngine::geocode, py::arg("address"))
      .def("reverse_geocode", &PyEngine::reverse_geocode, py::arg("lat"),
           py::arg("lon"))
      .def_property_readonly("node_count", &PyEngine::node_count)
      .def_property_readonly("way_count", &PyEngine::way_count);
}
