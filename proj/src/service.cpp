#include "osmoracle/service.hpp"

#include <charconv>
#include <condition_variable>
#include <mutex>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace osmo {

namespace {

using nlohmann::json;

constexpr std::int64_t kInt64Max = std::numeric_limits<std::int64_t>::max();

}  // namespace

std::int64_t estimate_gas(std::span<const std::uint8_t> payload,
                          const GasParams& gas) {
  if (gas.cost_per_zero_byte <= 0 || gas.cost_per_nonzero_byte <= 0) {
    fail(Errc::BadRequest, "gas costs must be positive");
  }
  std::int64_t total = 0;
  for (std::uint8_t b : payload) {
    total += b == 0 ? gas.cost_per_zero_byte : gas.cost_per_nonzero_byte;
  }
  return total;
}

std::int64_t estimate_gas(const AbiPayload& payload, const GasParams& gas) {
  return estimate_gas(std::span<const std::uint8_t>(payload.bytes), gas);
}

const std::string& OracleRequest::text(const std::string& name) const {
  auto it = params.find(name);
  if (it == params.end() || !std::holds_alternative<std::string>(it->second)) {
    fail(Errc::Internal, "missing text parameter '" + name + "'");
  }
  return std::get<std::string>(it->second);
}

std::int64_t OracleRequest::integer(const std::string& name) const {
  auto it = params.find(name);
  if (it == params.end() ||
      !std::holds_alternative<std::int64_t>(it->second)) {
    fail(Errc::Internal, "missing integer parameter '" + name + "'");
  }
  return std::get<std::int64_t>(it->second);
}

std::uint64_t OracleRequest::object_id(const std::string& name) const {
  auto it = params.find(name);
  if (it == params.end() ||
      !std::holds_alternative<std::uint64_t>(it->second)) {
    fail(Errc::Internal, "missing id parameter '" + name + "'");
  }
  return std::get<std::uint64_t>(it->second);
}

const std::vector<std::string>& OracleRequest::text_array(
    const std::string& name) const {
  auto it = params.find(name);
  if (it == params.end() ||
      !std::holds_alternative<std::vector<std::string>>(it->second)) {
    fail(Errc::Internal, "missing string-array parameter '" + name + "'");
  }
  return std::get<std::vector<std::string>>(it->second);
}

namespace {

enum class FieldType { Text, Int, Id, TextArray };

struct FieldSpec {
  std::string_view name;
  FieldType type;
};

struct FunctionSpec {
  std::string_view name;
  std::vector<FieldSpec> fields;
};

const std::vector<FunctionSpec>& function_table() {
  static const std::vector<FunctionSpec> kTable = [] {
    const std::vector<FieldSpec> area_search = {{"key", FieldType::Text},
                                                {"value", FieldType::Text},
                                                {"area", FieldType::Text},
                                                {"limit", FieldType::Int}};
    const std::vector<FieldSpec> area_count = {{"key", FieldType::Text},
                                               {"value", FieldType::Text},
                                               {"area", FieldType::Text}};
    const std::vector<FieldSpec> bb_search = {
        {"key", FieldType::Text},   {"value", FieldType::Text},
        {"south", FieldType::Int},  {"west", FieldType::Int},
        {"north", FieldType::Int},  {"east", FieldType::Int},
        {"limit", FieldType::Int}};
    const std::vector<FieldSpec> bb_count = {
        {"key", FieldType::Text},  {"value", FieldType::Text},
        {"south", FieldType::Int}, {"west", FieldType::Int},
        {"north", FieldType::Int}, {"east", FieldType::Int}};
    const std::vector<FieldSpec> tag_query = {{"ID", FieldType::Id},
                                              {"tags", FieldType::TextArray}};
    const std::vector<FieldSpec> by_id = {{"ID", FieldType::Id}};

    std::vector<FunctionSpec> table;
    table.push_back({"nodesInArea", area_search});
    table.push_back({"waysInArea", area_search});
    table.push_back({"nodeCountInArea", area_count});
    table.push_back({"wayCountInArea", area_count});
    table.push_back({"nodesInBB", bb_search});
    table.push_back({"waysInBB", bb_search});
    table.push_back({"nodeCountInBB", bb_count});
    table.push_back({"wayCountInBB", bb_count});
    table.push_back({"nodeTagQuery", tag_query});
    table.push_back({"wayTagQuery", tag_query});
    table.push_back({"wayGeometry", by_id});
    table.push_back({"wayCount", by_id});
    table.push_back({"geocode", {{"address", FieldType::Text}}});
    table.push_back(
        {"reverseGeocode", {{"lat", FieldType::Int}, {"lon", FieldType::Int}}});
    return table;
  }();
  return kTable;
}

std::int64_t json_to_int64(const json& j, const std::string& field) {
  if (j.is_string()) {
    const std::string& s = j.get_ref<const std::string&>();
    std::int64_t v = 0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || s.empty()) {
      fail(Errc::BadRequest, "field '" + field +
                                 "' must be an integer, got '" + s + "'");
    }
    return v;
  }
  if (j.is_number_unsigned()) {
    const std::uint64_t u = j.get<std::uint64_t>();
    if (u > static_cast<std::uint64_t>(kInt64Max)) {
      fail(Errc::BadRequest, "field '" + field + "' exceeds int64 range");
    }
    return static_cast<std::int64_t>(u);
  }
  if (j.is_number_integer()) {
    return j.get<std::int64_t>();
  }
  fail(Errc::BadRequest, "field '" + field + "' must be an integer");
}

std::uint64_t json_to_id(const json& j, const std::string& field) {
  std::uint64_t v = 0;
  if (j.is_string()) {
    const std::string& s = j.get_ref<const std::string&>();
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || s.empty()) {
      fail(Errc::BadRequest, "field '" + field +
                                 "' must be a positive integer, got '" + s +
                                 "'");
    }
  } else if (j.is_number_unsigned()) {
    v = j.get<std::uint64_t>();
  } else if (j.is_number_integer()) {
    const std::int64_t s = j.get<std::int64_t>();
    if (s < 0) {
      fail(Errc::BadRequest, "field '" + field + "' must be positive");
    }
    v = static_cast<std::uint64_t>(s);
  } else {
    fail(Errc::BadRequest, "field '" + field + "' must be a positive integer");
  }
  if (v == 0) {
    fail(Errc::BadRequest, "field '" + field + "' must be positive");
  }
  return v;
}

}  // namespace

std::span<const std::string_view> oracle_function_names() {
  static const std::vector<std::string_view> kNames = [] {
    std::vector<std::string_view> names;
    for (const FunctionSpec& spec : function_table()) {
      names.push_back(spec.name);
    }
    return names;
  }();
  return kNames;
}

bool is_search_function(std::string_view function) {
  return function == "nodesInArea" || function == "waysInArea" ||
         function == "nodesInBB" || function == "waysInBB";
}

OracleRequest parse_request(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::exception& e) {
    fail(Errc::BadRequest, std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) {
    fail(Errc::BadRequest, "request must be a JSON object");
  }

  auto function_it = doc.find("function");
  if (function_it == doc.end()) {
    fail(Errc::BadRequest, "missing required field 'function'");
  }
  if (!function_it->is_string()) {
    fail(Errc::BadRequest, "field 'function' must be a string");
  }
  const std::string function = function_it->get<std::string>();

  const FunctionSpec* spec = nullptr;
  for (const FunctionSpec& candidate : function_table()) {
    if (candidate.name == function) {
      spec = &candidate;
      break;
    }
  }
  if (spec == nullptr) {
    fail(Errc::UnknownFunction, "unknown function '" + function + "'");
  }

  OracleRequest request;
  request.function = function;

  for (const FieldSpec& field : spec->fields) {
    const std::string name(field.name);
    auto it = doc.find(name);
    if (it == doc.end()) {
      fail(Errc::BadRequest,
           "missing required field '" + name + "' for " + function);
    }
    switch (field.type) {
      case FieldType::Text:
        if (!it->is_string()) {
          fail(Errc::BadRequest, "field '" + name + "' must be a string");
        }
        request.params.emplace(name, it->get<std::string>());
        break;
      case FieldType::Int:
        request.params.emplace(name, json_to_int64(*it, name));
        break;
      case FieldType::Id:
        request.params.emplace(name, json_to_id(*it, name));
        break;
      case FieldType::TextArray: {
        if (!it->is_array()) {
          fail(Errc::BadRequest,
               "field '" + name + "' must be an array of strings");
        }
        std::vector<std::string> values;
        values.reserve(it->size());
        for (const json& element : *it) {
          if (!element.is_string()) {
            fail(Errc::BadRequest,
                 "field '" + name + "' must contain only strings");
          }
          values.push_back(element.get<std::string>());
        }
        if (values.empty()) {
          fail(Errc::BadRequest, "field '" + name + "' must not be empty");
        }
        request.params.emplace(name, std::move(values));
        break;
      }
    }
  }

  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const std::string& key = it.key();
    if (key == "function") continue;
    bool known = false;
    for (const FieldSpec& field : spec->fields) {
      if (field.name == key) {
        known = true;
        break;
      }
    }
    if (!known) {
      fail(Errc::BadRequest,
           "unexpected field '" + key + "' for " + function);
    }
  }
  return request;
}

namespace {

BoundingBox bbox_of(const OracleRequest& request) {
  return BoundingBox{request.integer("south"), request.integer("west"),
                     request.integer("north"), request.integer("east")};
}

std::vector<std::int64_t> ids_to_wire(const std::vector<ObjectId>& ids) {
  std::vector<std::int64_t> wire;
  wire.reserve(ids.size());
  for (ObjectId id : ids) wire.push_back(id_to_int64(id));
  return wire;
}

void check_result_cap(std::int64_t limit, const DispatchOptions& options) {
  if (limit >= 1 &&
      static_cast<std::uint64_t>(limit) > options.max_results) {
    fail(Errc::LimitTooLarge,
         "limit " + std::to_string(limit) + " exceeds the result cap of " +
             std::to_string(options.max_results));
  }
}

}  // namespace

OracleResponse dispatch(const OracleRequest& request, const QueryEngine& engine,
                        const Geocoder& geocoder,
                        const DispatchOptions& options) {
  const std::string& fn = request.function;
  OracleResponse response;

  auto finish = [&](AbiPayload payload) {
    response.estimated_calldata_gas = estimate_gas(payload, options.gas);
    response.payload = std::move(payload);
    return response;
  };

  auto search = [&](ObjectType type, bool area_query) {
    const TagFilter filter{request.text("key"), request.text("value")};
    const std::int64_t limit = request.integer("limit");
    check_result_cap(limit, options);
    QueryResult result;
    std::uint64_t count = 0;
    if (area_query) {
      const std::string& area = request.text("area");
      result = engine.objects_in_area(type, filter, area, limit);
      count = engine.object_count_in_area(type, filter, area);
    } else {
      const BoundingBox bb = bbox_of(request);
      result = engine.objects_in_bbox(type, filter, bb, limit);
      count = engine.object_count_in_bbox(type, filter, bb);
    }
    response.match_count = count;
    return finish(encode_int64_array(ids_to_wire(result.ids)));
  };

  auto count_query = [&](ObjectType type, bool area_query) {
    const TagFilter filter{request.text("key"), request.text("value")};
    std::uint64_t count = 0;
    if (area_query) {
      count = engine.object_count_in_area(type, filter, request.text("area"));
    } else {
      count = engine.object_count_in_bbox(type, filter, bbox_of(request));
    }
    response.match_count = count;
    return finish(encode_int64(id_to_int64(count)));
  };

  if (fn == "nodesInArea") return search(ObjectType::Node, true);
  if (fn == "waysInArea") return search(ObjectType::Way, true);
  if (fn == "nodesInBB") return search(ObjectType::Node, false);
  if (fn == "waysInBB") return search(ObjectType::Way, false);
  if (fn == "nodeCountInArea") return count_query(ObjectType::Node, true);
  if (fn == "wayCountInArea") return count_query(ObjectType::Way, true);
  if (fn == "nodeCountInBB") return count_query(ObjectType::Node, false);
  if (fn == "wayCountInBB") return count_query(ObjectType::Way, false);

  if (fn == "nodeTagQuery" || fn == "wayTagQuery") {
    const ObjectType type =
        fn == "nodeTagQuery" ? ObjectType::Node : ObjectType::Way;
    const std::vector<std::string> values = engine.object_tag_query(
        type, request.object_id("ID"), request.text_array("tags"));
    return finish(encode_string_array(values));
  }
  if (fn == "wayGeometry") {
    return finish(encode_coord_pairs(engine.way_geometry(request.object_id("ID"))));
  }
  if (fn == "wayCount") {
    return finish(
        encode_int64(id_to_int64(engine.way_node_count(request.object_id("ID")))));
  }
  if (fn == "geocode") {
    return finish(encode_geocode(geocoder.geocode(request.text("address"))));
  }
  if (fn == "reverseGeocode") {
    return finish(encode_reverse(geocoder.reverse_geocode(
        request.integer("lat"), request.integer("lon"))));
  }
  fail(Errc::UnknownFunction, "unknown function '" + fn + "'");
}

std::shared_ptr<const ServiceState> ServiceState::from_store(
    ObjectStore store, const DispatchOptions& options, bool linear_scan) {
  std::shared_ptr<ServiceState> state(new ServiceState());
  state->store_ = std::move(store);
  state->options_ = options;
  state->index_ =
      std::make_unique<SpatialIndex>(SpatialIndex::build(state->store_));
  state->engine_ = std::make_unique<QueryEngine>(*state->index_, linear_scan);
  state->geocoder_ = std::make_unique<Geocoder>(*state->index_);
  return state;
}

std::shared_ptr<const ServiceState> ServiceState::from_file(
    const std::filesystem::path& path, const DispatchOptions& options,
    bool linear_scan) {
  return from_store(load_any(path), options, linear_scan);
}

OracleResponse ServiceState::handle(std::string_view document) const {
  const OracleRequest request = parse_request(document);
  return dispatch(request, *engine_, *geocoder_, options_);
}

std::string response_to_json(const OracleResponse& response) {
  json body;
  body["estimated_gas"] = response.estimated_calldata_gas;
  if (response.match_count.has_value()) {
    body["match_count"] = *response.match_count;
  }
  body["payload_hex"] = to_hex(response.payload);
  return body.dump();
}

std::string error_to_json(Errc code, std::string_view message) {
  json body;
  body["error"]["code"] = std::string(errc_name(code));
  body["error"]["message"] = std::string(message);
  return body.dump();
}

struct OracleServer::Impl {
  httplib::Server server;
  std::mutex mutex;
  std::shared_ptr<const ServiceState> state;

  std::shared_ptr<const ServiceState> get_state() {
    std::lock_guard<std::mutex> lock(mutex);
    return state;
  }
};

OracleServer::OracleServer(Config config)
    : config_(std::move(config)), impl_(std::make_unique<Impl>()) {
  Impl* impl = impl_.get();

  // SO_REUSEADDR only: a second server on the same port must fail loudly
  // rather than share it (httplib's default adds SO_REUSEPORT).
  impl->server.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR,
               reinterpret_cast<const void*>(&yes), sizeof(yes));
  });

  impl->server.Get("/health", [impl](const httplib::Request&,
                                     httplib::Response& res) {
    if (impl->get_state()) {
      res.status = 200;
      res.set_content("{\"status\":\"ok\"}", "application/json");
    } else {
      res.status = 503;
      res.set_content("{\"status\":\"loading\"}", "application/json");
    }
  });

  impl->server.Post("/query", [impl](const httplib::Request& req,
                                     httplib::Response& res) {
    auto state = impl->get_state();
    if (!state) {
      res.status = 503;
      res.set_content(error_to_json(Errc::NotReady, "store is still loading"),
                      "application/json");
      return;
    }
    try {
      const OracleResponse response = state->handle(req.body);
      res.status = 200;
      res.set_content(response_to_json(response), "application/json");
    } catch (const Error& e) {
      res.status = 400;
      res.set_content(error_to_json(e.code(), e.what()), "application/json");
    } catch (const std::exception& e) {
      res.status = 500;
      res.set_content(error_to_json(Errc::Internal, e.what()),
                      "application/json");
    }
  });
}

OracleServer::~OracleServer() { stop(); }

void OracleServer::attach(std::shared_ptr<const ServiceState> state) {
  std::lock_guard<std::mutex> lock(impl_->mutex);
  impl_->state = std::move(state);
}

namespace {

bool bind_server(httplib::Server& server, const std::string& host,
                 int requested, int& bound) {
  if (requested == 0) {
    const int port = server.bind_to_any_port(host);
    if (port < 0) return false;
    bound = port;
    return true;
  }
  if (!server.bind_to_port(host, requested)) return false;
  bound = requested;
  return true;
}

}  // namespace

bool OracleServer::run() {
  if (!bind_server(impl_->server, config_.host, config_.port, port_)) {
    return false;
  }
  return impl_->server.listen_after_bind();
}

bool OracleServer::start_background() {
  if (!bind_server(impl_->server, config_.host, config_.port, port_)) {
    return false;
  }
  Impl* impl = impl_.get();
  thread_ = std::thread([impl] { impl->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return true;
}

void OracleServer::stop() {
  impl_->server.stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace osmo
