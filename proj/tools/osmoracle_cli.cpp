// Operator tooling: ingest extracts into store snapshots, run ad-hoc oracle
// queries, start the HTTP service, and simulate gas costs off-chain.

#include <CLI11.hpp>
#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "osmoracle/service.hpp"

namespace {

using namespace osmo;

std::string read_file_or_die(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    fail(Errc::ParseError, "cannot open '" + path + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

std::string describe_payload(const AbiPayload& payload) {
  const AbiValue value = decode(payload);
  std::ostringstream out;
  switch (payload.layout) {
    case AbiLayout::Int64Scalar:
      out << std::get<std::int64_t>(value);
      break;
    case AbiLayout::Int64Array: {
      const auto& vs = std::get<std::vector<std::int64_t>>(value);
      out << "[";
      for (std::size_t i = 0; i < vs.size(); ++i) {
        if (i > 0) out << ", ";
        out << vs[i];
      }
      out << "]";
      break;
    }
    case AbiLayout::StringArray: {
      const auto& ss = std::get<std::vector<std::string>>(value);
      out << "[";
      for (std::size_t i = 0; i < ss.size(); ++i) {
        if (i > 0) out << ", ";
        out << nlohmann::json(ss[i]).dump();
      }
      out << "]";
      break;
    }
    case AbiLayout::CoordPairList: {
      const auto& cs = std::get<std::vector<ScaledCoord>>(value);
      out << "[";
      for (std::size_t i = 0; i < cs.size(); ++i) {
        if (i > 0) out << ", ";
        out << "(" << unscale_to_decimal(cs[i].lat) << ", "
            << unscale_to_decimal(cs[i].lon) << ")";
      }
      out << "]";
      break;
    }
    case AbiLayout::GeocodeTuple: {
      const auto& g = std::get<GeocodeResult>(value);
      out << "type=" << object_type_name(g.type) << " id=" << g.id
          << " lat=" << unscale_to_decimal(g.coord.lat)
          << " lon=" << unscale_to_decimal(g.coord.lon);
      break;
    }
    case AbiLayout::ReverseTuple: {
      const auto& g = std::get<ReverseGeocodeResult>(value);
      out << "type=" << object_type_name(g.type) << " id=" << g.id
          << " description=" << nlohmann::json(g.description).dump();
      break;
    }
  }
  return out.str();
}

struct CommonOptions {
  GasParams gas;
  std::uint64_t max_results = 100000;
  bool linear_scan = false;

  DispatchOptions dispatch() const { return DispatchOptions{gas, max_results}; }
};

void add_common_options(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--gas-zero-byte", opts.gas.cost_per_zero_byte,
                  "Calldata gas per zero byte (default 4)")
      ->envname("OSMORACLE_GAS_ZERO_BYTE");
  cmd->add_option("--gas-nonzero-byte", opts.gas.cost_per_nonzero_byte,
                  "Calldata gas per nonzero byte (default 16)")
      ->envname("OSMORACLE_GAS_NONZERO_BYTE");
  cmd->add_option("--max-results", opts.max_results,
                  "Hard cap on search limits (default 100000)")
      ->envname("OSMORACLE_MAX_RESULTS");
  cmd->add_flag("--linear-scan", opts.linear_scan,
                "Bypass the spatial index (for timing comparisons)");
}

int cmd_ingest(const std::string& input, const std::string& output,
               bool text_format) {
  const ObjectStore store = load_any(input);
  const auto violations = validate_store(store);
  if (!violations.empty()) {
    fail(Errc::BuildRejected, "store failed validation; first violation: " +
                                  violations.front().message);
  }
  save_store(store, output,
             text_format ? StoreFormat::Text : StoreFormat::Binary);
  std::uint64_t area_count = 0;
  for (const auto& [name, defs] : store.areas) area_count += defs.size();
  std::cout << "ingested " << store.nodes.size() << " nodes, "
            << store.ways.size() << " ways, " << area_count
            << " named areas -> " << output << "\n";
  return 0;
}

int cmd_query(const std::string& store_path, const std::string& request_path,
              const CommonOptions& opts) {
  auto state =
      ServiceState::from_file(store_path, opts.dispatch(), opts.linear_scan);
  const std::string document = read_file_or_die(request_path);
  const OracleRequest request = parse_request(document);
  const OracleResponse response = state->handle(document);

  std::cout << "function: " << request.function << "\n";
  std::cout << "payload: " << to_hex(response.payload) << "\n";
  std::cout << "estimated_gas: " << response.estimated_calldata_gas << "\n";
  if (response.match_count.has_value()) {
    std::cout << "match_count: " << *response.match_count << "\n";
  }
  std::cout << "result: " << describe_payload(response.payload) << "\n";
  return 0;
}

// The count-first workflow: report the match count, then the gas cost of
// the count payload, of each power-of-two limit, and of the full result.
int cmd_estimate(const std::string& store_path, const std::string& request_path,
                 const CommonOptions& opts) {
  auto state =
      ServiceState::from_file(store_path, opts.dispatch(), opts.linear_scan);
  const std::string document = read_file_or_die(request_path);
  const OracleRequest request = parse_request(document);

  std::cout << "function: " << request.function << "\n";
  if (!is_search_function(request.function)) {
    const OracleResponse response = state->handle(document);
    if (response.match_count.has_value()) {
      std::cout << "count: " << *response.match_count << "\n";
    }
    std::cout << "estimated_gas: " << response.estimated_calldata_gas << "\n";
    return 0;
  }

  nlohmann::json doc = nlohmann::json::parse(document);
  nlohmann::json count_doc = doc;
  count_doc.erase("limit");
  count_doc["function"] = request.function == "nodesInArea"  ? "nodeCountInArea"
                          : request.function == "waysInArea" ? "wayCountInArea"
                          : request.function == "nodesInBB"  ? "nodeCountInBB"
                                                             : "wayCountInBB";
  const OracleResponse count_response = state->handle(count_doc.dump());
  const std::uint64_t count = count_response.match_count.value_or(0);
  std::cout << "count: " << count << "\n";
  std::cout << "gas(count query): " << count_response.estimated_calldata_gas
            << "\n";

  auto gas_at_limit = [&](std::uint64_t limit) {
    nlohmann::json limited = doc;
    limited["limit"] = limit;
    return state->handle(limited.dump()).estimated_calldata_gas;
  };
  for (std::uint64_t limit = 1; limit < count; limit *= 2) {
    std::cout << "gas(limit " << limit << "): " << gas_at_limit(limit) << "\n";
  }
  std::cout << "gas(full, " << count << " results): "
            << gas_at_limit(std::max<std::uint64_t>(count, 1)) << "\n";
  return 0;
}

OracleServer* g_running_server = nullptr;

void handle_shutdown_signal(int) {
  if (g_running_server != nullptr) g_running_server->stop();
}

int cmd_serve(const std::string& store_path, const std::string& bind,
              const CommonOptions& opts) {
  const std::size_t colon = bind.rfind(':');
  if (colon == std::string::npos) {
    fail(Errc::BadRequest, "--bind expects HOST:PORT, got '" + bind + "'");
  }
  OracleServer::Config config;
  config.host = bind.substr(0, colon);
  try {
    config.port = std::stoi(bind.substr(colon + 1));
  } catch (const std::exception&) {
    fail(Errc::BadRequest, "invalid port in '" + bind + "'");
  }

  auto state =
      ServiceState::from_file(store_path, opts.dispatch(), opts.linear_scan);
  OracleServer server(config);
  server.attach(std::move(state));

  g_running_server = &server;
  std::signal(SIGINT, handle_shutdown_signal);
  std::signal(SIGTERM, handle_shutdown_signal);

  std::cerr << "listening on " << config.host << ":" << config.port << "\n";
  const bool clean = server.run();
  g_running_server = nullptr;
  if (!clean) {
    fail(Errc::Internal,
         "failed to bind " + config.host + ":" + std::to_string(config.port));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"OpenStreetMap query oracle for EVM smart contracts"};
  app.require_subcommand(1);

  std::string input, output, store_path, request_path;
  std::string bind = "127.0.0.1:8080";
  bool text_format = false;
  CommonOptions opts;

  CLI::App* ingest = app.add_subcommand(
      "ingest", "Parse an OSM XML extract or fixture file into a store snapshot");
  ingest->add_option("input", input, "OSM XML or fixture file")->required();
  ingest->add_option("output", output, "Store snapshot to write")->required();
  ingest->add_flag("--text", text_format,
                   "Write the text snapshot format instead of binary");

  CLI::App* query = app.add_subcommand(
      "query", "Run one oracle request against a store and print the payload");
  query->add_option("store", store_path, "Store snapshot, fixture, or XML")
      ->required();
  query->add_option("request", request_path, "JSON request document")
      ->required();
  add_common_options(query, opts);

  CLI::App* estimate = app.add_subcommand(
      "estimate", "Simulate the count-first gas workflow for a request");
  estimate->add_option("store", store_path, "Store snapshot, fixture, or XML")
      ->required();
  estimate->add_option("request", request_path, "JSON request document")
      ->required();
  add_common_options(estimate, opts);

  CLI::App* serve =
      app.add_subcommand("serve", "Serve POST /query and GET /health");
  serve->add_option("store", store_path, "Store snapshot, fixture, or XML")
      ->required();
  serve->add_option("--bind", bind, "HOST:PORT (default 127.0.0.1:8080)");
  add_common_options(serve, opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    std::cerr << "run with --help for usage\n";
    return 2;
  }

  try {
    if (app.got_subcommand(ingest)) {
      return cmd_ingest(input, output, text_format);
    }
    if (app.got_subcommand(query)) {
      return cmd_query(store_path, request_path, opts);
    }
    if (app.got_subcommand(estimate)) {
      return cmd_estimate(store_path, request_path, opts);
    }
    if (app.got_subcommand(serve)) {
      return cmd_serve(store_path, bind, opts);
    }
  } catch (const osmo::Error& e) {
    std::cerr << "error: " << osmo::errc_name(e.code()) << ": " << e.what()
              << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: Internal: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
