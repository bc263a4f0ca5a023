#pragma once

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "osmoracle/abi.hpp"
#include "osmoracle/geocode.hpp"
#include "osmoracle/query.hpp"

namespace osmo {

// Calldata pricing; defaults follow public EVM rules (4 gas per zero byte,
// 16 per nonzero byte).
struct GasParams {
  std::int64_t cost_per_zero_byte = 4;
  std::int64_t cost_per_nonzero_byte = 16;
};

std::int64_t estimate_gas(std::span<const std::uint8_t> payload,
                          const GasParams& gas);
std::int64_t estimate_gas(const AbiPayload& payload, const GasParams& gas);

using ParamValue = std::variant<std::string, std::int64_t, std::uint64_t,
                                std::vector<std::string>>;

// A request mirrors the contract-side builder: a function name plus flat
// key-value fields. Integer fields arrive pre-scaled (degrees x 1e8);
// the service never accepts floating-point degree values.
struct OracleRequest {
  std::string function;
  std::map<std::string, ParamValue> params;

  const std::string& text(const std::string& name) const;
  std::int64_t integer(const std::string& name) const;
  std::uint64_t object_id(const std::string& name) const;
  const std::vector<std::string>& text_array(const std::string& name) const;
};

// The 14 request functions, in the order they appear on the wire contract.
std::span<const std::string_view> oracle_function_names();
bool is_search_function(std::string_view function);

// Validates a flat JSON document: known function, required fields present
// and typed, nothing extra. Integer fields accept JSON integers or decimal
// integer strings.
OracleRequest parse_request(std::string_view document);

struct OracleResponse {
  AbiPayload payload;
  std::int64_t estimated_calldata_gas = 0;
  // Untruncated match count; populated for searches and count functions.
  std::optional<std::uint64_t> match_count;
};

struct DispatchOptions {
  GasParams gas;
  // Hard cap on the `limit` field of search requests.
  std::uint64_t max_results = 100000;
};

OracleResponse dispatch(const OracleRequest& request, const QueryEngine& engine,
                        const Geocoder& geocoder,
                        const DispatchOptions& options = {});

// Everything a running oracle needs, constructed once and shared immutably.
class ServiceState {
 public:
  static std::shared_ptr<const ServiceState> from_store(
      ObjectStore store, const DispatchOptions& options = {},
      bool linear_scan = false);
  static std::shared_ptr<const ServiceState> from_file(
      const std::filesystem::path& path, const DispatchOptions& options = {},
      bool linear_scan = false);

  const ObjectStore& store() const { return store_; }
  const QueryEngine& engine() const { return *engine_; }
  const Geocoder& geocoder() const { return *geocoder_; }
  const DispatchOptions& options() const { return options_; }

  // Parse + dispatch; exceptions carry the machine-readable error code.
  OracleResponse handle(std::string_view document) const;

 private:
  ServiceState() = default;

  ObjectStore store_;
  std::unique_ptr<SpatialIndex> index_;
  std::unique_ptr<QueryEngine> engine_;
  std::unique_ptr<Geocoder> geocoder_;
  DispatchOptions options_;
};

// JSON wire envelope helpers (bodies are emitted with sorted keys, so
// identical requests produce byte-identical responses).
std::string response_to_json(const OracleResponse& response);
std::string error_to_json(Errc code, std::string_view message);

// HTTP adapter: POST /query takes the flat JSON request document and
// returns {"estimated_gas":..,"match_count":..,"payload_hex":"0x.."};
// GET /health reports readiness (503 until a state is attached).
class OracleServer {
 public:
  struct Config {
    std::string host = "127.0.0.1";
    int port = 0;  // 0 picks an ephemeral port
  };

  explicit OracleServer(Config config);
  ~OracleServer();

  OracleServer(const OracleServer&) = delete;
  OracleServer& operator=(const OracleServer&) = delete;

  // Publishes the state; /query starts answering. The store must be fully
  // ingested beforehand; requests never mutate state.
  void attach(std::shared_ptr<const ServiceState> state);

  // Binds and serves on the calling thread until stop().
  bool run();
  // Binds, then serves on a background thread; returns once reachable.
  bool start_background();
  void stop();

  int port() const { return port_; }
  const std::string& host() const { return config_.host; }

 private:
  struct Impl;
  Config config_;
  int port_ = 0;
  std::unique_ptr<Impl> impl_;
  std::thread thread_;
};

}  // namespace osmo
