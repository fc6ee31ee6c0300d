#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include <json.hpp>

#include "cnix/global_index.hpp"
#include "cnix/index_handle.hpp"
#include "cnix/normalize.hpp"

namespace cnix {

// Result rendering shared by the CLI and the service. The machine form is
// one line per hit:
//   FID|CID|MATCHED|TYPE|FIRST_NAME|LAST_NAME|COMPANY_NAME|STREET|TOWN|ZIP|COUNTRY_CODE|COUNTRY
// where MATCHED is "name", "address" or "name+address".
std::string format_results_machine(const GlobalIndex& index, const ResultSet& results);
std::string format_results_human(const GlobalIndex& index, const ResultSet& results);
std::string format_stats(const IndexStats& stats);

nlohmann::json record_to_json(const RawRecord& record);
// Throws Error(kInvalidParams) for missing or mistyped fields.
RawRecord record_from_json(const nlohmann::json& j);
nlohmann::json stats_to_json(const IndexStats& stats);
nlohmann::json results_to_json(const GlobalIndex& index, const ResultSet& results);
// {"name","address","country","type","prefix"}; unknown type -> kInvalidParams.
SearchRequest request_from_json(const nlohmann::json& j, const AbbreviationTable& table);

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path snapshot_path;
  std::optional<std::filesystem::path> sources_path;
  std::optional<std::filesystem::path> abbreviation_path;
  std::optional<std::chrono::seconds> rescan_interval;
  // Write the snapshot after every applied update batch.
  bool save_after_update = true;

  // Throws Error(kInvalidConfig).
  void validate() const;
  // "host:port" or ":port".
  void set_listen(std::string_view listen);
};

struct ServiceResponse {
  int status = 200;
  std::string body;  // JSON
};

/// Request/response front of the index.
///
///   POST /v1/search   SearchRequest fields  -> matches + extracted records
///   POST /v1/update   {"records": [...]}    -> update report
///   GET  /v1/stats                          -> index statistics
///   POST /v1/save                           -> writes the snapshot
///   GET  /v1/health
///
/// Malformed requests get a 4xx with {"error": code, "message": ...}; the
/// service itself keeps running.
class Service {
 public:
  // Loads the snapshot named by the config; if it does not exist and sources
  // are configured, builds from them.
  explicit Service(ServiceConfig config);
  Service(ServiceConfig config, GlobalIndex index, AbbreviationTable table);
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  ServiceResponse handle(std::string_view method, std::string_view path, std::string_view body);

  // Reads the configured sources and applies records whose keys are new.
  UpdateReport rescan();

  // Blocks serving HTTP until stop(). Returns false if the socket could not
  // be bound.
  bool run();
  void stop();
  // Port actually bound (useful with port 0).
  int bound_port() const noexcept { return bound_port_.load(); }

  std::shared_ptr<const GlobalIndex> snapshot() const { return handle_.snapshot(); }

 private:
  nlohmann::json do_search(const nlohmann::json& body);
  nlohmann::json do_update(const nlohmann::json& body);
  nlohmann::json do_save();
  nlohmann::json update_to_json(const UpdateReport& report) const;
  void rescan_loop();

  ServiceConfig config_;
  AbbreviationTable table_;
  IndexHandle handle_;
  std::mutex save_mutex_;

  std::atomic<int> bound_port_{0};
  std::atomic<bool> stopping_{false};
  std::mutex rescan_mutex_;
  std::condition_variable rescan_cv_;
  std::thread rescan_thread_;
  struct Server;
  std::unique_ptr<Server> server_;
};

}  // namespace cnix
