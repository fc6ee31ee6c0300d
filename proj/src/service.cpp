#include "cnix/service.hpp"

#include <httplib.h>

#include <charconv>
#include <iostream>
#include <sstream>
#include <unordered_set>

#include "cnix/error.hpp"
#include "cnix/ingest.hpp"
#include "cnix/persist.hpp"

namespace cnix {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string_view matched_label(const Match& m) {
  if (m.by_name && m.by_address) return "name+address";
  return m.by_name ? "name" : "address";
}

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyQuery:
    case ErrorCode::kInvalidParams:
    case ErrorCode::kMalformedRow:
    case ErrorCode::kMissingIdentity:
      return 400;
    case ErrorCode::kUnknownKey:
      return 404;
    case ErrorCode::kDuplicateKey:
      return 409;
    default:
      return 500;
  }
}

ServiceResponse error_response(int status, std::string_view code, std::string_view message) {
  return {status, json{{"error", code}, {"message", message}}.dump()};
}

std::string json_string(const json& j, const char* field) {
  if (!j.contains(field) || j[field].is_null()) return {};
  if (!j[field].is_string()) throw Error(ErrorCode::kInvalidParams, std::string(field) + " must be a string");
  return j[field].get<std::string>();
}

}  // namespace

std::string format_results_machine(const GlobalIndex& index, const ResultSet& results) {
  std::string out;
  for (const auto& m : results.matches) {
    const RawRecord& r = index.extract_one(m.key);
    out += r.fid + "|" + r.cid + "|" + std::string(matched_label(m)) + "|" + type_code(r.customer_type) + "|" +
           r.first_name + "|" + r.last_name + "|" + r.company_name + "|" + r.street + "|" + r.town + "|" + r.zip +
           "|" + r.country_code + "|" + r.country + "\n";
  }
  return out;
}

std::string format_results_human(const GlobalIndex& index, const ResultSet& results) {
  std::ostringstream out;
  out << results.size() << (results.size() == 1 ? " result" : " results") << "\n";
  for (const auto& m : results.matches) out << "  " << to_string(m.key) << "  [" << matched_label(m) << "]\n";
  for (const auto& m : results.matches) {
    const RawRecord& r = index.extract_one(m.key);
    out << "\n" << to_string(m.key) << " " << type_name(r.customer_type) << "\n";
    if (!r.company_name.empty()) out << "  company:  " << r.company_name << "\n";
    if (!r.first_name.empty() || !r.last_name.empty()) out << "  name:     " << merge_name(r.first_name, r.last_name) << "\n";
    out << "  address:  " << merge_address(r.street, r.town, r.zip, r.country_code) << "\n";
    out << "  country:  " << resolve_country(r.country, r.country_code) << "\n";
  }
  return out.str();
}

std::string format_stats(const IndexStats& s) {
  std::ostringstream out;
  out << "records      " << s.records << " (" << s.indexed_records << " indexed)\n"
      << "partitions   " << s.partitions << " across " << s.countries << " countries\n"
      << "tokens       " << s.tokens << "\n"
      << "memory       ~" << (s.memory_bytes + 1023) / 1024 << " KiB\n";
  for (const auto& p : s.per_partition) {
    out << "  " << p.country << "/" << type_name(p.customer_type) << ": records=" << p.records
        << " names=" << p.names << " address_items=" << p.address_items;
    if (p.customer_type == CustomerType::kCorporate) out << " height=" << p.tree_height << " nodes=" << p.tree_nodes;
    out << "\n";
  }
  return out.str();
}

json record_to_json(const RawRecord& r) {
  return json{{"fid", r.fid},
              {"cid", r.cid},
              {"type", std::string(1, type_code(r.customer_type))},
              {"first_name", r.first_name},
              {"last_name", r.last_name},
              {"company_name", r.company_name},
              {"street", r.street},
              {"town", r.town},
              {"zip", r.zip},
              {"country_code", r.country_code},
              {"country", r.country}};
}

RawRecord record_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kInvalidParams, "record must be an object");
  RawRecord r;
  r.fid = json_string(j, "fid");
  r.cid = json_string(j, "cid");
  const std::string type = json_string(j, "type");
  auto parsed = parse_type_name(type);
  if (!parsed) throw Error(ErrorCode::kInvalidParams, "record type '" + type + "' is not C, I or J");
  r.customer_type = *parsed;
  r.first_name = json_string(j, "first_name");
  r.last_name = json_string(j, "last_name");
  r.company_name = json_string(j, "company_name");
  r.street = json_string(j, "street");
  r.town = json_string(j, "town");
  r.zip = json_string(j, "zip");
  r.country_code = json_string(j, "country_code");
  r.country = json_string(j, "country");
  return r;
}

json stats_to_json(const IndexStats& s) {
  json parts = json::array();
  for (const auto& p : s.per_partition) {
    parts.push_back({{"country", p.country},
                     {"type", type_name(p.customer_type)},
                     {"records", p.records},
                     {"names", p.names},
                     {"address_items", p.address_items},
                     {"tree_height", p.tree_height},
                     {"tree_nodes", p.tree_nodes}});
  }
  return json{{"records", s.records},       {"indexed_records", s.indexed_records},
              {"partitions", s.partitions}, {"countries", s.countries},
              {"tokens", s.tokens},         {"memory_bytes", s.memory_bytes},
              {"per_partition", parts}};
}

json results_to_json(const GlobalIndex& index, const ResultSet& results) {
  json hits = json::array();
  for (const auto& m : results.matches) {
    json matched = json::array();
    if (m.by_name) matched.push_back("name");
    if (m.by_address) matched.push_back("address");
    hits.push_back({{"fid", m.key.fid},
                    {"cid", m.key.cid},
                    {"matched", matched},
                    {"record", record_to_json(index.extract_one(m.key))}});
  }
  return json{{"count", results.size()}, {"results", hits}};
}

SearchRequest request_from_json(const json& j, const AbbreviationTable& table) {
  if (!j.is_object()) throw Error(ErrorCode::kInvalidParams, "search request must be a JSON object");
  std::optional<CustomerType> type;
  if (const std::string t = json_string(j, "type"); !t.empty()) {
    type = parse_type_name(t);
    if (!type) throw Error(ErrorCode::kInvalidParams, "type '" + t + "' is not corporate or individual");
  }
  bool prefix = false;
  if (j.contains("prefix")) {
    if (!j["prefix"].is_boolean()) throw Error(ErrorCode::kInvalidParams, "prefix must be a boolean");
    prefix = j["prefix"].get<bool>();
  }
  return make_search_request(json_string(j, "name"), json_string(j, "address"), json_string(j, "country"), type,
                             prefix, table);
}

void ServiceConfig::validate() const {
  if (port < 0 || port > 65535) throw Error(ErrorCode::kInvalidConfig, "port out of range");
  if (snapshot_path.empty()) throw Error(ErrorCode::kInvalidConfig, "snapshot path is required");
  if (!fs::exists(snapshot_path) && !sources_path) {
    throw Error(ErrorCode::kInvalidConfig, snapshot_path.string() + " does not exist and no sources are configured");
  }
  if (sources_path && !fs::exists(*sources_path)) {
    throw Error(ErrorCode::kInvalidConfig, "source config not found: " + sources_path->string());
  }
  if (abbreviation_path && !fs::exists(*abbreviation_path)) {
    throw Error(ErrorCode::kInvalidConfig, "abbreviation table not found: " + abbreviation_path->string());
  }
  if (rescan_interval) {
    if (rescan_interval->count() <= 0) throw Error(ErrorCode::kInvalidConfig, "rescan interval must be positive");
    if (!sources_path) throw Error(ErrorCode::kInvalidConfig, "rescanning needs a source config");
  }
}

void ServiceConfig::set_listen(std::string_view listen) {
  const auto colon = listen.rfind(':');
  if (colon == std::string_view::npos) throw Error(ErrorCode::kInvalidConfig, "listen address must be host:port");
  if (colon > 0) host = std::string(listen.substr(0, colon));
  const auto digits = listen.substr(colon + 1);
  int value = -1;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (ec != std::errc() || ptr != digits.data() + digits.size()) {
    throw Error(ErrorCode::kInvalidConfig, "bad port in '" + std::string(listen) + "'");
  }
  port = value;
}

struct Service::Server {
  httplib::Server http;
};

namespace {

GlobalIndex initial_index(const ServiceConfig& config, const AbbreviationTable& table) {
  config.validate();
  if (fs::exists(config.snapshot_path)) return load(config.snapshot_path);
  GlobalIndex index = GlobalIndex::build(load_sources(SourceConfig::load(*config.sources_path)), table);
  rotate_audit_log(config.snapshot_path);
  save(index, config.snapshot_path);
  return index;
}

AbbreviationTable initial_table(const ServiceConfig& config) {
  return config.abbreviation_path ? AbbreviationTable::load(*config.abbreviation_path) : AbbreviationTable::defaults();
}

}  // namespace

Service::Service(ServiceConfig config)
    : config_(std::move(config)),
      table_(initial_table(config_)),
      handle_(initial_index(config_, table_)),
      server_(std::make_unique<Server>()) {}

Service::Service(ServiceConfig config, GlobalIndex index, AbbreviationTable table)
    : config_(std::move(config)),
      table_(std::move(table)),
      handle_(std::move(index)),
      server_(std::make_unique<Server>()) {}

Service::~Service() { stop(); }

json Service::do_search(const json& body) {
  const SearchRequest req = request_from_json(body, table_);
  auto snap = handle_.snapshot();
  return results_to_json(*snap, snap->search(req));
}

json Service::update_to_json(const UpdateReport& report) const {
  json rejected = json::array();
  for (const auto& r : report.rejected) {
    rejected.push_back({{"fid", r.key.fid}, {"cid", r.key.cid}, {"reason", to_string(r.reason)}});
  }
  json unindexable = json::array();
  for (const auto& k : report.unindexable) unindexable.push_back({{"fid", k.fid}, {"cid", k.cid}});
  return json{{"inserted", report.inserted}, {"rejected", rejected}, {"unindexable", unindexable}};
}

json Service::do_update(const json& body) {
  if (!body.is_object() || !body.contains("records") || !body["records"].is_array()) {
    throw Error(ErrorCode::kInvalidParams, "update body must be {\"records\": [...]}");
  }
  std::vector<RawRecord> records;
  for (const auto& r : body["records"]) records.push_back(record_from_json(r));
  const UpdateReport report = handle_.update(records, table_);
  if (config_.save_after_update && report.inserted > 0) do_save();
  return update_to_json(report);
}

json Service::do_save() {
  std::lock_guard lock(save_mutex_);
  auto snap = handle_.snapshot();
  save(*snap, config_.snapshot_path);
  return json{{"saved", config_.snapshot_path.string()}, {"records", snap->size()}};
}

ServiceResponse Service::handle(std::string_view method, std::string_view path, std::string_view body) {
  try {
    if (path == "/v1/health" && method == "GET") return {200, json{{"status", "ok"}}.dump()};
    if (path == "/v1/stats" && method == "GET") return {200, stats_to_json(handle_.snapshot()->stats()).dump()};
    if (path == "/v1/save" && method == "POST") return {200, do_save().dump()};
    if (path == "/v1/search" && method == "POST") return {200, do_search(json::parse(body)).dump()};
    if (path == "/v1/update" && method == "POST") return {200, do_update(json::parse(body)).dump()};
    if (path == "/v1/health" || path == "/v1/stats" || path == "/v1/save" || path == "/v1/search" ||
        path == "/v1/update") {
      return error_response(405, "MethodNotAllowed", std::string(method) + " " + std::string(path));
    }
    return error_response(404, "NotFound", std::string(path));
  } catch (const json::exception& e) {
    return error_response(400, "BadJson", e.what());
  } catch (const Error& e) {
    return error_response(status_for(e.code()), to_string(e.code()), e.what());
  } catch (const std::exception& e) {
    return error_response(500, "Internal", e.what());
  }
}

UpdateReport Service::rescan() {
  if (!config_.sources_path) return {};
  std::vector<RawRecord> records = load_sources(SourceConfig::load(*config_.sources_path));
  auto snap = handle_.snapshot();
  std::erase_if(records, [&](const RawRecord& r) { return snap->contains(r.key()); });
  if (records.empty()) return {};
  UpdateReport report = handle_.update(records, table_);
  if (config_.save_after_update && report.inserted > 0) do_save();
  return report;
}

void Service::rescan_loop() {
  std::unique_lock lock(rescan_mutex_);
  while (!stopping_.load()) {
    if (rescan_cv_.wait_for(lock, *config_.rescan_interval, [this] { return stopping_.load(); })) break;
    lock.unlock();
    try {
      const UpdateReport report = rescan();
      if (report.inserted > 0) std::cerr << "rescan: " << report.inserted << " new record(s) indexed\n";
    } catch (const std::exception& e) {
      std::cerr << "rescan failed: " << e.what() << "\n";
    }
    lock.lock();
  }
}

bool Service::run() {
  auto route = [this](const httplib::Request& req, httplib::Response& res) {
    ServiceResponse r = handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body, "application/json");
  };
  server_->http.Get("/v1/.*", route);
  server_->http.Post("/v1/.*", route);

  int port = config_.port;
  if (port == 0) {
    port = server_->http.bind_to_any_port(config_.host);
    if (port < 0) return false;
  } else if (!server_->http.bind_to_port(config_.host, port)) {
    return false;
  }
  bound_port_ = port;
  if (stopping_) return true;
  if (config_.rescan_interval) rescan_thread_ = std::thread([this] { rescan_loop(); });
  return server_->http.listen_after_bind();
}

void Service::stop() {
  {
    std::lock_guard lock(rescan_mutex_);
    stopping_ = true;
  }
  rescan_cv_.notify_all();
  server_->http.stop();
  if (rescan_thread_.joinable() && rescan_thread_.get_id() != std::this_thread::get_id()) rescan_thread_.join();
}

}  // namespace cnix
