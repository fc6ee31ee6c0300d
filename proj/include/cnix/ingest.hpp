#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cnix/model.hpp"

namespace cnix {

// Header of every record export file; '|' separated, one row per customer.
inline constexpr std::string_view kRecordHeader =
    "CID|TYPE|FIRST_NAME|LAST_NAME|COMPANY_NAME|STREET|TOWN|ZIP|COUNTRY_CODE|COUNTRY";

struct SourceEntry {
  std::string fid;
  std::filesystem::path path;

  friend bool operator==(const SourceEntry&, const SourceEntry&) = default;
};

/// One export file per logical database. On disk: "FID<TAB>PATH" per line,
/// '#' comments, relative paths resolved against the config's directory.
struct SourceConfig {
  std::vector<SourceEntry> sources;

  // Throws Error(kSourceUnreadable) / Error(kInvalidConfig).
  static SourceConfig load(const std::filesystem::path& path);
  static SourceConfig parse(std::string_view text, const std::filesystem::path& base_dir);
  std::string format() const;
};

// Parses one export; every row is stamped with `fid`. `origin` names the
// source in MalformedRow messages.
std::vector<RawRecord> parse_records(std::string_view text, std::string_view fid, const std::string& origin);
std::vector<RawRecord> read_record_file(const std::filesystem::path& path, std::string_view fid);

// Header plus one row per record (the fid column is implied by the file).
// Throws Error(kInvalidParams) when a value contains '|' or a line break.
std::string format_records(std::span<const RawRecord> records);
void write_record_file(const std::filesystem::path& path, std::span<const RawRecord> records);

// Reads every source, in config order. Files are read concurrently.
std::vector<RawRecord> load_sources(const SourceConfig& config);

std::string read_file(const std::filesystem::path& path);
// Writes through a temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

std::vector<std::string_view> split_fields(std::string_view line, char delimiter);

}  // namespace cnix
