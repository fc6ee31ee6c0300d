#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "cnix/model.hpp"

namespace cnix {

/// Variant token -> canonical token ("ACCOUNT" -> "A/C"). Keys and values are
/// stored uppercase. A canonical token never maps to anything but itself.
class AbbreviationTable {
 public:
  AbbreviationTable() = default;

  static AbbreviationTable defaults();
  // "VARIANT<TAB>CANONICAL" per line, '#' starts a comment.
  static AbbreviationTable parse(std::string_view text);
  static AbbreviationTable load(const std::filesystem::path& path);

  void add(std::string_view variant, std::string_view canonical);
  const std::string* lookup(std::string_view token) const;

  std::vector<std::string> variants_of(std::string_view canonical) const;
  std::vector<std::string> canonical_forms() const;
  const std::map<std::string, std::string, std::less<>>& entries() const noexcept { return entries_; }
  bool empty() const noexcept { return entries_.empty(); }

 private:
  std::map<std::string, std::string, std::less<>> entries_;
};

std::string to_upper(std::string_view text);
std::string trim(std::string_view text);

// Splits on whitespace, ',' and ';', uppercases, and strips .,;:'" from both
// ends of each token. Internal '/' and '-' survive ("A/C", "11-1101").
std::vector<std::string> tokenize(std::string_view raw);

std::vector<std::string> canonicalize(std::vector<std::string> tokens, const AbbreviationTable& table);

// tokenize + canonicalize; the query-side twin of normalize_record.
std::vector<std::string> normalize_text(std::string_view raw, const AbbreviationTable& table);

std::string merge_name(std::string_view first, std::string_view last);
std::string merge_address(std::string_view street, std::string_view town, std::string_view zip,
                          std::string_view country_code);
// Country field first, then country code, else UNKNOWN.
std::string resolve_country(std::string_view country, std::string_view country_code);

// Throws Error(kMissingIdentity) when fid or cid is empty.
NormalizedRecord normalize_record(const RawRecord& raw, const AbbreviationTable& table);

// Sort + dedupe in place.
void make_token_set(std::vector<std::string>& tokens);

}  // namespace cnix
