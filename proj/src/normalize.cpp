#include "cnix/normalize.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "cnix/error.hpp"

namespace cnix {

namespace {

bool is_separator(char c) {
  return std::isspace(static_cast<unsigned char>(c)) || c == ',' || c == ';';
}

bool is_strippable(char c) {
  switch (c) {
    case '.': case ',': case ';': case ':': case '\'': case '"': case ' ':
      return true;
    default:
      return false;
  }
}

}  // namespace

std::string to_upper(std::string_view text) {
  std::string out(text);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::string trim(std::string_view text) {
  std::size_t b = 0, e = text.size();
  while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
  return std::string(text.substr(b, e - b));
}

AbbreviationTable AbbreviationTable::defaults() {
  AbbreviationTable table;
  table.add("A.C", "A/C");
  table.add("AC", "A/C");
  table.add("AC.", "A/C");
  table.add("ACCOUNT", "A/C");
  table.add("ACCT", "A/C");
  table.add("LIMITED", "LTD");
  table.add("LTD.", "LTD");
  table.add("CORP.", "CORP");
  table.add("CORPN", "CORP");
  table.add("INCORPORATED", "INC");
  table.add("INC.", "INC");
  table.add("COMPANY", "CO");
  table.add("CO.", "CO");
  return table;
}

void AbbreviationTable::add(std::string_view variant, std::string_view canonical) {
  std::string v = to_upper(trim(variant));
  std::string c = to_upper(trim(canonical));
  if (v.empty() || c.empty()) {
    throw Error(ErrorCode::kInvalidAbbreviationTable, "empty variant or canonical token");
  }
  if (v == c) return;
  if (auto it = entries_.find(c); it != entries_.end() && it->second != c) {
    throw Error(ErrorCode::kInvalidAbbreviationTable,
                "canonical token '" + c + "' is itself mapped to '" + it->second + "'");
  }
  for (const auto& [key, value] : entries_) {
    if (value == v) {
      throw Error(ErrorCode::kInvalidAbbreviationTable,
                  "'" + v + "' is already the canonical form of '" + key + "'");
    }
  }
  if (auto it = entries_.find(v); it != entries_.end() && it->second != c) {
    throw Error(ErrorCode::kInvalidAbbreviationTable,
                "'" + v + "' mapped to both '" + it->second + "' and '" + c + "'");
  }
  entries_[v] = c;
}

AbbreviationTable AbbreviationTable::parse(std::string_view text) {
  AbbreviationTable table;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw Error(ErrorCode::kInvalidAbbreviationTable,
                  "line " + std::to_string(line_no) + ": expected VARIANT<TAB>CANONICAL");
    }
    table.add(std::string_view(line).substr(0, tab), std::string_view(line).substr(tab + 1));
  }
  return table;
}

AbbreviationTable AbbreviationTable::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kSourceUnreadable, path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

const std::string* AbbreviationTable::lookup(std::string_view token) const {
  auto it = entries_.find(token);
  return it == entries_.end() ? nullptr : &it->second;
}

std::vector<std::string> AbbreviationTable::variants_of(std::string_view canonical) const {
  std::vector<std::string> out;
  for (const auto& [variant, value] : entries_) {
    if (value == canonical) out.push_back(variant);
  }
  return out;
}

std::vector<std::string> AbbreviationTable::canonical_forms() const {
  std::vector<std::string> out;
  for (const auto& [variant, value] : entries_) out.push_back(value);
  make_token_set(out);
  return out;
}

std::vector<std::string> tokenize(std::string_view raw) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < raw.size()) {
    while (i < raw.size() && is_separator(raw[i])) ++i;
    std::size_t j = i;
    while (j < raw.size() && !is_separator(raw[j])) ++j;
    std::size_t b = i, e = j;
    while (b < e && is_strippable(raw[b])) ++b;
    while (e > b && is_strippable(raw[e - 1])) --e;
    if (e > b) tokens.push_back(to_upper(raw.substr(b, e - b)));
    i = j;
  }
  return tokens;
}

std::vector<std::string> canonicalize(std::vector<std::string> tokens, const AbbreviationTable& table) {
  for (auto& token : tokens) {
    if (const std::string* canonical = table.lookup(token)) token = *canonical;
  }
  return tokens;
}

std::vector<std::string> normalize_text(std::string_view raw, const AbbreviationTable& table) {
  return canonicalize(tokenize(raw), table);
}

namespace {

std::string join_present(std::initializer_list<std::string_view> parts) {
  std::string out;
  for (std::string_view part : parts) {
    std::string t = trim(part);
    if (t.empty()) continue;
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

}  // namespace

std::string merge_name(std::string_view first, std::string_view last) {
  return join_present({first, last});
}

std::string merge_address(std::string_view street, std::string_view town, std::string_view zip,
                          std::string_view country_code) {
  return join_present({street, town, zip, country_code});
}

std::string resolve_country(std::string_view country, std::string_view country_code) {
  if (std::string c = to_upper(trim(country)); !c.empty()) return c;
  if (std::string c = to_upper(trim(country_code)); !c.empty()) return c;
  return std::string(kUnknownCountry);
}

void make_token_set(std::vector<std::string>& tokens) {
  std::sort(tokens.begin(), tokens.end());
  tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
}

NormalizedRecord normalize_record(const RawRecord& raw, const AbbreviationTable& table) {
  if (raw.fid.empty() || raw.cid.empty()) {
    throw Error(ErrorCode::kMissingIdentity,
                "record with fid='" + raw.fid + "' cid='" + raw.cid + "' lacks an identity");
  }
  NormalizedRecord rec;
  rec.key = raw.key();
  rec.customer_type = raw.customer_type;
  if (index_type(raw.customer_type) == CustomerType::kCorporate) {
    rec.name_tokens = normalize_text(raw.company_name, table);
  } else {
    rec.name_tokens = normalize_text(merge_name(raw.first_name, raw.last_name), table);
    make_token_set(rec.name_tokens);
  }
  rec.address_tokens = normalize_text(merge_address(raw.street, raw.town, raw.zip, raw.country_code), table);
  make_token_set(rec.address_tokens);
  rec.country = resolve_country(raw.country, raw.country_code);
  rec.raw = raw;
  return rec;
}

}  // namespace cnix
