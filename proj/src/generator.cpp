#include "cnix/generator.hpp"

#include <array>
#include <cmath>
#include <map>
#include <random>

#include "cnix/error.hpp"
#include "cnix/ingest.hpp"

namespace cnix {

namespace fs = std::filesystem;

namespace {

constexpr std::array kFunds = {"ABBA",  "MERLU", "SKADA", "ORLA",  "BRAN",  "CAIRN", "DELTA", "EIRE",
                               "FINCH", "GALE",  "HERON", "IONA",  "JURA",  "KESTREL", "LIR", "MOY"};

constexpr std::array kFirstNames = {"JOHN",   "PETER",  "MARY",   "ANNE",    "MICHAEL", "SEAN",   "PATRICK",
                                    "SIOBHAN", "DAVID", "SARAH",  "JAMES",   "CLAIRE",  "THOMAS", "AOIFE",
                                    "ROBERT", "EMMA",   "PAUL",   "NIAMH",   "MARK",    "LAURA",  "BRIAN",
                                    "CIARA",  "KEVIN",  "ORLA",   "DECLAN",  "FIONA",   "HENRI",  "MARIE",
                                    "HANS",   "GRETA",  "WEI",    "MEI",     "CHEN",    "LUCA",   "SOFIA",
                                    "PIERRE", "ELENA",  "OSCAR",  "NORA",    "IVAN"};

constexpr std::array kLastNames = {"SMITH",   "MURPHY",  "CHANG",    "KELLY",   "BYRNE",   "RYAN",    "WALSH",
                                   "OBRIEN",  "OCONNOR", "DOYLE",    "MCCARTHY", "GALLAGHER", "DOHERTY", "KENNEDY",
                                   "LYNCH",   "MURRAY",  "QUINN",    "MOORE",   "BROWN",   "TAYLOR",  "WILSON",
                                   "JONES",   "WHITE",   "MARTIN",   "DUBOIS",  "LAURENT", "MULLER",  "SCHMIDT",
                                   "WONG",    "CHEUNG",  "LEE",      "ROSSI",   "BIANCHI", "GARCIA",  "LOPEZ",
                                   "NOLAN",   "BURKE",   "POWER",    "HAYES",   "FLYNN",   "DALY",    "BRENNAN",
                                   "FARRELL", "HEALY",   "KEANE",    "REGAN",   "SHEA",    "COLLINS", "CLARKE",
                                   "MAHER",   "FOLEY",   "HOGAN",    "BARRY",   "MORAN",   "CARROLL", "DUFFY"};

constexpr std::array kCompanyHeads = {"FIRST",   "ABC",     "INTERNATIONAL", "GLOBAL",   "ATLANTIC", "PACIFIC",
                                      "ROYAL",   "UNITED",  "NORTHERN",      "SOUTHERN", "CELTIC",   "EURO",
                                      "CONTINENTAL", "METRO", "PIONEER",     "SUMMIT",   "HARBOUR",  "EMERALD",
                                      "LIBERTY", "CROWN",   "BLUE",          "SILVER",   "GOLDEN",   "EASTERN"};

constexpr std::array kCompanyMiddles = {"COMMERCIAL", "CAPITAL", "AMERICA",  "INVEST",   "ASSET",  "MARINE",
                                        "TRADING",    "FINANCE", "HOLDINGS", "PROPERTY", "ENERGY", "MERCHANT",
                                        "SAVINGS",    "EQUITY",  "VENTURE",  "INSURANCE", "PENSION", "CREDIT"};

constexpr std::array kCompanyKinds = {"BANK",     "GROUP",      "PARTNERS", "FUND",   "MANAGEMENT",
                                      "SECURITIES", "INVESTMENTS", "TRUST",  "ADVISORS", "NOMINEES"};

constexpr std::array kCompanySuffixes = {"LTD", "LTD", "LTD", "CORP", "INC", "CO"};

constexpr std::array kStreetNames = {"MAIN",    "SUNSET",  "HIGH",   "CHURCH", "PARK",    "MILL",   "STATION",
                                     "BRIDGE",  "GREEN",   "KING",   "QUEEN",  "VICTORIA", "HARBOUR", "ABBEY",
                                     "MARKET",  "CASTLE",  "RIVER",  "ORCHARD", "WILLOW", "OAK",    "ELM",
                                     "DAME",    "GRAFTON", "OCONNELL", "BAGGOT", "LEESON", "MERRION", "PEARSE"};

constexpr std::array kStreetTypes = {"STREET", "AVENUE", "ROAD", "LANE", "SQUARE", "QUAY", "PLACE", "TERRACE"};

constexpr std::array kGroupExtensions = {"OBB A/C", "TRUST A/C TA", "NEW YORK BRANCH", "PENSION FUND A/C",
                                         "NOMINEES A/C", "CLIENT A/C"};

const std::map<std::string, std::vector<std::string>>& towns() {
  static const std::map<std::string, std::vector<std::string>> kTowns = {
      {"IE", {"DUBLIN", "CORK", "GALWAY", "LIMERICK", "WATERFORD"}},
      {"GB", {"LONDON", "MANCHESTER", "LEEDS", "BRISTOL", "EDINBURGH"}},
      {"US", {"NEW YORK", "BOSTON", "CHICAGO", "SPRINGFIELD", "MIAMI"}},
      {"LU", {"LUXEMBOURG", "ESCH", "DIFFERDANGE"}},
      {"FR", {"PARIS", "LYON", "MARSEILLE", "NICE"}},
      {"DE", {"BERLIN", "FRANKFURT", "MUNICH", "HAMBURG"}},
      {"MO", {"MACAO", "TAIPA"}},
      {"HK", {"HONG KONG", "KOWLOON"}},
  };
  return kTowns;
}

const std::vector<std::string> kFallbackTowns = {"CAPITAL CITY", "PORT TOWN", "RIVERSIDE"};

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, n); multiply-shift keeps it independent of the standard
  // library's distribution implementations.
  std::size_t below(std::size_t n) {
    return static_cast<std::size_t>((static_cast<unsigned __int128>(engine_()) * n) >> 64);
  }
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  bool chance(double p) { return unit() < p; }

  template <typename Seq>
  auto pick(const Seq& seq) -> decltype(seq[0]) {
    return seq[below(std::size(seq))];
  }

 private:
  std::mt19937_64 engine_;
};

std::string digits(Rng& rng, std::size_t n) {
  std::string out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(static_cast<char>('0' + rng.below(10)));
  if (out[0] == '0') out[0] = '1';
  return out;
}

struct Identity {
  RecordKey key;
  RawRecord clean;
};

std::string make_zip(Rng& rng) {
  switch (rng.below(3)) {
    case 0: return digits(rng, 5);
    case 1: return digits(rng, 2) + "-" + digits(rng, 4);
    default: return "D" + digits(rng, 2) + " " + digits(rng, 3);
  }
}

void make_address(Rng& rng, const std::string& country, RawRecord& r) {
  r.street = digits(rng, 1 + rng.below(3)) + " " + rng.pick(kStreetNames) + " " + rng.pick(kStreetTypes);
  auto it = towns().find(country);
  r.town = it != towns().end() ? rng.pick(it->second) : rng.pick(kFallbackTowns);
  r.zip = make_zip(rng);
  r.country_code = country;
  r.country = country;
}

std::string base_company_name(Rng& rng) {
  std::string name = rng.pick(kCompanyHeads);
  name += " ";
  name += rng.pick(kCompanyMiddles);
  if (rng.chance(0.6)) {
    name += " ";
    name += rng.pick(kCompanyKinds);
  }
  name += " ";
  name += rng.pick(kCompanySuffixes);
  return name;
}

std::string group_member_name(Rng& rng, const std::string& base) {
  std::string ext = rng.pick(kGroupExtensions);
  if (ext == std::string("TRUST A/C TA")) ext += " " + digits(rng, 6);
  return base + " " + ext;
}

// Word-level helpers on space-separated text.
std::vector<std::string> words(const std::string& text) {
  std::vector<std::string> out;
  for (auto w : split_fields(text, ' ')) {
    if (!w.empty()) out.emplace_back(w);
  }
  return out;
}

std::string join_words(const std::vector<std::string>& ws) {
  std::string out;
  for (const auto& w : ws) {
    if (!out.empty()) out.push_back(' ');
    out += w;
  }
  return out;
}

void inject_typo(Rng& rng, std::string& text) {
  // Digit groups joined by a space or hyphen swap their separator
  // ("11 1101" vs "11-1101").
  for (std::size_t i = 1; i + 1 < text.size(); ++i) {
    const bool digit_pair = std::isdigit(static_cast<unsigned char>(text[i - 1])) &&
                            std::isdigit(static_cast<unsigned char>(text[i + 1]));
    if (digit_pair && (text[i] == ' ' || text[i] == '-') && rng.chance(0.5)) {
      text[i] = text[i] == ' ' ? '-' : ' ';
      return;
    }
  }
  std::vector<std::size_t> positions;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (std::isalnum(static_cast<unsigned char>(text[i]))) positions.push_back(i);
  }
  if (positions.empty()) {
    text += "X";
    return;
  }
  const std::size_t at = positions[rng.below(positions.size())];
  const bool digit = std::isdigit(static_cast<unsigned char>(text[at]));
  auto random_char = [&] {
    return digit ? static_cast<char>('0' + rng.below(10)) : static_cast<char>('A' + rng.below(26));
  };
  switch (rng.below(3)) {
    case 0: {
      char c = random_char();
      while (c == text[at]) c = random_char();
      text[at] = c;
      break;
    }
    case 1:
      if (positions.size() > 1) {
        text.erase(at, 1);
        break;
      }
      [[fallthrough]];
    default:
      text.insert(text.begin() + static_cast<std::ptrdiff_t>(at), random_char());
      break;
  }
}

// "12 MAIN STREET" -> "MAIN STREET, 12"
bool rotate_street(std::string& street) {
  auto ws = words(street);
  if (ws.size() < 2) return false;
  std::string first = ws.front();
  ws.erase(ws.begin());
  street = join_words(ws) + ", " + first;
  return true;
}

}  // namespace

void GeneratorParams::validate() const {
  auto check_rate = [](double rate, const char* name) {
    if (!(rate >= 0.0 && rate <= 1.0)) {
      throw Error(ErrorCode::kInvalidParams, std::string(name) + " must lie in [0, 1]");
    }
  };
  if (count == 0) throw Error(ErrorCode::kInvalidParams, "count must be positive");
  if (sources == 0) throw Error(ErrorCode::kInvalidParams, "sources must be positive");
  check_rate(corporate_fraction, "corporate_fraction");
  check_rate(missing_field_rate, "missing_field_rate");
  check_rate(missing_country_rate, "missing_country_rate");
  check_rate(typo_rate, "typo_rate");
  check_rate(abbreviation_rate, "abbreviation_rate");
  check_rate(transposition_rate, "transposition_rate");
  check_rate(duplicate_rate, "duplicate_rate");
  check_rate(incoherent_address_rate, "incoherent_address_rate");
  check_rate(group_expansion, "group_expansion");
  if (countries.empty()) throw Error(ErrorCode::kInvalidParams, "at least one country is required");
  double total = 0;
  for (const auto& [code, weight] : countries) {
    if (code.empty() || code.find_first_of("| \t") != std::string::npos) {
      throw Error(ErrorCode::kInvalidParams, "bad country code '" + code + "'");
    }
    if (!(weight >= 0.0) || !std::isfinite(weight)) throw Error(ErrorCode::kInvalidParams, "bad country weight");
    total += weight;
  }
  if (!(total > 0.0)) throw Error(ErrorCode::kInvalidParams, "country weights sum to zero");
}

GeneratedCorpus generate(const GeneratorParams& params, const AbbreviationTable& table) {
  params.validate();
  Rng rng(params.seed);
  GeneratedCorpus corpus;

  for (std::size_t i = 0; i < params.sources; ++i) {
    corpus.fids.push_back(i < kFunds.size() ? std::string(kFunds[i]) : "FUND" + std::to_string(i + 1));
  }
  std::vector<std::size_t> next_cid(params.sources, 1000);

  double weight_total = 0;
  for (const auto& c : params.countries) weight_total += c.second;
  auto pick_country = [&]() -> const std::string& {
    double x = rng.unit() * weight_total;
    for (const auto& [code, weight] : params.countries) {
      if (x < weight) return code;
      x -= weight;
    }
    return params.countries.back().first;
  };

  // Canonical tokens with at least one variant, for abbreviation defects.
  std::map<std::string, std::vector<std::string>> variants;
  for (const auto& canonical : table.canonical_forms()) {
    auto v = table.variants_of(canonical);
    if (!v.empty()) variants.emplace(canonical, std::move(v));
  }

  std::vector<Identity> identities;
  std::vector<std::string> company_bases;
  corpus.records.reserve(params.count);
  corpus.truth.reserve(params.count);

  for (std::size_t n = 0; n < params.count; ++n) {
    const std::size_t source = rng.below(params.sources);
    RecordKey key{corpus.fids[source], ""};
    const std::size_t serial = next_cid[source]++;
    key.cid = rng.chance(0.2) ? "B" + std::to_string(serial) : std::to_string(serial);

    TruthRow truth;
    RawRecord clean;
    bool near_duplicate = false;
    if (!identities.empty() && rng.chance(params.duplicate_rate)) {
      const Identity& base = identities[rng.below(identities.size())];
      clean = base.clean;
      truth.duplicate_of = base.key;
      near_duplicate = true;
      ++corpus.defects.duplicate;
    } else {
      const std::string& country = pick_country();
      if (rng.chance(params.corporate_fraction)) {
        clean.customer_type = CustomerType::kCorporate;
        if (!company_bases.empty() && rng.chance(params.group_expansion)) {
          clean.company_name = group_member_name(rng, company_bases[rng.below(company_bases.size())]);
          ++corpus.defects.group_member;
        } else {
          clean.company_name = base_company_name(rng);
          company_bases.push_back(clean.company_name);
        }
      } else {
        clean.customer_type = rng.chance(0.1) ? CustomerType::kJoint : CustomerType::kIndividual;
        clean.first_name = rng.pick(kFirstNames);
        clean.last_name = rng.pick(kLastNames);
      }
      make_address(rng, country, clean);
    }
    clean.fid = key.fid;
    clean.cid = key.cid;
    if (!near_duplicate) identities.push_back(Identity{key, clean});

    RawRecord r = clean;
    const bool corporate = index_type(r.customer_type) == CustomerType::kCorporate;

    // "John Smith" vs "J. Smith"
    if (near_duplicate && !corporate && !r.first_name.empty() && rng.chance(0.5)) {
      r.first_name = r.first_name.substr(0, 1) + ".";
    }

    if (rng.chance(params.missing_field_rate)) {
      ++corpus.defects.missing_field;
      if (!corporate && rng.chance(0.25)) {
        // Whole name crammed into the first-name field.
        r.first_name = merge_name(r.first_name, r.last_name);
        r.last_name.clear();
      } else {
        std::vector<std::string*> fields;
        if (corporate) {
          fields.push_back(&r.company_name);
        } else {
          fields.push_back(&r.first_name);
          fields.push_back(&r.last_name);
        }
        for (auto* f : {&r.street, &r.town, &r.zip, &r.country_code}) fields.push_back(f);
        fields[rng.below(fields.size())]->clear();
      }
    }

    if (rng.chance(params.missing_country_rate)) {
      ++corpus.defects.missing_country;
      r.country.clear();
      r.country_code.clear();
    }

    if (rng.chance(params.typo_rate)) {
      std::vector<std::string*> fields;
      for (auto* f : {&r.first_name, &r.last_name, &r.company_name, &r.street, &r.town, &r.zip}) {
        if (!f->empty()) fields.push_back(f);
      }
      if (!fields.empty()) {
        inject_typo(rng, *fields[rng.below(fields.size())]);
        ++corpus.defects.typo;
      }
    }

    {
      auto ws = words(r.company_name);
      std::vector<std::size_t> eligible;
      for (std::size_t i = 0; i < ws.size(); ++i) {
        if (variants.contains(ws[i])) eligible.push_back(i);
      }
      if (!eligible.empty()) {
        ++corpus.defects.abbreviation_eligible;
        if (rng.chance(params.abbreviation_rate)) {
          const std::size_t at = eligible[rng.below(eligible.size())];
          ws[at] = rng.pick(variants.at(ws[at]));
          r.company_name = join_words(ws);
          ++corpus.defects.abbreviation;
        }
      }
    }

    if (rng.chance(params.transposition_rate)) {
      bool applied = false;
      if (!corporate && rng.chance(0.5)) {
        std::swap(r.first_name, r.last_name);
        applied = true;
      } else {
        applied = rotate_street(r.street);
      }
      if (!applied && !corporate) {
        std::swap(r.first_name, r.last_name);
        applied = true;
      }
      if (applied) ++corpus.defects.transposition;
    }

    if (rng.chance(params.incoherent_address_rate)) {
      ++corpus.defects.incoherent_address;
      switch (rng.below(3)) {
        case 0:  // zip holds street and number
          r.zip = merge_name(r.street, r.zip);
          r.street.clear();
          break;
        case 1:
          std::swap(r.town, r.zip);
          break;
        default:
          std::swap(r.street, r.zip);
          break;
      }
    }

    truth.clean = clean;
    corpus.records.push_back(std::move(r));
    corpus.truth.push_back(std::move(truth));
  }
  return corpus;
}

std::string format_truth(const std::vector<TruthRow>& truth) {
  std::string out = "FID|";
  out += kRecordHeader;
  out += "|DUPLICATE_OF\n";
  for (const auto& t : truth) {
    std::string rows = format_records(std::span(&t.clean, 1));
    std::string_view row(rows);
    row.remove_prefix(kRecordHeader.size() + 1);
    row.remove_suffix(1);
    out += t.clean.fid;
    out.push_back('|');
    out += row;
    out.push_back('|');
    if (t.duplicate_of) out += t.duplicate_of->fid + ":" + t.duplicate_of->cid;
    out.push_back('\n');
  }
  return out;
}

std::vector<TruthRow> parse_truth(std::string_view text) {
  std::vector<TruthRow> out;
  std::size_t pos = text.find('\n');
  if (pos == std::string_view::npos) return out;
  ++pos;
  std::size_t line_no = 1;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;
    auto fields = split_fields(line, '|');
    if (fields.size() != 12) {
      throw Error(ErrorCode::kMalformedRow, "truth:" + std::to_string(line_no) + ": expected 12 fields");
    }
    std::string body(kRecordHeader);
    body.push_back('\n');
    body += line.substr(fields[0].size() + 1, line.size() - fields[0].size() - 2 - fields[11].size());
    auto rows = parse_records(body, fields[0], "truth");
    TruthRow row;
    row.clean = std::move(rows.at(0));
    if (!fields[11].empty()) {
      const auto colon = fields[11].find(':');
      if (colon == std::string_view::npos) {
        throw Error(ErrorCode::kMalformedRow, "truth:" + std::to_string(line_no) + ": bad DUPLICATE_OF");
      }
      row.duplicate_of = RecordKey{std::string(fields[11].substr(0, colon)), std::string(fields[11].substr(colon + 1))};
    }
    out.push_back(std::move(row));
  }
  return out;
}

void write_corpus(const GeneratedCorpus& corpus, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIoFailure, dir.string() + ": " + ec.message());

  std::map<std::string, std::vector<RawRecord>> by_fid;
  for (const auto& fid : corpus.fids) by_fid[fid];
  for (const auto& r : corpus.records) by_fid[r.fid].push_back(r);

  SourceConfig cfg;
  for (const auto& fid : corpus.fids) {
    const std::string file = fid + ".txt";
    write_record_file(dir / file, by_fid[fid]);
    cfg.sources.push_back(SourceEntry{fid, file});
  }
  write_file_atomic(dir / "sources.cfg", cfg.format());
  write_file_atomic(dir / "truth.txt", format_truth(corpus.truth));
}

}  // namespace cnix
