#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cnix/model.hpp"
#include "cnix/normalize.hpp"

namespace cnix {

/// Knobs of the synthetic dirty-corpus generator. Rates are per-record
/// probabilities in [0, 1]; the abbreviation rate applies to records whose
/// clean name contains a token with known variants.
struct GeneratorParams {
  std::size_t count = 32000;
  std::size_t sources = 16;
  double corporate_fraction = 0.4;
  std::vector<std::pair<std::string, double>> countries = {
      {"IE", 0.25}, {"GB", 0.20}, {"US", 0.20}, {"LU", 0.10},
      {"FR", 0.10}, {"DE", 0.08}, {"MO", 0.04}, {"HK", 0.03}};
  double missing_field_rate = 0.05;
  double missing_country_rate = 0.005;
  double typo_rate = 0.03;
  double abbreviation_rate = 0.20;
  double transposition_rate = 0.10;
  double duplicate_rate = 0.05;
  double incoherent_address_rate = 0.05;
  // Probability that a new corporate customer joins an existing company name
  // group ("FIRST COMMERCIAL BANK LTD" -> "... TRUST A/C TA 505055").
  double group_expansion = 0.30;
  std::uint64_t seed = 1;

  // Throws Error(kInvalidParams).
  void validate() const;
};

struct TruthRow {
  RawRecord clean;
  std::optional<RecordKey> duplicate_of;

  friend bool operator==(const TruthRow&, const TruthRow&) = default;
};

// How often each defect was injected.
struct DefectCounts {
  std::size_t missing_field = 0;
  std::size_t missing_country = 0;
  std::size_t typo = 0;
  std::size_t abbreviation = 0;
  std::size_t abbreviation_eligible = 0;
  std::size_t transposition = 0;
  std::size_t duplicate = 0;
  std::size_t incoherent_address = 0;
  std::size_t group_member = 0;
};

struct GeneratedCorpus {
  std::vector<std::string> fids;
  std::vector<RawRecord> records;  // generation order
  std::vector<TruthRow> truth;     // parallel to records
  DefectCounts defects;
};

// Deterministic for a fixed seed.
GeneratedCorpus generate(const GeneratorParams& params, const AbbreviationTable& table = AbbreviationTable::defaults());

// Writes <FID>.txt per source, sources.cfg and truth.txt into `dir`.
void write_corpus(const GeneratedCorpus& corpus, const std::filesystem::path& dir);

// FID|CID|TYPE|...|COUNTRY|DUPLICATE_OF, where DUPLICATE_OF is "FID:CID" or empty.
std::string format_truth(const std::vector<TruthRow>& truth);
std::vector<TruthRow> parse_truth(std::string_view text);

}  // namespace cnix
