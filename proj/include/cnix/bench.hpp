#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cnix/global_index.hpp"

namespace cnix {

/// A query as an analyst would type it; normalized on use.
struct QuerySpec {
  std::string name;
  std::string address;
  std::string country;
  std::optional<CustomerType> type;
  bool prefix = false;

  SearchRequest to_request(const AbbreviationTable& table) const;
  friend bool operator==(const QuerySpec&, const QuerySpec&) = default;
};

// Mix of exact and prefix company-name queries, person-name subsets, address
// fragments, combined name+address queries, optional country/type filters
// and a share of misses. Every query has a name or an address. Deterministic
// for a fixed seed.
std::vector<QuerySpec> make_query_battery(std::span<const RawRecord> records, std::size_t count, std::uint64_t seed,
                                          const AbbreviationTable& table = AbbreviationTable::defaults());

// JSON Lines: {"name":..,"address":..,"country":..,"type":..,"prefix":..}
std::string format_battery(std::span<const QuerySpec> battery);
std::vector<QuerySpec> parse_battery(std::string_view text);

/// Full linear pass over raw source records, normalizing each record on the
/// fly the way the index does. No index structures are used.
std::vector<RecordKey> baseline_scan(std::span<const RawRecord> sources, const SearchRequest& request,
                                     const AbbreviationTable& table);

struct QueryTiming {
  double lookup_ms = 0;    // in-index search
  double extract_ms = 0;   // fetching raw records for the hits
  double baseline_ms = 0;  // linear scan
  std::size_t results = 0;

  double indexed_ms() const noexcept { return lookup_ms + extract_ms; }
  double speedup() const noexcept;
};

struct BenchReport {
  std::size_t queries = 0;
  std::size_t repetitions = 0;
  std::size_t records = 0;
  std::string intersect_kernel;
  std::vector<QueryTiming> timings;
  double median_lookup_ms = 0;
  double median_extract_ms = 0;
  double median_indexed_ms = 0;
  double median_baseline_ms = 0;
  double median_speedup = 0;
  double p10_speedup = 0;
  double p90_speedup = 0;

  std::string to_text() const;
};

// Times both paths (best of `repetitions` runs each) and checks that they
// return the same keys for every query; throws Error(kBenchMismatch) naming
// the first query that differs.
BenchReport run_bench(const GlobalIndex& index, std::span<const RawRecord> sources,
                      std::span<const QuerySpec> battery, std::size_t repetitions, const AbbreviationTable& table);

double percentile(std::vector<double> values, double q);

}  // namespace cnix
