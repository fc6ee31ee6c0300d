#include "cnix/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <random>

#include <json.hpp>

#include "cnix/error.hpp"
#include "cnix/kernels/intersect.hpp"

namespace cnix {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::size_t below(std::size_t n) {
    return static_cast<std::size_t>((static_cast<unsigned __int128>(engine_()) * n) >> 64);
  }
  bool chance(double p) { return static_cast<double>(engine_() >> 11) * 0x1.0p-53 < p; }

 private:
  std::mt19937_64 engine_;
};

std::string join(const std::vector<std::string>& tokens, std::size_t begin, std::size_t end) {
  std::string out;
  for (std::size_t i = begin; i < end && i < tokens.size(); ++i) {
    if (!out.empty()) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

// Random subset of 1..max_take tokens, shuffled.
std::string sample_words(Rng& rng, std::vector<std::string> tokens, std::size_t max_take) {
  for (std::size_t i = tokens.size(); i > 1; --i) std::swap(tokens[i - 1], tokens[rng.below(i)]);
  const std::size_t take = 1 + rng.below(std::min(max_take, tokens.size()));
  return join(tokens, 0, take);
}

bool matches(const NormalizedRecord& rec, const SearchRequest& req, const std::vector<std::string>& name_set,
             const std::vector<std::string>& address_set) {
  const CustomerType type = index_type(rec.customer_type);
  if (req.customer_type && index_type(*req.customer_type) != type) return false;
  if (req.country) {
    const std::string wanted = to_upper(trim(*req.country));
    if (rec.country != wanted && rec.country != kUnknownCountry) return false;
  }
  if (req.has_name()) {
    const auto& q = *req.name_query;
    if (type == CustomerType::kCorporate) {
      if (rec.name_tokens.size() < q.size()) return false;
      if (!std::equal(q.begin(), q.end(), rec.name_tokens.begin())) return false;
      if (!req.prefix_mode && rec.name_tokens.size() != q.size()) return false;
    } else {
      if (!std::includes(rec.name_tokens.begin(), rec.name_tokens.end(), name_set.begin(), name_set.end())) {
        return false;
      }
    }
  }
  if (req.has_address()) {
    if (!std::includes(rec.address_tokens.begin(), rec.address_tokens.end(), address_set.begin(),
                       address_set.end())) {
      return false;
    }
  }
  return true;
}

}  // namespace

SearchRequest QuerySpec::to_request(const AbbreviationTable& table) const {
  return make_search_request(name, address, country, type, prefix, table);
}

std::vector<QuerySpec> make_query_battery(std::span<const RawRecord> records, std::size_t count, std::uint64_t seed,
                                          const AbbreviationTable& table) {
  std::vector<QuerySpec> out;
  if (records.empty()) return out;
  Rng rng(seed);
  out.reserve(count);
  std::size_t attempts = 0;
  while (out.size() < count && attempts++ < count * 20) {
    const RawRecord& raw = records[rng.below(records.size())];
    const NormalizedRecord rec = normalize_record(raw, table);
    const bool corporate = index_type(rec.customer_type) == CustomerType::kCorporate;

    QuerySpec q;
    const std::size_t shape = rng.below(10);
    const bool want_name = shape < 7 && !rec.name_tokens.empty();
    const bool want_address = (shape >= 4 || !want_name) && !rec.address_tokens.empty();
    if (want_name) {
      if (corporate) {
        q.prefix = rng.chance(0.5);
        const std::size_t len = q.prefix ? 1 + rng.below(rec.name_tokens.size()) : rec.name_tokens.size();
        q.name = join(rec.name_tokens, 0, len);
      } else {
        q.name = sample_words(rng, rec.name_tokens, 2);
      }
    }
    if (want_address) q.address = sample_words(rng, rec.address_tokens, 3);
    if (q.name.empty() && q.address.empty()) continue;

    if (rng.chance(0.3)) q.country = rng.chance(0.8) ? rec.country : "XX";
    if (rng.chance(0.4)) q.type = rng.chance(0.85) ? index_type(rec.customer_type)
                                                   : (corporate ? CustomerType::kIndividual : CustomerType::kCorporate);
    // A share of deliberate misses: one word replaced by an unseen token.
    if (rng.chance(0.1)) {
      std::string& target = q.name.empty() ? q.address : q.name;
      target += " QZX" + std::to_string(rng.below(1000));
    }
    out.push_back(std::move(q));
  }
  return out;
}

std::string format_battery(std::span<const QuerySpec> battery) {
  std::string out;
  for (const auto& q : battery) {
    nlohmann::json j;
    j["name"] = q.name;
    j["address"] = q.address;
    j["country"] = q.country;
    j["type"] = q.type ? std::string(type_name(*q.type)) : std::string();
    j["prefix"] = q.prefix;
    out += j.dump();
    out.push_back('\n');
  }
  return out;
}

std::vector<QuerySpec> parse_battery(std::string_view text) {
  std::vector<QuerySpec> out;
  std::size_t pos = 0, line_no = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      QuerySpec q;
      q.name = j.value("name", "");
      q.address = j.value("address", "");
      q.country = j.value("country", "");
      q.prefix = j.value("prefix", false);
      if (const std::string type = j.value("type", ""); !type.empty()) {
        q.type = parse_type_name(type);
        if (!q.type) throw Error(ErrorCode::kMalformedRow, "battery:" + std::to_string(line_no) + ": bad type");
      }
      out.push_back(std::move(q));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kMalformedRow, "battery:" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::vector<RecordKey> baseline_scan(std::span<const RawRecord> sources, const SearchRequest& request,
                                     const AbbreviationTable& table) {
  if (!request.has_name() && !request.has_address()) {
    throw Error(ErrorCode::kEmptyQuery, "request has neither name nor address");
  }
  std::vector<std::string> name_set = request.has_name() ? *request.name_query : std::vector<std::string>{};
  std::vector<std::string> address_set =
      request.has_address() ? *request.address_query : std::vector<std::string>{};
  make_token_set(name_set);
  make_token_set(address_set);

  std::vector<RecordKey> out;
  for (const RawRecord& raw : sources) {
    if (matches(normalize_record(raw, table), request, name_set, address_set)) out.push_back(raw.key());
  }
  std::sort(out.begin(), out.end());
  return out;
}

double QueryTiming::speedup() const noexcept {
  return indexed_ms() > 0 ? baseline_ms / indexed_ms() : 0.0;
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) return 0;
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] * (1 - frac) + values[hi] * frac;
}

BenchReport run_bench(const GlobalIndex& index, std::span<const RawRecord> sources,
                      std::span<const QuerySpec> battery, std::size_t repetitions, const AbbreviationTable& table) {
  BenchReport report;
  report.queries = battery.size();
  report.repetitions = std::max<std::size_t>(repetitions, 1);
  report.records = sources.size();
  const auto impl = kernels::active_intersect_impl();
  report.intersect_kernel = std::string(kernels::impl_name(impl));
  if (impl == kernels::IntersectImpl::kAuto) {
    report.intersect_kernel += kernels::avx2_available() ? "(avx2)" : "(scalar)";
  }

  for (std::size_t qi = 0; qi < battery.size(); ++qi) {
    const SearchRequest req = battery[qi].to_request(table);
    if (!req.has_name() && !req.has_address()) continue;

    QueryTiming t;
    t.lookup_ms = t.extract_ms = t.baseline_ms = 1e300;
    std::vector<RecordKey> indexed_keys;
    std::vector<RecordKey> baseline_keys;
    for (std::size_t rep = 0; rep < report.repetitions; ++rep) {
      auto start = Clock::now();
      ResultSet hits = index.search(req);
      t.lookup_ms = std::min(t.lookup_ms, ms_since(start));

      indexed_keys = hits.keys();
      start = Clock::now();
      ExtractResult extracted = index.extract(indexed_keys);
      t.extract_ms = std::min(t.extract_ms, ms_since(start));
      if (!extracted.unknown.empty()) {
        throw Error(ErrorCode::kBenchMismatch, "query " + std::to_string(qi) + ": hit without a stored record");
      }

      start = Clock::now();
      baseline_keys = baseline_scan(sources, req, table);
      t.baseline_ms = std::min(t.baseline_ms, ms_since(start));
    }
    if (indexed_keys != baseline_keys) {
      throw Error(ErrorCode::kBenchMismatch, "query " + std::to_string(qi) + " (name='" + battery[qi].name +
                                                 "', address='" + battery[qi].address + "'): index returned " +
                                                 std::to_string(indexed_keys.size()) + " keys, scan returned " +
                                                 std::to_string(baseline_keys.size()));
    }
    t.results = indexed_keys.size();
    report.timings.push_back(t);
  }

  std::vector<double> lookup, extract, indexed, baseline, speedup;
  for (const auto& t : report.timings) {
    lookup.push_back(t.lookup_ms);
    extract.push_back(t.extract_ms);
    indexed.push_back(t.indexed_ms());
    baseline.push_back(t.baseline_ms);
    speedup.push_back(t.speedup());
  }
  report.median_lookup_ms = percentile(lookup, 0.5);
  report.median_extract_ms = percentile(extract, 0.5);
  report.median_indexed_ms = percentile(indexed, 0.5);
  report.median_baseline_ms = percentile(baseline, 0.5);
  report.median_speedup = percentile(speedup, 0.5);
  report.p10_speedup = percentile(speedup, 0.1);
  report.p90_speedup = percentile(speedup, 0.9);
  return report;
}

std::string BenchReport::to_text() const {
  char buf[1024];
  std::snprintf(buf, sizeof buf,
                "records            %zu\n"
                "queries            %zu (best of %zu)\n"
                "intersect kernel   %s\n"
                "median lookup      %.4f ms\n"
                "median extract     %.4f ms\n"
                "median indexed     %.4f ms\n"
                "median baseline    %.4f ms\n"
                "speedup p10/50/90  %.1fx / %.1fx / %.1fx\n"
                "result equality    ok\n",
                records, timings.size(), repetitions, intersect_kernel.c_str(), median_lookup_ms, median_extract_ms,
                median_indexed_ms, median_baseline_ms, p10_speedup, median_speedup, p90_speedup);
  return buf;
}

}  // namespace cnix
