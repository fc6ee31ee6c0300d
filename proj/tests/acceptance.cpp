// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <array>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <sys/wait.h>

#include "cnix/bench.hpp"
#include "cnix/error.hpp"
#include "cnix/generator.hpp"
#include "cnix/global_index.hpp"
#include "cnix/ingest.hpp"
#include "cnix/persist.hpp"
#include "cnix/service.hpp"
#include "fixtures.hpp"
#include "oracle.hpp"
#include "test_util.hpp"

using namespace cnix;
using Keys = std::vector<RecordKey>;
using Clock = std::chrono::steady_clock;

namespace {

constexpr double kMinSpeedup = 5.0;
constexpr double kMaxLookupMs = 10.0;
constexpr double kMaxBuildSeconds = 17.0;
constexpr double kMaxOracleSeconds = 300.0;
constexpr std::size_t kFullCorpus = 32000;
constexpr std::size_t kFullSources = 16;
constexpr std::size_t kBatterySize = 500;

const AbbreviationTable& table() {
  static const AbbreviationTable t = AbbreviationTable::defaults();
  return t;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::vector<RecordKey> keys_of(const Partition& p, std::span<const DocId> docs, const GlobalIndex& index) {
  (void)p;
  Keys out;
  for (DocId d : docs) out.push_back(index.records()[d].key());
  std::sort(out.begin(), out.end());
  return out;
}

std::string join_keys(const Keys& keys) {
  std::string s;
  for (const auto& k : keys) s += (s.empty() ? "" : ",") + to_string(k);
  return "[" + s + "]";
}

// 1. Company-name tree example.
Outcome company_tree() {
  auto index = GlobalIndex::build(fixtures::company_tree_records(), table());
  std::ostringstream why;
  bool ok = index.partitions().size() == 1;
  const auto& tree = index.partitions()[0].company_names;
  const auto& dict = index.dictionary();

  SearchRequest exact;
  exact.name_query = std::vector<std::string>{"ABC", "CAPITAL", "GROUP"};
  exact.customer_type = CustomerType::kCorporate;
  const Keys exact_keys = index.search(exact).keys();
  ok &= exact_keys == Keys{{"Skada", "B123"}};
  why << "exact=" << join_keys(exact_keys);

  SearchRequest prefix = exact;
  prefix.name_query = std::vector<std::string>{"ABC", "CAPITAL"};
  prefix.prefix_mode = true;
  const Keys prefix_keys = index.search(prefix).keys();
  ok &= prefix_keys == (Keys{{"Abba", "566"}, {"Skada", "B123"}});
  why << " prefix=" << join_keys(prefix_keys);

  std::vector<std::string> root;
  for (const auto& e : tree.root()->elements) root.emplace_back(dict.text(e.token));
  ok &= root == std::vector<std::string>{"ABC", "BANK", "FIRST", "INTERNATIONAL"};
  why << " root=";
  for (const auto& w : root) why << w << (w == root.back() ? "" : ",");

  std::vector<TokenId> shared;
  for (const auto& w : normalize_text("FIRST AMERICA BANK LTD TRUST ACCOUNT TA 101010", table())) {
    shared.push_back(*dict.find(w));
  }
  const Keys shared_keys = keys_of(index.partitions()[0], tree.search_exact(shared, dict), index);
  ok &= shared_keys == (Keys{{"Abba", "392"}, {"Merlu", "1024"}});
  why << " TA 101010=" << join_keys(shared_keys);
  ok &= tree.enumerate().size() == 8;
  return {ok, why.str()};
}

// 2. Customer-name and address tables.
Outcome inverted_lists() {
  auto index = GlobalIndex::build(fixtures::inverted_list_records(), table());
  const auto& dict = index.dictionary();
  if (index.partitions().size() != 1) return {false, "expected one partition"};
  const Partition& p = index.partitions()[0];
  auto table_of = [&](const PostingsIndex& idx) {
    std::vector<std::pair<std::string, Keys>> rows;
    for (TokenId t : idx.items(dict)) rows.emplace_back(std::string(dict.text(t)), keys_of(p, idx.postings(t), index));
    return rows;
  };
  using Rows = std::vector<std::pair<std::string, Keys>>;
  const Rows names = table_of(p.customer_names);
  const Rows addresses = table_of(p.addresses);
  const Rows want_names{{"JOHN", {{"Abba", "1234"}, {"Merlu", "112"}}},
                        {"MURPHY", {{"Merlu", "112"}}},
                        {"SMITH", {{"Abba", "1234"}}}};
  const Rows want_addresses{{"123", {{"Abba", "1234"}, {"Skada", "347"}}},
                            {"AVENUE", {{"Merlu", "112"}}},
                            {"SUNSET", {{"Abba", "1234"}}}};
  const std::vector<TokenId> q{*dict.find("JOHN"), *dict.find("SMITH")};
  const Keys both = keys_of(p, p.customer_names.query_all(q), index);
  const bool ok = names == want_names && addresses == want_addresses && both == Keys{{"Abba", "1234"}};
  std::ostringstream why;
  why << "name rows=" << names.size() << " address rows=" << addresses.size()
      << " tables " << (names == want_names && addresses == want_addresses ? "match" : "differ")
      << " query_all(JOHN,SMITH)=" << join_keys(both);
  return {ok, why.str()};
}

// 3. Index against the brute-force scan on many small corpora.
Outcome master_oracle() {
  const auto start = Clock::now();
  std::mt19937_64 knobs(2024);
  std::uniform_real_distribution<double> rate(0.0, 0.3);
  std::size_t queries = 0, nonempty = 0, corpora = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    GeneratorParams p;
    p.seed = seed;
    p.count = 200 + knobs() % 1801;  // 200..2000
    p.sources = 1 + knobs() % 16;
    p.corporate_fraction = 0.2 + 0.6 * std::uniform_real_distribution<double>(0, 1)(knobs);
    p.missing_field_rate = rate(knobs);
    p.missing_country_rate = rate(knobs) / 3;
    p.typo_rate = rate(knobs);
    p.abbreviation_rate = rate(knobs) * 3;
    p.transposition_rate = rate(knobs);
    p.duplicate_rate = rate(knobs);
    p.incoherent_address_rate = rate(knobs);
    p.group_expansion = rate(knobs) * 2;
    const auto records = generate(p, table()).records;
    const auto normalized = oracle::normalize_all(records, table());
    const auto index = GlobalIndex::build(records, table());
    oracle::RequestGenerator gen(records, table(), seed * 7919);
    for (int i = 0; i < 500; ++i) {
      const SearchRequest req = gen.next();
      const auto want = oracle::search(normalized, req);
      const auto got = index.search(req);
      if (got.matches != want) {
        return {false, "seed " + std::to_string(seed) + " query " + std::to_string(i) + ": index " +
                           std::to_string(got.size()) + " hits, scan " + std::to_string(want.size())};
      }
      ++queries;
      nonempty += !want.empty();
    }
    ++corpora;
  }
  const double elapsed = seconds_since(start);
  std::ostringstream why;
  why << corpora << " corpora, " << queries << " queries (" << nonempty << " non-empty), 0 differences, "
      << elapsed << " s (budget " << kMaxOracleSeconds << " s)";
  return {elapsed < kMaxOracleSeconds, why.str()};
}

struct FullCorpus {
  TempDir dir;
  GeneratorParams params;
  std::vector<RawRecord> records;
  double load_seconds = 0;
};

FullCorpus& full_corpus() {
  static FullCorpus fc;
  if (fc.records.empty()) {
    fc.params.count = kFullCorpus;
    fc.params.sources = kFullSources;
    write_corpus(generate(fc.params, table()), fc.dir.path());
    const auto start = Clock::now();
    fc.records = load_sources(SourceConfig::load(fc.dir / "sources.cfg"));
    fc.load_seconds = seconds_since(start);
  }
  return fc;
}

std::string describe_params(const GeneratorParams& p) {
  std::ostringstream s;
  s << "corpus: " << p.count << " records, " << p.sources << " sources, seed " << p.seed
    << ", corporate " << p.corporate_fraction << ", rates missing_field " << p.missing_field_rate
    << " missing_country " << p.missing_country_rate << " typo " << p.typo_rate << " abbreviation "
    << p.abbreviation_rate << " transposition " << p.transposition_rate << " duplicate " << p.duplicate_rate
    << " incoherent " << p.incoherent_address_rate << " group_expansion " << p.group_expansion;
  return s.str();
}

// 4. Indexed search against the linear scan at full size.
Outcome speedup() {
  auto& c = full_corpus();
  const auto index = GlobalIndex::build(c.records, table());
  const auto battery = make_query_battery(c.records, kBatterySize, 11, table());
  try {
    const BenchReport r = run_bench(index, c.records, battery, 1, table());
    std::cout << describe_params(c.params) << "\n" << r.to_text();
    std::ostringstream why;
    why << r.timings.size() << " queries, results identical, median speedup " << r.median_speedup << "x (need >= "
        << kMinSpeedup << "), median lookup " << r.median_lookup_ms << " ms (need <= " << kMaxLookupMs << ")";
    return {r.timings.size() == kBatterySize && r.median_speedup >= kMinSpeedup && r.median_lookup_ms <= kMaxLookupMs,
            why.str()};
  } catch (const Error& e) {
    return {false, e.what()};
  }
}

// 5. Build time at full size.
Outcome build_time() {
  auto& c = full_corpus();
  const auto start = Clock::now();
  const auto index = GlobalIndex::build(c.records, table());
  const double seconds = seconds_since(start);
  std::ostringstream why;
  why << index.size() << " records indexed in " << seconds << " s (need <= " << kMaxBuildSeconds
      << "); reading the 16 sources took " << c.load_seconds << " s";
  return {index.size() == kFullCorpus && seconds <= kMaxBuildSeconds, why.str()};
}

// 6. Snapshot round trip and truncation.
Outcome persistence() {
  auto& c = full_corpus();
  const auto index = GlobalIndex::build(c.records, table());
  TempDir dir;
  const auto path = dir / "idx.cnix";
  save(index, path);
  const auto back = load(path);
  const auto battery = make_query_battery(c.records, kBatterySize, 12, table());
  std::size_t same = 0;
  for (const auto& q : battery) {
    const auto req = q.to_request(table());
    same += back.search(req) == index.search(req);
  }
  const bool stats_equal = back.stats() == index.stats();
  const std::string bytes = read_file(path);
  std::size_t rejected = 0, tried = 0;
  for (std::size_t cut : {std::size_t{0}, std::size_t{3}, std::size_t{5}, bytes.size() / 3, bytes.size() / 2,
                          bytes.size() - 5, bytes.size() - 1}) {
    ++tried;
    write_file_atomic(dir / "cut.cnix", std::string_view(bytes).substr(0, cut));
    try {
      load(dir / "cut.cnix");
    } catch (const Error& e) {
      rejected += e.code() == ErrorCode::kCorruptSnapshot;
    }
  }
  std::ostringstream why;
  why << same << "/" << battery.size() << " queries identical, stats " << (stats_equal ? "equal" : "differ")
      << ", " << rejected << "/" << tried << " truncations rejected as CorruptSnapshot, snapshot " << bytes.size()
      << " bytes";
  return {same == battery.size() && stats_equal && rejected == tried, why.str()};
}

// 7. build(A) + update(B) against build(A and B).
Outcome incremental() {
  std::mt19937_64 rng(77);
  std::size_t checked = 0;
  for (int split = 0; split < 20; ++split) {
    GeneratorParams p;
    p.count = 1500;
    p.seed = 1000 + static_cast<std::uint64_t>(split);
    auto records = generate(p, table()).records;
    std::shuffle(records.begin(), records.end(), rng);
    const auto cut = static_cast<long>(rng() % (records.size() + 1));
    const std::vector<RawRecord> a(records.begin(), records.begin() + cut);
    const std::vector<RawRecord> b(records.begin() + cut, records.end());
    auto inc = GlobalIndex::build(a, table());
    const auto report = inc.update(b, table());
    const auto batch = GlobalIndex::build(records, table());
    if (report.inserted != b.size()) return {false, "split " + std::to_string(split) + ": update rejected records"};
    for (const auto& q : make_query_battery(records, kBatterySize, p.seed, table())) {
      const auto req = q.to_request(table());
      if (!(inc.search(req) == batch.search(req))) {
        return {false, "split " + std::to_string(split) + " differs on name='" + q.name + "' address='" + q.address + "'"};
      }
      ++checked;
    }
  }
  return {true, "20 splits, " + std::to_string(checked) + " queries, 0 differences"};
}

std::string run_cli(const std::string& args) {
  FILE* pipe = popen((std::string(CNIX_BIN) + " " + args + " 2>/dev/null").c_str(), "r");
  std::string out;
  std::array<char, 4096> buf;
  while (std::size_t n = fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
  pclose(pipe);
  return out;
}

// 8. Generator bytes and machine output are reproducible.
Outcome determinism() {
  TempDir a, b;
  GeneratorParams p;
  p.count = 5000;
  p.seed = 42;
  write_corpus(generate(p, table()), a.path());
  write_corpus(generate(p, table()), b.path());
  std::size_t files = 0, identical = 0;
  for (const auto& e : std::filesystem::directory_iterator(a.path())) {
    ++files;
    identical += read_file(e.path()) == read_file(b.path() / e.path().filename());
  }

  const auto records = load_sources(SourceConfig::load(a / "sources.cfg"));
  const auto snap = a / "idx.cnix";
  save(GlobalIndex::build(records, table()), snap);
  const auto first = load(snap);
  const auto second = load(snap);
  std::size_t stable = 0;
  const auto battery = make_query_battery(records, 200, 3, table());
  for (const auto& q : battery) {
    const auto req = q.to_request(table());
    stable += format_results_machine(first, first.search(req)) == format_results_machine(second, second.search(req));
  }
  const std::string cli_args = "search --snapshot '" + snap.string() + "' --name '" + battery[0].name +
                               "' --address '" + battery[0].address + "' --machine";
  const bool cli_stable = run_cli(cli_args) == run_cli(cli_args);

  std::ostringstream why;
  why << identical << "/" << files << " generated files identical, " << stable << "/" << battery.size()
      << " machine outputs identical, CLI output " << (cli_stable ? "identical" : "differs");
  return {files == p.sources + 2 && identical == files && stable == battery.size() && cli_stable, why.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"company-name tree example", company_tree},
      {"customer-name and address tables", inverted_lists},
      {"index equals brute-force scan", master_oracle},
      {"speedup over linear scan", speedup},
      {"indexing time", build_time},
      {"snapshot round trip", persistence},
      {"incremental equals batch", incremental},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = Clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("criterion %zu %s: %s: %s (%.1f s)\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                o.detail.c_str(), seconds_since(start));
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
