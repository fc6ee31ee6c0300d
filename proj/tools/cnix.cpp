// cnix: build, query, update and serve a cross-database customer index.

#include <CLI11.hpp>

#include <chrono>
#include <csignal>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <pthread.h>
#include <unistd.h>

#include "cnix/bench.hpp"
#include "cnix/error.hpp"
#include "cnix/generator.hpp"
#include "cnix/global_index.hpp"
#include "cnix/ingest.hpp"
#include "cnix/kernels/intersect.hpp"
#include "cnix/normalize.hpp"
#include "cnix/persist.hpp"
#include "cnix/service.hpp"

namespace fs = std::filesystem;
using namespace cnix;

namespace {

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidConfig:
      return 2;
    case ErrorCode::kDuplicateKey:
      return 3;
    case ErrorCode::kEmptyQuery:
      return 4;
    case ErrorCode::kBenchMismatch:
      return 5;
    case ErrorCode::kCorruptSnapshot:
      return 6;
    default:
      return 1;
  }
}

AbbreviationTable table_from(const std::string& path) {
  return path.empty() ? AbbreviationTable::defaults() : AbbreviationTable::load(path);
}

SourceConfig sources_from(const std::string& path) {
  if (path.empty() || !fs::exists(path)) {
    throw Error(ErrorCode::kInvalidConfig, "source config not found: " + (path.empty() ? "(none given)" : path));
  }
  return SourceConfig::load(path);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

struct Options {
  std::string sources;
  std::string snapshot;
  std::string abbrev;

  // gen
  std::string out_dir;
  GeneratorParams gen;

  // search
  std::string name;
  std::string address;
  std::string country;
  std::string type;
  bool prefix = false;
  bool machine = false;

  // update
  std::string input;
  std::string fid;

  // stats
  bool json = false;

  // serve
  std::string listen = "127.0.0.1:8080";
  long rescan_seconds = 0;

  // bench
  std::string battery;
  std::size_t queries = 500;
  std::uint64_t query_seed = 7;
  std::size_t reps = 3;
  std::string kernel = "auto";
  std::string battery_out;
};

int run_gen(const Options& o) {
  o.gen.validate();
  const auto start = std::chrono::steady_clock::now();
  GeneratedCorpus corpus = generate(o.gen, table_from(o.abbrev));
  write_corpus(corpus, o.out_dir);
  const auto& d = corpus.defects;
  std::cout << "generated " << corpus.records.size() << " records across " << corpus.fids.size() << " sources in "
            << o.out_dir << " (" << seconds_since(start) << " s)\n"
            << "defects: missing_field=" << d.missing_field << " missing_country=" << d.missing_country
            << " typo=" << d.typo << " abbreviation=" << d.abbreviation << "/" << d.abbreviation_eligible
            << " transposition=" << d.transposition << " duplicate=" << d.duplicate
            << " incoherent_address=" << d.incoherent_address << " group_member=" << d.group_member << "\n";
  return 0;
}

int run_build(const Options& o) {
  const SourceConfig config = sources_from(o.sources);
  const AbbreviationTable table = table_from(o.abbrev);
  std::vector<RawRecord> records = load_sources(config);
  const auto start = std::chrono::steady_clock::now();
  BuildReport report;
  GlobalIndex index = GlobalIndex::build(records, table, &report);
  const double indexing_s = seconds_since(start);
  if (auto aside = rotate_audit_log(o.snapshot); !aside.empty()) {
    std::cout << "previous audit log moved to " << aside.string() << "\n";
  }
  save(index, o.snapshot);
  std::cout << format_stats(index.stats());
  if (!report.unindexable.empty()) {
    std::cout << report.unindexable.size() << " record(s) stored without name or address tokens\n";
  }
  std::cout << "indexing time I = " << indexing_s << " s\n"
            << "snapshot written to " << o.snapshot << "\n";
  return 0;
}

int run_search(const Options& o) {
  std::optional<CustomerType> type;
  if (!o.type.empty()) {
    type = parse_type_name(o.type);
    if (!type) throw Error(ErrorCode::kInvalidParams, "--type must be corporate or individual");
  }
  const AbbreviationTable table = table_from(o.abbrev);
  const SearchRequest req = make_search_request(o.name, o.address, o.country, type, o.prefix, table);
  if (!req.has_name() && !req.has_address()) throw Error(ErrorCode::kEmptyQuery, "give --name and/or --address");
  const GlobalIndex index = load(o.snapshot);
  const ResultSet results = index.search(req);
  std::cout << (o.machine ? format_results_machine(index, results) : format_results_human(index, results));
  return 0;
}

int run_update(const Options& o) {
  const AbbreviationTable table = table_from(o.abbrev);
  GlobalIndex index = load(o.snapshot);
  std::vector<RawRecord> records;
  if (!o.input.empty()) {
    if (o.fid.empty()) throw Error(ErrorCode::kInvalidParams, "--input needs --fid");
    records = read_record_file(o.input, o.fid);
  } else {
    records = load_sources(sources_from(o.sources));
    std::erase_if(records, [&](const RawRecord& r) { return index.contains(r.key()); });
  }
  const UpdateReport report = index.update(records, table);
  save(index, o.snapshot);
  std::cout << "inserted " << report.inserted << ", rejected " << report.rejected.size() << "\n";
  for (const auto& r : report.rejected) std::cout << "  rejected " << to_string(r.key) << ": " << to_string(r.reason) << "\n";
  for (const auto& k : report.unindexable) std::cout << "  stored without index tokens " << to_string(k) << "\n";
  return 0;
}

int run_stats(const Options& o) {
  const GlobalIndex index = load(o.snapshot);
  const IndexStats stats = index.stats();
  if (o.json) {
    std::cout << stats_to_json(stats).dump(2) << "\n";
  } else {
    std::cout << format_stats(stats);
  }
  return 0;
}

int run_serve(const Options& o) {
  ServiceConfig config;
  config.set_listen(o.listen);
  config.snapshot_path = o.snapshot;
  if (!o.sources.empty()) config.sources_path = o.sources;
  if (!o.abbrev.empty()) config.abbreviation_path = o.abbrev;
  if (o.rescan_seconds != 0) config.rescan_interval = std::chrono::seconds(o.rescan_seconds);
  Service service(config);

  sigset_t stop_signals;
  sigemptyset(&stop_signals);
  sigaddset(&stop_signals, SIGINT);
  sigaddset(&stop_signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &stop_signals, nullptr);
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&stop_signals, &sig);
    service.stop();
  });

  std::cerr << "serving " << service.snapshot()->size() << " records on " << config.host << ":" << config.port << "\n";
  const bool ok = service.run();
  kill(getpid(), SIGTERM);  // release the waiter if the server stopped on its own
  waiter.join();
  if (!ok) throw Error(ErrorCode::kIoFailure, "could not listen on " + o.listen);
  return 0;
}

int run_bench_cmd(const Options& o) {
  if (o.kernel == "scalar") {
    kernels::force_intersect_impl(kernels::IntersectImpl::kScalar);
  } else if (o.kernel == "gallop") {
    kernels::force_intersect_impl(kernels::IntersectImpl::kGallop);
  } else if (o.kernel == "avx2") {
    if (!kernels::avx2_available()) throw Error(ErrorCode::kInvalidParams, "AVX2 is not available on this CPU");
    kernels::force_intersect_impl(kernels::IntersectImpl::kAvx2);
  }
  const AbbreviationTable table = table_from(o.abbrev);
  const std::vector<RawRecord> sources = load_sources(sources_from(o.sources));
  GlobalIndex index;
  if (!o.snapshot.empty() && fs::exists(o.snapshot)) {
    index = load(o.snapshot);
  } else {
    index = GlobalIndex::build(sources, table);
  }
  std::vector<QuerySpec> battery = o.battery.empty() ? make_query_battery(sources, o.queries, o.query_seed, table)
                                                     : parse_battery(read_file(o.battery));
  if (!o.battery_out.empty()) write_file_atomic(o.battery_out, format_battery(battery));
  const BenchReport report = run_bench(index, sources, battery, o.reps, table);
  std::cout << report.to_text();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cnix: cross-database customer identity index"};
  app.require_subcommand(1);
  Options o;

  auto add_snapshot = [&](CLI::App* cmd, bool required) {
    auto* opt = cmd->add_option("--snapshot", o.snapshot, "Index snapshot file")->envname("CNIX_SNAPSHOT");
    if (required) opt->required();
  };
  auto add_sources = [&](CLI::App* cmd, const std::string& help) {
    cmd->add_option("--sources", o.sources, help)->envname("CNIX_SOURCES");
  };
  auto add_abbrev = [&](CLI::App* cmd) {
    cmd->add_option("--abbrev", o.abbrev, "Abbreviation table (VARIANT<TAB>CANONICAL); built-in table if omitted")
        ->envname("CNIX_ABBREV");
  };

  auto* gen = app.add_subcommand("gen", "Generate a synthetic dirty corpus with ground truth");
  gen->add_option("--out", o.out_dir, "Output directory")->required();
  gen->add_option("--count", o.gen.count, "Number of records")->capture_default_str();
  gen->add_option("--num-sources", o.gen.sources, "Number of logical sources (FIDs)")->capture_default_str();
  gen->add_option("--seed", o.gen.seed, "RNG seed")->capture_default_str();
  gen->add_option("--corporate-fraction", o.gen.corporate_fraction, "Share of corporate customers")
      ->capture_default_str();
  gen->add_option("--missing-field-rate", o.gen.missing_field_rate)->capture_default_str();
  gen->add_option("--missing-country-rate", o.gen.missing_country_rate)->capture_default_str();
  gen->add_option("--typo-rate", o.gen.typo_rate)->capture_default_str();
  gen->add_option("--abbreviation-rate", o.gen.abbreviation_rate)->capture_default_str();
  gen->add_option("--transposition-rate", o.gen.transposition_rate)->capture_default_str();
  gen->add_option("--duplicate-rate", o.gen.duplicate_rate)->capture_default_str();
  gen->add_option("--incoherent-address-rate", o.gen.incoherent_address_rate)->capture_default_str();
  gen->add_option("--group-expansion", o.gen.group_expansion, "Chance a corporate name extends an existing group")
      ->capture_default_str();
  add_abbrev(gen);

  auto* build = app.add_subcommand("build", "Index every configured source and write a snapshot");
  add_sources(build, "Source config (FID<TAB>PATH per line)");
  add_abbrev(build);
  add_snapshot(build, true);

  auto* search = app.add_subcommand("search", "Search a snapshot by name and/or address");
  add_snapshot(search, true);
  add_abbrev(search);
  search->add_option("--name", o.name, "Customer or company name");
  search->add_option("--address", o.address, "Address words");
  search->add_option("--country", o.country, "Restrict to one country (UNKNOWN-country records always searched)");
  search->add_option("--type", o.type, "corporate or individual");
  search->add_flag("--prefix", o.prefix, "Match company names by word prefix");
  search->add_flag("--machine", o.machine, "One '|' separated line per result");

  auto* update = app.add_subcommand("update", "Add new customers to a snapshot");
  add_snapshot(update, true);
  add_abbrev(update);
  add_sources(update, "Source config; records with unseen keys are added");
  update->add_option("--input", o.input, "A single export file instead of the source config");
  update->add_option("--fid", o.fid, "FID of the --input file");

  auto* stats = app.add_subcommand("stats", "Print index statistics");
  add_snapshot(stats, true);
  stats->add_flag("--json", o.json, "JSON output");

  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  add_snapshot(serve, true);
  add_sources(serve, "Source config, for building a missing snapshot and rescans");
  add_abbrev(serve);
  serve->add_option("--listen", o.listen, "host:port")->capture_default_str();
  serve->add_option("--rescan-interval", o.rescan_seconds, "Seconds between source rescans (0 = off)");

  auto* bench = app.add_subcommand("bench", "Time indexed search against a linear scan of the sources");
  add_sources(bench, "Source config (the raw records the baseline scans)");
  add_snapshot(bench, false);
  add_abbrev(bench);
  bench->add_option("--battery", o.battery, "Query battery (JSON Lines); generated if omitted");
  bench->add_option("--queries", o.queries, "Size of a generated battery")->capture_default_str();
  bench->add_option("--query-seed", o.query_seed, "Seed of a generated battery")->capture_default_str();
  bench->add_option("--reps", o.reps, "Repetitions per query (best is kept)")->capture_default_str();
  bench->add_option("--kernel", o.kernel, "Postings intersection: auto, scalar, gallop, avx2")
      ->check(CLI::IsMember({"auto", "scalar", "gallop", "avx2"}))
      ->capture_default_str();
  bench->add_option("--write-battery", o.battery_out, "Save the battery used");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) return run_gen(o);
    if (*build) return run_build(o);
    if (*search) return run_search(o);
    if (*update) return run_update(o);
    if (*stats) return run_stats(o);
    if (*serve) return run_serve(o);
    if (*bench) return run_bench_cmd(o);
  } catch (const Error& e) {
    std::cerr << "cnix: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "cnix: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
