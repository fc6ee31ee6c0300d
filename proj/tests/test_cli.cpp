#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <sys/wait.h>

#include "cnix/generator.hpp"
#include "cnix/ingest.hpp"
#include "fixtures.hpp"
#include "test_util.hpp"

using namespace cnix;

namespace {

struct Run {
  int status = -1;
  std::string out;
};

Run cli(const std::string& args) {
  const std::string cmd = std::string(CNIX_BIN) + " " + args + " 2>&1";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf;
  while (std::size_t n = fread(buf.data(), 1, buf.size(), pipe)) r.out.append(buf.data(), n);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string q(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

// Writes the two example record sets as three sources.
std::filesystem::path example_sources(const TempDir& dir) {
  std::map<std::string, std::vector<RawRecord>> by_fid;
  auto records = fixtures::company_tree_records();
  auto people = fixtures::inverted_list_records();
  records.insert(records.end(), people.begin(), people.end());
  for (const auto& r : records) by_fid[r.fid].push_back(r);
  std::string cfg;
  for (const auto& [fid, rows] : by_fid) {
    write_file_atomic(dir / (fid + ".txt"), format_records(rows));
    cfg += fid + "\t" + fid + ".txt\n";
  }
  write_file_atomic(dir / "sources.cfg", cfg);
  return dir / "sources.cfg";
}

}  // namespace

TEST(Cli, BuildAndSearchExamples) {
  TempDir dir;
  const auto cfg = example_sources(dir);
  const auto snap = dir / "idx.cnix";
  auto build = cli("build --sources " + q(cfg) + " --snapshot " + q(snap));
  ASSERT_EQ(build.status, 0) << build.out;
  EXPECT_NE(build.out.find("indexing time I ="), std::string::npos);
  EXPECT_NE(build.out.find("records      12"), std::string::npos) << build.out;

  auto prefix = cli("search --snapshot " + q(snap) + " --type corporate --name 'ABC CAPITAL' --prefix --machine");
  EXPECT_EQ(prefix.status, 0);
  EXPECT_EQ(prefix.out,
            "Abba|566|name|C|||ABC CAPITAL NEW YORK BRANCH|||||US\n"
            "Skada|B123|name|C|||ABC CAPITAL GROUP|||||US\n");

  auto person = cli("search --snapshot " + q(snap) + " --name 'John Smith' --address Sunset --machine");
  EXPECT_EQ(person.status, 0);
  EXPECT_EQ(person.out, "Abba|1234|name+address|I|John|Smith||123 Sunset||||IE\n");

  auto human = cli("search --snapshot " + q(snap) + " --name 'John Smith' --address Sunset");
  EXPECT_EQ(human.out.rfind("1 result\n", 0), 0u) << human.out;
}

TEST(Cli, ExitCodes) {
  TempDir dir;
  const auto cfg = example_sources(dir);
  const auto snap = dir / "idx.cnix";
  ASSERT_EQ(cli("build --sources " + q(cfg) + " --snapshot " + q(snap)).status, 0);

  auto missing = cli("build --sources " + q(dir / "nope.cfg") + " --snapshot " + q(snap));
  EXPECT_EQ(missing.status, 2);
  EXPECT_NE(missing.out.find("source config not found"), std::string::npos);

  // Every Abba row appears twice.
  const std::string twice = read_file(dir / "Abba.txt") + read_file(dir / "Abba.txt").substr(kRecordHeader.size() + 1);
  write_file_atomic(dir / "twice.txt", twice);
  write_file_atomic(dir / "dup.cfg", "Abba\ttwice.txt\n");
  auto dup = cli("build --sources " + q(dir / "dup.cfg") + " --snapshot " + q(dir / "dup.cnix"));
  EXPECT_EQ(dup.status, 3);
  EXPECT_NE(dup.out.find("{Abba, 566}"), std::string::npos) << dup.out;
  EXPECT_NE(dup.out.find("{Abba, 1234}"), std::string::npos) << dup.out;

  auto empty = cli("search --snapshot " + q(snap));
  EXPECT_EQ(empty.status, 4);
  EXPECT_EQ(cli("search --snapshot " + q(snap) + " --name ' ;, '").status, 4);

  auto miss = cli("search --snapshot " + q(snap) + " --name 'NOBODY AT ALL'");
  EXPECT_EQ(miss.status, 0);
  EXPECT_EQ(miss.out, "0 results\n");

  write_file_atomic(dir / "bad.cnix", read_file(snap).substr(0, 40));
  auto corrupt = cli("search --snapshot " + q(dir / "bad.cnix") + " --name x");
  EXPECT_EQ(corrupt.status, 6);
  EXPECT_NE(corrupt.out.find("CorruptSnapshot"), std::string::npos);
}

TEST(Cli, EnvironmentSuppliesPaths) {
  TempDir dir;
  const auto cfg = example_sources(dir);
  const std::string env = "CNIX_SOURCES=" + q(cfg) + " CNIX_SNAPSHOT=" + q(dir / "env.cnix") + " ";
  const std::string cmd = "env " + env + CNIX_BIN + " build >/dev/null 2>&1";
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  EXPECT_TRUE(std::filesystem::exists(dir / "env.cnix"));
}

TEST(Cli, UpdateStatsAndBench) {
  TempDir dir;
  const auto cfg = example_sources(dir);
  const auto snap = dir / "idx.cnix";
  ASSERT_EQ(cli("build --sources " + q(cfg) + " --snapshot " + q(snap)).status, 0);
  write_file_atomic(dir / "new.txt",
                    format_records(std::vector<RawRecord>{fixtures::corporate("Gale", "1", "ABC CAPITAL LEASING"),
                                                          fixtures::corporate("Gale", "2", "ZETA CO")}));
  auto upd = cli("update --snapshot " + q(snap) + " --input " + q(dir / "new.txt") + " --fid Gale");
  EXPECT_EQ(upd.status, 0) << upd.out;
  EXPECT_NE(upd.out.find("inserted 2, rejected 0"), std::string::npos);
  auto again = cli("update --snapshot " + q(snap) + " --input " + q(dir / "new.txt") + " --fid Gale");
  EXPECT_NE(again.out.find("rejected {Gale, 1}: DuplicateKey"), std::string::npos) << again.out;
  EXPECT_TRUE(std::filesystem::exists(dir / "idx.cnix.audit"));

  auto found = cli("search --snapshot " + q(snap) + " --name 'ABC CAPITAL' --prefix --machine");
  EXPECT_EQ(std::count(found.out.begin(), found.out.end(), '\n'), 3);

  auto stats = cli("stats --snapshot " + q(snap) + " --json");
  EXPECT_EQ(stats.status, 0);
  EXPECT_NE(stats.out.find("\"records\": 14"), std::string::npos) << stats.out;

  auto bench = cli("bench --sources " + q(cfg) + " --queries 20 --reps 1");
  EXPECT_EQ(bench.status, 0) << bench.out;
  EXPECT_NE(bench.out.find("result equality    ok"), std::string::npos);
  // The snapshot now holds records the sources lack, so the two paths disagree.
  write_file_atomic(dir / "b.jsonl", "{\"name\":\"ABC CAPITAL\",\"prefix\":true}\n");
  auto mismatch = cli("bench --sources " + q(cfg) + " --snapshot " + q(snap) + " --battery " + q(dir / "b.jsonl"));
  EXPECT_EQ(mismatch.status, 5) << mismatch.out;
}

TEST(Cli, GenIsDeterministic) {
  TempDir dir;
  ASSERT_EQ(cli("gen --out " + q(dir / "a") + " --count 500 --seed 4").status, 0);
  ASSERT_EQ(cli("gen --out " + q(dir / "b") + " --count 500 --seed 4").status, 0);
  for (const auto& e : std::filesystem::directory_iterator(dir / "a")) {
    EXPECT_EQ(read_file(e.path()), read_file(dir / "b" / e.path().filename()));
  }
  EXPECT_NE(cli("gen --out " + q(dir / "c") + " --count 10 --typo-rate 2").status, 0);
  EXPECT_NE(cli("--help").out.find("bench"), std::string::npos);
}
