#include <gtest/gtest.h>

#include <httplib.h>

#include <thread>

#include "cnix/ingest.hpp"
#include "cnix/persist.hpp"
#include "cnix/service.hpp"
#include "fixtures.hpp"
#include "test_util.hpp"

using namespace cnix;
using nlohmann::json;

namespace {

ServiceConfig config_in(const TempDir& dir) {
  ServiceConfig c;
  c.snapshot_path = dir / "idx.cnix";
  return c;
}

json body(const ServiceResponse& r) { return json::parse(r.body); }

}  // namespace

TEST(Service, SearchMatchesPrefixExample) {
  TempDir dir;
  Service s(config_in(dir), GlobalIndex::build(fixtures::company_tree_records(), AbbreviationTable::defaults()),
            AbbreviationTable::defaults());
  auto r = s.handle("POST", "/v1/search", R"({"name":"ABC CAPITAL","type":"corporate","prefix":true})");
  ASSERT_EQ(r.status, 200) << r.body;
  auto j = body(r);
  EXPECT_EQ(j["count"], 2);
  EXPECT_EQ(j["results"][0]["fid"], "Abba");
  EXPECT_EQ(j["results"][0]["cid"], "566");
  EXPECT_EQ(j["results"][1]["record"]["company_name"], "ABC CAPITAL GROUP");
  EXPECT_EQ(j["results"][1]["matched"], json::array({"name"}));
}

TEST(Service, AgreesWithLibrarySearch) {
  TempDir dir;
  const auto table = AbbreviationTable::defaults();
  auto index = GlobalIndex::build(fixtures::inverted_list_records(), table);
  const auto expected = index.search(make_search_request("John Smith", "Sunset", "", std::nullopt, false, table));
  Service s(config_in(dir), index, table);
  auto j = body(s.handle("POST", "/v1/search", R"({"name":"John Smith","address":"Sunset"})"));
  ASSERT_EQ(j["count"], expected.size());
  EXPECT_EQ(j["results"][0]["fid"], "Abba");
  EXPECT_EQ(j["results"][0]["cid"], "1234");
}

TEST(Service, UpdateReportsRejectionsAndSaves) {
  TempDir dir;
  Service s(config_in(dir), GlobalIndex::build(fixtures::company_tree_records(), AbbreviationTable::defaults()),
            AbbreviationTable::defaults());
  auto r = s.handle("POST", "/v1/update",
                    R"({"records":[{"fid":"Abba","cid":"566","type":"C","company_name":"CLASH LTD"},
                                   {"fid":"Gale","cid":"9","type":"I","first_name":"Ann","last_name":"Lee"}]})");
  ASSERT_EQ(r.status, 200) << r.body;
  auto j = body(r);
  EXPECT_EQ(j["inserted"], 1);
  ASSERT_EQ(j["rejected"].size(), 1u);
  EXPECT_EQ(j["rejected"][0]["cid"], "566");
  EXPECT_EQ(j["rejected"][0]["reason"], "DuplicateKey");
  EXPECT_EQ(load(dir / "idx.cnix").size(), 10u);
}

TEST(Service, StatsOfEmptyIndex) {
  TempDir dir;
  Service s(config_in(dir), GlobalIndex{}, AbbreviationTable::defaults());
  auto j = body(s.handle("GET", "/v1/stats", ""));
  EXPECT_EQ(j["records"], 0);
  EXPECT_EQ(j["partitions"], 0);
  EXPECT_EQ(j["tokens"], 0);
  EXPECT_TRUE(j["per_partition"].empty());
}

TEST(Service, BadRequestsGetErrorsNotCrashes) {
  TempDir dir;
  Service s(config_in(dir), GlobalIndex{}, AbbreviationTable::defaults());
  struct Case {
    const char* method;
    const char* path;
    const char* body;
    int status;
  };
  for (const Case& c : {Case{"POST", "/v1/search", "{not json", 400}, Case{"POST", "/v1/search", "{}", 400},
                        Case{"POST", "/v1/search", R"({"name": 5})", 400},
                        Case{"POST", "/v1/search", R"({"name":"x","type":"company"})", 400},
                        Case{"POST", "/v1/search", "[]", 400}, Case{"POST", "/v1/update", R"({"records":7})", 400},
                        Case{"POST", "/v1/update", R"({"records":[{"fid":"A","cid":"1","type":"Z"}]})", 400},
                        Case{"GET", "/v1/search", "", 405}, Case{"GET", "/nowhere", "", 404}}) {
    auto r = s.handle(c.method, c.path, c.body);
    EXPECT_EQ(r.status, c.status) << c.path << " " << c.body;
    EXPECT_TRUE(body(r).contains("error"));
  }
  auto empty = body(s.handle("POST", "/v1/search", "{}"));
  EXPECT_EQ(empty["error"], "EmptyQuery");
  EXPECT_EQ(s.handle("GET", "/v1/health", "").status, 200);
}

TEST(Service, SaveEndpointWritesSnapshot) {
  TempDir dir;
  Service s(config_in(dir), GlobalIndex::build(fixtures::company_tree_records(), AbbreviationTable::defaults()),
            AbbreviationTable::defaults());
  EXPECT_EQ(s.handle("POST", "/v1/save", "").status, 200);
  EXPECT_EQ(load(dir / "idx.cnix").size(), 9u);
}

TEST(Service, ConfigValidation) {
  TempDir dir;
  ServiceConfig c = config_in(dir);
  EXPECT_THROW(c.validate(), Error);  // no snapshot and no sources
  write_file_atomic(dir / "idx.cnix", encode_snapshot(GlobalIndex{}));
  EXPECT_NO_THROW(c.validate());
  c.rescan_interval = std::chrono::seconds(0);
  EXPECT_THROW(c.validate(), Error);
  c.rescan_interval = std::chrono::seconds(5);
  EXPECT_THROW(c.validate(), Error);  // rescans need sources
  c.rescan_interval.reset();
  c.abbreviation_path = dir / "missing.tsv";
  EXPECT_THROW(c.validate(), Error);
  c.abbreviation_path.reset();
  c.set_listen("0.0.0.0:9000");
  EXPECT_EQ(c.host, "0.0.0.0");
  EXPECT_EQ(c.port, 9000);
  c.set_listen(":81");
  EXPECT_EQ(c.port, 81);
  EXPECT_THROW(c.set_listen("nohost"), Error);
  EXPECT_THROW(c.set_listen("h:x1"), Error);
}

TEST(Service, BuildsMissingSnapshotAndRescans) {
  TempDir dir;
  write_file_atomic(dir / "a.txt", format_records(std::vector<RawRecord>{fixtures::corporate("A", "1", "ACME LTD")}));
  write_file_atomic(dir / "src.cfg", "A\ta.txt\n");
  ServiceConfig c = config_in(dir);
  c.sources_path = dir / "src.cfg";
  Service s(c);
  EXPECT_EQ(s.snapshot()->size(), 1u);
  EXPECT_TRUE(std::filesystem::exists(dir / "idx.cnix"));
  EXPECT_EQ(s.rescan().inserted, 0u);
  write_file_atomic(dir / "a.txt", format_records(std::vector<RawRecord>{fixtures::corporate("A", "1", "ACME LTD"),
                                                                         fixtures::corporate("A", "2", "ACME LIMITED")}));
  EXPECT_EQ(s.rescan().inserted, 1u);
  auto j = body(s.handle("POST", "/v1/search", R"({"name":"acme ltd"})"));
  EXPECT_EQ(j["count"], 2);
  EXPECT_EQ(load(dir / "idx.cnix").size(), 2u);
}

TEST(Service, ServesHttp) {
  TempDir dir;
  ServiceConfig c = config_in(dir);
  c.port = 0;
  Service s(c, GlobalIndex::build(fixtures::company_tree_records(), AbbreviationTable::defaults()),
            AbbreviationTable::defaults());
  std::thread server([&] { s.run(); });
  for (int i = 0; i < 200 && s.bound_port() == 0; ++i) std::this_thread::sleep_for(std::chrono::milliseconds(10));
  ASSERT_NE(s.bound_port(), 0);
  httplib::Client client("127.0.0.1", s.bound_port());
  auto health = client.Get("/v1/health");
  ASSERT_TRUE(health);
  EXPECT_EQ(health->status, 200);
  auto res = client.Post("/v1/search", R"({"name":"ABC CAPITAL","prefix":true})", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(json::parse(res->body)["count"], 2);
  auto bad = client.Post("/v1/search", "garbage", "application/json");
  ASSERT_TRUE(bad);
  EXPECT_EQ(bad->status, 400);
  EXPECT_EQ(client.Get("/v1/health")->status, 200);
  s.stop();
  server.join();
}

TEST(Service, RescanThreadPicksUpNewRecords) {
  TempDir dir;
  write_file_atomic(dir / "a.txt", format_records(std::vector<RawRecord>{fixtures::corporate("A", "1", "ACME LTD")}));
  write_file_atomic(dir / "src.cfg", "A\ta.txt\n");
  ServiceConfig c = config_in(dir);
  c.sources_path = dir / "src.cfg";
  c.rescan_interval = std::chrono::seconds(1);
  c.port = 0;
  Service s(c);
  std::thread server([&] { s.run(); });
  write_file_atomic(dir / "a.txt", format_records(std::vector<RawRecord>{fixtures::corporate("A", "1", "ACME LTD"),
                                                                         fixtures::corporate("A", "2", "ACME CORP")}));
  for (int i = 0; i < 400 && s.snapshot()->size() < 2; ++i) std::this_thread::sleep_for(std::chrono::milliseconds(10));
  EXPECT_EQ(s.snapshot()->size(), 2u);
  s.stop();
  server.join();
}

TEST(Format, MachineOutputIsOneLinePerResult) {
  const auto table = AbbreviationTable::defaults();
  auto index = GlobalIndex::build(fixtures::company_tree_records(), table);
  auto results = index.search(make_search_request("ABC CAPITAL", "", "", CustomerType::kCorporate, true, table));
  EXPECT_EQ(format_results_machine(index, results),
            "Abba|566|name|C|||ABC CAPITAL NEW YORK BRANCH|||||US\n"
            "Skada|B123|name|C|||ABC CAPITAL GROUP|||||US\n");
  const auto human = format_results_human(index, results);
  EXPECT_EQ(human.rfind("2 results\n", 0), 0u);
  EXPECT_LT(human.find("{Abba, 566}"), human.find("company:"));
  EXPECT_EQ(format_results_human(index, ResultSet{}), "0 results\n");
}

TEST(Format, RecordJsonRoundTrip) {
  RawRecord r = fixtures::individual("A", "1", "John", "Smith", "1 Quay");
  r.customer_type = CustomerType::kJoint;
  EXPECT_EQ(record_from_json(record_to_json(r)), r);
  EXPECT_THROW(record_from_json(json::array()), Error);
}
