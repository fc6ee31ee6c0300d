#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "cnix/error.hpp"
#include "cnix/inverted_index.hpp"
#include "cnix/token_dictionary.hpp"

using namespace cnix;

namespace {

std::vector<TokenId> ids(TokenDictionary& dict, std::initializer_list<const char*> words) {
  std::vector<TokenId> out;
  for (const char* w : words) out.push_back(dict.intern(w));
  return out;
}

std::vector<DocId> list(std::span<const DocId> s) { return {s.begin(), s.end()}; }

}  // namespace

// Doc 0 = {Abba, 1234}, doc 1 = {Merlu, 112}, doc 2 = {Skada, 347}.
TEST(PostingsIndex, CustomerNameTable) {
  TokenDictionary dict;
  PostingsIndex index;
  index.add(ids(dict, {"JOHN", "SMITH"}), 0);
  index.add(ids(dict, {"MURPHY", "JOHN"}), 1);
  std::vector<std::string> items;
  for (TokenId t : index.items(dict)) items.emplace_back(dict.text(t));
  EXPECT_EQ(items, (std::vector<std::string>{"JOHN", "MURPHY", "SMITH"}));
  EXPECT_EQ(list(index.postings(*dict.find("JOHN"))), (std::vector<DocId>{0, 1}));
  EXPECT_EQ(list(index.postings(*dict.find("MURPHY"))), std::vector<DocId>{1});
  EXPECT_EQ(list(index.postings(*dict.find("SMITH"))), std::vector<DocId>{0});
}

TEST(PostingsIndex, AddressTable) {
  TokenDictionary dict;
  PostingsIndex index;
  index.add(ids(dict, {"123", "SUNSET"}), 0);
  index.add(ids(dict, {"AVENUE"}), 1);
  index.add(ids(dict, {"123"}), 2);
  EXPECT_EQ(list(index.postings(*dict.find("123"))), (std::vector<DocId>{0, 2}));
  EXPECT_EQ(list(index.postings(*dict.find("AVENUE"))), std::vector<DocId>{1});
  EXPECT_TRUE(index.postings(dict.intern("NOSUCH")).empty());
}

TEST(PostingsIndex, QueryAll) {
  TokenDictionary dict;
  PostingsIndex index;
  index.add(ids(dict, {"JOHN", "SMITH"}), 0);
  index.add(ids(dict, {"MURPHY", "JOHN"}), 1);
  EXPECT_EQ(index.query_all(ids(dict, {"JOHN", "SMITH"})), std::vector<DocId>{0});
  EXPECT_EQ(index.query_all(ids(dict, {"SMITH", "JOHN"})), std::vector<DocId>{0});
  EXPECT_TRUE(index.query_all(ids(dict, {"JOHN", "NOSUCH"})).empty());
  try {
    index.query_all({});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyQuery);
  }
}

TEST(PostingsIndex, AddIsIdempotentAndEmptyIsNoop) {
  TokenDictionary dict;
  PostingsIndex index;
  index.add({}, 3);
  EXPECT_TRUE(index.empty());
  index.add(ids(dict, {"A", "A"}), 3);
  index.add(ids(dict, {"A"}), 3);
  EXPECT_EQ(list(index.postings(*dict.find("A"))), std::vector<DocId>{3});
}

TEST(PostingsIndex, RestoreListValidates) {
  PostingsIndex index;
  EXPECT_TRUE(index.restore_list(1, {1, 4, 9}));
  EXPECT_FALSE(index.restore_list(1, {2}));
  EXPECT_FALSE(index.restore_list(2, {}));
  EXPECT_FALSE(index.restore_list(3, {4, 4}));
  EXPECT_FALSE(index.restore_list(4, {5, 1}));
}

TEST(PostingsIndexProperty, MatchesSupersetScan) {
  std::mt19937_64 rng(31);
  for (int round = 0; round < 50; ++round) {
    TokenDictionary dict;
    for (int t = 0; t < 12; ++t) dict.intern("W" + std::to_string(t));
    PostingsIndex index;
    std::vector<std::set<TokenId>> docs(1 + rng() % 200);
    for (std::size_t d = 0; d < docs.size(); ++d) {
      for (int k = static_cast<int>(rng() % 5); k > 0; --k) docs[d].insert(static_cast<TokenId>(rng() % 12));
      std::vector<TokenId> toks(docs[d].begin(), docs[d].end());
      index.add(toks, static_cast<DocId>(d));
    }
    for (int q = 0; q < 60; ++q) {
      std::vector<TokenId> query;
      for (int k = 1 + static_cast<int>(rng() % 3); k > 0; --k) query.push_back(static_cast<TokenId>(rng() % 12));
      std::vector<DocId> expected;
      for (std::size_t d = 0; d < docs.size(); ++d) {
        if (std::all_of(query.begin(), query.end(), [&](TokenId t) { return docs[d].contains(t); })) {
          expected.push_back(static_cast<DocId>(d));
        }
      }
      const auto got = index.query_all(query);
      EXPECT_EQ(got, expected);
      auto shuffled = query;
      std::shuffle(shuffled.begin(), shuffled.end(), rng);
      EXPECT_EQ(index.query_all(shuffled), got);
      auto wider = query;
      wider.push_back(static_cast<TokenId>(rng() % 12));
      const auto narrower = index.query_all(wider);
      EXPECT_TRUE(std::includes(got.begin(), got.end(), narrower.begin(), narrower.end()));
      EXPECT_EQ(index.query_all(std::vector<TokenId>{query[0]}), list(index.postings(query[0])));
    }
  }
}
