#include "cnix/inverted_index.hpp"

#include <algorithm>

#include "cnix/error.hpp"
#include "cnix/kernels/intersect.hpp"

namespace cnix {

void PostingsIndex::add(std::span<const TokenId> tokens, DocId doc) {
  for (TokenId token : tokens) {
    auto& list = lists_[token];
    if (list.empty() || list.back() < doc) {
      list.push_back(doc);
      continue;
    }
    auto it = std::lower_bound(list.begin(), list.end(), doc);
    if (it == list.end() || *it != doc) list.insert(it, doc);
  }
}

std::span<const DocId> PostingsIndex::postings(TokenId token) const noexcept {
  auto it = lists_.find(token);
  if (it == lists_.end()) return {};
  return it->second;
}

std::vector<DocId> PostingsIndex::query_all(std::span<const TokenId> tokens) const {
  if (tokens.empty()) throw Error(ErrorCode::kEmptyQuery, "conjunctive query needs at least one token");

  std::vector<std::span<const DocId>> lists;
  lists.reserve(tokens.size());
  for (TokenId token : tokens) {
    auto list = postings(token);
    if (list.empty()) return {};
    lists.push_back(list);
  }
  std::sort(lists.begin(), lists.end(), [](auto a, auto b) { return a.size() < b.size(); });

  std::vector<DocId> result(lists.front().begin(), lists.front().end());
  std::vector<DocId> scratch;
  for (std::size_t k = 1; k < lists.size() && !result.empty(); ++k) {
    if (lists[k].data() == lists[k - 1].data()) continue;  // repeated token
    kernels::intersect(result, lists[k], scratch);
    result.swap(scratch);
  }
  return result;
}

std::vector<TokenId> PostingsIndex::items(const TokenDictionary& dict) const {
  std::vector<TokenId> out;
  out.reserve(lists_.size());
  for (const auto& [token, list] : lists_) out.push_back(token);
  std::sort(out.begin(), out.end(), [&](TokenId a, TokenId b) { return dict.less(a, b); });
  return out;
}

std::size_t PostingsIndex::memory_bytes() const noexcept {
  std::size_t bytes = lists_.size() * sizeof(void*);
  for (const auto& [token, list] : lists_) {
    bytes += sizeof(TokenId) + sizeof(std::vector<DocId>) + 2 * sizeof(void*);
    bytes += list.size() * sizeof(DocId);
  }
  return bytes;
}

bool PostingsIndex::restore_list(TokenId token, std::vector<DocId> postings) {
  if (postings.empty()) return false;
  for (std::size_t k = 1; k < postings.size(); ++k) {
    if (postings[k - 1] >= postings[k]) return false;
  }
  return lists_.emplace(token, std::move(postings)).second;
}

}  // namespace cnix
