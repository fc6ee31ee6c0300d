#pragma once

#include <span>
#include <unordered_map>
#include <vector>

#include "cnix/model.hpp"
#include "cnix/token_dictionary.hpp"

namespace cnix {

/// Inverted list: token -> sorted, duplicate-free postings. Backs both the
/// customer-name index and the address index of a partition.
class PostingsIndex {
 public:
  // Adds `doc` to the list of every token; repeated tokens are harmless.
  void add(std::span<const TokenId> tokens, DocId doc);

  // Empty span when the token has no list.
  std::span<const DocId> postings(TokenId token) const noexcept;

  // Conjunction over `tokens`, evaluated smallest list first.
  // Throws Error(kEmptyQuery) for an empty token set.
  std::vector<DocId> query_all(std::span<const TokenId> tokens) const;

  std::size_t item_count() const noexcept { return lists_.size(); }
  bool empty() const noexcept { return lists_.empty(); }

  // Items in lexical order of their word.
  std::vector<TokenId> items(const TokenDictionary& dict) const;

  std::size_t memory_bytes() const noexcept;

  // Installs a whole list (used by snapshot loading). Returns false when the
  // list is empty, unsorted or has duplicates, or the token already has one.
  bool restore_list(TokenId token, std::vector<DocId> postings);

 private:
  std::unordered_map<TokenId, std::vector<DocId>> lists_;
};

}  // namespace cnix
