#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cnix/model.hpp"
#include "cnix/token_dictionary.hpp"

namespace cnix {

/// Word-level company-name tree.
///
/// Level 0 is a single root node whose elements hold the first word of every
/// inserted name; an element's node-link leads to the node holding every word
/// that follows it. Following node-links from the root spells one company
/// name, and the element reached by the last word carries the postings of
/// the records with that name. An element may carry both a node-link and
/// postings when one name is a strict prefix of another ("FIRST COMMERCIAL
/// BANK LTD" vs "FIRST COMMERCIAL BANK LTD OBB A/C").
///
/// Elements inside a node are kept in lexical order of their word, so every
/// lookup is a binary search. Words are stored as TokenIds; the dictionary is
/// passed in because the tree does not own it.
///
/// Nodes live in one arena vector and are linked by index. Thread safety:
/// const members may run concurrently; insert needs exclusive access.
class CompanyNameTree {
 public:
  static constexpr std::uint32_t kNoNode = UINT32_MAX;

  struct Element {
    TokenId token = 0;
    std::uint32_t child = kNoNode;
    std::vector<DocId> postings;  // sorted, unique; empty when no name ends here

    bool terminal() const noexcept { return !postings.empty(); }
    friend bool operator==(const Element&, const Element&) = default;
  };

  struct Node {
    std::vector<Element> elements;
    friend bool operator==(const Node&, const Node&) = default;
  };

  struct NameEntry {
    std::vector<TokenId> tokens;
    std::vector<DocId> postings;
  };

  // Throws Error(kEmptyName) for an empty name.
  void insert(std::span<const TokenId> name, DocId doc, const TokenDictionary& dict);

  // Postings of the exact name, or empty.
  std::vector<DocId> search_exact(std::span<const TokenId> name, const TokenDictionary& dict) const;

  // Union of postings of every name starting with `prefix` (whole words).
  std::vector<DocId> search_prefix(std::span<const TokenId> prefix, const TokenDictionary& dict) const;

  // Depth-first, lexical order.
  std::vector<NameEntry> enumerate() const;

  bool empty() const noexcept { return nodes_.empty(); }
  std::size_t height() const noexcept { return height_; }
  std::size_t name_count() const noexcept { return name_count_; }
  std::size_t node_count() const noexcept { return nodes_.size(); }

  const Node* root() const noexcept { return nodes_.empty() ? nullptr : &nodes_.front(); }
  const Node& node(std::uint32_t index) const { return nodes_.at(index); }

  std::size_t memory_bytes() const noexcept;

  // Rebuilds a tree from an arena whose node 0 is the root. Returns nullopt
  // if the arena breaks a structural invariant (empty node, unsorted or
  // duplicate elements, dangling or shared links, dead-end elements).
  static std::optional<CompanyNameTree> from_nodes(std::vector<Node> nodes, const TokenDictionary& dict);

 private:
  // Index of the element with `token` in nodes_[node], or nullopt.
  std::optional<std::size_t> find_element(std::uint32_t node, TokenId token, const TokenDictionary& dict) const;
  // Walks `tokens`; returns {node, element index} of the last word.
  std::optional<std::pair<std::uint32_t, std::size_t>> walk(std::span<const TokenId> tokens,
                                                            const TokenDictionary& dict) const;
  void collect(std::uint32_t node, std::vector<DocId>& out) const;

  std::vector<Node> nodes_;
  std::size_t height_ = 0;
  std::size_t name_count_ = 0;
};

}  // namespace cnix
