#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cnix/model.hpp"

namespace cnix {

/// Token interning shared by every structure of one GlobalIndex. Index
/// nodes and postings tables hold TokenIds instead of word text; the mapping
/// is exact, so two distinct words never share an id.
class TokenDictionary {
 public:
  TokenId intern(std::string_view token);
  std::optional<TokenId> find(std::string_view token) const;

  std::string_view text(TokenId id) const { return tokens_[id]; }
  std::size_t size() const noexcept { return tokens_.size(); }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }

  // Lexical (bytewise) comparison of two interned tokens.
  bool less(TokenId a, TokenId b) const { return text(a) < text(b); }

  std::size_t memory_bytes() const noexcept;

  // Rebuilds a dictionary from ids in order; rejects duplicates.
  static std::optional<TokenDictionary> from_tokens(std::vector<std::string> tokens);

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept { return std::hash<std::string_view>{}(s); }
  };

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId, Hash, std::equal_to<>> ids_;
};

}  // namespace cnix
