#include "cnix/token_dictionary.hpp"

namespace cnix {

TokenId TokenDictionary::intern(std::string_view token) {
  if (auto it = ids_.find(token); it != ids_.end()) return it->second;
  const auto id = static_cast<TokenId>(tokens_.size());
  tokens_.emplace_back(token);
  ids_.emplace(tokens_.back(), id);
  return id;
}

std::optional<TokenId> TokenDictionary::find(std::string_view token) const {
  if (auto it = ids_.find(token); it != ids_.end()) return it->second;
  return std::nullopt;
}

std::size_t TokenDictionary::memory_bytes() const noexcept {
  std::size_t bytes = tokens_.size() * sizeof(std::string);
  for (const auto& t : tokens_) bytes += 2 * t.size();
  bytes += ids_.size() * (sizeof(std::string) + sizeof(TokenId) + 2 * sizeof(void*));
  return bytes;
}

std::optional<TokenDictionary> TokenDictionary::from_tokens(std::vector<std::string> tokens) {
  TokenDictionary dict;
  dict.tokens_.reserve(tokens.size());
  for (auto& t : tokens) {
    if (dict.ids_.contains(t)) return std::nullopt;
    dict.intern(t);
  }
  return dict;
}

}  // namespace cnix
