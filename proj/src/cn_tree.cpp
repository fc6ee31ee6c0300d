#include "cnix/cn_tree.hpp"

#include <algorithm>

#include "cnix/error.hpp"

namespace cnix {

namespace {

void insert_posting(std::vector<DocId>& postings, DocId doc) {
  if (postings.empty() || postings.back() < doc) {
    postings.push_back(doc);
    return;
  }
  auto it = std::lower_bound(postings.begin(), postings.end(), doc);
  if (it == postings.end() || *it != doc) postings.insert(it, doc);
}

}  // namespace

std::optional<std::size_t> CompanyNameTree::find_element(std::uint32_t node, TokenId token,
                                                         const TokenDictionary& dict) const {
  const auto& elems = nodes_[node].elements;
  const std::string_view word = dict.text(token);
  auto it = std::lower_bound(elems.begin(), elems.end(), word,
                             [&](const Element& e, std::string_view w) { return dict.text(e.token) < w; });
  if (it == elems.end() || it->token != token) return std::nullopt;
  return static_cast<std::size_t>(it - elems.begin());
}

void CompanyNameTree::insert(std::span<const TokenId> name, DocId doc, const TokenDictionary& dict) {
  if (name.empty()) throw Error(ErrorCode::kEmptyName, "company name has no tokens");
  if (nodes_.empty()) nodes_.emplace_back();

  std::uint32_t node = 0;
  for (std::size_t level = 0; level < name.size(); ++level) {
    const TokenId token = name[level];
    auto& elems = nodes_[node].elements;
    const std::string_view word = dict.text(token);
    auto it = std::lower_bound(elems.begin(), elems.end(), word,
                               [&](const Element& e, std::string_view w) { return dict.text(e.token) < w; });
    if (it == elems.end() || it->token != token) it = elems.insert(it, Element{token, kNoNode, {}});
    const auto index = static_cast<std::size_t>(it - elems.begin());

    if (level + 1 == name.size()) {
      auto& postings = nodes_[node].elements[index].postings;
      if (postings.empty()) ++name_count_;
      insert_posting(postings, doc);
      break;
    }
    if (nodes_[node].elements[index].child == kNoNode) {
      const auto child = static_cast<std::uint32_t>(nodes_.size());
      nodes_.emplace_back();  // invalidates references into nodes_
      nodes_[node].elements[index].child = child;
    }
    node = nodes_[node].elements[index].child;
  }
  height_ = std::max(height_, name.size());
}

std::optional<std::pair<std::uint32_t, std::size_t>> CompanyNameTree::walk(std::span<const TokenId> tokens,
                                                                           const TokenDictionary& dict) const {
  if (nodes_.empty() || tokens.empty()) return std::nullopt;
  std::uint32_t node = 0;
  for (std::size_t level = 0;; ++level) {
    auto index = find_element(node, tokens[level], dict);
    if (!index) return std::nullopt;
    if (level + 1 == tokens.size()) return std::make_pair(node, *index);
    node = nodes_[node].elements[*index].child;
    if (node == kNoNode) return std::nullopt;
  }
}

std::vector<DocId> CompanyNameTree::search_exact(std::span<const TokenId> name, const TokenDictionary& dict) const {
  auto hit = walk(name, dict);
  if (!hit) return {};
  return nodes_[hit->first].elements[hit->second].postings;
}

void CompanyNameTree::collect(std::uint32_t node, std::vector<DocId>& out) const {
  for (const auto& e : nodes_[node].elements) {
    out.insert(out.end(), e.postings.begin(), e.postings.end());
    if (e.child != kNoNode) collect(e.child, out);
  }
}

std::vector<DocId> CompanyNameTree::search_prefix(std::span<const TokenId> prefix,
                                                  const TokenDictionary& dict) const {
  auto hit = walk(prefix, dict);
  if (!hit) return {};
  const Element& e = nodes_[hit->first].elements[hit->second];
  std::vector<DocId> out = e.postings;
  if (e.child != kNoNode) {
    collect(e.child, out);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
  }
  return out;
}

std::vector<CompanyNameTree::NameEntry> CompanyNameTree::enumerate() const {
  std::vector<NameEntry> out;
  if (nodes_.empty()) return out;
  std::vector<TokenId> path;
  auto visit = [&](auto&& self, std::uint32_t node) -> void {
    for (const auto& e : nodes_[node].elements) {
      path.push_back(e.token);
      if (e.terminal()) out.push_back(NameEntry{path, e.postings});
      if (e.child != kNoNode) self(self, e.child);
      path.pop_back();
    }
  };
  visit(visit, 0);
  return out;
}

std::size_t CompanyNameTree::memory_bytes() const noexcept {
  std::size_t bytes = nodes_.size() * sizeof(Node);
  for (const auto& n : nodes_) {
    bytes += n.elements.size() * sizeof(Element);
    for (const auto& e : n.elements) bytes += e.postings.size() * sizeof(DocId);
  }
  return bytes;
}

std::optional<CompanyNameTree> CompanyNameTree::from_nodes(std::vector<Node> nodes, const TokenDictionary& dict) {
  CompanyNameTree tree;
  if (nodes.empty()) return tree;

  std::vector<bool> seen(nodes.size(), false);
  seen[0] = true;
  std::size_t reached = 1;
  // Iterative DFS carrying the level of each node.
  std::vector<std::pair<std::uint32_t, std::size_t>> stack{{0, 1}};
  while (!stack.empty()) {
    auto [node, level] = stack.back();
    stack.pop_back();
    const auto& elems = nodes[node].elements;
    if (elems.empty()) return std::nullopt;
    for (std::size_t k = 0; k < elems.size(); ++k) {
      const auto& e = elems[k];
      if (e.token >= dict.size()) return std::nullopt;
      if (k > 0 && !(dict.text(elems[k - 1].token) < dict.text(e.token))) return std::nullopt;
      if (!std::is_sorted(e.postings.begin(), e.postings.end()) ||
          std::adjacent_find(e.postings.begin(), e.postings.end()) != e.postings.end()) {
        return std::nullopt;
      }
      if (e.terminal()) {
        ++tree.name_count_;
        tree.height_ = std::max(tree.height_, level);
      }
      if (e.child == kNoNode) {
        if (!e.terminal()) return std::nullopt;
        continue;
      }
      if (e.child >= nodes.size() || seen[e.child]) return std::nullopt;
      seen[e.child] = true;
      ++reached;
      stack.emplace_back(e.child, level + 1);
    }
  }
  if (reached != nodes.size()) return std::nullopt;
  tree.nodes_ = std::move(nodes);
  return tree;
}

}  // namespace cnix
