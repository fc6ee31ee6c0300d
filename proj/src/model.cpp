#include "cnix/model.hpp"

#include <cctype>

namespace cnix {

std::strong_ordering key_order(const RecordKey& a, const RecordKey& b) noexcept {
  return a <=> b;
}

std::string to_string(const RecordKey& key) {
  return "{" + key.fid + ", " + key.cid + "}";
}

std::size_t RecordKeyHash::operator()(const RecordKey& key) const noexcept {
  const std::size_t h1 = std::hash<std::string>{}(key.fid);
  const std::size_t h2 = std::hash<std::string>{}(key.cid);
  return h1 ^ (h2 + 0x9e3779b97f4a7c15ULL + (h1 << 6) + (h1 >> 2));
}

char type_code(CustomerType type) noexcept {
  switch (type) {
    case CustomerType::kCorporate: return 'C';
    case CustomerType::kIndividual: return 'I';
    case CustomerType::kJoint: return 'J';
  }
  return '?';
}

std::optional<CustomerType> parse_type_code(std::string_view code) noexcept {
  if (code == "C") return CustomerType::kCorporate;
  if (code == "I") return CustomerType::kIndividual;
  if (code == "J") return CustomerType::kJoint;
  return std::nullopt;
}

std::string_view type_name(CustomerType type) noexcept {
  switch (type) {
    case CustomerType::kCorporate: return "corporate";
    case CustomerType::kIndividual: return "individual";
    case CustomerType::kJoint: return "joint";
  }
  return "unknown";
}

std::optional<CustomerType> parse_type_name(std::string_view name) noexcept {
  std::string lowered;
  for (char c : name) lowered.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (lowered == "corporate" || lowered == "c") return CustomerType::kCorporate;
  if (lowered == "individual" || lowered == "i") return CustomerType::kIndividual;
  if (lowered == "joint" || lowered == "j") return CustomerType::kJoint;
  return std::nullopt;
}

}  // namespace cnix
