#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cnix {

// Dense ordinal of a record inside one GlobalIndex; postings store these.
using DocId = std::uint32_t;
// Interned token; see TokenDictionary.
using TokenId = std::uint32_t;

inline constexpr std::string_view kUnknownCountry = "UNKNOWN";

/// {FID, CID}: the fund/client database a customer row lives in plus its
/// customer id. CIDs are only unique inside one FID. Both are opaque text
/// compared byte-for-byte.
struct RecordKey {
  std::string fid;
  std::string cid;

  friend bool operator==(const RecordKey&, const RecordKey&) = default;
  friend std::strong_ordering operator<=>(const RecordKey&, const RecordKey&) = default;
};

/// Total lexicographic order on (fid, cid). Used for every user-visible
/// result list.
std::strong_ordering key_order(const RecordKey& a, const RecordKey& b) noexcept;

std::string to_string(const RecordKey& key);

struct RecordKeyHash {
  std::size_t operator()(const RecordKey& key) const noexcept;
};

enum class CustomerType : std::uint8_t { kCorporate = 0, kIndividual = 1, kJoint = 2 };

// Joint accounts carry person names and are indexed as individuals.
constexpr CustomerType index_type(CustomerType type) noexcept {
  return type == CustomerType::kJoint ? CustomerType::kIndividual : type;
}

char type_code(CustomerType type) noexcept;
std::optional<CustomerType> parse_type_code(std::string_view code) noexcept;
std::string_view type_name(CustomerType type) noexcept;
// Accepts "corporate"/"individual"/"joint" (any case) or the one-letter codes.
std::optional<CustomerType> parse_type_name(std::string_view name) noexcept;

/// A customer row as exported from one logical database. Empty strings
/// stand for missing values.
struct RawRecord {
  std::string fid;
  std::string cid;
  CustomerType customer_type = CustomerType::kIndividual;
  std::string first_name;
  std::string last_name;
  std::string company_name;
  std::string street;
  std::string town;
  std::string zip;
  std::string country_code;
  std::string country;

  RecordKey key() const { return RecordKey{fid, cid}; }

  friend bool operator==(const RawRecord&, const RawRecord&) = default;
};

struct PartitionKey {
  std::string country;
  CustomerType customer_type = CustomerType::kCorporate;  // never kJoint

  friend bool operator==(const PartitionKey&, const PartitionKey&) = default;
  friend std::strong_ordering operator<=>(const PartitionKey&, const PartitionKey&) = default;
};

/// A cleaned record. name_tokens keeps word order for corporate names and is
/// a sorted set for individual names; address_tokens is always a sorted set.
struct NormalizedRecord {
  RecordKey key;
  CustomerType customer_type = CustomerType::kIndividual;
  std::vector<std::string> name_tokens;
  std::vector<std::string> address_tokens;
  std::string country;
  RawRecord raw;

  PartitionKey partition() const { return PartitionKey{country, index_type(customer_type)}; }
};

}  // namespace cnix
