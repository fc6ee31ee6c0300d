#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "cnix/cn_tree.hpp"
#include "cnix/error.hpp"
#include "cnix/inverted_index.hpp"
#include "cnix/model.hpp"
#include "cnix/normalize.hpp"
#include "cnix/token_dictionary.hpp"

namespace cnix {

/// One (country, customer type) bucket. Corporate partitions index names in
/// company_names; individual partitions in customer_names.
struct Partition {
  PartitionKey key;
  CompanyNameTree company_names;
  PostingsIndex customer_names;
  PostingsIndex addresses;
  std::size_t record_count = 0;
};

/// Country list entry: where the partitions of one country live.
struct CountryEntry {
  std::optional<std::size_t> corporate;
  std::optional<std::size_t> individual;
};

/// An identity query. Tokens must already be normalized (see
/// make_search_request). A present-but-empty query counts as absent.
struct SearchRequest {
  std::optional<std::vector<std::string>> name_query;
  std::optional<std::vector<std::string>> address_query;
  std::optional<std::string> country;
  std::optional<CustomerType> customer_type;
  bool prefix_mode = false;

  bool has_name() const noexcept { return name_query && !name_query->empty(); }
  bool has_address() const noexcept { return address_query && !address_query->empty(); }
};

// Normalizes free text the same way records are normalized. Empty strings
// leave the corresponding field absent.
SearchRequest make_search_request(std::string_view name, std::string_view address, std::string_view country,
                                  std::optional<CustomerType> type, bool prefix, const AbbreviationTable& table);

struct Match {
  RecordKey key;
  bool by_name = false;
  bool by_address = false;

  friend bool operator==(const Match&, const Match&) = default;
};

/// Matches sorted by key_order, one per key.
struct ResultSet {
  std::vector<Match> matches;

  std::size_t size() const noexcept { return matches.size(); }
  bool empty() const noexcept { return matches.empty(); }
  std::vector<RecordKey> keys() const;

  friend bool operator==(const ResultSet&, const ResultSet&) = default;
};

struct SearchOptions {
  // Probe the name structure on a second thread while the address index is
  // probed on the caller's. Results are identical either way.
  bool parallel_probes = false;
};

struct BuildReport {
  std::size_t records = 0;
  std::vector<RecordKey> unindexable;  // stored, but no name or address tokens
};

struct Rejection {
  RecordKey key;
  ErrorCode reason;
};

struct UpdateReport {
  std::size_t inserted = 0;
  std::vector<Rejection> rejected;
  std::vector<RecordKey> unindexable;
};

struct AuditEvent {
  std::uint64_t sequence = 0;
  std::int64_t timestamp = 0;  // unix seconds
  RecordKey key;
  std::string action;  // "insert" or "reject:<reason>"
};

struct ExtractResult {
  std::vector<RawRecord> records;  // request order, found keys only
  std::vector<RecordKey> unknown;
};

struct PartitionStats {
  std::string country;
  CustomerType customer_type = CustomerType::kCorporate;
  std::size_t records = 0;
  std::size_t names = 0;          // tree names or name-index items
  std::size_t address_items = 0;
  std::size_t tree_height = 0;
  std::size_t tree_nodes = 0;

  friend bool operator==(const PartitionStats&, const PartitionStats&) = default;
};

struct IndexStats {
  std::size_t records = 0;
  std::size_t indexed_records = 0;
  std::size_t partitions = 0;
  std::size_t countries = 0;
  std::size_t tokens = 0;
  std::size_t memory_bytes = 0;  // estimate from content sizes
  std::vector<PartitionStats> per_partition;  // sorted by partition key

  friend bool operator==(const IndexStats&, const IndexStats&) = default;
};

/// The global customer index: a country list of partitions plus the record
/// store and the audit trail of updates.
///
/// Value type. Readers share an immutable instance; writers copy, mutate and
/// publish (see IndexHandle).
class GlobalIndex {
 public:
  GlobalIndex() = default;

  // Records are inserted in key order so the result does not depend on input
  // order. Throws Error(kDuplicateKey) listing every repeated key and
  // Error(kMissingIdentity) for a record without fid or cid.
  static GlobalIndex build(std::span<const RawRecord> records, const AbbreviationTable& table,
                           BuildReport* report = nullptr);

  // New customers only; conflicting records are rejected one by one and the
  // rest of the batch is applied. One audit event per record.
  UpdateReport update(std::span<const RawRecord> records, const AbbreviationTable& table);

  // Throws Error(kEmptyQuery) when neither name nor address is present.
  ResultSet search(const SearchRequest& request, const SearchOptions& options = {}) const;

  ExtractResult extract(std::span<const RecordKey> keys) const;
  // Throws Error(kUnknownKey).
  const RawRecord& extract_one(const RecordKey& key) const;

  bool contains(const RecordKey& key) const { return by_key_.contains(key); }
  std::size_t size() const noexcept { return records_.size(); }

  IndexStats stats() const;

  const TokenDictionary& dictionary() const noexcept { return dict_; }
  const std::vector<Partition>& partitions() const noexcept { return partitions_; }
  const std::map<std::string, CountryEntry, std::less<>>& country_list() const noexcept { return countries_; }
  const std::vector<RawRecord>& records() const noexcept { return records_; }

  // Audit events not yet written out live in audit_log(); audit_base() is
  // the sequence number of the first of them.
  const std::vector<AuditEvent>& audit_log() const noexcept { return audit_; }
  std::uint64_t audit_base() const noexcept { return audit_base_; }
  std::uint64_t audit_position() const noexcept { return audit_base_ + audit_.size(); }

  // Reassembles an index from decoded parts; validates cross references.
  // Returns nullopt if a posting points outside the record store, a partition
  // holds a record of another country/type, or keys repeat.
  static std::optional<GlobalIndex> restore(TokenDictionary dict, std::vector<Partition> partitions,
                                            std::vector<RawRecord> records, std::uint64_t audit_position);

 private:
  // Returns false when the record has nothing to index.
  bool insert_normalized(DocId doc, const NormalizedRecord& rec);
  std::size_t partition_for(const PartitionKey& key);
  std::vector<std::size_t> candidate_partitions(const SearchRequest& request) const;

  TokenDictionary dict_;
  std::vector<Partition> partitions_;
  std::map<std::string, CountryEntry, std::less<>> countries_;
  std::vector<RawRecord> records_;
  std::unordered_map<RecordKey, DocId, RecordKeyHash> by_key_;
  std::vector<AuditEvent> audit_;
  std::uint64_t audit_base_ = 0;
};

}  // namespace cnix
