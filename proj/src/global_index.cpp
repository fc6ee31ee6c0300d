#include "cnix/global_index.hpp"

#include <algorithm>
#include <chrono>
#include <future>
#include <numeric>
#include <unordered_set>

#include "cnix/error.hpp"
#include "cnix/kernels/intersect.hpp"

namespace cnix {

namespace {

// Query tokens mapped to TokenIds once per search. A token the dictionary has
// never seen cannot match anything, so the whole field resolves to nullopt.
struct ResolvedQuery {
  std::optional<std::vector<TokenId>> name_sequence;
  std::optional<std::vector<TokenId>> name_set;
  std::optional<std::vector<TokenId>> address_set;
};

std::optional<std::vector<TokenId>> resolve(const std::vector<std::string>& tokens, const TokenDictionary& dict) {
  std::vector<TokenId> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) {
    auto id = dict.find(t);
    if (!id) return std::nullopt;
    ids.push_back(*id);
  }
  return ids;
}

std::vector<TokenId> as_set(std::vector<TokenId> ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

std::vector<DocId> probe_names(const Partition& p, const ResolvedQuery& q, bool prefix, const TokenDictionary& dict) {
  if (p.key.customer_type == CustomerType::kCorporate) {
    if (!q.name_sequence) return {};
    return prefix ? p.company_names.search_prefix(*q.name_sequence, dict)
                  : p.company_names.search_exact(*q.name_sequence, dict);
  }
  if (!q.name_set) return {};
  return p.customer_names.query_all(*q.name_set);
}

std::vector<DocId> probe_addresses(const Partition& p, const ResolvedQuery& q) {
  if (!q.address_set) return {};
  return p.addresses.query_all(*q.address_set);
}

std::int64_t now_seconds() {
  return std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch())
      .count();
}

}  // namespace

SearchRequest make_search_request(std::string_view name, std::string_view address, std::string_view country,
                                  std::optional<CustomerType> type, bool prefix, const AbbreviationTable& table) {
  SearchRequest req;
  if (auto tokens = normalize_text(name, table); !tokens.empty()) req.name_query = std::move(tokens);
  if (auto tokens = normalize_text(address, table); !tokens.empty()) req.address_query = std::move(tokens);
  if (auto c = to_upper(trim(country)); !c.empty()) req.country = std::move(c);
  if (type) req.customer_type = index_type(*type);
  req.prefix_mode = prefix;
  return req;
}

std::vector<RecordKey> ResultSet::keys() const {
  std::vector<RecordKey> out;
  out.reserve(matches.size());
  for (const auto& m : matches) out.push_back(m.key);
  return out;
}

std::size_t GlobalIndex::partition_for(const PartitionKey& key) {
  auto& entry = countries_[key.country];
  auto& slot = key.customer_type == CustomerType::kCorporate ? entry.corporate : entry.individual;
  if (!slot) {
    slot = partitions_.size();
    partitions_.push_back(Partition{key, {}, {}, {}, 0});
  }
  return *slot;
}

bool GlobalIndex::insert_normalized(DocId doc, const NormalizedRecord& rec) {
  if (rec.name_tokens.empty() && rec.address_tokens.empty()) return false;
  Partition& p = partitions_[partition_for(rec.partition())];

  std::vector<TokenId> ids;
  if (!rec.name_tokens.empty()) {
    ids.clear();
    for (const auto& t : rec.name_tokens) ids.push_back(dict_.intern(t));
    if (p.key.customer_type == CustomerType::kCorporate) {
      p.company_names.insert(ids, doc, dict_);
    } else {
      p.customer_names.add(ids, doc);
    }
  }
  if (!rec.address_tokens.empty()) {
    ids.clear();
    for (const auto& t : rec.address_tokens) ids.push_back(dict_.intern(t));
    p.addresses.add(ids, doc);
  }
  ++p.record_count;
  return true;
}

GlobalIndex GlobalIndex::build(std::span<const RawRecord> records, const AbbreviationTable& table,
                               BuildReport* report) {
  {
    std::unordered_set<RecordKey, RecordKeyHash> seen;
    std::vector<RecordKey> dups;
    for (const auto& r : records) {
      if (!seen.insert(r.key()).second) dups.push_back(r.key());
    }
    if (!dups.empty()) {
      std::sort(dups.begin(), dups.end());
      dups.erase(std::unique(dups.begin(), dups.end()), dups.end());
      std::string msg = std::to_string(dups.size()) + " duplicated key(s):";
      for (const auto& k : dups) msg += " " + to_string(k);
      throw Error(ErrorCode::kDuplicateKey, msg);
    }
  }

  std::vector<std::size_t> order(records.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return key_order(records[a].key(), records[b].key()) < 0;
  });

  GlobalIndex index;
  index.records_.reserve(records.size());
  index.by_key_.reserve(records.size());
  BuildReport local;
  for (std::size_t i : order) {
    const RawRecord& raw = records[i];
    NormalizedRecord rec = normalize_record(raw, table);
    const auto doc = static_cast<DocId>(index.records_.size());
    index.records_.push_back(raw);
    index.by_key_.emplace(rec.key, doc);
    if (!index.insert_normalized(doc, rec)) local.unindexable.push_back(rec.key);
  }
  local.records = index.records_.size();
  if (report) *report = std::move(local);
  return index;
}

UpdateReport GlobalIndex::update(std::span<const RawRecord> records, const AbbreviationTable& table) {
  UpdateReport report;
  const std::int64_t stamp = now_seconds();
  auto audit = [&](const RecordKey& key, std::string action) {
    audit_.push_back(AuditEvent{audit_position(), stamp, key, std::move(action)});
  };

  for (const RawRecord& raw : records) {
    RecordKey key = raw.key();
    if (key.fid.empty() || key.cid.empty()) {
      report.rejected.push_back({key, ErrorCode::kMissingIdentity});
      audit(key, "reject:MissingIdentity");
      continue;
    }
    if (by_key_.contains(key)) {
      report.rejected.push_back({key, ErrorCode::kDuplicateKey});
      audit(key, "reject:DuplicateKey");
      continue;
    }
    NormalizedRecord rec = normalize_record(raw, table);
    const auto doc = static_cast<DocId>(records_.size());
    records_.push_back(raw);
    by_key_.emplace(key, doc);
    if (!insert_normalized(doc, rec)) report.unindexable.push_back(key);
    ++report.inserted;
    audit(key, "insert");
  }
  return report;
}

std::vector<std::size_t> GlobalIndex::candidate_partitions(const SearchRequest& request) const {
  std::vector<const CountryEntry*> entries;
  if (request.country) {
    const std::string country = to_upper(trim(*request.country));
    if (auto it = countries_.find(country); it != countries_.end()) entries.push_back(&it->second);
    if (country != kUnknownCountry) {
      if (auto it = countries_.find(kUnknownCountry); it != countries_.end()) entries.push_back(&it->second);
    }
  } else {
    for (const auto& [country, entry] : countries_) entries.push_back(&entry);
  }

  std::vector<std::size_t> out;
  const std::optional<CustomerType> type =
      request.customer_type ? std::optional(index_type(*request.customer_type)) : std::nullopt;
  for (const CountryEntry* e : entries) {
    if (e->corporate && (!type || *type == CustomerType::kCorporate)) out.push_back(*e->corporate);
    if (e->individual && (!type || *type == CustomerType::kIndividual)) out.push_back(*e->individual);
  }
  return out;
}

ResultSet GlobalIndex::search(const SearchRequest& request, const SearchOptions& options) const {
  const bool has_name = request.has_name();
  const bool has_address = request.has_address();
  if (!has_name && !has_address) throw Error(ErrorCode::kEmptyQuery, "request has neither name nor address");

  ResolvedQuery q;
  if (has_name) {
    q.name_sequence = resolve(*request.name_query, dict_);
    if (q.name_sequence) q.name_set = as_set(*q.name_sequence);
  }
  if (has_address) {
    if (auto ids = resolve(*request.address_query, dict_)) q.address_set = as_set(std::move(*ids));
  }

  std::vector<DocId> hits;
  std::vector<DocId> scratch;
  for (std::size_t index : candidate_partitions(request)) {
    const Partition& p = partitions_[index];
    if (has_name && has_address) {
      std::vector<DocId> names;
      std::vector<DocId> addresses;
      if (options.parallel_probes) {
        auto pending = std::async(std::launch::async,
                                  [&] { return probe_names(p, q, request.prefix_mode, dict_); });
        addresses = probe_addresses(p, q);
        names = pending.get();
      } else {
        names = probe_names(p, q, request.prefix_mode, dict_);
        if (!names.empty()) addresses = probe_addresses(p, q);
      }
      kernels::intersect(names, addresses, scratch);
      hits.insert(hits.end(), scratch.begin(), scratch.end());
    } else if (has_name) {
      auto names = probe_names(p, q, request.prefix_mode, dict_);
      hits.insert(hits.end(), names.begin(), names.end());
    } else {
      auto addresses = probe_addresses(p, q);
      hits.insert(hits.end(), addresses.begin(), addresses.end());
    }
  }

  ResultSet result;
  result.matches.reserve(hits.size());
  for (DocId doc : hits) {
    result.matches.push_back(Match{records_[doc].key(), has_name, has_address});
  }
  std::sort(result.matches.begin(), result.matches.end(),
            [](const Match& a, const Match& b) { return key_order(a.key, b.key) < 0; });
  return result;
}

ExtractResult GlobalIndex::extract(std::span<const RecordKey> keys) const {
  ExtractResult out;
  for (const auto& key : keys) {
    if (auto it = by_key_.find(key); it != by_key_.end()) {
      out.records.push_back(records_[it->second]);
    } else {
      out.unknown.push_back(key);
    }
  }
  return out;
}

const RawRecord& GlobalIndex::extract_one(const RecordKey& key) const {
  auto it = by_key_.find(key);
  if (it == by_key_.end()) throw Error(ErrorCode::kUnknownKey, to_string(key));
  return records_[it->second];
}

IndexStats GlobalIndex::stats() const {
  IndexStats s;
  s.records = records_.size();
  s.partitions = partitions_.size();
  s.countries = countries_.size();
  s.tokens = dict_.size();
  s.memory_bytes = dict_.memory_bytes() + records_.size() * sizeof(RawRecord) +
                   by_key_.size() * (sizeof(RecordKey) + sizeof(DocId) + 2 * sizeof(void*));
  for (const auto& r : records_) {
    s.memory_bytes += r.fid.size() + r.cid.size() + r.first_name.size() + r.last_name.size() +
                      r.company_name.size() + r.street.size() + r.town.size() + r.zip.size() +
                      r.country_code.size() + r.country.size();
  }
  for (const auto& p : partitions_) {
    PartitionStats ps;
    ps.country = p.key.country;
    ps.customer_type = p.key.customer_type;
    ps.records = p.record_count;
    if (p.key.customer_type == CustomerType::kCorporate) {
      ps.names = p.company_names.name_count();
      ps.tree_height = p.company_names.height();
      ps.tree_nodes = p.company_names.node_count();
    } else {
      ps.names = p.customer_names.item_count();
    }
    ps.address_items = p.addresses.item_count();
    s.indexed_records += p.record_count;
    s.memory_bytes += p.company_names.memory_bytes() + p.customer_names.memory_bytes() + p.addresses.memory_bytes();
    s.per_partition.push_back(std::move(ps));
  }
  std::sort(s.per_partition.begin(), s.per_partition.end(), [](const auto& a, const auto& b) {
    return std::tie(a.country, a.customer_type) < std::tie(b.country, b.customer_type);
  });
  return s;
}

std::optional<GlobalIndex> GlobalIndex::restore(TokenDictionary dict, std::vector<Partition> partitions,
                                                std::vector<RawRecord> records, std::uint64_t audit_position) {
  GlobalIndex index;
  index.dict_ = std::move(dict);
  index.records_ = std::move(records);
  index.audit_base_ = audit_position;
  index.by_key_.reserve(index.records_.size());
  for (std::size_t i = 0; i < index.records_.size(); ++i) {
    const RawRecord& r = index.records_[i];
    if (r.fid.empty() || r.cid.empty()) return std::nullopt;
    if (!index.by_key_.emplace(r.key(), static_cast<DocId>(i)).second) return std::nullopt;
  }

  std::vector<bool> placed(index.records_.size(), false);
  std::vector<DocId> docs;
  for (std::size_t pi = 0; pi < partitions.size(); ++pi) {
    const Partition& p = partitions[pi];
    if (p.key.customer_type == CustomerType::kJoint) return std::nullopt;
    const bool corporate = p.key.customer_type == CustomerType::kCorporate;
    if (corporate ? !p.customer_names.empty() : !p.company_names.empty()) return std::nullopt;

    docs.clear();
    for (const auto& entry : p.company_names.enumerate()) docs.insert(docs.end(), entry.postings.begin(), entry.postings.end());
    for (const auto* idx : {&p.customer_names, &p.addresses}) {
      for (TokenId t : idx->items(index.dict_)) {
        auto list = idx->postings(t);
        docs.insert(docs.end(), list.begin(), list.end());
      }
    }
    std::sort(docs.begin(), docs.end());
    docs.erase(std::unique(docs.begin(), docs.end()), docs.end());
    if (docs.size() != p.record_count) return std::nullopt;
    for (DocId doc : docs) {
      if (doc >= index.records_.size() || placed[doc]) return std::nullopt;
      const RawRecord& r = index.records_[doc];
      if (index_type(r.customer_type) != p.key.customer_type ||
          resolve_country(r.country, r.country_code) != p.key.country) {
        return std::nullopt;
      }
      placed[doc] = true;
    }

    auto& entry = index.countries_[p.key.country];
    auto& slot = corporate ? entry.corporate : entry.individual;
    if (slot) return std::nullopt;
    slot = pi;
  }
  index.partitions_ = std::move(partitions);
  return index;
}

}  // namespace cnix
