#include "cnix/persist.hpp"

#include <array>
#include <cstring>
#include <fstream>

#include "cnix/error.hpp"
#include "cnix/ingest.hpp"
#include "cnix/kernels/crc32c.hpp"

namespace cnix {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kMagic = "CNIX";
constexpr std::string_view kTagDict = "DICT";
constexpr std::string_view kTagPartitions = "PART";
constexpr std::string_view kTagRecords = "RECS";
constexpr std::string_view kTagChecksum = "CRC ";

class Writer {
 public:
  void bytes(std::string_view data) { out_.append(data); }
  void u8(std::uint8_t v) { out_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void varint(std::uint64_t v) {
    while (v >= 0x80) {
      u8(static_cast<std::uint8_t>(v | 0x80));
      v >>= 7;
    }
    u8(static_cast<std::uint8_t>(v));
  }
  void str(std::string_view s) {
    varint(s.size());
    bytes(s);
  }
  void postings(std::span<const DocId> list) {
    varint(list.size());
    DocId prev = 0;
    for (DocId d : list) {
      varint(d - prev);
      prev = d;
    }
  }
  void section(std::string_view tag, const Writer& payload) {
    bytes(tag);
    u64(payload.out_.size());
    bytes(payload.out_);
  }
  const std::string& data() const noexcept { return out_; }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

[[noreturn]] void corrupt(const std::string& why) { throw Error(ErrorCode::kCorruptSnapshot, why); }

class Reader {
 public:
  explicit Reader(std::string_view data) : data_(data) {}

  bool done() const noexcept { return pos_ == data_.size(); }
  std::size_t remaining() const noexcept { return data_.size() - pos_; }

  std::string_view bytes(std::size_t n) {
    if (remaining() < n) corrupt("unexpected end of data");
    auto out = data_.substr(pos_, n);
    pos_ += n;
    return out;
  }
  std::uint8_t u8() { return static_cast<std::uint8_t>(bytes(1)[0]); }
  std::uint32_t u32() {
    auto b = bytes(4);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<std::uint8_t>(b[static_cast<std::size_t>(i)]);
    return v;
  }
  std::uint64_t u64() {
    auto b = bytes(8);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | static_cast<std::uint8_t>(b[static_cast<std::size_t>(i)]);
    return v;
  }
  std::uint64_t varint() {
    std::uint64_t v = 0;
    for (int shift = 0; shift < 64; shift += 7) {
      const std::uint8_t b = u8();
      v |= static_cast<std::uint64_t>(b & 0x7F) << shift;
      if ((b & 0x80) == 0) return v;
    }
    corrupt("varint overflow");
  }
  // A count of items that each take at least one byte.
  std::size_t count() {
    const std::uint64_t n = varint();
    if (n > remaining()) corrupt("count exceeds remaining data");
    return static_cast<std::size_t>(n);
  }
  std::uint32_t u32_varint() {
    const std::uint64_t v = varint();
    if (v > UINT32_MAX) corrupt("value out of range");
    return static_cast<std::uint32_t>(v);
  }
  std::string str() { return std::string(bytes(count())); }
  std::vector<DocId> postings() {
    const std::size_t n = count();
    std::vector<DocId> out;
    out.reserve(n);
    std::uint64_t prev = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::uint64_t delta = varint();
      if (i > 0 && delta == 0) corrupt("postings not strictly increasing");
      prev += delta;
      if (prev > UINT32_MAX) corrupt("doc id out of range");
      out.push_back(static_cast<DocId>(prev));
    }
    return out;
  }
  Reader section(std::string_view tag) {
    if (bytes(4) != tag) corrupt("expected section " + std::string(tag));
    const std::uint64_t len = u64();
    if (len > remaining()) corrupt("section " + std::string(tag) + " overruns the file");
    return Reader(bytes(static_cast<std::size_t>(len)));
  }

 private:
  std::string_view data_;
  std::size_t pos_ = 0;
};

void write_index(Writer& w, const PostingsIndex& index, const TokenDictionary& dict) {
  const auto items = index.items(dict);
  w.varint(items.size());
  for (TokenId t : items) {
    w.varint(t);
    w.postings(index.postings(t));
  }
}

PostingsIndex read_index(Reader& r, const TokenDictionary& dict) {
  PostingsIndex index;
  const std::size_t n = r.count();
  for (std::size_t i = 0; i < n; ++i) {
    const TokenId t = r.u32_varint();
    if (t >= dict.size()) corrupt("token id out of range");
    if (!index.restore_list(t, r.postings())) corrupt("invalid postings list");
  }
  return index;
}

void write_tree_node(Writer& w, const CompanyNameTree& tree, const CompanyNameTree::Node& node) {
  w.varint(node.elements.size());
  for (const auto& e : node.elements) {
    w.varint(e.token);
    const std::uint8_t flags = (e.terminal() ? 1 : 0) | (e.child != CompanyNameTree::kNoNode ? 2 : 0);
    w.u8(flags);
    if (flags & 1) w.postings(e.postings);
    if (flags & 2) write_tree_node(w, tree, tree.node(e.child));
  }
}

std::uint32_t read_tree_node(Reader& r, std::vector<CompanyNameTree::Node>& arena, std::size_t depth) {
  if (depth > 4096) corrupt("tree too deep");
  const auto index = static_cast<std::uint32_t>(arena.size());
  arena.emplace_back();
  const std::size_t n = r.count();
  std::vector<CompanyNameTree::Element> elements;
  elements.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    CompanyNameTree::Element e;
    e.token = r.u32_varint();
    const std::uint8_t flags = r.u8();
    if (flags & ~3u) corrupt("bad element flags");
    if (flags & 1) e.postings = r.postings();
    if (flags & 2) e.child = read_tree_node(r, arena, depth + 1);
    elements.push_back(std::move(e));
  }
  arena[index].elements = std::move(elements);
  return index;
}

void check_version(std::string_view bytes) {
  if (bytes.size() < kMagic.size() + 1) corrupt("file too short for a header");
  if (bytes.substr(0, kMagic.size()) != kMagic) corrupt("bad magic bytes");
  const auto found = static_cast<std::uint8_t>(bytes[kMagic.size()]);
  if (found != kSnapshotVersion) {
    corrupt("unsupported snapshot version: expected " + std::to_string(kSnapshotVersion) + ", found " +
            std::to_string(found));
  }
}

std::span<const unsigned char> as_bytes(std::string_view s) {
  return {reinterpret_cast<const unsigned char*>(s.data()), s.size()};
}

}  // namespace

std::string encode_snapshot(const GlobalIndex& index) {
  const TokenDictionary& dict = index.dictionary();
  Writer out;
  out.bytes(kMagic);
  out.u8(kSnapshotVersion);

  Writer dict_section;
  dict_section.varint(dict.size());
  for (const auto& t : dict.tokens()) dict_section.str(t);
  out.section(kTagDict, dict_section);

  Writer parts;
  parts.varint(index.partitions().size());
  for (const auto& p : index.partitions()) {
    parts.str(p.key.country);
    parts.u8(static_cast<std::uint8_t>(p.key.customer_type));
    parts.varint(p.record_count);
    if (p.key.customer_type == CustomerType::kCorporate) {
      const auto* root = p.company_names.root();
      parts.u8(root ? 1 : 0);
      if (root) write_tree_node(parts, p.company_names, *root);
    } else {
      write_index(parts, p.customer_names, dict);
    }
    write_index(parts, p.addresses, dict);
  }
  out.section(kTagPartitions, parts);

  Writer recs;
  recs.varint(index.audit_position());
  recs.varint(index.records().size());
  for (const auto& r : index.records()) {
    recs.str(r.fid);
    recs.str(r.cid);
    recs.u8(static_cast<std::uint8_t>(r.customer_type));
    for (const std::string* f : {&r.first_name, &r.last_name, &r.company_name, &r.street, &r.town, &r.zip,
                                 &r.country_code, &r.country}) {
      recs.str(*f);
    }
  }
  out.section(kTagRecords, recs);

  const std::uint32_t crc = kernels::crc32c(as_bytes(out.data()));
  out.bytes(kTagChecksum);
  out.u64(4);
  out.u32(crc);
  return out.take();
}

GlobalIndex decode_snapshot(std::string_view bytes) {
  check_version(bytes);
  constexpr std::size_t kTrailer = 4 + 8 + 4;
  if (bytes.size() < kMagic.size() + 1 + kTrailer) corrupt("file too short for a checksum");
  const std::string_view body = bytes.substr(0, bytes.size() - kTrailer);
  {
    Reader trailer(bytes.substr(body.size()));
    if (trailer.bytes(4) != kTagChecksum || trailer.u64() != 4) corrupt("missing checksum section");
    const std::uint32_t stored = trailer.u32();
    const std::uint32_t actual = kernels::crc32c(as_bytes(body));
    if (stored != actual) corrupt("checksum mismatch");
  }

  Reader r(body.substr(kMagic.size() + 1));

  Reader dict_section = r.section(kTagDict);
  std::vector<std::string> tokens(dict_section.count());
  for (auto& t : tokens) t = dict_section.str();
  if (!dict_section.done()) corrupt("trailing bytes in DICT");
  auto dict = TokenDictionary::from_tokens(std::move(tokens));
  if (!dict) corrupt("duplicate token in dictionary");

  Reader parts = r.section(kTagPartitions);
  std::vector<Partition> partitions(parts.count());
  for (auto& p : partitions) {
    p.key.country = parts.str();
    const std::uint8_t type = parts.u8();
    if (type > 1) corrupt("bad partition type");
    p.key.customer_type = static_cast<CustomerType>(type);
    p.record_count = parts.count();
    if (p.key.customer_type == CustomerType::kCorporate) {
      std::vector<CompanyNameTree::Node> arena;
      if (parts.u8() != 0) read_tree_node(parts, arena, 0);
      auto tree = CompanyNameTree::from_nodes(std::move(arena), *dict);
      if (!tree) corrupt("invalid company name tree");
      p.company_names = std::move(*tree);
    } else {
      p.customer_names = read_index(parts, *dict);
    }
    p.addresses = read_index(parts, *dict);
  }
  if (!parts.done()) corrupt("trailing bytes in PART");

  Reader recs = r.section(kTagRecords);
  const std::uint64_t audit_position = recs.varint();
  std::vector<RawRecord> records(recs.count());
  for (auto& rec : records) {
    rec.fid = recs.str();
    rec.cid = recs.str();
    const std::uint8_t type = recs.u8();
    if (type > 2) corrupt("bad customer type");
    rec.customer_type = static_cast<CustomerType>(type);
    for (std::string* f : {&rec.first_name, &rec.last_name, &rec.company_name, &rec.street, &rec.town, &rec.zip,
                           &rec.country_code, &rec.country}) {
      *f = recs.str();
    }
  }
  if (!recs.done()) corrupt("trailing bytes in RECS");
  if (!r.done()) corrupt("unexpected data after RECS");

  auto index = GlobalIndex::restore(std::move(*dict), std::move(partitions), std::move(records), audit_position);
  if (!index) corrupt("index structure fails consistency checks");
  return std::move(*index);
}

fs::path audit_path_for(const fs::path& snapshot) { return fs::path(snapshot.string() + ".audit"); }

std::size_t append_audit_log(const GlobalIndex& index, const fs::path& audit_path) {
  std::uint64_t on_disk = 0;
  {
    std::ifstream in(audit_path);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty()) ++on_disk;
    }
  }
  std::string pending;
  std::size_t written = 0;
  for (const auto& e : index.audit_log()) {
    if (e.sequence < on_disk) continue;
    pending += std::to_string(e.sequence) + "\t" + std::to_string(e.timestamp) + "\t" + e.key.fid + "\t" +
               e.key.cid + "\t" + e.action + "\n";
    ++written;
  }
  if (written == 0) return 0;
  std::ofstream out(audit_path, std::ios::app | std::ios::binary);
  out << pending;
  out.flush();
  if (!out) throw Error(ErrorCode::kIoFailure, audit_path.string() + ": append failed");
  return written;
}

fs::path rotate_audit_log(const fs::path& snapshot) {
  const fs::path current = audit_path_for(snapshot);
  if (!fs::exists(current)) return {};
  for (int n = 1;; ++n) {
    fs::path aside(current.string() + "." + std::to_string(n));
    if (fs::exists(aside)) continue;
    std::error_code ec;
    fs::rename(current, aside, ec);
    if (ec) throw Error(ErrorCode::kIoFailure, current.string() + ": " + ec.message());
    return aside;
  }
}

void save(const GlobalIndex& index, const fs::path& path) {
  if (!index.audit_log().empty()) append_audit_log(index, audit_path_for(path));
  write_file_atomic(path, encode_snapshot(index));
}

GlobalIndex load(const fs::path& path) {
  std::string bytes;
  try {
    bytes = read_file(path);
  } catch (const Error& e) {
    throw Error(ErrorCode::kIoFailure, path.string() + ": cannot read snapshot");
  }
  return decode_snapshot(bytes);
}

}  // namespace cnix
