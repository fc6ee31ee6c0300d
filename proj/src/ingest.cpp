#include "cnix/ingest.hpp"

#include <cstdio>
#include <fstream>
#include <future>
#include <set>
#include <sstream>
#include <unistd.h>

#include "cnix/error.hpp"
#include "cnix/normalize.hpp"

namespace cnix {

namespace fs = std::filesystem;

std::vector<std::string_view> split_fields(std::string_view line, char delimiter) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delimiter, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kSourceUnreadable, path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::kSourceUnreadable, path.string());
  return buf.str();
}

void write_file_atomic(const fs::path& path, std::string_view bytes) {
  const fs::path tmp = path.string() + ".tmp." + std::to_string(::getpid());
  std::FILE* f = std::fopen(tmp.c_str(), "wb");
  if (!f) throw Error(ErrorCode::kIoFailure, tmp.string() + ": cannot open for writing");
  const bool written = std::fwrite(bytes.data(), 1, bytes.size(), f) == bytes.size();
  const bool flushed = std::fflush(f) == 0 && ::fsync(::fileno(f)) == 0;
  const bool closed = std::fclose(f) == 0;
  if (!written || !flushed || !closed) {
    std::error_code ignored;
    fs::remove(tmp, ignored);
    throw Error(ErrorCode::kIoFailure, tmp.string() + ": write failed");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::kIoFailure, path.string() + ": " + ec.message());
  }
}

SourceConfig SourceConfig::parse(std::string_view text, const fs::path& base_dir) {
  SourceConfig cfg;
  std::set<std::string, std::less<>> fids;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw Error(ErrorCode::kInvalidConfig, "line " + std::to_string(line_no) + ": expected FID<TAB>PATH");
    }
    std::string fid = trim(std::string_view(line).substr(0, tab));
    std::string path = trim(std::string_view(line).substr(tab + 1));
    if (fid.empty() || path.empty()) {
      throw Error(ErrorCode::kInvalidConfig, "line " + std::to_string(line_no) + ": empty fid or path");
    }
    if (!fids.insert(fid).second) {
      throw Error(ErrorCode::kInvalidConfig, "fid '" + fid + "' listed twice");
    }
    fs::path p(path);
    if (p.is_relative()) p = base_dir / p;
    cfg.sources.push_back(SourceEntry{std::move(fid), std::move(p)});
  }
  return cfg;
}

SourceConfig SourceConfig::load(const fs::path& path) {
  return parse(read_file(path), path.parent_path());
}

std::string SourceConfig::format() const {
  std::string out = "# FID<TAB>PATH\n";
  for (const auto& s : sources) out += s.fid + "\t" + s.path.string() + "\n";
  return out;
}

std::vector<RawRecord> parse_records(std::string_view text, std::string_view fid, const std::string& origin) {
  std::vector<RawRecord> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool header_seen = false;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    auto malformed = [&](const std::string& why) {
      return Error(ErrorCode::kMalformedRow, origin + ":" + std::to_string(line_no) + ": " + why);
    };
    if (!header_seen) {
      if (line != kRecordHeader) throw malformed("unexpected header");
      header_seen = true;
      continue;
    }
    if (line.empty()) continue;

    auto fields = split_fields(line, '|');
    if (fields.size() != 10) throw malformed("expected 10 fields, found " + std::to_string(fields.size()));
    if (fields[0].empty()) throw malformed("missing CID");
    auto type = parse_type_code(fields[1]);
    if (!type) throw malformed("TYPE must be C, I or J");

    RawRecord r;
    r.fid = std::string(fid);
    r.cid = std::string(fields[0]);
    r.customer_type = *type;
    r.first_name = std::string(fields[2]);
    r.last_name = std::string(fields[3]);
    r.company_name = std::string(fields[4]);
    r.street = std::string(fields[5]);
    r.town = std::string(fields[6]);
    r.zip = std::string(fields[7]);
    r.country_code = std::string(fields[8]);
    r.country = std::string(fields[9]);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<RawRecord> read_record_file(const fs::path& path, std::string_view fid) {
  return parse_records(read_file(path), fid, path.string());
}

std::string format_records(std::span<const RawRecord> records) {
  std::string out(kRecordHeader);
  out.push_back('\n');
  for (const auto& r : records) {
    const std::string_view fields[] = {r.cid, r.first_name, r.last_name, r.company_name, r.street,
                                       r.town, r.zip, r.country_code, r.country};
    for (std::string_view f : fields) {
      if (f.find_first_of("|\r\n") != std::string_view::npos) {
        throw Error(ErrorCode::kInvalidParams, "value '" + std::string(f) + "' of " + to_string(r.key()) +
                                                   " contains a delimiter or line break");
      }
    }
    out += r.cid;
    out.push_back('|');
    out.push_back(type_code(r.customer_type));
    for (std::size_t k = 1; k < std::size(fields); ++k) {
      out.push_back('|');
      out += fields[k];
    }
    out.push_back('\n');
  }
  return out;
}

void write_record_file(const fs::path& path, std::span<const RawRecord> records) {
  write_file_atomic(path, format_records(records));
}

std::vector<RawRecord> load_sources(const SourceConfig& config) {
  std::vector<std::future<std::vector<RawRecord>>> pending;
  pending.reserve(config.sources.size());
  for (const auto& s : config.sources) {
    pending.push_back(std::async(std::launch::async, [&s] { return read_record_file(s.path, s.fid); }));
  }
  std::vector<RawRecord> out;
  for (auto& p : pending) {
    auto part = p.get();
    out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  return out;
}

}  // namespace cnix
