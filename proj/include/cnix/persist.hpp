#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "cnix/global_index.hpp"

namespace cnix {

/// Snapshot container:
///
///   "CNIX" | version:u8 | section* | "CRC " | u64 len=4 | crc32c:u32
///   section = tag:4 bytes | u64 payload length | payload
///
/// Sections appear as DICT, PART, RECS. All integers are little-endian;
/// counts and ids inside payloads are LEB128 varints, strings are
/// length-prefixed UTF-8, postings are delta-encoded and trees are written
/// pre-order. The CRC covers every byte before the CRC section.
inline constexpr std::uint8_t kSnapshotVersion = 1;

std::string encode_snapshot(const GlobalIndex& index);
// Throws Error(kCorruptSnapshot); version mismatches are reported before the
// checksum or any section is examined.
GlobalIndex decode_snapshot(std::string_view bytes);

// Atomic: writes a temporary file and renames it over `path`. Audit events
// not yet on disk are appended to audit_path_for(path) first.
void save(const GlobalIndex& index, const std::filesystem::path& path);
GlobalIndex load(const std::filesystem::path& path);

std::filesystem::path audit_path_for(const std::filesystem::path& snapshot);

// One event per line: sequence<TAB>unix-seconds<TAB>fid<TAB>cid<TAB>action.
// Appends the events whose sequence is at or past the number of lines
// already in the file; returns how many were written.
std::size_t append_audit_log(const GlobalIndex& index, const std::filesystem::path& audit_path);
// A freshly built index starts its event sequence at 0 again. Moves an
// existing audit log to <audit>.<n> (first free n) so the new history starts
// in an empty file. Returns the new name, or empty if there was no log.
std::filesystem::path rotate_audit_log(const std::filesystem::path& snapshot);

}  // namespace cnix
