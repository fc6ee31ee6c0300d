#pragma once

#include <memory>
#include <mutex>

#include "cnix/global_index.hpp"

namespace cnix {

/// Publishes immutable GlobalIndex snapshots. Readers grab the current
/// snapshot and keep it alive for as long as they use it; writers build the
/// next snapshot off to the side and swap it in, so a reader never sees a
/// half-applied update.
class IndexHandle {
 public:
  explicit IndexHandle(GlobalIndex index = {});

  std::shared_ptr<const GlobalIndex> snapshot() const;

  // Copy-on-write update; writers are serialized.
  UpdateReport update(std::span<const RawRecord> records, const AbbreviationTable& table);

  void replace(GlobalIndex index);

 private:
  void publish(std::shared_ptr<const GlobalIndex> next);

  mutable std::mutex read_mutex_;
  std::mutex write_mutex_;
  std::shared_ptr<const GlobalIndex> current_;
};

}  // namespace cnix
