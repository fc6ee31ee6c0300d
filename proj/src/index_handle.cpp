#include "cnix/index_handle.hpp"

namespace cnix {

IndexHandle::IndexHandle(GlobalIndex index) : current_(std::make_shared<const GlobalIndex>(std::move(index))) {}

std::shared_ptr<const GlobalIndex> IndexHandle::snapshot() const {
  std::lock_guard lock(read_mutex_);
  return current_;
}

void IndexHandle::publish(std::shared_ptr<const GlobalIndex> next) {
  std::lock_guard lock(read_mutex_);
  current_ = std::move(next);
}

UpdateReport IndexHandle::update(std::span<const RawRecord> records, const AbbreviationTable& table) {
  std::lock_guard writer(write_mutex_);
  auto next = std::make_shared<GlobalIndex>(*snapshot());
  UpdateReport report = next->update(records, table);
  publish(std::move(next));
  return report;
}

void IndexHandle::replace(GlobalIndex index) {
  std::lock_guard writer(write_mutex_);
  publish(std::make_shared<const GlobalIndex>(std::move(index)));
}

}  // namespace cnix
