#include <atomic>

#include "cnix/kernels/cpu.hpp"
#include "cnix/kernels/intersect.hpp"

namespace cnix::kernels {

namespace {

std::atomic<IntersectImpl> g_forced{IntersectImpl::kAuto};

// Above this size ratio the galloping variant beats a linear merge.
constexpr std::size_t kGallopRatio = 32;

}  // namespace

bool avx2_available() noexcept { return cpu_features().avx2; }

void force_intersect_impl(IntersectImpl impl) noexcept {
  if (impl == IntersectImpl::kAvx2 && !avx2_available()) impl = IntersectImpl::kAuto;
  g_forced.store(impl, std::memory_order_relaxed);
}

IntersectImpl active_intersect_impl() noexcept { return g_forced.load(std::memory_order_relaxed); }

std::string_view impl_name(IntersectImpl impl) noexcept {
  switch (impl) {
    case IntersectImpl::kAuto: return "auto";
    case IntersectImpl::kScalar: return "scalar";
    case IntersectImpl::kGallop: return "gallop";
    case IntersectImpl::kAvx2: return "avx2";
  }
  return "?";
}

void intersect(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b,
               std::vector<std::uint32_t>& out) {
  out.resize(std::min(a.size(), b.size()));
  if (out.empty()) return;

  IntersectImpl impl = active_intersect_impl();
  if (impl == IntersectImpl::kAuto) {
    const std::size_t small = std::min(a.size(), b.size());
    const std::size_t large = std::max(a.size(), b.size());
    if (large / small >= kGallopRatio) {
      impl = IntersectImpl::kGallop;
    } else {
      impl = avx2_available() ? IntersectImpl::kAvx2 : IntersectImpl::kScalar;
    }
  }

  std::size_t n = 0;
  switch (impl) {
    case IntersectImpl::kGallop: n = intersect_gallop(a, b, out.data()); break;
    case IntersectImpl::kAvx2: n = intersect_avx2(a, b, out.data()); break;
    default: n = intersect_scalar(a, b, out.data()); break;
  }
  out.resize(n);
}

}  // namespace cnix::kernels
