#include <algorithm>

#include "cnix/kernels/intersect.hpp"

namespace cnix::kernels {

std::size_t intersect_scalar(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b,
                             std::uint32_t* out) noexcept {
  std::size_t i = 0, j = 0, n = 0;
  while (i < a.size() && j < b.size()) {
    const std::uint32_t x = a[i], y = b[j];
    if (x == y) {
      out[n++] = x;
      ++i;
      ++j;
    } else if (x < y) {
      ++i;
    } else {
      ++j;
    }
  }
  return n;
}

std::size_t intersect_gallop(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b,
                             std::uint32_t* out) noexcept {
  if (a.size() > b.size()) std::swap(a, b);
  std::size_t n = 0;
  std::size_t lo = 0;
  for (std::uint32_t x : a) {
    // Grow the probe window until b[lo + step] >= x, then binary search it.
    std::size_t step = 1;
    std::size_t hi = lo;
    while (hi < b.size() && b[hi] < x) {
      lo = hi + 1;
      hi = lo + step;
      step <<= 1;
    }
    hi = std::min(hi + 1, b.size());
    auto it = std::lower_bound(b.begin() + static_cast<std::ptrdiff_t>(lo),
                               b.begin() + static_cast<std::ptrdiff_t>(hi), x);
    lo = static_cast<std::size_t>(it - b.begin());
    if (lo == b.size()) break;
    if (b[lo] == x) {
      out[n++] = x;
      ++lo;
    }
  }
  return n;
}

}  // namespace cnix::kernels
