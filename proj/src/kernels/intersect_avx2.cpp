#include "cnix/kernels/intersect.hpp"

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>
#endif

namespace cnix::kernels {

#if defined(__x86_64__) || defined(__i386__)

std::size_t intersect_avx2(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b,
                           std::uint32_t* out) noexcept {
  std::size_t i = 0, j = 0, n = 0;
  const std::size_t na = a.size(), nb = b.size();
  const __m256i rotate = _mm256_setr_epi32(1, 2, 3, 4, 5, 6, 7, 0);

  while (i + 8 <= na && j + 8 <= nb) {
    const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a.data() + i));
    __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b.data() + j));

    // Compare every lane of va against all 8 rotations of vb.
    __m256i hits = _mm256_cmpeq_epi32(va, vb);
    for (int r = 1; r < 8; ++r) {
      vb = _mm256_permutevar8x32_epi32(vb, rotate);
      hits = _mm256_or_si256(hits, _mm256_cmpeq_epi32(va, vb));
    }
    auto mask = static_cast<unsigned>(_mm256_movemask_ps(_mm256_castsi256_ps(hits)));
    while (mask != 0) {
      out[n++] = a[i + static_cast<std::size_t>(__builtin_ctz(mask))];
      mask &= mask - 1;
    }

    const std::uint32_t amax = a[i + 7];
    const std::uint32_t bmax = b[j + 7];
    if (amax <= bmax) i += 8;
    if (bmax <= amax) j += 8;
  }

  n += intersect_scalar(a.subspan(i), b.subspan(j), out + n);
  return n;
}


#else

std::size_t intersect_avx2(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b,
                           std::uint32_t* out) noexcept {
  return intersect_scalar(a, b, out);
}

#endif

}  // namespace cnix::kernels
