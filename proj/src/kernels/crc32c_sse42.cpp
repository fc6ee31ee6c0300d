#include <cstring>

#include "cnix/kernels/crc32c.hpp"

#if defined(__x86_64__)
#include <nmmintrin.h>
#endif

namespace cnix::kernels {

#if defined(__x86_64__)

std::uint32_t crc32c_sse42(std::span<const unsigned char> data, std::uint32_t crc) noexcept {
  std::uint64_t c = ~crc;
  const unsigned char* p = data.data();
  std::size_t len = data.size();
  while (len >= 8) {
    std::uint64_t word;
    std::memcpy(&word, p, 8);
    c = _mm_crc32_u64(c, word);
    p += 8;
    len -= 8;
  }
  auto c32 = static_cast<std::uint32_t>(c);
  while (len-- > 0) c32 = _mm_crc32_u8(c32, *p++);
  return ~c32;
}

#else

std::uint32_t crc32c_sse42(std::span<const unsigned char> data, std::uint32_t crc) noexcept {
  return crc32c_scalar(data, crc);
}

#endif

}  // namespace cnix::kernels
