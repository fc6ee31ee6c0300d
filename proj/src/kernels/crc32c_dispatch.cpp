#include "cnix/kernels/cpu.hpp"
#include "cnix/kernels/crc32c.hpp"

namespace cnix::kernels {

bool sse42_available() noexcept {
#if defined(__x86_64__)
  return cpu_features().sse42;
#else
  return false;
#endif
}

std::uint32_t crc32c(std::span<const unsigned char> data, std::uint32_t crc) noexcept {
  return sse42_available() ? crc32c_sse42(data, crc) : crc32c_scalar(data, crc);
}

}  // namespace cnix::kernels
