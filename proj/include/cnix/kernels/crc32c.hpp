#pragma once

#include <cstdint>
#include <span>

// CRC-32C (Castagnoli, reflected polynomial 0x82F63B78). `crc` is the value
// returned by a previous call, for incremental use; start with 0.
namespace cnix::kernels {

std::uint32_t crc32c_scalar(std::span<const unsigned char> data, std::uint32_t crc = 0) noexcept;
// Hardware crc32 instruction. Only call when sse42_available().
std::uint32_t crc32c_sse42(std::span<const unsigned char> data, std::uint32_t crc = 0) noexcept;

bool sse42_available() noexcept;

std::uint32_t crc32c(std::span<const unsigned char> data, std::uint32_t crc = 0) noexcept;

}  // namespace cnix::kernels
