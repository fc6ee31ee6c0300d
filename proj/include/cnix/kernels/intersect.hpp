#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

// Intersection of strictly increasing uint32 lists (postings of DocIds).
//
// Each variant writes the common elements, in increasing order, to `out`,
// which must have room for min(a.size(), b.size()) values, and returns the
// count. All variants produce identical output for identical input.
namespace cnix::kernels {

std::size_t intersect_scalar(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b,
                             std::uint32_t* out) noexcept;

// Exponential search of the longer list; wins when sizes are very skewed.
std::size_t intersect_gallop(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b,
                             std::uint32_t* out) noexcept;

// 8x8 all-pairs block compare. Only call when avx2_available().
std::size_t intersect_avx2(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b,
                           std::uint32_t* out) noexcept;

bool avx2_available() noexcept;

enum class IntersectImpl { kAuto, kScalar, kGallop, kAvx2 };

// Pins the variant used by intersect(); kAuto restores runtime selection.
// Requesting kAvx2 on a machine without it falls back to kAuto.
void force_intersect_impl(IntersectImpl impl) noexcept;
IntersectImpl active_intersect_impl() noexcept;
std::string_view impl_name(IntersectImpl impl) noexcept;

// Dispatching entry point. `out` is resized to the result.
void intersect(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b,
               std::vector<std::uint32_t>& out);

}  // namespace cnix::kernels
