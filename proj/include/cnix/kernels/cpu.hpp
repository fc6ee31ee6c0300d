#pragma once

namespace cnix::kernels {

struct CpuFeatures {
  bool avx2 = false;
  bool sse42 = false;
};

// Probed once at first use.
const CpuFeatures& cpu_features() noexcept;

}  // namespace cnix::kernels
