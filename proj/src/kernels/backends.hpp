#pragma once

#include "arhmm/kernels/kernels.hpp"

namespace arhmm::kernels {

#if defined(__x86_64__) || defined(_M_X64)
const Backend& avx2();
bool avx2_supported();
#endif

#if defined(__aarch64__)
const Backend& neon();
#endif

} // namespace arhmm::kernels
