#include "arhmm/kernels/kernels.hpp"

#include "backends.hpp"

#include <atomic>
#include <cstdlib>
#include <string_view>

namespace arhmm::kernels {
namespace {

const Backend* pick_default() {
  if (const char* env = std::getenv("ARHMM_KERNELS")) {
    const std::string_view name(env);
    if (!name.empty()) {
      for (const Backend* b : available()) {
        if (name == b->name) return b;
      }
      // Unknown or unsupported name: fail closed on the portable backend
      // rather than aborting library initialization.
      return &scalar();
    }
  }
#if defined(__x86_64__) || defined(_M_X64)
  if (avx2_supported()) return &avx2();
#elif defined(__aarch64__)
  return &neon();
#endif
  return &scalar();
}

std::atomic<const Backend*>& active_slot() {
  static std::atomic<const Backend*> slot{pick_default()};
  return slot;
}

} // namespace

std::vector<const Backend*> available() {
  std::vector<const Backend*> out{&scalar()};
#if defined(__x86_64__) || defined(_M_X64)
  if (avx2_supported()) out.push_back(&avx2());
#elif defined(__aarch64__)
  out.push_back(&neon());
#endif
  return out;
}

const Backend& active() { return *active_slot().load(std::memory_order_acquire); }

bool force(std::string_view name) {
  for (const Backend* b : available()) {
    if (name == b->name) {
      active_slot().store(b, std::memory_order_release);
      return true;
    }
  }
  return false;
}

} // namespace arhmm::kernels
