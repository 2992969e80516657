#include "bcl/parallel.hpp"

#include <charconv>
#include <cstdlib>
#include <string_view>

namespace bcl {

std::size_t worker_count() {
  if (const char* env = std::getenv("BCL_THREADS")) {
    const std::string_view text(env);
    std::size_t n = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), n);
    if (res.ec == std::errc{} && res.ptr == text.data() + text.size() && n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

}  // namespace bcl
