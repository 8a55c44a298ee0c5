#include "hlab/common.hpp"

#include <atomic>
#include <cstdlib>
#include <limits>

namespace hlab {

namespace {
std::atomic<std::size_t> g_override{0};
}

Budget Budget::current() {
  Budget b;
  if (const std::size_t o = g_override.load(); o != 0) {
    b.max_elements = o;
    return b;
  }
  if (const char* env = std::getenv("HLAB_BUDGET"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != nullptr && *end == '\0' && v > 0) b.max_elements = static_cast<std::size_t>(v);
  }
  return b;
}

void Budget::set_override(std::size_t max_elements) { g_override.store(max_elements); }

void Budget::check_elements(std::size_t count, const std::string& what) const {
  if (count > max_elements) {
    throw BudgetExceeded(what + ": " + std::to_string(count) + " elements exceeds cap " +
                         std::to_string(max_elements) + " (set HLAB_BUDGET to raise)");
  }
}

void Budget::check_eigen_rows(std::size_t rows, const std::string& what) const {
  if (rows > max_eigen_rows) {
    throw BudgetExceeded(what + ": eigensolver dimension " + std::to_string(rows) +
                         " exceeds cap " + std::to_string(max_eigen_rows));
  }
}

std::size_t checked_pow(std::size_t base, std::size_t exponent) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < exponent; ++i) {
    if (base != 0 && r > std::numeric_limits<std::size_t>::max() / base) {
      throw BudgetExceeded("tensor size overflows size_t");
    }
    r *= base;
  }
  return r;
}

}  // namespace hlab
