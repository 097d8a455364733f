#pragma once
// Seeded deterministic RNG.  mt19937_64 output is pinned by the standard, but
// std::uniform_int_distribution is not, so bounded draws use rejection
// sampling to stay byte-identical across standard libraries.

#include <cstdint>
#include <random>

namespace mss {

class SeededRng {
 public:
  explicit SeededRng(uint64_t seed) : eng_(seed) {}

  uint64_t next() { return eng_(); }

  // uniform draw from [0, n), n >= 1
  uint64_t below(uint64_t n) {
    if (n <= 1) return 0;
    const uint64_t lim = UINT64_MAX - UINT64_MAX % n;
    for (;;) {
      uint64_t r = eng_();
      if (r < lim) return r % n;
    }
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace mss
