#pragma once
// Exact integer helpers shared by the counting and regime code.

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>

namespace mss {

using BigInt = boost::multiprecision::cpp_int;

inline BigInt big_pow(const BigInt& base, uint64_t e) {
  BigInt r = 1, b = base;
  while (e) {
    if (e & 1) r *= b;
    b *= b;
    e >>= 1;
  }
  return r;
}

inline BigInt binomial(uint64_t n, uint64_t k) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  BigInt r = 1;
  for (uint64_t i = 1; i <= k; ++i) {
    r *= (n - k + i);
    r /= i;  // exact: r is C(n-k+i, i) after this step
  }
  return r;
}

inline BigInt factorial(uint64_t n) {
  BigInt r = 1;
  for (uint64_t i = 2; i <= n; ++i) r *= i;
  return r;
}

// (n)_k = n (n-1) ... (n-k+1); zero when k > n
inline BigInt falling_factorial_int(uint64_t n, uint64_t k) {
  if (k > n) return 0;
  BigInt r = 1;
  for (uint64_t i = 0; i < k; ++i) r *= (n - i);
  return r;
}

}  // namespace mss
