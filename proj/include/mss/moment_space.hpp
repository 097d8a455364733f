#pragma once
// Packed moment states and translation kernels.
//
// A moment vector (one field element per active moment index) is packed into
// a base-p digit string of s*m_p digits; the packed value doubles as an array
// index in [0, p^digits).  Field addition is digit-wise mod p, so adding a
// fixed vector to every state is a composition of per-digit block rotations.
// The exact engines spend nearly all of their time in these kernels:
//   subset DP:  layer_j |= / += translate(layer_{j-1}, contribution(y)).

#include "mss/bigint.hpp"
#include "mss/field.hpp"

#include <cstdint>
#include <vector>

namespace mss {

struct MomentSpace {
  uint64_t p = 0;
  uint32_t digits = 0;           // s * m_p
  uint64_t size = 0;             // p^digits
  std::vector<uint64_t> stride;  // stride[i] = p^i, 0 <= i <= digits

  // throws BudgetExceeded when p^(s*m_p) does not fit the index arithmetic
  static MomentSpace make(const Field& f, uint32_t m_p);

  // pack element encodings, coordinate 0 in the lowest digits
  uint64_t pack(const std::vector<Elem>& v) const;
  uint64_t add(uint64_t x, uint64_t y) const;  // digit-wise mod p
  uint64_t negate(uint64_t x) const;
  uint64_t sub(uint64_t x, uint64_t y) const { return add(x, negate(y)); }
};

struct BitArray {
  std::vector<uint64_t> w;
  uint64_t nbits = 0;

  void resize(uint64_t n) {
    nbits = n;
    w.assign((n + 63) / 64, 0);
  }
  bool get(uint64_t i) const { return (w[i >> 6] >> (i & 63)) & 1; }
  void set(uint64_t i) { w[i >> 6] |= 1ull << (i & 63); }
  uint64_t popcount() const;
};

// dst |= src translated by delta (dst[t] |= src[sub(t, delta)])
class BitTranslator {
 public:
  explicit BitTranslator(const MomentSpace& ms);
  void or_translated(const BitArray& src, BitArray& dst, uint64_t delta);

 private:
  const MomentSpace& ms_;
  BitArray buf_[2];
};

// dst[t] += src[sub(t, delta)] for count arrays (T: uint64_t or BigInt)
template <class T>
class AddTranslator {
 public:
  explicit AddTranslator(const MomentSpace& ms) : ms_(ms) {
    buf_[0].resize(ms.size);
    buf_[1].resize(ms.size);
  }
  void add_translated(const std::vector<T>& src, std::vector<T>& dst,
                      uint64_t delta);

 private:
  const MomentSpace& ms_;
  std::vector<T> buf_[2];
};

extern template class AddTranslator<uint64_t>;
extern template class AddTranslator<BigInt>;

}  // namespace mss
