#include "mss/moment_space.hpp"

#include "mss/errors.hpp"

#include <bit>
#include <cstring>

namespace mss {

MomentSpace MomentSpace::make(const Field& f, uint32_t m_p) {
  MomentSpace ms;
  ms.p = f.p();
  ms.digits = f.s() * m_p;
  ms.stride.assign(ms.digits + 1, 1);
  for (uint32_t i = 0; i < ms.digits; ++i) {
    if (ms.stride[i] > (1ull << 62) / ms.p)
      throw BudgetExceeded("moment state space q^m_p overflows the index range");
    ms.stride[i + 1] = ms.stride[i] * ms.p;
  }
  ms.size = ms.stride[ms.digits];
  return ms;
}

uint64_t MomentSpace::pack(const std::vector<Elem>& v) const {
  const uint32_t s = v.empty() ? 0 : digits / static_cast<uint32_t>(v.size());
  uint64_t out = 0;
  for (size_t i = 0; i < v.size(); ++i) out += v[i] * stride[s * i];
  return out;
}

uint64_t MomentSpace::add(uint64_t x, uint64_t y) const {
  uint64_t out = 0;
  for (uint32_t i = 0; i < digits; ++i) {
    uint64_t d = x % p + y % p;
    if (d >= p) d -= p;
    out += d * stride[i];
    x /= p;
    y /= p;
  }
  return out;
}

uint64_t MomentSpace::negate(uint64_t x) const {
  uint64_t out = 0;
  for (uint32_t i = 0; i < digits; ++i) {
    uint64_t d = x % p;
    out += (d ? p - d : 0) * stride[i];
    x /= p;
  }
  return out;
}

uint64_t BitArray::popcount() const {
  uint64_t c = 0;
  for (uint64_t x : w) c += static_cast<uint64_t>(std::popcount(x));
  return c;
}

namespace {

inline uint64_t bit_mask(uint64_t n) { return n >= 64 ? ~0ull : (1ull << n) - 1; }

// copy len bits, arbitrary alignment; src and dst must not overlap
void copy_bits(uint64_t* dst, uint64_t dpos, const uint64_t* src, uint64_t spos,
               uint64_t len) {
  while (len) {
    const uint64_t db = dpos & 63, sb = spos & 63;
    uint64_t chunk = 64 - (db > sb ? db : sb);
    if (chunk > len) chunk = len;
    const uint64_t m = bit_mask(chunk);
    const uint64_t bits = (src[spos >> 6] >> sb) & m;
    uint64_t& d = dst[dpos >> 6];
    d = (d & ~(m << db)) | (bits << db);
    dpos += chunk;
    spos += chunk;
    len -= chunk;
  }
}

// same, but OR the bits in instead of overwriting
void or_bits(uint64_t* dst, uint64_t dpos, const uint64_t* src, uint64_t spos,
             uint64_t len) {
  while (len) {
    const uint64_t db = dpos & 63, sb = spos & 63;
    uint64_t chunk = 64 - (db > sb ? db : sb);
    if (chunk > len) chunk = len;
    const uint64_t bits = (src[spos >> 6] >> sb) & bit_mask(chunk);
    dst[dpos >> 6] |= bits << db;
    dpos += chunk;
    spos += chunk;
    len -= chunk;
  }
}

// in-word bit permutation b -> b ^ low (delta-swap ladder)
inline uint64_t xor_shuffle(uint64_t x, uint32_t low) {
  static constexpr uint64_t M[6] = {
      0x5555555555555555ull, 0x3333333333333333ull, 0x0f0f0f0f0f0f0f0full,
      0x00ff00ff00ff00ffull, 0x0000ffff0000ffffull, 0x00000000ffffffffull};
  for (uint32_t b = 0; b < 6; ++b)
    if (low & (1u << b)) {
      const uint32_t sh = 1u << b;
      x = ((x >> sh) & M[b]) | ((x & M[b]) << sh);
    }
  return x;
}

}  // namespace

BitTranslator::BitTranslator(const MomentSpace& ms) : ms_(ms) {
  if (ms.p != 2) {
    buf_[0].resize(ms.size);
    buf_[1].resize(ms.size);
  }
}

void BitTranslator::or_translated(const BitArray& src, BitArray& dst,
                                  uint64_t delta) {
  const uint64_t n = ms_.size;
  if (delta == 0) {
    for (size_t i = 0; i < src.w.size(); ++i) dst.w[i] |= src.w[i];
    return;
  }
  if (ms_.p == 2) {
    // adding delta is XOR of indices: per destination word, fetch the matching
    // source word and permute its bits in place
    const uint64_t hi = delta >> 6;
    const uint32_t low = static_cast<uint32_t>(delta & 63);
    if (n < 64) {
      dst.w[0] |= xor_shuffle(src.w[0], low);
      return;
    }
    for (uint64_t wi = 0; wi < src.w.size(); ++wi)
      dst.w[wi] |= xor_shuffle(src.w[wi ^ hi], low);
    return;
  }
  // general p: one block rotation per nonzero digit of delta, ping-ponging
  // between scratch buffers; the final rotation ORs straight into dst
  uint32_t nz[64];
  uint32_t cnt = 0;
  {
    uint64_t d = delta;
    for (uint32_t i = 0; i < ms_.digits; ++i) {
      if (d % ms_.p) nz[cnt++] = i;
      d /= ms_.p;
    }
  }
  const BitArray* cur = &src;
  int which = 0;
  for (uint32_t t = 0; t < cnt; ++t) {
    const uint32_t dim = nz[t];
    const uint64_t c = (delta / ms_.stride[dim]) % ms_.p;
    const uint64_t blk = ms_.stride[dim];        // bits per rotation unit
    const uint64_t grp = ms_.stride[dim + 1];    // bits per group
    const uint64_t head = (ms_.p - c) * blk;     // bits that move up by c*blk
    const bool last = (t + 1 == cnt);
    BitArray* out = last ? &dst : &buf_[which];
    for (uint64_t g = 0; g < n; g += grp) {
      if (last) {
        or_bits(out->w.data(), g + c * blk, cur->w.data(), g, head);
        or_bits(out->w.data(), g, cur->w.data(), g + head, grp - head);
      } else {
        copy_bits(out->w.data(), g + c * blk, cur->w.data(), g, head);
        copy_bits(out->w.data(), g, cur->w.data(), g + head, grp - head);
      }
    }
    cur = out;
    which ^= 1;
  }
}

template <class T>
void AddTranslator<T>::add_translated(const std::vector<T>& src,
                                      std::vector<T>& dst, uint64_t delta) {
  const uint64_t n = ms_.size;
  if (delta == 0) {
    for (uint64_t i = 0; i < n; ++i) dst[i] += src[i];
    return;
  }
  uint32_t nz[64];
  uint32_t cnt = 0;
  {
    uint64_t d = delta;
    for (uint32_t i = 0; i < ms_.digits; ++i) {
      if (d % ms_.p) nz[cnt++] = i;
      d /= ms_.p;
    }
  }
  const std::vector<T>* cur = &src;
  int which = 0;
  for (uint32_t t = 0; t < cnt; ++t) {
    const uint32_t dim = nz[t];
    const uint64_t c = (delta / ms_.stride[dim]) % ms_.p;
    const uint64_t blk = ms_.stride[dim];
    const uint64_t grp = ms_.stride[dim + 1];
    const uint64_t head = (ms_.p - c) * blk;
    const bool last = (t + 1 == cnt);
    std::vector<T>* out = &buf_[which];
    for (uint64_t g = 0; g < n; g += grp) {
      const T* in = cur->data() + g;
      if (last) {
        T* d0 = dst.data() + g;
        for (uint64_t i = 0; i < head; ++i) d0[c * blk + i] += in[i];
        for (uint64_t i = head; i < grp; ++i) d0[i - head] += in[i];
      } else {
        T* d0 = out->data() + g;
        for (uint64_t i = 0; i < head; ++i) d0[c * blk + i] = in[i];
        for (uint64_t i = head; i < grp; ++i) d0[i - head] = in[i];
      }
    }
    if (!last) {
      cur = out;
      which ^= 1;
    }
  }
}

template class AddTranslator<uint64_t>;
template class AddTranslator<BigInt>;

}  // namespace mss
