#pragma once
// Arithmetic in GF(p^s), q = p^s <= 2^32.
//
// Elements travel as integer encodings: the element with coordinates
// (c_0, ..., c_{s-1}) over the power basis {1, x, ..., x^{s-1}} is encoded
// as sum c_i p^i in [0, q).  The modulus is a monic irreducible of degree s,
// verified at construction; when omitted, the lexicographically smallest one
// (ordered by integer encoding) is chosen, so a (p, s) pair names one field.
// Small fields (q <= 2^20) build discrete log/antilog tables; larger fields
// fall back to direct polynomial arithmetic.

#include <cstdint>
#include <string>
#include <vector>

namespace mss {

using Elem = uint32_t;

class Field {
 public:
  // modulus, if given, lists s+1 coefficients c_0..c_s (c_s = 1)
  static Field make(uint64_t p, uint32_t s,
                    const std::vector<uint32_t>* modulus = nullptr);

  uint64_t p() const { return p_; }
  uint32_t s() const { return s_; }
  uint64_t q() const { return q_; }
  const std::vector<uint32_t>& modulus() const { return mod_; }

  Elem add(Elem a, Elem b) const;
  Elem sub(Elem a, Elem b) const;
  Elem neg(Elem a) const;
  Elem mul(Elem a, Elem b) const;
  Elem inv(Elem a) const;              // error at 0
  Elem pow(Elem a, uint64_t e) const;  // 0^0 = 1
  Elem frobenius(Elem a) const { return pow(a, p_); }

  uint32_t trace(Elem a) const;           // absolute trace, value in [0, p)
  int quadratic_character(Elem a) const;  // p odd; 0 at 0, else +1 / -1

  Elem from_coeffs(const std::vector<uint32_t>& c) const;
  std::vector<uint32_t> coeffs(Elem a) const;
  Elem elem_from_int(uint64_t v) const;  // range-checked

  bool has_tables() const { return !exp_.empty(); }
  Elem generator() const;  // primitive element; requires tables

  std::string descriptor() const;  // "p^s:modulus=c0,...,cs"

 private:
  Field() = default;

  uint64_t p_ = 0, q_ = 0;
  uint32_t s_ = 0;
  std::vector<uint32_t> mod_;       // length s+1, monic
  std::vector<Elem> exp_;           // 2(q-1) generator powers (small q only)
  std::vector<uint32_t> log_;       // discrete logs on [1, q)
  std::vector<uint32_t> tr_basis_;  // trace of basis element x^i, i < s
  Elem gen_ = 0;

  Elem mul_nt(Elem a, Elem b) const;  // table-free multiply
  Elem pow_nt(Elem a, uint64_t e) const;
  void init_trace();
  void build_tables();
};

// "p", "p^s", "p^s:modulus=c0,c1,...,cs"; a bare prime power such as "4096"
// is accepted and factored
Field parse_field(const std::string& desc);

// element text: a plain encoding "17", or "poly:c0,c1,..." coefficients
Elem parse_elem(const Field& f, const std::string& text);
std::string format_elem(const Field& f, Elem a);

bool is_prime_u64(uint64_t n);
// trial division; returns (prime, multiplicity) pairs in increasing order
std::vector<std::pair<uint64_t, uint32_t>> factorize(uint64_t n);

}  // namespace mss
