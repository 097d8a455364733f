#pragma once
// Evaluation sets: images of monomials x^n and Dickson polynomials D_n(x,a)
// over GF(q), exact value-set sizes, and fiber sizes of the Dickson map.

#include "mss/field.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mss {

struct EvalSetDesc {
  enum class Kind { Monomial, Dickson, Explicit };
  Kind kind = Kind::Monomial;
  uint64_t n = 1;           // degree, >= 1 for symbolic sets
  Elem a = 0;               // Dickson parameter
  std::vector<Elem> elems;  // explicit sets only

  bool symbolic() const { return kind != Kind::Explicit; }
  std::string text() const;
};

// "monomial:n=2" | "dickson:n=3,a=5" (a may be "poly:..") | "explicit:0,1,4"
EvalSetDesc parse_set(const Field& f, const std::string& desc);

// D_n(x,a) via the two-term recurrence D_j = x D_{j-1} - a D_{j-2},
// D_0 = 2, D_1 = x
Elem dickson_eval(const Field& f, uint64_t n, Elem a, Elem x);
// the same value by the closed binomial form
//   sum_i n/(n-i) C(n-i,i) (-a)^i x^(n-2i)
// with integer coefficients reduced mod p; kept as an independent cross-check
Elem dickson_eval_closed(const Field& f, uint64_t n, Elem a, Elem x);

struct ImageSet {
  std::vector<Elem> elements;  // ascending, duplicate-free
  uint64_t size() const { return elements.size(); }
};

// materialize the evaluation set; symbolic sets over q > cap raise
// BudgetExceeded rather than enumerate
ImageSet image_set(const Field& f, const EvalSetDesc& d,
                   uint64_t cap = (1ull << 24));

struct ValueSetSize {
  uint64_t size = 0;
  bool enumerated = false;  // true when no closed formula applies
};

// exact |image|.  Closed forms: monomial (and Dickson a=0) for every q,
// and Dickson a != 0 for odd q (half-gcd formula with 2-adic correction).
// Even-q Dickson with a != 0 is enumerated and flagged as such.
ValueSetSize value_set_size(const Field& f, const EvalSetDesc& d,
                            uint64_t cap = (1ull << 24));

// |D_n(., a)^{-1}(D_n(x0, a))|; requires n >= 2 and a != 0.
// Degrees divisible by p are reduced first: D_{p n1}(x,a) = D_{n1}(x,a)^p and
// the Frobenius is injective, so the fibers coincide with those of D_{n1}.
uint64_t preimage_count(const Field& f, uint64_t n, Elem a, Elem x0);

}  // namespace mss
