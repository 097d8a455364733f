#include "mss/evalset.hpp"

#include "mss/bigint.hpp"
#include "mss/errors.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace mss {

namespace {

uint64_t gcd_u64(uint64_t a, uint64_t b) { return std::gcd(a, b); }

uint32_t two_adic(uint64_t n) {
  uint32_t t = 0;
  while (n && (n & 1) == 0) n >>= 1, ++t;
  return t;
}

// strip the p-part of the degree: fibers and images of D_{p n1} reduce to n1
uint64_t strip_p(uint64_t n, uint64_t p) {
  while (n % p == 0) n /= p;
  return n;
}

Elem int_mod_p(const Field& f, const BigInt& v) {
  BigInt r = v % static_cast<int64_t>(f.p());
  if (r < 0) r += static_cast<int64_t>(f.p());
  return static_cast<Elem>(r.convert_to<uint64_t>());
}

}  // namespace

std::string EvalSetDesc::text() const {
  switch (kind) {
    case Kind::Monomial:
      return "monomial:n=" + std::to_string(n);
    case Kind::Dickson:
      return "dickson:n=" + std::to_string(n) + ",a=" + std::to_string(a);
    case Kind::Explicit: {
      std::string t = "explicit:";
      for (size_t i = 0; i < elems.size(); ++i) {
        if (i) t += ",";
        t += std::to_string(elems[i]);
      }
      return t;
    }
  }
  return {};
}

EvalSetDesc parse_set(const Field& f, const std::string& desc) {
  auto colon = desc.find(':');
  if (colon == std::string::npos)
    throw std::invalid_argument("set descriptor: expected 'kind:...', got '" + desc + "'");
  std::string kind = desc.substr(0, colon);
  std::string tail = desc.substr(colon + 1);
  EvalSetDesc d;
  if (kind == "monomial") {
    d.kind = EvalSetDesc::Kind::Monomial;
    if (tail.rfind("n=", 0) != 0)
      throw std::invalid_argument("set descriptor: monomial needs 'n=<degree>'");
    d.n = std::stoull(tail.substr(2));
    if (d.n < 1) throw std::invalid_argument("set descriptor: degree must be >= 1");
  } else if (kind == "dickson") {
    d.kind = EvalSetDesc::Kind::Dickson;
    auto asep = tail.find(",a=");
    if (tail.rfind("n=", 0) != 0 || asep == std::string::npos)
      throw std::invalid_argument("set descriptor: dickson needs 'n=<degree>,a=<elem>'");
    d.n = std::stoull(tail.substr(2, asep - 2));
    if (d.n < 1) throw std::invalid_argument("set descriptor: degree must be >= 1");
    d.a = parse_elem(f, tail.substr(asep + 3));
  } else if (kind == "explicit") {
    d.kind = EvalSetDesc::Kind::Explicit;
    size_t pos = 0;
    while (pos <= tail.size()) {
      size_t comma = tail.find(',', pos);
      std::string item =
          tail.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      d.elems.push_back(parse_elem(f, item));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (d.elems.empty())
      throw std::invalid_argument("set descriptor: explicit set is empty");
  } else {
    throw std::invalid_argument("set descriptor: unknown kind '" + kind + "'");
  }
  return d;
}

Elem dickson_eval(const Field& f, uint64_t n, Elem a, Elem x) {
  Elem two = f.add(1, 1);
  if (n == 0) return two;
  Elem prev = two, cur = x;
  for (uint64_t j = 2; j <= n; ++j) {
    Elem next = f.sub(f.mul(x, cur), f.mul(a, prev));
    prev = cur;
    cur = next;
  }
  return cur;
}

Elem dickson_eval_closed(const Field& f, uint64_t n, Elem a, Elem x) {
  if (n == 0) return f.add(1, 1);
  Elem acc = 0;
  for (uint64_t i = 0; i <= n / 2; ++i) {
    // n/(n-i) * C(n-i, i) is an integer: equals C(n-i,i) + C(n-i-1, i-1)
    BigInt coef = binomial(n - i, i) * n / (n - i);
    Elem c = int_mod_p(f, coef);
    Elem term = f.mul(c, f.pow(x, n - 2 * i));
    Elem ai = f.pow(a, i);
    if (i & 1) ai = f.neg(ai);
    acc = f.add(acc, f.mul(term, ai));
  }
  return acc;
}

ImageSet image_set(const Field& f, const EvalSetDesc& d, uint64_t cap) {
  ImageSet out;
  if (d.kind == EvalSetDesc::Kind::Explicit) {
    out.elements = d.elems;
    for (Elem e : out.elements)
      if (e >= f.q()) throw std::invalid_argument("explicit set: element out of range");
    std::sort(out.elements.begin(), out.elements.end());
    out.elements.erase(std::unique(out.elements.begin(), out.elements.end()),
                       out.elements.end());
    return out;
  }
  if (f.q() > cap)
    throw BudgetExceeded("image enumeration over q=" + std::to_string(f.q()) +
                         " exceeds cap " + std::to_string(cap));
  const uint64_t q = f.q();
  std::vector<bool> seen(q, false);
  if (d.kind == EvalSetDesc::Kind::Monomial && d.n == 1) {
    out.elements.resize(q);
    for (uint64_t x = 0; x < q; ++x) out.elements[x] = static_cast<Elem>(x);
    return out;
  }
  if (d.kind == EvalSetDesc::Kind::Monomial) {
    for (uint64_t x = 0; x < q; ++x) seen[f.pow(static_cast<Elem>(x), d.n)] = true;
  } else {
    for (uint64_t x = 0; x < q; ++x)
      seen[dickson_eval(f, d.n, d.a, static_cast<Elem>(x))] = true;
  }
  for (uint64_t v = 0; v < q; ++v)
    if (seen[v]) out.elements.push_back(static_cast<Elem>(v));
  return out;
}

ValueSetSize value_set_size(const Field& f, const EvalSetDesc& d, uint64_t cap) {
  const uint64_t q = f.q();
  if (d.kind == EvalSetDesc::Kind::Explicit) {
    ImageSet s = image_set(f, d, cap);
    return {s.size(), false};
  }
  uint64_t n1 = strip_p(d.n, f.p());
  // x^(p^v n1) and x^n1 have the same image; p-free degree also keeps the
  // gcds below intact
  bool monomial_like = d.kind == EvalSetDesc::Kind::Monomial ||
                       (d.kind == EvalSetDesc::Kind::Dickson && d.a == 0);
  if (monomial_like) {
    return {1 + (q - 1) / gcd_u64(n1, q - 1), false};
  }
  if (f.p() == 2) {
    // no closed form is used for even q: enumerate and say so
    ImageSet s = image_set(f, d, cap);
    return {s.size(), true};
  }
  // odd q, a != 0: |V| = (q-1)/(2 g1) + (q+1)/(2 g2) + delta, computed over
  // the common denominator 4 g1 g2 so the result stays exact
  const uint64_t g1 = gcd_u64(n1, q - 1);
  const uint64_t g2 = gcd_u64(n1, q + 1);
  const uint32_t r = two_adic(q * q - 1);
  const uint32_t t = two_adic(n1);
  BigInt num = BigInt(q - 1) * 2 * g2 + BigInt(q + 1) * 2 * g1;
  const BigInt den = BigInt(4) * g1 * g2;
  if (t == r - 1 && f.quadratic_character(d.a) == -1)
    num += den;  // delta = 1
  else if (t >= 1 && t + 2 <= r)
    num += den / 2;  // delta = 1/2
  if (num % den != 0)
    throw std::logic_error("value set size: non-integral total");
  return {(num / den).convert_to<uint64_t>(), false};
}

uint64_t preimage_count(const Field& f, uint64_t n, Elem a, Elem x0) {
  if (n < 2) throw std::invalid_argument("preimage: requires degree n >= 2");
  if (a == 0) throw std::invalid_argument("preimage: requires a != 0");
  const uint64_t q = f.q();
  uint64_t n1 = strip_p(n, f.p());
  if (n1 == 1) return 1;  // pure Frobenius power: a bijection
  const uint64_t g1 = gcd_u64(n1, q - 1);
  const uint64_t g2 = gcd_u64(n1, q + 1);
  const Elem v = dickson_eval(f, n1, a, x0);

  if (f.p() == 2) {
    if (v == 0) return (g1 + g2) / 2;
    // v != 0 forces x0 != 0 (odd-degree Dickson polynomials vanish at 0);
    // z^2 + x0 z + a splits over F_q iff Tr(a / x0^2) = 0
    Elem u = f.mul(a, f.inv(f.mul(x0, x0)));
    return f.trace(u) == 0 ? g1 : g2;
  }

  // odd q
  const Elem two = f.add(1, 1);
  const Elem four = f.mul(two, two);
  const Elem disc = f.sub(f.mul(x0, x0), f.mul(four, a));
  const int e = f.quadratic_character(disc);
  // v = +-2 a^(n/2)  <=>  v^2 = 4 a^n (and the square root is then v/2 itself)
  const bool coincide = f.mul(v, v) == f.mul(four, f.pow(a, n1));
  const uint32_t r = two_adic(q * q - 1);
  const uint32_t t = two_adic(n1);
  const int eta_a = f.quadratic_character(a);
  bool cond_c = false;
  if (coincide && t >= 1) {
    if (eta_a == -1 && t <= r - 1) cond_c = true;
    if (eta_a == 1 && t + 2 <= r && v == f.neg(f.mul(two, f.pow(a, n1 / 2))))
      cond_c = true;
  }
  if (e == 1 && !coincide) return g1;
  if (e == -1 && !coincide) return g2;
  if (e == 1 && cond_c) return g1 / 2;
  if (e == -1 && cond_c) return g2 / 2;
  return (g1 + g2) / 2;
}

}  // namespace mss
