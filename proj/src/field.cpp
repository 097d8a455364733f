#include "mss/field.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace mss {

namespace {

constexpr uint64_t kTableLimit = 1u << 20;

// ---- plain integer helpers -------------------------------------------------

uint64_t mulmod_u64(uint64_t a, uint64_t b, uint64_t m) {
  return (a * b) % m;  // callers guarantee a,b < m <= 2^32
}

uint64_t powmod_u64(uint64_t a, uint64_t e, uint64_t m) {
  uint64_t r = 1 % m;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod_u64(r, a, m);
    a = mulmod_u64(a, a, m);
    e >>= 1;
  }
  return r;
}

// ---- dense polynomial arithmetic over F_p ----------------------------------
// Coefficient vectors are little-endian and not necessarily normalized.

using Poly = std::vector<uint32_t>;

int poly_deg(const Poly& f) {
  for (int i = static_cast<int>(f.size()) - 1; i >= 0; --i)
    if (f[i]) return i;
  return -1;
}

// a * b mod p (no modulus reduction)
Poly poly_mul(const Poly& a, const Poly& b, uint64_t p) {
  int da = poly_deg(a), db = poly_deg(b);
  if (da < 0 || db < 0) return {};
  std::vector<uint64_t> acc(static_cast<size_t>(da + db + 1), 0);
  for (int i = 0; i <= da; ++i) {
    if (!a[i]) continue;
    for (int j = 0; j <= db; ++j)
      acc[static_cast<size_t>(i + j)] += static_cast<uint64_t>(a[i]) * b[j];
  }
  Poly r(acc.size());
  for (size_t i = 0; i < acc.size(); ++i) r[i] = static_cast<uint32_t>(acc[i] % p);
  return r;
}

// a mod f in place; f monic of degree df
void poly_reduce(Poly& a, const Poly& f, int df, uint64_t p) {
  for (int i = poly_deg(a); i >= df; --i) {
    uint64_t c = a[static_cast<size_t>(i)];
    if (!c) continue;
    a[static_cast<size_t>(i)] = 0;
    for (int j = 0; j < df; ++j) {
      if (!f[static_cast<size_t>(j)]) continue;
      uint64_t sub = mulmod_u64(c, f[static_cast<size_t>(j)], p);
      uint64_t cur = a[static_cast<size_t>(i - df + j)];
      a[static_cast<size_t>(i - df + j)] =
          static_cast<uint32_t>((cur + p - sub) % p);
    }
  }
  a.resize(static_cast<size_t>(df));
}

Poly poly_mulmod(const Poly& a, const Poly& b, const Poly& f, int df, uint64_t p) {
  Poly r = poly_mul(a, b, p);
  if (static_cast<int>(r.size()) < df) r.resize(static_cast<size_t>(df), 0);
  poly_reduce(r, f, df, p);
  return r;
}

Poly poly_powmod(Poly base, uint64_t e, const Poly& f, int df, uint64_t p) {
  Poly r(static_cast<size_t>(df), 0);
  if (df == 0) return r;
  r[0] = 1;
  if (static_cast<int>(base.size()) < df) base.resize(static_cast<size_t>(df), 0);
  poly_reduce(base, f, df, p);
  while (e) {
    if (e & 1) r = poly_mulmod(r, base, f, df, p);
    base = poly_mulmod(base, base, f, df, p);
    e >>= 1;
  }
  return r;
}

Poly poly_gcd(Poly a, Poly b, uint64_t p) {
  while (poly_deg(b) >= 0) {
    // a mod b with b made monic on the fly
    int db = poly_deg(b);
    uint64_t lead = b[static_cast<size_t>(db)];
    if (lead != 1) {
      uint64_t li = powmod_u64(lead, p - 2, p);
      for (auto& c : b) c = static_cast<uint32_t>(mulmod_u64(c, li, p));
    }
    poly_reduce(a, b, db, p);
    std::swap(a, b);
  }
  return a;
}

bool poly_is_x(const Poly& f) {
  if (poly_deg(f) != 1) return false;
  return f[0] == 0 && f[1] == 1;
}

// monic f of degree s irreducible over F_p?
bool poly_irreducible(const Poly& f, uint32_t s, uint64_t p) {
  if (s == 1) return true;
  if (f[0] == 0) return false;  // divisible by x
  int df = static_cast<int>(s);
  Poly x = {0, 1};
  // x^(p^s) == x mod f
  uint64_t ps = 1;
  for (uint32_t i = 0; i < s; ++i) ps *= p;
  Poly xq = poly_powmod(x, ps, f, df, p);
  Poly xr = x;
  xr.resize(static_cast<size_t>(df), 0);
  if (poly_deg(xq) != poly_deg(xr) ||
      !std::equal(xq.begin(), xq.end(), xr.begin()))
    return false;
  // gcd(x^(p^(s/r)) - x, f) == 1 for every prime r | s
  for (auto [r, mult] : factorize(s)) {
    (void)mult;
    uint64_t e = 1;
    for (uint32_t i = 0; i < s / r; ++i) e *= p;
    Poly xe = poly_powmod(x, e, f, df, p);
    // xe - x
    Poly d = xe;
    if (d.size() < 2) d.resize(2, 0);
    d[1] = static_cast<uint32_t>((d[1] + p - 1) % p);
    Poly g = poly_gcd(f, d, p);
    if (poly_deg(g) > 0) return false;
  }
  return true;
}

}  // namespace

// ---- primality / factoring -------------------------------------------------

bool is_prime_u64(uint64_t n) {
  if (n < 2) return false;
  for (uint64_t d : {2ull, 3ull, 5ull, 7ull}) {
    if (n == d) return true;
    if (n % d == 0) return false;
  }
  for (uint64_t d = 11; d * d <= n; d += 2)
    if (n % d == 0) return false;
  return true;
}

std::vector<std::pair<uint64_t, uint32_t>> factorize(uint64_t n) {
  std::vector<std::pair<uint64_t, uint32_t>> out;
  for (uint64_t d = 2; d * d <= n; d += (d == 2 ? 1 : 2)) {
    if (n % d) continue;
    uint32_t m = 0;
    while (n % d == 0) n /= d, ++m;
    out.emplace_back(d, m);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

// ---- Field -----------------------------------------------------------------

Field Field::make(uint64_t p, uint32_t s, const std::vector<uint32_t>* modulus) {
  if (!is_prime_u64(p)) throw std::invalid_argument("field: p is not prime");
  if (s < 1) throw std::invalid_argument("field: s must be >= 1");
  uint64_t q = 1;
  for (uint32_t i = 0; i < s; ++i) {
    q *= p;
    if (q > (1ull << 32))
      throw std::invalid_argument("field: q = p^s exceeds 2^32");
  }
  Field F;
  F.p_ = p;
  F.s_ = s;
  F.q_ = q;

  if (modulus) {
    if (modulus->size() != static_cast<size_t>(s) + 1)
      throw std::invalid_argument("field: modulus must list s+1 coefficients");
    for (uint32_t c : *modulus)
      if (c >= p) throw std::invalid_argument("field: modulus coefficient out of range");
    if (modulus->back() != 1)
      throw std::invalid_argument("field: modulus must be monic");
    if (!poly_irreducible(*modulus, s, p))
      throw std::invalid_argument("field: modulus is reducible");
    F.mod_ = *modulus;
  } else if (s == 1) {
    F.mod_ = {0, 1};  // x, the conventional degree-1 modulus
  } else {
    // scan monic degree-s candidates in encoding order; the constant and
    // f(1) screens only skip certain reducibles
    Poly f(static_cast<size_t>(s) + 1, 0);
    f[s] = 1;
    bool found = false;
    for (uint64_t t = 0; t < q; ++t) {
      uint64_t v = t;
      for (uint32_t i = 0; i < s; ++i) {
        f[i] = static_cast<uint32_t>(v % p);
        v /= p;
      }
      if (f[0] == 0) continue;
      uint64_t at1 = 1;
      for (uint32_t i = 0; i < s; ++i) at1 += f[i];
      if (at1 % p == 0) continue;
      if (poly_irreducible(f, s, p)) {
        found = true;
        break;
      }
    }
    if (!found) throw std::logic_error("field: no irreducible found");  // unreachable
    F.mod_ = f;
  }

  F.init_trace();
  if (q <= kTableLimit) F.build_tables();
  return F;
}

Elem Field::add(Elem a, Elem b) const {
  if (p_ == 2) return a ^ b;
  if (s_ == 1) {
    uint64_t r = static_cast<uint64_t>(a) + b;
    if (r >= q_) r -= q_;
    return static_cast<Elem>(r);
  }
  uint64_t x = a, y = b, r = 0, place = 1;
  for (uint32_t i = 0; i < s_; ++i) {
    uint64_t d = x % p_ + y % p_;
    if (d >= p_) d -= p_;
    r += d * place;
    x /= p_;
    y /= p_;
    place *= p_;
  }
  return static_cast<Elem>(r);
}

Elem Field::sub(Elem a, Elem b) const { return add(a, neg(b)); }

Elem Field::neg(Elem a) const {
  if (p_ == 2) return a;
  if (s_ == 1) return a ? static_cast<Elem>(q_ - a) : 0;
  uint64_t x = a, r = 0, place = 1;
  for (uint32_t i = 0; i < s_; ++i) {
    uint64_t d = x % p_;
    r += (d ? p_ - d : 0) * place;
    x /= p_;
    place *= p_;
  }
  return static_cast<Elem>(r);
}

Elem Field::mul_nt(Elem a, Elem b) const {
  if (s_ == 1) return static_cast<Elem>(mulmod_u64(a, b, p_));
  // schoolbook product of digit vectors, then reduction by the modulus
  uint32_t da[64], db[64];
  uint64_t acc[127] = {0};
  uint64_t x = a, y = b;
  for (uint32_t i = 0; i < s_; ++i) {
    da[i] = static_cast<uint32_t>(x % p_);
    x /= p_;
    db[i] = static_cast<uint32_t>(y % p_);
    y /= p_;
  }
  for (uint32_t i = 0; i < s_; ++i) {
    if (!da[i]) continue;
    for (uint32_t j = 0; j < s_; ++j)
      acc[i + j] += static_cast<uint64_t>(da[i]) * db[j];
  }
  for (uint32_t i = 0; i < 2 * s_ - 1; ++i) acc[i] %= p_;
  for (int i = static_cast<int>(2 * s_ - 2); i >= static_cast<int>(s_); --i) {
    uint64_t c = acc[i];
    if (!c) continue;
    acc[i] = 0;
    for (uint32_t j = 0; j < s_; ++j) {
      if (!mod_[j]) continue;
      uint64_t sub = mulmod_u64(c, mod_[j], p_);
      uint64_t idx = static_cast<uint64_t>(i) - s_ + j;
      acc[idx] = (acc[idx] + p_ - sub) % p_;
    }
  }
  uint64_t r = 0, place = 1;
  for (uint32_t i = 0; i < s_; ++i) {
    r += acc[i] * place;
    place *= p_;
  }
  return static_cast<Elem>(r);
}

Elem Field::mul(Elem a, Elem b) const {
  if (!exp_.empty()) {
    if (a == 0 || b == 0) return 0;
    return exp_[log_[a] + static_cast<uint64_t>(log_[b])];
  }
  return mul_nt(a, b);
}

Elem Field::pow_nt(Elem a, uint64_t e) const {
  Elem r = 1, b = a;
  while (e) {
    if (e & 1) r = mul_nt(r, b);
    b = mul_nt(b, b);
    e >>= 1;
  }
  return r;
}

Elem Field::pow(Elem a, uint64_t e) const {
  if (!exp_.empty()) {
    if (a == 0) return e == 0 ? 1 : 0;
    uint64_t l = (static_cast<uint64_t>(log_[a]) * (e % (q_ - 1))) % (q_ - 1);
    return exp_[l];
  }
  if (a == 0) return e == 0 ? 1 : 0;
  Elem r = 1, b = a;
  while (e) {
    if (e & 1) r = mul(r, b);
    b = mul(b, b);
    e >>= 1;
  }
  return r;
}

Elem Field::inv(Elem a) const {
  if (a == 0) throw std::domain_error("field: inverse of zero");
  if (!exp_.empty()) {
    uint32_t l = log_[a];
    return exp_[l == 0 ? 0 : q_ - 1 - l];
  }
  return pow(a, q_ - 2);
}

uint32_t Field::trace(Elem a) const {
  if (s_ == 1) return a;
  uint64_t x = a, t = 0;
  for (uint32_t i = 0; i < s_; ++i) {
    t += (x % p_) * tr_basis_[i];
    x /= p_;
  }
  return static_cast<uint32_t>(t % p_);
}

int Field::quadratic_character(Elem a) const {
  if (p_ == 2)
    throw std::domain_error("quadratic character undefined in characteristic 2");
  if (a == 0) return 0;
  if (!exp_.empty()) return (log_[a] & 1) ? -1 : 1;
  return pow(a, (q_ - 1) / 2) == 1 ? 1 : -1;
}

Elem Field::from_coeffs(const std::vector<uint32_t>& c) const {
  if (c.size() > s_) throw std::invalid_argument("element: too many coefficients");
  uint64_t r = 0, place = 1;
  for (uint32_t i = 0; i < s_; ++i) {
    uint32_t d = i < c.size() ? c[i] : 0;
    if (d >= p_) throw std::invalid_argument("element: coefficient out of range");
    r += static_cast<uint64_t>(d) * place;
    place *= p_;
  }
  return static_cast<Elem>(r);
}

std::vector<uint32_t> Field::coeffs(Elem a) const {
  std::vector<uint32_t> c(s_);
  uint64_t x = a;
  for (uint32_t i = 0; i < s_; ++i) {
    c[i] = static_cast<uint32_t>(x % p_);
    x /= p_;
  }
  return c;
}

Elem Field::elem_from_int(uint64_t v) const {
  if (v >= q_) throw std::invalid_argument("element: encoding out of range");
  return static_cast<Elem>(v);
}

Elem Field::generator() const {
  if (exp_.empty()) throw std::logic_error("field: no generator tables");
  return gen_;
}

void Field::init_trace() {
  if (s_ == 1) return;
  // trace of the basis powers: Tr(x^i) = sum_t (x^(p^t))^i, an F_p scalar
  tr_basis_.assign(s_, 0);
  std::vector<Elem> frob(s_);  // x^(p^t)
  Elem xe = static_cast<Elem>(p_);
  frob[0] = xe;
  for (uint32_t t = 1; t < s_; ++t) frob[t] = pow_nt(frob[t - 1], p_);
  for (uint32_t i = 0; i < s_; ++i) {
    Elem acc = 0;
    for (uint32_t t = 0; t < s_; ++t) acc = add(acc, pow_nt(frob[t], i));
    if (acc >= p_) throw std::logic_error("field: non-scalar trace");
    tr_basis_[i] = acc;
  }
}

void Field::build_tables() {
  auto fac = factorize(q_ - 1);
  Elem g = 0;
  for (uint64_t cand = 2; cand < q_; ++cand) {
    bool ok = true;
    for (auto [r, m] : fac) {
      (void)m;
      if (pow_nt(static_cast<Elem>(cand), (q_ - 1) / r) == 1) {
        ok = false;
        break;
      }
    }
    if (ok) {
      g = static_cast<Elem>(cand);
      break;
    }
  }
  if (!g && q_ > 2) throw std::logic_error("field: no generator found");
  if (q_ == 2) g = 1;
  gen_ = g;
  exp_.assign(2 * (q_ - 1), 0);
  log_.assign(q_, 0);
  Elem cur = 1;
  for (uint64_t i = 0; i < q_ - 1; ++i) {
    exp_[i] = cur;
    exp_[i + (q_ - 1)] = cur;
    log_[cur] = static_cast<uint32_t>(i);
    cur = mul_nt(cur, g);
  }
  if (cur != 1) throw std::logic_error("field: generator order mismatch");
}

std::string Field::descriptor() const {
  std::string d = std::to_string(p_);
  d += "^" + std::to_string(s_) + ":modulus=";
  for (size_t i = 0; i < mod_.size(); ++i) {
    if (i) d += ",";
    d += std::to_string(mod_[i]);
  }
  return d;
}

// ---- parsing ---------------------------------------------------------------

namespace {

uint64_t parse_u64(const std::string& t, const char* what) {
  if (t.empty() || t.find_first_not_of("0123456789") != std::string::npos)
    throw std::invalid_argument(std::string(what) + ": expected an unsigned integer, got '" + t + "'");
  if (t.size() > 20) throw std::invalid_argument(std::string(what) + ": value too large");
  return std::stoull(t);
}

}  // namespace

Field parse_field(const std::string& desc) {
  std::string head = desc;
  std::vector<uint32_t> mod;
  bool have_mod = false;
  if (auto c = desc.find(':'); c != std::string::npos) {
    head = desc.substr(0, c);
    std::string tail = desc.substr(c + 1);
    const std::string key = "modulus=";
    if (tail.rfind(key, 0) != 0)
      throw std::invalid_argument("field descriptor: expected ':modulus=...' after '" + head + "'");
    tail = tail.substr(key.size());
    size_t pos = 0;
    while (pos <= tail.size()) {
      size_t comma = tail.find(',', pos);
      std::string item = tail.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      mod.push_back(static_cast<uint32_t>(parse_u64(item, "field modulus")));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    have_mod = true;
  }
  uint64_t p;
  uint32_t s;
  if (auto caret = head.find('^'); caret != std::string::npos) {
    p = parse_u64(head.substr(0, caret), "field p");
    s = static_cast<uint32_t>(parse_u64(head.substr(caret + 1), "field s"));
  } else {
    uint64_t qv = parse_u64(head, "field size");
    if (qv < 2) throw std::invalid_argument("field descriptor: size must be >= 2");
    auto fac = factorize(qv);
    if (fac.size() != 1)
      throw std::invalid_argument("field descriptor: '" + head + "' is not a prime power");
    p = fac[0].first;
    s = fac[0].second;
  }
  return Field::make(p, s, have_mod ? &mod : nullptr);
}

Elem parse_elem(const Field& f, const std::string& text) {
  const std::string key = "poly:";
  if (text.rfind(key, 0) == 0) {
    std::string tail = text.substr(key.size());
    std::vector<uint32_t> c;
    size_t pos = 0;
    while (pos <= tail.size()) {
      size_t comma = tail.find(',', pos);
      std::string item = tail.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      c.push_back(static_cast<uint32_t>(parse_u64(item, "element coefficient")));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    return f.from_coeffs(c);
  }
  return f.elem_from_int(parse_u64(text, "element"));
}

std::string format_elem(const Field&, Elem a) { return std::to_string(a); }

}  // namespace mss
