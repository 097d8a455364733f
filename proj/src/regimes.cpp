#include "mss/regimes.hpp"

#include "mss/errors.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <map>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace mss {

namespace {

uint64_t strip_p(uint64_t n, uint64_t p) {
  while (n % p == 0) n /= p;
  return n;
}

HypothesisCheck check(std::string name, const BigInt& lhs, const BigInt& rhs,
                      bool holds) {
  return {std::move(name), lhs.str(), rhs.str(), holds};
}

bool all_hold(const GuaranteeResult& g) {
  return std::all_of(g.checks.begin(), g.checks.end(),
                     [](const HypothesisCheck& c) { return c.holds; });
}

HypothesisCheck family_check(const RegimeParams& rp) {
  return {"monomial or Dickson image", rp.image_family ? "1" : "0", "1",
          rp.image_family};
}

}  // namespace

RegimeParams make_params(const Field& f, const EvalSetDesc& d, uint32_t m,
                         uint64_t k, uint64_t dsize) {
  RegimeParams rp;
  rp.q = f.q();
  rp.p = f.p();
  rp.s = f.s();
  rp.m = m;
  rp.m_p = m - static_cast<uint32_t>(m / f.p());
  rp.k = k;
  rp.d = dsize;
  if (!d.symbolic()) {
    rp.image_family = false;
    rp.n = rp.n_given = 0;
    return rp;
  }
  rp.image_family = true;
  rp.n_given = d.n;
  uint64_t n1 = strip_p(d.n, f.p());
  // Dickson with a = 0 is the monomial x^n; a monomial image only depends on
  // gcd(n, q-1), so the effective degree shrinks to it
  if (d.kind == EvalSetDesc::Kind::Monomial || d.a == 0)
    n1 = std::gcd(n1, f.q() - 1);
  rp.n = n1;
  return rp;
}

GuaranteeResult medium_k_guarantee(const RegimeParams& rp) {
  GuaranteeResult g;
  g.label = "medium-k-theorem";
  g.checks.push_back(family_check(rp));
  const BigInt q = rp.q;
  const BigInt t = BigInt(2) * rp.n * (BigInt(rp.m) * rp.n + 1);
  g.checks.push_back(check("(2n(mn+1))^6 < q", big_pow(t, 6), q,
                           big_pow(t, 6) < q));
  const BigInt lo = BigInt(3) * rp.m_p + 1;
  g.checks.push_back(check("3 m_p + 1 < k", lo, rp.k, lo < rp.k));
  g.checks.push_back(check("k^12 < q^5", big_pow(rp.k, 12), big_pow(q, 5),
                           big_pow(BigInt(rp.k), 12) < big_pow(q, 5)));
  g.applicable = all_hold(g);
  return g;
}

GuaranteeResult large_k_guarantee(const RegimeParams& rp) {
  GuaranteeResult g;
  g.checks.push_back(family_check(rp));
  const BigInt q = rp.q, d = rp.d, k = rp.k;
  const BigInt t = BigInt(rp.m) * rp.n + 1;
  if (rp.p == 2) {
    g.label = "large-k-theorem-even";
    const BigInt l1 = BigInt(256) * rp.n * rp.n * t * t;
    g.checks.push_back(check("(16 n(mn+1))^2 < q", l1, q, l1 < q));
    // log2(q) = s exactly; 3.05 = 305/100
    const BigInt l2 = BigInt(305) * rp.m_p * rp.s, r2 = BigInt(100) * k;
    g.checks.push_back(check("305 m_p log2(q) < 100 k", l2, r2, l2 < r2));
  } else {
    g.label = "large-k-theorem-odd";
    // 0.013^2 = 169/10^6
    const BigInt l1 = BigInt(1'000'000) * t * t * q;
    const BigInt r1 = BigInt(169) * d * d;
    g.checks.push_back(
        check("10^6 (mn+1)^2 q <= 169 |D|^2", l1, r1, l1 <= r1));
    const auto [a, b] = lnq_upper_rational(rp.q);
    const BigInt l2 = BigInt(6) * rp.m_p * a, r2 = BigInt(b) * k;
    g.checks.push_back(check("6 m_p ln(q) <= k  [ln(q) <= " +
                                 std::to_string(a) + "/" + std::to_string(b) +
                                 "]",
                             l2, r2, l2 <= r2));
  }
  g.checks.push_back(check("2k <= |D|", 2 * k, d, 2 * k <= d));
  g.applicable = all_hold(g);
  return g;
}

std::pair<uint64_t, uint64_t> lnq_upper_rational(uint64_t q) {
  if (q < 2) throw std::invalid_argument("lnq_upper_rational: q >= 2");
  static std::map<uint64_t, uint64_t> memo;
  constexpr uint64_t kDen = 256;
  if (auto it = memo.find(q); it != memo.end()) return {it->second, kDen};
  // a/256 >= ln q  <=>  e^a >= q^256, certified through the underestimate
  // e > kELow / 10^17, so that  kELow^a >= q^256 10^(17a)  implies the bound
  constexpr uint64_t kELow = 271'828'182'845'904'523ull;  // < e * 10^17
  const double guess = 256.0 * std::log(static_cast<double>(q));
  uint64_t a = guess > 3.0 ? static_cast<uint64_t>(guess) - 2 : 1;
  const BigInt q256 = big_pow(BigInt(q), 256);
  auto certified = [&](uint64_t cand) {
    return big_pow(BigInt(kELow), cand) >=
           q256 * big_pow(BigInt(10), 17 * cand);
  };
  while (!certified(a)) ++a;  // (kELow/10^17)^a grows in a: first hit is minimal
  memo.emplace(q, a);
  return {a, kDen};
}

// ---- desk-scale terms --------------------------------------------------------

BrunTables brun_tables(const Field& f, const std::vector<Elem>& D,
                       const MomentSpace& ms,
                       const std::vector<uint32_t>& active, uint64_t k,
                       const EngineLimits& lim) {
  const uint64_t states = ms.size;
  const uint64_t d = D.size();
  if (BigInt(64) * (2 * k + 1) * d * states > lim.budget)
    throw BudgetExceeded("brun tables: budget");
  if (BigInt(6) * states * 32 > lim.memory)
    throw BudgetExceeded("brun tables: memory");
  std::vector<uint64_t> delta(d);
  for (size_t i = 0; i < d; ++i) delta[i] = moment_delta(f, ms, active, D[i]);
  AddTranslator<BigInt> tr(ms);
  BrunTables out;
  std::vector<BigInt> cur(states, BigInt(0)), nxt(states);
  cur[0] = 1;
  for (uint64_t step = 0; step < k; ++step) {
    std::fill(nxt.begin(), nxt.end(), BigInt(0));
    for (size_t i = 0; i < d; ++i) tr.add_translated(cur, nxt, delta[i]);
    cur.swap(nxt);
  }
  out.r = std::move(cur);
  std::vector<BigInt> doubled(states, BigInt(0));
  if (k >= 2) {
    for (size_t i = 0; i < d; ++i) doubled[ms.add(delta[i], delta[i])] += 1;
    for (uint64_t step = 2; step < k; ++step) {
      std::fill(nxt.begin(), nxt.end(), BigInt(0));
      for (size_t i = 0; i < d; ++i) tr.add_translated(doubled, nxt, delta[i]);
      doubled.swap(nxt);
    }
  }
  out.r12 = std::move(doubled);
  return out;
}

BrunTerms brun_terms(const Field& f, const ImageSet& D, const ReducedTarget& t,
                     uint64_t k, const EngineLimits& lim) {
  if (!t.consistent) throw std::invalid_argument("brun_terms: inconsistent");
  const MomentSpace ms = MomentSpace::make(f, t.m_p);
  const BrunTables tabs = brun_tables(f, D.elements, ms, t.active, k, lim);
  const uint64_t st = ms.pack(t.b);
  return {tabs.r[st], tabs.r12[st]};
}

std::complex<double> choe_recursion(const Field& f, const std::vector<Elem>& D,
                                    const CharPoly& poly, Elem c, uint64_t k) {
  const uint64_t d = D.size();
  if (d <= 3) throw std::invalid_argument("choe_recursion: |D| > 3 required");
  if (k < 1 || k > d)
    throw std::invalid_argument("choe_recursion: 1 <= k <= |D| required");
  const std::complex<double> s1 = poly_char_sum(f, D, poly, c);
  if (k == 1) return s1;
  std::complex<double> prev = s1;
  std::complex<double> cur = s1 * s1 - static_cast<double>(d);
  for (uint64_t j = 3; j <= k; ++j) {
    const double coef =
        static_cast<double>(d - j + 2) * static_cast<double>(j - 1);
    const std::complex<double> next = s1 * cur - coef * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double falling_factorial(double x, uint64_t k) {
  double r = 1;
  for (uint64_t i = 0; i < k; ++i) {
    const double factor = x - static_cast<double>(i);
    if (factor <= 0) return 0;
    r *= factor;
  }
  return r;
}

LiWanBound liwan_bound(const RegimeParams& rp) {
  LiWanBound out;
  if (!rp.image_family) return out;
  const double d = static_cast<double>(rp.d);
  const double k = static_cast<double>(rp.k);
  const double p = static_cast<double>(rp.p);
  const double B = (static_cast<double>(rp.m) * static_cast<double>(rp.n) + 1) *
                   std::sqrt(static_cast<double>(rp.q));
  out.primary = falling_factorial(B + k + std::abs(B - d) / p - 1, rp.k);
  out.primary_valid = rp.k == 0 || out.primary > 0;
  const BigInt t = BigInt(rp.m) * rp.n + 1;
  const bool gate =
      BigInt(1'000'000) * t * t * rp.q <= BigInt(169) * rp.d * rp.d;
  out.relaxed = falling_factorial(0.013 * d + k + d / p, rp.k);
  out.relaxed_valid = gate && (rp.k == 0 || out.relaxed > 0);
  if (!out.relaxed_valid) out.relaxed = 0;
  return out;
}

ExactDeviation liwan_deviation(const Field& f, const ImageSet& D,
                               const ReducedTarget& t, uint64_t k,
                               const EngineLimits& lim) {
  const BigInt n = count_exact_dp(f, D, t, k, lim);
  const BigInt mk = n * factorial(k);
  const BigInt den = big_pow(BigInt(f.q()), t.m_p);
  BigInt num = mk * den - falling_factorial_int(D.size(), k);
  if (num < 0) num = -num;
  return {std::move(num), std::move(den)};
}

// ---- small-k search ----------------------------------------------------------

SmallKResult small_k_solver(const Field& f, const std::vector<Elem>& D,
                            const ReducedTarget& t, uint64_t k,
                            uint64_t node_budget) {
  if (!t.consistent)
    throw std::invalid_argument("small_k_solver: inconsistent");
  SmallKResult res;
  res.status = SmallKResult::Status::Exhausted;
  const size_t d = D.size();
  const size_t w = t.active.size();
  if (k > d) return res;  // no k-subsets at all
  if (k == 0) {
    if (std::all_of(t.b.begin(), t.b.end(), [](Elem e) { return e == 0; })) {
      res.status = SmallKResult::Status::Found;
      res.witness.clear();
    }
    return res;
  }
  // per-point contributions; the j = 1 coordinate makes them distinct, so the
  // closing level is a plain lookup
  std::vector<std::vector<Elem>> delta(d, std::vector<Elem>(w));
  std::map<std::vector<Elem>, uint32_t> last;
  for (size_t i = 0; i < d; ++i) {
    for (size_t c = 0; c < w; ++c) delta[i][c] = f.pow(D[i], t.active[c]);
    last.emplace(delta[i], static_cast<uint32_t>(i));
  }
  std::vector<uint32_t> picks;
  std::vector<Elem> need = t.b;  // target minus the partial sum so far
  uint64_t nodes = 0;
  bool out_of_budget = false;
  auto dfs = [&](auto&& self, size_t start, uint64_t r) -> bool {
    if (r == 1) {
      if (++nodes > node_budget) {
        out_of_budget = true;
        return false;
      }
      const auto it = last.find(need);
      if (it != last.end() && it->second >= start) {
        picks.push_back(it->second);
        return true;
      }
      return false;
    }
    for (size_t i = start; i + r <= d; ++i) {
      if (++nodes > node_budget) {
        out_of_budget = true;
        return false;
      }
      for (size_t c = 0; c < w; ++c) need[c] = f.sub(need[c], delta[i][c]);
      picks.push_back(static_cast<uint32_t>(i));
      if (self(self, i + 1, r - 1)) return true;
      if (out_of_budget) return false;
      picks.pop_back();
      for (size_t c = 0; c < w; ++c) need[c] = f.add(need[c], delta[i][c]);
    }
    return false;
  };
  const bool found = dfs(dfs, 0, k);
  res.nodes = nodes;
  if (found) {
    res.status = SmallKResult::Status::Found;
    res.witness.reserve(k);
    for (uint32_t i : picks) res.witness.push_back(D[i]);
  } else if (out_of_budget) {
    res.status = SmallKResult::Status::OutOfBudget;
  }
  return res;
}

// ---- the ladder --------------------------------------------------------------

DecisionOutcome decide(const Field& f, const EvalSetDesc& dsc,
                       const MomentTarget& t, uint64_t k,
                       const DecideOptions& opt) {
  DecisionOutcome out;
  const ReducedTarget rt = reduce_targets(f, t);
  if (!rt.consistent) {
    out.regime = "inconsistent-targets";
    out.cert.count = BigInt(0);
    return out;
  }
  const uint64_t d = value_set_size(f, dsc, opt.enum_cap).size;
  if (k > d) {
    out.regime = "exact-dp";
    out.cert.checks.push_back(
        {"k <= |D|", std::to_string(k), std::to_string(d), false});
    out.cert.count = BigInt(0);
    return out;
  }
  // symbolic sets stay unmaterialized until an engine needs the points, so
  // theorem-certified instances work far beyond the enumeration cap
  std::optional<ImageSet> pts;
  const auto points = [&]() -> const ImageSet& {
    if (!pts) pts = image_set(f, dsc, opt.enum_cap);
    return *pts;
  };
  ReducedTarget cur = rt;
  uint64_t kk = k;
  if (2 * k > d) {
    const DualInstance di = duality_transform(f, points(), rt, k);
    cur = di.target;
    kk = di.k;
    out.duality_applied = true;
  }
  // map a witness of the (possibly complemented) instance back and re-verify
  const auto verified = [&](std::vector<Elem> w) {
    if (out.duality_applied) {
      std::vector<Elem> comp;
      comp.reserve(d - w.size());
      std::sort(w.begin(), w.end());
      std::set_difference(points().elements.begin(), points().elements.end(),
                          w.begin(), w.end(), std::back_inserter(comp));
      w.swap(comp);
    }
    if (w.size() != k) throw std::logic_error("decide: witness size");
    for (size_t i = 0; i < rt.active.size(); ++i) {
      Elem s = 0;
      for (Elem x : w) s = f.add(s, f.pow(x, rt.active[i]));
      if (s != rt.b[i]) throw std::logic_error("decide: witness moments");
    }
    return w;
  };
  if (kk == 0) {
    const bool zero =
        std::all_of(cur.b.begin(), cur.b.end(), [](Elem e) { return e == 0; });
    out.yes = zero;
    out.regime = "exact-dp";
    out.cert.count = BigInt(zero ? 1 : 0);
    return out;
  }
  const BigInt states = big_pow(BigInt(f.q()), cur.m_p);
  // complementation above keeps kk <= |D|/2, so a batch table at this depth
  // answers every query the cache will ever see for the instance family
  const uint64_t kcap = std::max(d / 2, kk);
  const auto cache_key = [&] {
    return f.descriptor() + '|' + dsc.text() + "|m=" + std::to_string(rt.m);
  };
  if (BigInt(64) * d * kk * states <= opt.limits.budget) {
    try {
      if (opt.cache) {
        try {
          auto& slot = opt.cache->counts;
          auto it = slot.find(cache_key());
          if (it == slot.end() || it->second.kmax() < kk) {
            const uint64_t kb =
                BigInt(64) * d * kcap * states <= opt.limits.budget ? kcap : kk;
            const MomentSpace ms = MomentSpace::make(f, cur.m_p);
            it = slot.insert_or_assign(
                        cache_key(), count_table(f, points().elements, ms,
                                                 cur.active, kb, opt.limits))
                     .first;
          }
          const MomentSpace ms = MomentSpace::make(f, cur.m_p);
          const BigInt c = it->second.at(kk, ms.pack(cur.b));
          out.yes = c > 0;
          out.regime = "exact-dp";
          out.cert.count = c;
          return out;
        } catch (const BudgetExceeded&) {
        }
      }
      const BigInt c = count_exact_dp(f, points(), cur, kk, opt.limits);
      out.yes = c > 0;
      out.regime = "exact-dp";
      out.cert.count = c;
      return out;
    } catch (const BudgetExceeded&) {
    }
  }
  if (binomial(d, kk) <= opt.limits.brute_cap) {
    try {
      const BigInt c =
          count_brute(f, points(), expand_target(f, cur), kk, opt.limits);
      out.yes = c > 0;
      out.regime = "exact-brute";
      out.cert.count = c;
      return out;
    } catch (const BudgetExceeded&) {
    }
  }
  if (kk <= 3ull * rt.m + 1) {
    try {
      const SmallKResult sr =
          small_k_solver(f, points().elements, cur, kk, opt.search_budget);
      if (sr.status == SmallKResult::Status::Found) {
        out.yes = true;
        out.regime = "small-k-search";
        out.cert.witness = verified(sr.witness);
        return out;
      }
      if (sr.status == SmallKResult::Status::Exhausted) {
        out.regime = "small-k-search";
        out.cert.count = BigInt(0);
        return out;
      }
    } catch (const BudgetExceeded&) {
    }
  }
  const RegimeParams rp = make_params(f, dsc, rt.m, kk, d);
  if (GuaranteeResult med = medium_k_guarantee(rp); med.applicable) {
    out.yes = true;
    out.regime = med.label;
    out.cert.checks = std::move(med.checks);
    return out;
  }
  if (GuaranteeResult lg = large_k_guarantee(rp); lg.applicable) {
    out.yes = true;
    out.regime = lg.label;
    out.cert.checks = std::move(lg.checks);
    return out;
  }
  if (BigInt(d) * kk * states <= opt.limits.budget) {
    try {
      const MomentSpace ms = MomentSpace::make(f, cur.m_p);
      if (opt.cache) {
        try {
          auto& slot = opt.cache->reach;
          auto it = slot.find(cache_key());
          if (it == slot.end() || it->second.kmax() < kk) {
            const uint64_t kb =
                BigInt(d) * kcap * states <= opt.limits.budget ? kcap : kk;
            it = slot.insert_or_assign(
                        cache_key(), reach_table(f, points().elements, ms,
                                                 cur.active, kb, opt.limits))
                     .first;
          }
          out.yes = it->second.at(kk, ms.pack(cur.b));
          out.regime = "fallback-exact";
          return out;
        } catch (const BudgetExceeded&) {
        }
      }
      const ReachTable tab =
          reach_table(f, points().elements, ms, cur.active, kk, opt.limits);
      out.yes = tab.at(kk, ms.pack(cur.b));
      out.regime = "fallback-exact";
      return out;
    } catch (const BudgetExceeded&) {
    }
  }
  throw BudgetExceeded(
      "decide: exact engines over budget and no analytic guarantee applies");
}

}  // namespace mss
