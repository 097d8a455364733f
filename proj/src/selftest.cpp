#include "mss/selftest.hpp"

#include "mss/charsum.hpp"
#include "mss/counting.hpp"
#include "mss/evalset.hpp"
#include "mss/field.hpp"
#include "mss/moment_space.hpp"
#include "mss/regimes.hpp"
#include "mss/rng.hpp"

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace mss {
namespace {

struct Suite {
  SelfTestReport& rep;
  std::ostream& out;
  std::string name;
  uint64_t checks = 0, failures = 0;

  Suite(SelfTestReport& r, std::ostream& o, std::string n)
      : rep(r), out(o), name(std::move(n)) {}
  void expect(bool cond) {
    ++checks;
    if (!cond) ++failures;
  }
  ~Suite() {
    rep.checks += checks;
    rep.failures += failures;
    if (failures)
      out << "FAIL " << name << " (" << failures << "/" << checks
          << " checks failed)\n";
    else
      out << "ok   " << name << " (" << checks << " checks)\n";
  }
};

void field_suite(SelfTestReport& rep, std::ostream& out) {
  Suite s(rep, out, "field");
  for (auto [p, deg] : {std::pair<uint64_t, uint32_t>{7, 1}, {2, 3}, {3, 2}}) {
    Field f = Field::make(p, deg);
    const uint64_t q = f.q();
    for (Elem a = 0; a < q; ++a) {
      s.expect(f.add(a, 0) == a);
      s.expect(f.mul(a, f.elem_from_int(1 % q)) == a);
      if (a != 0) s.expect(f.mul(a, f.inv(a)) == 1);
    }
    for (Elem a = 0; a < q; ++a)
      for (Elem b = 0; b < q; ++b) {
        s.expect(f.frobenius(f.add(a, b)) ==
                 f.add(f.frobenius(a), f.frobenius(b)));
        s.expect(f.trace(f.add(a, b)) == (f.trace(a) + f.trace(b)) % p);
      }
    if (f.has_tables()) s.expect(f.pow(f.generator(), q - 1) == 1);
  }
}

void evalset_suite(SelfTestReport& rep, std::ostream& out) {
  Suite s(rep, out, "evalset");
  Field f13 = Field::make(13, 1);
  for (uint64_t n = 1; n <= 6; ++n) {
    EvalSetDesc d = parse_set(f13, "monomial:n=" + std::to_string(n));
    s.expect(value_set_size(f13, d).size == image_set(f13, d).size());
  }
  for (uint64_t n = 2; n <= 4; ++n)
    for (Elem a = 1; a <= 2; ++a) {
      EvalSetDesc d = parse_set(
          f13, "dickson:n=" + std::to_string(n) + ",a=" + std::to_string(a));
      ValueSetSize v = value_set_size(f13, d);
      s.expect(!v.enumerated);
      s.expect(v.size == image_set(f13, d).size());
    }
  // fibers of D_4(., 2) over GF(13) against direct evaluation
  for (Elem x0 = 0; x0 < 13; ++x0) {
    Elem want = dickson_eval(f13, 4, 2, x0);
    uint64_t direct = 0;
    for (Elem x = 0; x < 13; ++x)
      if (dickson_eval(f13, 4, 2, x) == want) ++direct;
    s.expect(preimage_count(f13, 4, 2, x0) == direct);
  }
  Field f9 = Field::make(3, 2);
  for (Elem x = 0; x < 9; ++x)
    s.expect(dickson_eval(f9, 5, 2, x) == dickson_eval_closed(f9, 5, 2, x));
}

void counting_suite(SelfTestReport& rep, std::ostream& out) {
  Suite s(rep, out, "counting");
  Field f = Field::make(7, 1);
  EvalSetDesc desc = parse_set(f, "monomial:n=2");
  ImageSet im = image_set(f, desc);
  std::vector<uint32_t> active = {1, 2};
  MomentSpace ms = MomentSpace::make(f, 2);
  const uint64_t kmax = im.size();
  CountTable ct = count_table(f, im.elements, ms, active, kmax);
  auto bh = brute_histogram(f, im.elements, ms, active, kmax);
  for (uint64_t j = 0; j <= kmax; ++j)
    for (uint64_t st = 0; st < ms.size; ++st)
      s.expect(ct.at(j, st) == BigInt(bh[j][st]));
  // complement identity N_k(D, b) = N_{d-k}(D, b')
  SeededRng rng(1);
  for (uint64_t k = 1; k <= 3; ++k) {
    MomentTarget t = sample_consistent_target(f, 2, rng);
    ReducedTarget rt = reduce_targets(f, t);
    DualInstance dual = duality_transform(f, im, rt, k);
    s.expect(count_exact_dp(f, im, rt, k) ==
             count_exact_dp(f, im, dual.target, dual.k));
  }
}

void charsum_suite(SelfTestReport& rep, std::ostream& out) {
  Suite s(rep, out, "charsum");
  Field f = Field::make(5, 2);
  std::vector<Elem> pts;
  for (Elem x = 0; x < 25; ++x) pts.push_back(x);
  CharPoly sq{2, {0, 1}};  // f(x) = x^2
  s.expect(std::abs(std::abs(poly_char_sum(f, pts, sq, 1)) - 5.0) < 1e-9);
  s.expect(std::abs(poly_char_sum(f, pts, sq, 0) - std::complex<double>(25)) <
           1e-9);
  Field f9 = Field::make(3, 2);
  AuditSummary sum =
      weil_audit(f9, parse_set(f9, "monomial:n=2"), 2, Coverage{});
  s.expect(sum.tested > 0);
  s.expect(sum.violations == 0);
}

void regimes_suite(SelfTestReport& rep, std::ostream& out) {
  Suite s(rep, out, "regimes");
  // decide() against the bulk boolean DP on the squares of GF(9)
  Field f9 = Field::make(3, 2);
  EvalSetDesc desc = parse_set(f9, "monomial:n=2");
  ImageSet im = image_set(f9, desc);
  for (uint32_t m = 1; m <= 2; ++m) {
    std::vector<uint32_t> active;
    for (uint32_t j = 1; j <= m; ++j)
      if (j % 3 != 0) active.push_back(j);
    MomentSpace ms = MomentSpace::make(f9, (uint32_t)active.size());
    ReachTable rt = reach_table(f9, im.elements, ms, active, im.size() + 1);
    std::vector<Elem> b(m);
    for (uint64_t code = 0; code < std::pow(9, m); ++code) {
      uint64_t c = code;
      for (uint32_t i = 0; i < m; ++i) b[i] = c % 9, c /= 9;
      MomentTarget t{b};
      ReducedTarget red = reduce_targets(f9, t);
      for (uint64_t k = 0; k <= im.size() + 1; ++k) {
        bool truth = red.consistent && k <= im.size() &&
                     rt.at(k, ms.pack(red.b));
        s.expect(decide(f9, desc, t, k).yes == truth);
      }
    }
  }
  // first- and second-order tuple terms on an explicit two-point set
  Field f5 = Field::make(5, 1);
  EvalSetDesc two = parse_set(f5, "explicit:1,2");
  ImageSet im2 = image_set(f5, two);
  BrunTerms bt = brun_terms(f5, im2, reduce_targets(f5, {{3}}), 2);
  s.expect(bt.r == BigInt(2) && bt.r12 == BigInt(0));
  bt = brun_terms(f5, im2, reduce_targets(f5, {{4}}), 2);
  s.expect(bt.r == BigInt(1) && bt.r12 == BigInt(1));
  // analytic guarantees at their flagship parameters
  Field f56 = Field::make(5, 6);
  EvalSetDesc full = parse_set(f56, "monomial:n=1");
  s.expect(medium_k_guarantee(make_params(f56, full, 1, 10, f56.q()))
               .applicable);
  Field f212 = Field::make(2, 12);
  EvalSetDesc full2 = parse_set(f212, "monomial:n=1");
  s.expect(large_k_guarantee(make_params(f212, full2, 1, 40, f212.q()))
               .applicable);
  Field f57 = Field::make(5, 7);
  EvalSetDesc full5 = parse_set(f57, "monomial:n=1");
  s.expect(large_k_guarantee(make_params(f57, full5, 1, 500, f57.q()))
               .applicable);
  // certified ln q rational: a/256 covers ln q with less than 1% slack
  for (uint64_t q : {4ull, 49ull, 4096ull}) {
    auto [a, den] = lnq_upper_rational(q);
    s.expect(den == 256);
    s.expect((double)a / 256.0 >= std::log((double)q));
    s.expect((double)a / 256.0 <= std::log((double)q) + 0.01);
  }
}

}  // namespace

SelfTestReport run_selftest(std::ostream& out) {
  SelfTestReport rep;
  field_suite(rep, out);
  evalset_suite(rep, out);
  counting_suite(rep, out);
  charsum_suite(rep, out);
  regimes_suite(rep, out);
  out << (rep.ok() ? "selftest passed" : "selftest FAILED") << " ("
      << rep.checks << " checks, " << rep.failures << " failures)\n";
  return rep;
}

}  // namespace mss
