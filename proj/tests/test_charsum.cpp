#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <map>

#include "mss/charsum.hpp"
#include "mss/rng.hpp"

using namespace mss;
using C = std::complex<double>;

namespace {

const std::vector<std::pair<uint64_t, uint32_t>> kFields = {
    {2, 2}, {5, 1}, {7, 1}, {2, 3}, {3, 2}, {2, 4}, {5, 2}, {3, 3}, {7, 2}};

std::vector<Elem> all_elems(const Field& F) {
  std::vector<Elem> v(F.q());
  for (uint64_t i = 0; i < F.q(); ++i) v[i] = Elem(i);
  return v;
}

// test-side reconstruction of each audited sum, straight accumulation
C direct_sum(const Field& F, SumFamily fam, const EvalSetDesc& d,
             const CharPoly& f, bool variant_b = false) {
  auto psi = [&](Elem e) {
    double ang = 2.0 * std::acos(-1.0) * double(F.trace(e)) / double(F.p());
    return C{std::cos(ang), std::sin(ang)};
  };
  C acc = 0.0;
  switch (fam) {
    case SumFamily::CompleteField:
      for (Elem x : all_elems(F)) acc += psi(charpoly_eval(F, f, x));
      return acc;
    case SumFamily::MonomialImage:
    case SumFamily::DicksonImage:
      for (Elem y : image_set(F, d).elements) acc += psi(charpoly_eval(F, f, y));
      return acc;
    case SumFamily::DicksonFullDomain:
      for (Elem x : all_elems(F))
        acc += psi(charpoly_eval(F, f, dickson_eval(F, d.n, d.a, x)));
      return acc;
    case SumFamily::DicksonEtaTwist: {
      Elem four = F.elem_from_int(4 % F.p());
      for (Elem x : all_elems(F)) {
        int eta = F.quadratic_character(F.sub(F.mul(x, x), F.mul(four, d.a)));
        if (eta)
          acc += double(eta) * psi(charpoly_eval(F, f, dickson_eval(F, d.n, d.a, x)));
      }
      return acc;
    }
    case SumFamily::DicksonInverseTwist: {
      Elem ah = F.pow(d.a, F.q() / 2);
      for (uint64_t xi = 1; xi < F.q(); ++xi) {
        Elem x = Elem(xi);
        Elem twist = variant_b ? F.mul(ah, F.inv(x))
                               : F.mul(d.a, F.inv(F.mul(x, x)));
        acc += psi(F.add(charpoly_eval(F, f, dickson_eval(F, d.n, d.a, x)), twist));
      }
      return acc;
    }
  }
  return acc;
}

}  // namespace

TEST_CASE("additive characters: unit modulus, homomorphism, base values") {
  for (auto [p, s] : kFields) {
    Field F = Field::make(p, s);
    SeededRng rng(1);
    for (int t = 0; t < 200; ++t) {
      Elem c = Elem(rng.below(F.q()));
      Elem x = Elem(rng.below(F.q()));
      Elem y = Elem(rng.below(F.q()));
      CHECK(std::abs(std::abs(additive_character(F, c, x)) - 1.0) < 1e-12);
      CHECK(std::abs(additive_character(F, c, F.add(x, y)) -
                     additive_character(F, c, x) * additive_character(F, c, y)) <
            1e-12);
      CHECK(std::abs(additive_character(F, c, 0) - C{1.0, 0.0}) < 1e-15);
      CHECK(std::abs(additive_character(F, 0, x) - C{1.0, 0.0}) < 1e-15);
    }
  }
  Field F5 = Field::make(5, 1);
  CHECK(std::abs(additive_character(F5, 1, 1).real() -
                 std::cos(2.0 * std::acos(-1.0) / 5.0)) < 1e-12);
}

TEST_CASE("orthogonality in both directions") {
  for (auto [p, s] : kFields) {
    Field F = Field::make(p, s);
    for (uint64_t c = 0; c < F.q(); ++c) {
      C sum = 0.0;
      for (uint64_t x = 0; x < F.q(); ++x) sum += additive_character(F, Elem(c), Elem(x));
      if (c == 0)
        CHECK(std::abs(sum - C{double(F.q()), 0.0}) < 1e-9);
      else
        CHECK(std::abs(sum) < 1e-9);
    }
    for (uint64_t x = 0; x < F.q(); ++x) {
      C sum = 0.0;
      for (uint64_t c = 0; c < F.q(); ++c) sum += additive_character(F, Elem(c), Elem(x));
      if (x == 0)
        CHECK(std::abs(sum - C{double(F.q()), 0.0}) < 1e-9);
      else
        CHECK(std::abs(sum) < 1e-9);
    }
  }
}

TEST_CASE("poly_char_sum: trivial and linear cases") {
  for (auto [p, s] : kFields) {
    Field F = Field::make(p, s);
    auto pts = all_elems(F);
    CharPoly zero{3, {0, 0, 0}};
    if (p <= 3) zero.coeffs.assign(3, 0);
    C sz = poly_char_sum(F, pts, zero, 1);
    CHECK(sz.real() == double(F.q()));
    CHECK(sz.imag() == 0.0);
    CharPoly lin{1, {1}};
    for (uint64_t c = 1; c < F.q(); ++c)
      CHECK(std::abs(poly_char_sum(F, pts, lin, Elem(c))) < 1e-9);
  }
  Field F = Field::make(5, 1);
  CharPoly bad{2, {1, 0}};
  bad.coeffs.resize(1);
  CHECK_THROWS_AS(poly_char_sum(F, all_elems(F), bad, 1), std::invalid_argument);
  CharPoly badp{2, {1, 1}};
  Field F2 = Field::make(2, 3);
  CHECK_THROWS_AS(poly_char_sum(F2, all_elems(F2), badp, 1), std::invalid_argument);
}

TEST_CASE("quadratic sums attain the Gauss magnitude sqrt(q)") {
  for (auto [p, s] : std::vector<std::pair<uint64_t, uint32_t>>{
           {5, 1}, {7, 1}, {3, 2}, {13, 1}, {5, 2}, {3, 3}, {7, 2}}) {
    Field F = Field::make(p, s);
    auto pts = all_elems(F);
    for (Elem a : {Elem(1), Elem(2)}) {
      CharPoly f{2, {0, a}};
      CHECK(std::abs(poly_char_sum(F, pts, f, 1)) ==
            doctest::Approx(std::sqrt(double(F.q()))).epsilon(1e-9));
    }
  }
}

TEST_CASE("exhaustive sweep magnitudes match direct recomputation") {
  for (auto [p, s] : kFields) {
    Field F = Field::make(p, s);
    std::vector<EvalSetDesc> descs = {
        {EvalSetDesc::Kind::Monomial, 1, 0, {}},
        {EvalSetDesc::Kind::Monomial, 2, 0, {}},
        {EvalSetDesc::Kind::Dickson, 2, 1, {}},
        {EvalSetDesc::Kind::Dickson, 3, 1, {}},
    };
    for (const auto& d : descs)
      for (SumFamily fam :
           {SumFamily::CompleteField, SumFamily::MonomialImage,
            SumFamily::DicksonImage, SumFamily::DicksonFullDomain,
            SumFamily::DicksonEtaTwist, SumFamily::DicksonInverseTwist}) {
        uint32_t m = 3;
        Coverage cov;
        cov.emit_all = true;
        uint64_t checked = 0;
        auto summary = weil_audit_family(
            F, fam, d, m, cov, [&](const AuditRecord& rec) {
              CHECK(rec.pass);
              CharPoly f{rec.m, rec.coeffs};
              double da = std::abs(direct_sum(F, fam, d, f));
              double expect = da;
              if (fam == SumFamily::DicksonInverseTwist) {
                double db = std::abs(direct_sum(F, fam, d, f, true));
                CHECK(std::abs(da - db) <= kTwinEps);
                expect = std::max(da, db);
              }
              CHECK(rec.abs_sum == doctest::Approx(expect).epsilon(1e-9));
              CHECK(rec.margin == doctest::Approx(rec.bound - rec.abs_sum));
              ++checked;
            });
        CHECK(summary.violations == 0);
        CHECK(summary.tested == checked);
        if (summary.tested > 0) CHECK(summary.min_margin >= -kAuditEps);
      }
  }
}

TEST_CASE("pinned sweep: image of D_3(x,1) over F_25 at m=1") {
  Field F = Field::make(5, 2);
  EvalSetDesc d{EvalSetDesc::Kind::Dickson, 3, 1, {}};
  Coverage cov;
  auto summary = weil_audit_family(F, SumFamily::DicksonImage, d, 1, cov);
  CHECK(summary.tested == 24);  // every nontrivial character
  CHECK(summary.violations == 0);
  CHECK(summary.min_margin >= 0.0);
  CHECK(summary.worst.bound == doctest::Approx(4.0 * 5.0));  // (1*3+1)*sqrt(25)
}

TEST_CASE("monomial image family is gated by (n+1)^2 <= q") {
  Field F4 = Field::make(2, 2);
  EvalSetDesc d{EvalSetDesc::Kind::Monomial, 2, 0, {}};
  Coverage cov;
  CHECK(weil_audit_family(F4, SumFamily::MonomialImage, d, 2, cov).tested == 0);
  Field F9 = Field::make(3, 2);
  CHECK(weil_audit_family(F9, SumFamily::MonomialImage, d, 2, cov).tested > 0);
}

TEST_CASE("parity-specific families skip the wrong characteristic") {
  Field F7 = Field::make(7, 1);
  Field F8 = Field::make(2, 3);
  EvalSetDesc d{EvalSetDesc::Kind::Dickson, 2, 1, {}};
  Coverage cov;
  CHECK(weil_audit_family(F7, SumFamily::DicksonInverseTwist, d, 2, cov).tested == 0);
  CHECK(weil_audit_family(F8, SumFamily::DicksonEtaTwist, d, 2, cov).tested == 0);
  CHECK(weil_audit_family(F8, SumFamily::DicksonInverseTwist, d, 2, cov).tested > 0);
}

TEST_CASE("inverse-twist variants agree on even fields") {
  for (uint32_t s : {2u, 3u, 4u, 5u}) {
    Field F = Field::make(2, s);
    for (uint32_t n : {2u, 3u, 4u, 5u})
      for (Elem a : {Elem(1), Elem(2), Elem(3)}) {
        if (a >= F.q()) continue;
        EvalSetDesc d{EvalSetDesc::Kind::Dickson, n, a, {}};
        Coverage cov;
        auto summary =
            weil_audit_family(F, SumFamily::DicksonInverseTwist, d, 3, cov);
        CHECK(summary.tested > 0);
        CHECK(summary.violations == 0);
        CHECK(summary.max_twin_gap <= kTwinEps);
      }
  }
}

TEST_CASE("no violations across a small exhaustive grid") {
  for (auto [p, s] : kFields) {
    Field F = Field::make(p, s);
    Elem g = F.generator();
    std::vector<EvalSetDesc> descs;
    for (uint32_t n = 1; n <= 4; ++n)
      descs.push_back({EvalSetDesc::Kind::Monomial, n, 0, {}});
    for (uint32_t n = 2; n <= 4; ++n)
      for (Elem a : {Elem(1), g})
        descs.push_back({EvalSetDesc::Kind::Dickson, n, a, {}});
    Coverage cov;
    for (const auto& d : descs) {
      auto summary = weil_audit(F, d, 3, cov);
      CHECK(summary.violations == 0);
      CHECK(summary.max_twin_gap <= kTwinEps);
    }
  }
}

TEST_CASE("sampled coverage is seed-deterministic and records the seed") {
  Field F = Field::make(7, 2);
  EvalSetDesc d{EvalSetDesc::Kind::Dickson, 3, 1, {}};
  Coverage cov;
  cov.exhaustive = false;
  cov.samples = 40;
  cov.seed = 123;
  auto run = [&]() {
    std::vector<AuditRecord> recs;
    weil_audit_family(F, SumFamily::DicksonImage, d, 3, cov,
                      [&](const AuditRecord& r) { recs.push_back(r); });
    return recs;
  };
  auto a = run(), b = run();
  REQUIRE(a.size() == 40);
  REQUIRE(b.size() == 40);
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].coeffs == b[i].coeffs);
    CHECK(a[i].abs_sum == b[i].abs_sum);
    CHECK(a[i].seed == 123);
    CHECK(a[i].pass);
  }
  cov.seed = 124;
  auto c = run();
  bool any_diff = false;
  for (size_t i = 0; i < a.size(); ++i) any_diff |= a[i].coeffs != c[i].coeffs;
  CHECK(any_diff);
}

TEST_CASE("audit summaries merge correctly") {
  AuditSummary a, b;
  a.tested = 0;
  b.tested = 5;
  b.violations = 1;
  b.min_margin = -0.5;
  b.max_twin_gap = 1e-12;
  a.absorb(b);
  CHECK(a.tested == 5);
  CHECK(a.violations == 1);
  CHECK(a.min_margin == -0.5);
  AuditSummary c;
  c.tested = 2;
  c.min_margin = -1.0;
  a.absorb(c);
  CHECK(a.tested == 7);
  CHECK(a.min_margin == -1.0);
  AuditSummary empty;
  a.absorb(empty);
  CHECK(a.tested == 7);
}
