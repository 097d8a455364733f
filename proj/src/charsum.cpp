#include "mss/charsum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mss/bigint.hpp"
#include "mss/errors.hpp"
#include "mss/rng.hpp"

namespace mss {

namespace {

constexpr double kTau = 2.0 * std::numbers::pi;
constexpr uint64_t kPointCap = uint64_t(1) << 22;  // per-sweep point list
constexpr double kSweepOpCap = 1e11;               // exhaustive flop-ish guard

void check_poly(const Field& F, const CharPoly& f) {
  if (f.m == 0 || f.coeffs.size() != f.m)
    throw std::invalid_argument("poly: coeffs must have length m >= 1");
  for (uint32_t j = 1; j <= f.m; ++j) {
    if (f.coeffs[j - 1] >= F.q())
      throw std::invalid_argument("poly: coefficient out of range");
    if (j % F.p() == 0 && f.coeffs[j - 1] != 0)
      throw std::invalid_argument("poly: coefficient at index divisible by p");
  }
}

std::vector<uint32_t> active_exponents(const Field& F, uint32_t m) {
  std::vector<uint32_t> act;
  for (uint32_t j = 1; j <= m; ++j)
    if (j % F.p() != 0) act.push_back(j);
  return act;
}

std::complex<double> pairwise(const std::vector<std::complex<double>>& v,
                              size_t lo, size_t hi) {
  if (hi - lo <= 16) {
    std::complex<double> s = 0.0;
    for (size_t i = lo; i < hi; ++i) s += v[i];
    return s;
  }
  size_t mid = lo + (hi - lo) / 2;
  return pairwise(v, lo, mid) + pairwise(v, mid, hi);
}

// Points of one audited sum: moment base y and a complex weight per term.
struct PointSet {
  std::vector<Elem> y;
  std::vector<std::complex<double>> w;

  void push(Elem yy, std::complex<double> ww) {
    y.push_back(yy);
    w.push_back(ww);
  }
  size_t size() const { return y.size(); }
};

std::complex<double> root_of_unity(uint64_t p, uint32_t t) {
  return std::polar(1.0, kTau * double(t) / double(p));
}

// S(c) = sum_i w_i psi_Tr(sum_d c[d] y_i^act[d]), direct with pairwise sum.
std::complex<double> weighted_sum(const Field& F, const PointSet& pts,
                                  const std::vector<uint32_t>& act,
                                  const std::vector<Elem>& c) {
  std::vector<std::complex<double>> terms(pts.size());
  for (size_t i = 0; i < pts.size(); ++i) {
    Elem e = 0;
    for (size_t d = 0; d < act.size(); ++d)
      e = F.add(e, F.mul(c[d], F.pow(pts.y[i], act[d])));
    terms[i] = pts.w[i] * root_of_unity(F.p(), F.trace(e));
  }
  return terms.empty() ? 0.0 : pairwise(terms, 0, terms.size());
}

// In-place transform over the additive group of F_q on split re/im arrays
// indexed by element encoding: W[gamma] = sum_tau V[tau] omega^{gamma.tau}
// (digit dot product).  The canonical pairing psi_Tr(c*t) is recovered via
// the trace Gram matrix: psi_Tr(c*t) = omega^{(M c) . t}, so S(c) lives at
// index perm[c] = enc(M * digits(c)).
struct FqDft {
  uint64_t q;
  uint32_t p, s;
  std::vector<double> twre, twim;  // p x p twiddle matrix
  std::vector<uint32_t> perm;

  explicit FqDft(const Field& F) : q(F.q()), p(uint32_t(F.p())), s(F.s()) {
    twre.resize(size_t(p) * p);
    twim.resize(size_t(p) * p);
    for (uint32_t d = 0; d < p; ++d)
      for (uint32_t t = 0; t < p; ++t) {
        auto z = root_of_unity(p, uint32_t((uint64_t(d) * t) % p));
        twre[size_t(d) * p + t] = z.real();
        twim[size_t(d) * p + t] = z.imag();
      }
    // Gram matrix M[u][v] = Tr(x^u x^v) over the power basis.
    std::vector<std::vector<uint32_t>> M(s, std::vector<uint32_t>(s));
    std::vector<Elem> basis(s);
    {
      Elem x = s > 1 ? F.elem_from_int(p) : 0;  // the element "x"
      Elem b = 1;
      for (uint32_t u = 0; u < s; ++u) {
        basis[u] = b;
        if (u + 1 < s) b = F.mul(b, x);
      }
    }
    for (uint32_t u = 0; u < s; ++u)
      for (uint32_t v = 0; v < s; ++v)
        M[u][v] = F.trace(F.mul(basis[u], basis[v]));
    perm.assign(q, 0);
    std::vector<uint8_t> seen(q, 0);
    std::vector<uint32_t> dig(s);
    for (uint64_t c = 0; c < q; ++c) {
      uint64_t rest = c;
      for (uint32_t u = 0; u < s; ++u) {
        dig[u] = uint32_t(rest % p);
        rest /= p;
      }
      uint64_t idx = 0, place = 1;
      for (uint32_t v = 0; v < s; ++v) {
        uint64_t acc = 0;
        for (uint32_t u = 0; u < s; ++u) acc += uint64_t(M[v][u]) * dig[u];
        idx += (acc % p) * place;
        place *= p;
      }
      perm[c] = uint32_t(idx);
      if (seen[idx]++) throw std::logic_error("trace pairing not a bijection");
    }
  }

  void forward(std::vector<double>& re, std::vector<double>& im) const {
    std::vector<double> gre(p), gim(p);
    uint64_t stride = 1;
    for (uint32_t u = 0; u < s; ++u, stride *= p) {
      for (uint64_t base = 0; base < q; base += stride * p)
        for (uint64_t off = 0; off < stride; ++off) {
          uint64_t i0 = base + off;
          for (uint32_t t = 0; t < p; ++t) {
            gre[t] = re[i0 + t * stride];
            gim[t] = im[i0 + t * stride];
          }
          for (uint32_t d = 0; d < p; ++d) {
            const double* mr = &twre[size_t(d) * p];
            const double* mi = &twim[size_t(d) * p];
            double ar = 0.0, ai = 0.0;
            for (uint32_t t = 0; t < p; ++t) {
              ar += mr[t] * gre[t] - mi[t] * gim[t];
              ai += mr[t] * gim[t] + mi[t] * gre[t];
            }
            re[i0 + d * stride] = ar;
            im[i0 + d * stride] = ai;
          }
        }
    }
  }
};

double family_bound(SumFamily fam, uint32_t deg, uint32_t n, double sq) {
  switch (fam) {
    case SumFamily::CompleteField:
      return (double(deg) - 1.0) * sq;
    case SumFamily::MonomialImage:
      return double(deg) * sq;
    case SumFamily::DicksonFullDomain:
      return (double(deg) * n - 1.0) * sq;
    default:
      return (double(deg) * n + 1.0) * sq;
  }
}

// Builds the term list; second set is filled for the inverse twist only.
bool build_points(const Field& F, SumFamily fam, const EvalSetDesc& desc,
                  PointSet& A, PointSet& B) {
  uint64_t q = F.q();
  uint32_t n = desc.n;
  bool dickson = desc.kind == EvalSetDesc::Kind::Dickson && desc.a != 0;
  switch (fam) {
    case SumFamily::CompleteField:
      if (q > kPointCap) throw BudgetExceeded("character sweep: field too large");
      for (uint64_t x = 0; x < q; ++x) A.push(Elem(x), 1.0);
      return true;
    case SumFamily::MonomialImage: {
      bool monomial = desc.kind == EvalSetDesc::Kind::Monomial ||
                      (desc.kind == EvalSetDesc::Kind::Dickson && desc.a == 0);
      if (!monomial || BigInt(n + 1) * (n + 1) > BigInt(q)) return false;
      for (Elem y : image_set(F, desc).elements) A.push(y, 1.0);
      return true;
    }
    case SumFamily::DicksonImage: {
      if (!dickson) return false;
      for (Elem y : image_set(F, desc).elements) A.push(y, 1.0);
      return true;
    }
    case SumFamily::DicksonFullDomain: {
      if (!dickson) return false;
      if (q > kPointCap) throw BudgetExceeded("character sweep: field too large");
      for (uint64_t x = 0; x < q; ++x)
        A.push(dickson_eval(F, n, desc.a, Elem(x)), 1.0);
      return true;
    }
    case SumFamily::DicksonEtaTwist: {
      if (!dickson || F.p() == 2) return false;
      if (q > kPointCap) throw BudgetExceeded("character sweep: field too large");
      Elem four_a = F.mul(F.elem_from_int(4 % F.p()), desc.a);
      for (uint64_t x = 0; x < q; ++x) {
        int eta = F.quadratic_character(F.sub(F.mul(Elem(x), Elem(x)), four_a));
        if (eta != 0) A.push(dickson_eval(F, n, desc.a, Elem(x)), double(eta));
      }
      return true;
    }
    case SumFamily::DicksonInverseTwist: {
      if (!dickson || F.p() != 2) return false;
      if (q > kPointCap) throw BudgetExceeded("character sweep: field too large");
      Elem ahalf = F.pow(desc.a, q / 2);  // square root of a in char 2
      for (uint64_t x = 1; x < q; ++x) {
        Elem y = dickson_eval(F, n, desc.a, Elem(x));
        uint32_t ta = F.trace(F.mul(desc.a, F.inv(F.mul(Elem(x), Elem(x)))));
        uint32_t tb = F.trace(F.mul(ahalf, F.inv(Elem(x))));
        A.push(y, root_of_unity(2, ta));
        B.push(y, root_of_unity(2, tb));
      }
      return true;
    }
  }
  return false;
}

AuditRecord make_record(const Field& F, SumFamily fam, const EvalSetDesc& desc,
                        uint32_t m, const std::vector<uint32_t>& act,
                        const std::vector<Elem>& c_act, double abs_sum,
                        double bound, double twin_gap, uint64_t seed) {
  AuditRecord rec;
  rec.family = fam;
  rec.field = F.descriptor();
  rec.set = desc.text();
  rec.m = m;
  rec.coeffs.assign(m, 0);
  for (size_t d = 0; d < act.size(); ++d) rec.coeffs[act[d] - 1] = c_act[d];
  rec.abs_sum = abs_sum;
  rec.bound = bound;
  rec.margin = bound - abs_sum;
  rec.twin_gap = twin_gap;
  rec.pass = rec.margin >= -kAuditEps && twin_gap <= kTwinEps;
  rec.seed = seed;
  return rec;
}

AuditSummary run_sampled(const Field& F, SumFamily fam, const EvalSetDesc& desc,
                         uint32_t m, const PointSet& A, const PointSet& B,
                         const Coverage& cov, const AuditSink& sink) {
  auto act = active_exponents(F, m);
  SeededRng rng(cov.seed);
  AuditSummary sum;
  std::vector<Elem> c(act.size());
  double sq = std::sqrt(double(F.q()));
  for (uint64_t it = 0; it < cov.samples; ++it) {
    uint32_t deg = 0;
    do {
      deg = 0;
      for (size_t d = 0; d < c.size(); ++d) {
        c[d] = Elem(rng.below(F.q()));
        if (c[d]) deg = act[d];
      }
    } while (deg == 0);
    double sa = std::abs(weighted_sum(F, A, act, c));
    double gap = 0.0;
    if (!B.y.empty()) {
      double sb = std::abs(weighted_sum(F, B, act, c));
      gap = std::abs(sa - sb);
      sa = std::max(sa, sb);
    }
    double bound = family_bound(fam, deg, desc.n, sq);
    AuditRecord rec =
        make_record(F, fam, desc, m, act, c, sa, bound, gap, cov.seed);
    if (!rec.pass) ++sum.violations;
    if (sum.tested == 0 || rec.margin < sum.min_margin) {
      sum.min_margin = rec.margin;
      sum.worst = rec;
    }
    sum.max_twin_gap = std::max(sum.max_twin_gap, gap);
    ++sum.tested;
    if (sink) sink(rec);
  }
  return sum;
}

AuditSummary run_exhaustive(const Field& F, SumFamily fam,
                            const EvalSetDesc& desc, uint32_t m,
                            const PointSet& A, const PointSet& B,
                            const Coverage& cov, const AuditSink& sink) {
  uint64_t q = F.q();
  uint32_t p = uint32_t(F.p());
  auto act = active_exponents(F, m);
  size_t mp = act.size();
  bool twin = !B.y.empty();

  // outer combos * (point pass + transform + scan), in rough flops
  double combos = std::pow(double(q), double(mp - 1));
  double per = double(A.size()) * 10.0 + double(q) * (p * F.s() * 6.0 + 2.0);
  if (combos * per * (twin ? 2.0 : 1.0) > kSweepOpCap)
    throw BudgetExceeded("character sweep: exhaustive cost over budget");

  FqDft dft(F);
  std::vector<uint16_t> tr(q);
  for (uint64_t e = 0; e < q; ++e) tr[e] = uint16_t(F.trace(Elem(e)));
  std::vector<double> wre(p), wim(p);
  for (uint32_t t = 0; t < p; ++t) {
    auto z = root_of_unity(p, t);
    wre[t] = z.real();
    wim[t] = z.imag();
  }
  // per-point powers for the outer exponents
  std::vector<std::vector<Elem>> pw(mp > 0 ? mp - 1 : 0);
  for (size_t d = 1; d < mp; ++d) {
    pw[d - 1].resize(A.size());
    for (size_t i = 0; i < A.size(); ++i)
      pw[d - 1][i] = F.pow(A.y[i], act[d]);
  }

  double sq = std::sqrt(double(q));
  std::vector<double> bound_of(m + 1, 0.0), thresh2(m + 1, 0.0);
  for (uint32_t deg : act) {
    bound_of[deg] = family_bound(fam, deg, desc.n, sq);
    double t = bound_of[deg] + kAuditEps;
    thresh2[deg] = t * t;
  }

  struct Bucket {
    double maxmag2 = -1.0;
    Elem c1 = 0;
    std::vector<Elem> outer;
  };
  std::vector<Bucket> buckets(m + 1);

  std::vector<double> reA(q), imA(q), reB, imB;
  if (twin) {
    reB.resize(q);
    imB.resize(q);
  }
  std::vector<Elem> c_out(mp > 0 ? mp - 1 : 0);
  AuditSummary sum;

  uint64_t ncombo = 1;
  for (size_t d = 1; d < mp; ++d) ncombo *= q;
  for (uint64_t combo = 0; combo < ncombo; ++combo) {
    uint64_t rest = combo;
    uint32_t outer_deg = 0;
    for (size_t d = 0; d + 1 < mp; ++d) {
      c_out[d] = Elem(rest % q);
      rest /= q;
      if (c_out[d]) outer_deg = std::max(outer_deg, act[d + 1]);
    }
    auto fill = [&](const PointSet& P, std::vector<double>& re,
                    std::vector<double>& im) {
      std::fill(re.begin(), re.end(), 0.0);
      std::fill(im.begin(), im.end(), 0.0);
      for (size_t i = 0; i < P.size(); ++i) {
        Elem e = 0;
        for (size_t d = 0; d + 1 < mp; ++d)
          e = F.add(e, F.mul(c_out[d], pw[d][i]));
        uint32_t t = tr[e];
        double cr = P.w[i].real() * wre[t] - P.w[i].imag() * wim[t];
        double ci = P.w[i].real() * wim[t] + P.w[i].imag() * wre[t];
        re[P.y[i]] += cr;
        im[P.y[i]] += ci;
      }
      dft.forward(re, im);
    };
    fill(A, reA, imA);
    if (twin) fill(B, reB, imB);

    uint64_t c1_lo = outer_deg == 0 ? 1 : 0;
    uint32_t deg = outer_deg == 0 ? 1 : outer_deg;
    double th2 = thresh2[deg];
    Bucket& bk = buckets[deg];
    for (uint64_t c1 = c1_lo; c1 < q; ++c1) {
      uint32_t idx = dft.perm[c1];
      double mag2 = reA[idx] * reA[idx] + imA[idx] * imA[idx];
      double gap = 0.0;
      bool twin_bad = false;
      if (twin) {
        double mb2 = reB[idx] * reB[idx] + imB[idx] * imB[idx];
        if (mb2 != mag2) {
          gap = std::abs(std::sqrt(mag2) - std::sqrt(mb2));
          sum.max_twin_gap = std::max(sum.max_twin_gap, gap);
          twin_bad = gap > kTwinEps;
          mag2 = std::max(mag2, mb2);
        }
      }
      ++sum.tested;
      if (mag2 > bk.maxmag2) {
        bk.maxmag2 = mag2;
        bk.c1 = Elem(c1);
        bk.outer = c_out;
      }
      bool viol = mag2 > th2 || twin_bad;
      if (viol) ++sum.violations;
      if (sink && (viol || cov.emit_all)) {
        std::vector<Elem> c_act(mp);
        c_act[0] = Elem(c1);
        for (size_t d = 1; d < mp; ++d) c_act[d] = c_out[d - 1];
        sink(make_record(F, fam, desc, m, act, c_act, std::sqrt(mag2),
                         bound_of[deg], gap, 0));
      }
    }
  }

  bool first = true;
  for (uint32_t deg : act) {
    const Bucket& bk = buckets[deg];
    if (bk.maxmag2 < 0.0) continue;
    double margin = bound_of[deg] - std::sqrt(bk.maxmag2);
    if (first || margin < sum.min_margin) {
      std::vector<Elem> c_act(mp, 0);
      c_act[0] = bk.c1;
      for (size_t d = 1; d < mp; ++d) c_act[d] = bk.outer[d - 1];
      sum.min_margin = margin;
      sum.worst = make_record(F, fam, desc, m, act, c_act,
                              std::sqrt(bk.maxmag2), bound_of[deg],
                              sum.max_twin_gap, 0);
      first = false;
    }
  }
  return sum;
}

}  // namespace

uint32_t CharPoly::degree() const {
  for (uint32_t j = m; j >= 1; --j)
    if (coeffs[j - 1]) return j;
  return 0;
}

std::complex<double> additive_character(const Field& F, Elem c, Elem x) {
  return root_of_unity(F.p(), F.trace(F.mul(c, x)));
}

Elem charpoly_eval(const Field& F, const CharPoly& f, Elem y) {
  Elem acc = 0;
  for (uint32_t j = f.m; j >= 1; --j) {
    acc = F.mul(acc, y);
    acc = F.add(acc, f.coeffs[j - 1]);
  }
  return F.mul(acc, y);
}

std::complex<double> poly_char_sum(const Field& F, const std::vector<Elem>& pts,
                                   const CharPoly& f, Elem c) {
  check_poly(F, f);
  std::vector<std::complex<double>> terms(pts.size());
  for (size_t i = 0; i < pts.size(); ++i)
    terms[i] = additive_character(F, c, charpoly_eval(F, f, pts[i]));
  return terms.empty() ? 0.0 : pairwise(terms, 0, terms.size());
}

const char* family_name(SumFamily fam) {
  switch (fam) {
    case SumFamily::CompleteField:
      return "complete-field";
    case SumFamily::MonomialImage:
      return "monomial-image";
    case SumFamily::DicksonImage:
      return "dickson-image";
    case SumFamily::DicksonFullDomain:
      return "dickson-full-domain";
    case SumFamily::DicksonEtaTwist:
      return "dickson-eta-twist";
    case SumFamily::DicksonInverseTwist:
      return "dickson-inverse-twist";
  }
  return "?";
}

void AuditSummary::absorb(const AuditSummary& other) {
  if (other.tested == 0) return;
  if (tested == 0 || other.min_margin < min_margin) {
    min_margin = other.min_margin;
    worst = other.worst;
  }
  tested += other.tested;
  violations += other.violations;
  max_twin_gap = std::max(max_twin_gap, other.max_twin_gap);
}

AuditSummary weil_audit_family(const Field& F, SumFamily fam,
                               const EvalSetDesc& desc, uint32_t m,
                               const Coverage& cov, const AuditSink& sink) {
  if (m == 0) throw std::invalid_argument("audit: m must be positive");
  if (desc.kind == EvalSetDesc::Kind::Explicit) return {};
  PointSet A, B;
  if (!build_points(F, fam, desc, A, B)) return {};
  if (cov.exhaustive) return run_exhaustive(F, fam, desc, m, A, B, cov, sink);
  return run_sampled(F, fam, desc, m, A, B, cov, sink);
}

AuditSummary weil_audit(const Field& F, const EvalSetDesc& desc, uint32_t m,
                        const Coverage& cov, const AuditSink& sink) {
  AuditSummary sum;
  bool monomial_like = desc.kind == EvalSetDesc::Kind::Monomial ||
                       (desc.kind == EvalSetDesc::Kind::Dickson && desc.a == 0);
  if (monomial_like) {
    if (desc.n == 1)
      sum.absorb(weil_audit_family(F, SumFamily::CompleteField, desc, m, cov, sink));
    else
      sum.absorb(weil_audit_family(F, SumFamily::MonomialImage, desc, m, cov, sink));
    return sum;
  }
  if (desc.kind != EvalSetDesc::Kind::Dickson) return sum;
  for (SumFamily fam : {SumFamily::DicksonImage, SumFamily::DicksonFullDomain,
                        SumFamily::DicksonEtaTwist, SumFamily::DicksonInverseTwist})
    sum.absorb(weil_audit_family(F, fam, desc, m, cov, sink));
  return sum;
}

}  // namespace mss
