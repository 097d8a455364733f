#pragma once
// Additive-character sums over evaluation sets, exact enough to audit every
// square-root cancellation bound the decision regimes rely on.  Sums are
// complex doubles (all consumers are inequalities with slack far above
// rounding); counts never flow through here.

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mss/evalset.hpp"
#include "mss/field.hpp"

namespace mss {

// f(x) = sum of c_j x^j over 1 <= j <= m with c_j = 0 whenever p | j.
// Indices divisible by p carry no information (Frobenius folds them into
// lower moments), so the degree of an admissible nonzero f is never
// divisible by p.
struct CharPoly {
  uint32_t m = 1;
  std::vector<Elem> coeffs;  // coeffs[j-1] = c_j

  uint32_t degree() const;  // largest j with c_j != 0, or 0
};

// psi_c(x) = exp(2*pi*i * lift(Tr(c x)) / p).  c = 0 is the trivial
// character; c sweeping F_q enumerates all q additive characters.
std::complex<double> additive_character(const Field& F, Elem c, Elem x);

Elem charpoly_eval(const Field& F, const CharPoly& f, Elem y);

// sum over pts of psi_c(f(y)), pairwise-summed.
std::complex<double> poly_char_sum(const Field& F, const std::vector<Elem>& pts,
                                   const CharPoly& f, Elem c);

// One audited sum family.  Bounds, with d = deg f and q = |F|:
//   CompleteField       sum_{x in F_q} psi(f(x))                    (d-1) sqrt(q)
//   MonomialImage       sum_{y in im x^n} psi(f(y)), (n+1)^2 <= q    d    sqrt(q)
//   DicksonImage        sum_{y in im D_n(.,a)} psi(f(y))            (dn+1) sqrt(q)
//   DicksonFullDomain   sum_{x in F_q} psi(f(D_n(x,a)))             (dn-1) sqrt(q)
//   DicksonEtaTwist     odd q, eta(x^2-4a) weight                   (dn+1) sqrt(q)
//   DicksonInverseTwist even q, x != 0, + a/x^2 inside psi_Tr       (dn+1) sqrt(q)
// The inverse twist is audited in both stated forms (a/x^2 and
// a^{q/2}/x) and their magnitudes are required to agree to 1e-9.
enum class SumFamily {
  CompleteField,
  MonomialImage,
  DicksonImage,
  DicksonFullDomain,
  DicksonEtaTwist,
  DicksonInverseTwist,
};

const char* family_name(SumFamily fam);

struct AuditRecord {
  SumFamily family;
  std::string field;          // field descriptor
  std::string set;            // evaluation-set text
  uint32_t m = 0;             // sweep degree cap
  std::vector<Elem> coeffs;   // c_1..c_m, character folded into them
  double abs_sum = 0.0;
  double bound = 0.0;
  double margin = 0.0;        // bound - abs_sum
  bool pass = true;           // margin >= -kAuditEps and twin sums agree
  double twin_gap = 0.0;      // | |S_A| - |S_B| | for the inverse twist
  uint64_t seed = 0;          // sampling seed; 0 on exhaustive sweeps
};

struct AuditSummary {
  uint64_t tested = 0;
  uint64_t violations = 0;
  double min_margin = 0.0;   // meaningful once tested > 0
  double max_twin_gap = 0.0; // inverse-twist magnitude disagreement
  AuditRecord worst;         // record attaining min_margin

  void absorb(const AuditSummary& other);
};

struct Coverage {
  bool exhaustive = true;
  uint64_t samples = 0;   // used when !exhaustive
  uint64_t seed = 0;      // recorded in every sampled record
  bool emit_all = false;  // exhaustive sweeps sink every record, not just failures
};

using AuditSink = std::function<void(const AuditRecord&)>;

// Audits one family for one evaluation-set descriptor.  Exhaustive coverage
// sweeps every admissible nonzero coefficient vector with the canonical
// trace character: since S(f, psi_c) = S(c*f, psi_Tr), that exhausts all
// (f, nontrivial character) pairs.  Families whose hypotheses fail for the
// given (field, set) -- the monomial gate, the parity-specific twists --
// return an empty summary.  Violations are always sent to the sink.
AuditSummary weil_audit_family(const Field& F, SumFamily fam,
                               const EvalSetDesc& desc, uint32_t m,
                               const Coverage& cov, const AuditSink& sink = {});

// Every family applicable to desc, merged.
AuditSummary weil_audit(const Field& F, const EvalSetDesc& desc, uint32_t m,
                        const Coverage& cov, const AuditSink& sink = {});

inline constexpr double kAuditEps = 1e-6;    // |sum| vs bound slack
inline constexpr double kTwinEps = 1e-9;     // inverse-twist equality slack

}  // namespace mss
