#pragma once
// Regime-dispatched decision procedure for moment-constrained k-subsets.
//
// decide() answers "is N_k(D, b) > 0" through a ladder of engines: the exact
// DP and brute enumeration while they fit the budget, a depth-first search
// for small k, and two analytic guarantees -- a sieve bound for medium k and
// character-sum bounds for large k -- whose hypotheses are certified in exact
// integer arithmetic (roots and logarithms are cleared by integer powering).
// Every outcome carries a machine-checkable certificate; there is never a
// guessed answer.

#include "mss/bigint.hpp"
#include "mss/charsum.hpp"
#include "mss/counting.hpp"
#include "mss/evalset.hpp"
#include "mss/field.hpp"

#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mss {

// instance facts the analytic guarantees are stated over.  n is the effective
// degree of the evaluation set: p-parts are stripped (x^{pn} and D_{pn} share
// their image with degree-n sets up to Frobenius), and a monomial degree is
// further reduced to gcd(n, q-1) since x^n and x^{gcd(n,q-1)} have one image.
struct RegimeParams {
  uint64_t q = 0, p = 0;
  uint32_t s = 0;
  uint64_t n = 1;        // effective set degree
  uint64_t n_given = 1;  // degree as written in the descriptor
  uint32_t m = 0, m_p = 0;
  uint64_t k = 0;
  uint64_t d = 0;             // |D|
  bool image_family = false;  // monomial or Dickson image (not explicit)
};

RegimeParams make_params(const Field& f, const EvalSetDesc& d, uint32_t m,
                         uint64_t k, uint64_t dsize);

// one hypothesis, compared in exact integer arithmetic
struct HypothesisCheck {
  std::string name;       // e.g. "(2n(mn+1))^6 < q"
  std::string lhs, rhs;   // decimal values actually compared
  bool holds = false;
};

struct GuaranteeResult {
  bool applicable = false;  // every hypothesis holds
  std::string label;        // regime tag
  std::vector<HypothesisCheck> checks;
};

// sieve guarantee: N_k(D, b) > 0 for every consistent b whenever
//   2n(mn+1) < q^(1/6)   and   3 m_p + 1 < k < q^(5/12)
// (monomial / Dickson images).  Certified as (2n(mn+1))^6 < q and k^12 < q^5.
GuaranteeResult medium_k_guarantee(const RegimeParams& rp);

// character-sum guarantee.  Odd p:
//   (mn+1) sqrt(q) <= 0.013 |D|   and   6 m_p ln q <= k <= |D|/2.
// p = 2:
//   n(mn+1) < sqrt(q)/16          and   3.05 m_p log2(q) < k <= |D|/2.
// Squares clear the roots; ln q is replaced by the certified rational bound
// below.  log2(q) = s exactly.
GuaranteeResult large_k_guarantee(const RegimeParams& rp);

// smallest a with a/256 >= ln q, certified by integer powering against a
// rational under-approximation of e (so the bound errs upward); memoized
std::pair<uint64_t, uint64_t> lnq_upper_rational(uint64_t q);

// ---- desk-scale sieve and character-sum terms ------------------------------

// first- and second-order inclusion terms over ordered tuples from D:
//   R   = # k-tuples (repeats allowed) with sum_i x_i^j = b_j, j active
//   R12 = # (k-1)-tuples whose first coordinate contributes 2 x_1^j
// The ordered distinct count obeys M_k >= R - C(k,2) R12; M_k = k! N_k.
// R12 is 0 for k < 2, where no pair can coincide.
struct BrunTerms {
  BigInt r, r12;
};
BrunTerms brun_terms(const Field& f, const ImageSet& D, const ReducedTarget& t,
                     uint64_t k, const EngineLimits& lim = {});

// the same terms for every packed target state at once
struct BrunTables {
  std::vector<BigInt> r, r12;
};
BrunTables brun_tables(const Field& f, const std::vector<Elem>& D,
                       const MomentSpace& ms,
                       const std::vector<uint32_t>& active, uint64_t k,
                       const EngineLimits& lim = {});

// distinct-tuple character sums
//   S_D(k) = sum over ordered k-tuples of pairwise distinct points of D
//            of psi_c(f(x_1) + ... + f(x_k))
// via S(1) = sum psi_c(f), S(2) = S(1)^2 - |D|, and for 3 <= k <= |D|
//   S(k) = S(1) S(k-1) - (|D|-k+2)(k-1) S(k-2).
// The recursion agrees with the tuple sum in characteristic 2, where the
// character is +-1-valued so psi(f(x))^2 = 1; for odd p it still evaluates
// the same formal recursion.  Requires |D| > 3 and 1 <= k <= |D|.
std::complex<double> choe_recursion(const Field& f, const std::vector<Elem>& D,
                                    const CharPoly& poly, Elem c, uint64_t k);

// falling-factorial deviation bound with B = (mn+1) sqrt(q):
//   |M_k - (|D|)_k / q^(m_p)| < (B + k + |B - |D||/p - 1)_k
// relaxed to (0.013 |D| + k + |D|/p)_k once B <= 0.013 |D|.  A factor <= 0
// zeroes the value and clears the matching flag.
struct LiWanBound {
  double primary = 0;
  bool primary_valid = false;
  double relaxed = 0;
  bool relaxed_valid = false;
};
LiWanBound liwan_bound(const RegimeParams& rp);

// real falling factorial x(x-1)...(x-k+1); 0 when some factor is <= 0
double falling_factorial(double x, uint64_t k);

// exact |M_k q^(m_p) - (|D|)_k| / q^(m_p) for desk-scale verification
struct ExactDeviation {
  BigInt num, den;
};
ExactDeviation liwan_deviation(const Field& f, const ImageSet& D,
                               const ReducedTarget& t, uint64_t k,
                               const EngineLimits& lim = {});

// ---- small-k search ---------------------------------------------------------

// depth-first search over the sorted points of D in index order, closing the
// last level through a moment-vector lookup (the j = 1 coordinate makes every
// point's contribution distinct).  Exhausted means the whole space was
// searched: a certified empty instance.  OutOfBudget decides nothing.
struct SmallKResult {
  enum class Status { Found, Exhausted, OutOfBudget };
  Status status = Status::OutOfBudget;
  std::vector<Elem> witness;  // ascending, Found only
  uint64_t nodes = 0;
};
SmallKResult small_k_solver(const Field& f, const std::vector<Elem>& D,
                            const ReducedTarget& t, uint64_t k,
                            uint64_t node_budget = 200'000);

// ---- the decision ladder ----------------------------------------------------

// Memo for batch drivers.  The bulk tables behind the exact rungs depend only
// on (field, evaluation set, active moment indices) -- never on the target --
// and complementation keeps every query depth at kk <= |D|/2, so one table per
// instance family answers a whole batch of (b, k) queries.  A cached table is
// built under the same per-call budget as the uncached rung (just once, at
// depth |D|/2 when that fits, else at the requested depth); when a batch build
// trips a limit the call falls back to the uncached rung, so answers and
// regime labels never depend on whether a cache is attached.
struct DecideCache {
  std::map<std::string, CountTable> counts;
  std::map<std::string, ReachTable> reach;
};

struct DecideOptions {
  EngineLimits limits;
  uint64_t search_budget = 200'000;   // small-k nodes
  uint64_t enum_cap = 1ull << 24;     // image materialization cap
  DecideCache* cache = nullptr;       // optional batch memo, caller-owned
};

struct Certificate {
  std::vector<HypothesisCheck> checks;       // theorem regimes
  std::optional<std::vector<Elem>> witness;  // search regimes, YES answers
  std::optional<BigInt> count;               // exact regimes
};

struct DecisionOutcome {
  bool yes = false;
  std::string regime;  // inconsistent-targets | exact-dp | exact-brute |
                       // small-k-search | medium-k-theorem |
                       // large-k-theorem-odd | large-k-theorem-even |
                       // fallback-exact
  bool duality_applied = false;
  Certificate cert;
};

// Ladder: reduce targets (inconsistent -> NO), k > |D| -> NO, complement when
// 2k > |D|, then exact DP / brute / small-k search / medium / large theorems /
// boolean-DP fallback.  Witnesses found on the complemented instance are
// mapped back and re-verified against the original targets.  Throws
// BudgetExceeded when no engine fits and no guarantee applies.
DecisionOutcome decide(const Field& f, const EvalSetDesc& d,
                       const MomentTarget& t, uint64_t k,
                       const DecideOptions& opt = {});

}  // namespace mss
