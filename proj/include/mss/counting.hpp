#pragma once
// Exact counting of moment-constrained k-subsets.
//
// N_k(D, b) = #{ S in C(D, k) : sum_{x in S} x^j = b_j for 1 <= j <= m }.
// Indices j divisible by p are forced (S_{jp} = S_j^p), so targets reduce to
// the p-free indices; the DP state is the packed vector of active moments.

#include "mss/bigint.hpp"
#include "mss/evalset.hpp"
#include "mss/field.hpp"
#include "mss/moment_space.hpp"
#include "mss/rng.hpp"

#include <optional>
#include <vector>

namespace mss {

struct MomentTarget {
  std::vector<Elem> b;  // b[i] is the target for the (i+1)-th power sum
  uint32_t m() const { return static_cast<uint32_t>(b.size()); }
};

struct ReducedTarget {
  uint32_t m = 0, m_p = 0;
  bool consistent = true;
  std::vector<uint32_t> active;  // 1-based moment indices j with p coprime to j
  std::vector<Elem> b;           // targets for the active indices
};

// enforce b_{ip} = b_i^p for every ip <= m, then drop the forced indices
ReducedTarget reduce_targets(const Field& f, const MomentTarget& t);

// uniform draw over consistent target vectors (free coordinates uniform,
// forced coordinates filled in)
MomentTarget sample_consistent_target(const Field& f, uint32_t m, SeededRng& rng);

// inverse of reduce_targets on consistent targets: forced indices filled back
MomentTarget expand_target(const Field& f, const ReducedTarget& t);

struct EngineLimits {
  uint64_t budget = 1'000'000'000;  // boolean-transition equivalents
  uint64_t memory = 2ull << 30;     // bytes
  uint64_t brute_cap = 10'000'000;  // enumerated subsets
};

// packed contribution (y^j)_{j active} of a single element
uint64_t moment_delta(const Field& f, const MomentSpace& ms,
                      const std::vector<uint32_t>& active, Elem y);

// ---- bulk DP tables (answer every (j <= kmax, target state) at once) ------

class ReachTable {
 public:
  ReachTable(uint64_t kmax, uint64_t states);
  bool at(uint64_t j, uint64_t state) const { return rows_[j].get(state); }
  const BitArray& row(uint64_t j) const { return rows_[j]; }
  uint64_t kmax() const { return rows_.size() - 1; }

 private:
  friend ReachTable reach_table(const Field&, const std::vector<Elem>&,
                                const MomentSpace&, const std::vector<uint32_t>&,
                                uint64_t, const EngineLimits&);
  friend std::optional<std::vector<Elem>> find_witness(
      const Field&, const std::vector<Elem>&, const MomentSpace&,
      const std::vector<uint32_t>&, uint64_t, uint64_t, const EngineLimits&);
  std::vector<BitArray> rows_;
};

ReachTable reach_table(const Field& f, const std::vector<Elem>& D,
                       const MomentSpace& ms, const std::vector<uint32_t>& active,
                       uint64_t kmax, const EngineLimits& lim = {});

class CountTable {
 public:
  BigInt at(uint64_t j, uint64_t state) const;
  bool wide() const { return !wide_rows_.empty(); }
  uint64_t kmax() const;
  // narrow backing only (tests, sweeps)
  const std::vector<uint64_t>& narrow_row(uint64_t j) const { return rows_[j]; }

 private:
  friend CountTable count_table(const Field&, const std::vector<Elem>&,
                                const MomentSpace&, const std::vector<uint32_t>&,
                                uint64_t, const EngineLimits&);
  std::vector<std::vector<uint64_t>> rows_;
  std::vector<std::vector<BigInt>> wide_rows_;
};

// counts use uint64 words unless C(|D|, j) can overflow, then BigInt
CountTable count_table(const Field& f, const std::vector<Elem>& D,
                       const MomentSpace& ms, const std::vector<uint32_t>& active,
                       uint64_t kmax, const EngineLimits& lim = {});

// full-subset enumeration histogram: per k <= kmax, counts indexed by packed
// state; the reference oracle for the DP (throws when sum C(d,j) > cap)
std::vector<std::vector<uint64_t>> brute_histogram(
    const Field& f, const std::vector<Elem>& D, const MomentSpace& ms,
    const std::vector<uint32_t>& active, uint64_t kmax,
    uint64_t cap = 20'000'000);

// ---- single-instance operations -------------------------------------------

BigInt count_exact_dp(const Field& f, const ImageSet& D, const ReducedTarget& t,
                      uint64_t k, const EngineLimits& lim = {});

// independent oracle: enumerate k-subsets and check all m moments directly
BigInt count_brute(const Field& f, const ImageSet& D, const MomentTarget& t,
                   uint64_t k, const EngineLimits& lim = {});

// ordered tuples with distinct entries: M_k = k! N_k
BigInt ordered_count(const Field& f, const ImageSet& D, const ReducedTarget& t,
                     uint64_t k, const EngineLimits& lim = {});

// complement instance: N_k(D, b) = N_{d-k}(D, b') with b'_j = S_j(D) - b_j
struct DualInstance {
  ReducedTarget target;
  uint64_t k = 0;
};
DualInstance duality_transform(const Field& f, const ImageSet& D,
                               const ReducedTarget& t, uint64_t k);

// reconstruct one witness subset by suffix reach tables; nullopt if none
// exists; throws BudgetExceeded when the table does not fit lim
std::optional<std::vector<Elem>> find_witness(const Field& f,
                                              const std::vector<Elem>& D,
                                              const MomentSpace& ms,
                                              const std::vector<uint32_t>& active,
                                              uint64_t k, uint64_t target_state,
                                              const EngineLimits& lim = {});

}  // namespace mss
