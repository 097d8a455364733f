#include "mss/counting.hpp"

#include "mss/errors.hpp"

#include <algorithm>
#include <stdexcept>

namespace mss {

namespace {

// cost / memory guards shared by the table builders
void check_table_limits(uint64_t d, uint64_t kmax, uint64_t states,
                        uint64_t unit_weight, uint64_t bytes_per_state,
                        const EngineLimits& lim, const char* what) {
  const BigInt cost = BigInt(d) * kmax * states * unit_weight;
  if (cost > lim.budget)
    throw BudgetExceeded(std::string(what) + ": transition cost " +
                         cost.str() + " exceeds budget " +
                         std::to_string(lim.budget));
  const BigInt mem = BigInt(kmax + 1) * states * bytes_per_state;
  if (mem > lim.memory)
    throw BudgetExceeded(std::string(what) + ": table memory " + mem.str() +
                         " exceeds limit " + std::to_string(lim.memory));
}

void require_sorted(const std::vector<Elem>& D) {
  if (!std::is_sorted(D.begin(), D.end()) ||
      std::adjacent_find(D.begin(), D.end()) != D.end())
    throw std::invalid_argument("engine: evaluation set must be sorted and duplicate-free");
}

}  // namespace

ReducedTarget reduce_targets(const Field& f, const MomentTarget& t) {
  const uint32_t m = t.m();
  if (m == 0) throw std::invalid_argument("targets: m must be >= 1");
  ReducedTarget r;
  r.m = m;
  for (uint32_t i = 1; i * f.p() <= m; ++i)
    if (t.b[i * f.p() - 1] != f.pow(t.b[i - 1], f.p())) r.consistent = false;
  for (uint32_t j = 1; j <= m; ++j)
    if (j % f.p() != 0) {
      r.active.push_back(j);
      r.b.push_back(t.b[j - 1]);
    }
  r.m_p = static_cast<uint32_t>(r.active.size());
  return r;
}

MomentTarget sample_consistent_target(const Field& f, uint32_t m, SeededRng& rng) {
  MomentTarget t;
  t.b.resize(m);
  for (uint32_t j = 1; j <= m; ++j)
    t.b[j - 1] = j % f.p() == 0 ? f.pow(t.b[j / f.p() - 1], f.p())
                                : static_cast<Elem>(rng.below(f.q()));
  return t;
}

MomentTarget expand_target(const Field& f, const ReducedTarget& t) {
  MomentTarget out;
  out.b.resize(t.m);
  size_t next = 0;
  for (uint32_t j = 1; j <= t.m; ++j)
    out.b[j - 1] = j % f.p() == 0 ? f.pow(out.b[j / f.p() - 1], f.p())
                                  : t.b[next++];
  return out;
}

uint64_t moment_delta(const Field& f, const MomentSpace& ms,
                      const std::vector<uint32_t>& active, Elem y) {
  uint64_t out = 0;
  for (size_t i = 0; i < active.size(); ++i)
    out += static_cast<uint64_t>(f.pow(y, active[i])) * ms.stride[f.s() * i];
  return out;
}

// ---- reach table -----------------------------------------------------------

ReachTable::ReachTable(uint64_t kmax, uint64_t states)
    : rows_(kmax + 1) {
  for (auto& r : rows_) r.resize(states);
}

ReachTable reach_table(const Field& f, const std::vector<Elem>& D,
                       const MomentSpace& ms, const std::vector<uint32_t>& active,
                       uint64_t kmax, const EngineLimits& lim) {
  require_sorted(D);
  check_table_limits(D.size(), kmax, ms.size, 1, 1, lim, "reach table");
  ReachTable t(kmax, ms.size);
  t.rows_[0].set(0);
  BitTranslator tr(ms);
  uint64_t seen = 0;
  for (Elem y : D) {
    ++seen;
    const uint64_t delta = moment_delta(f, ms, active, y);
    const uint64_t hi = std::min<uint64_t>(kmax, seen);
    for (uint64_t j = hi; j >= 1; --j)
      tr.or_translated(t.rows_[j - 1], t.rows_[j], delta);
  }
  return t;
}

// ---- count table -----------------------------------------------------------

BigInt CountTable::at(uint64_t j, uint64_t state) const {
  if (!wide_rows_.empty()) return wide_rows_[j][state];
  return BigInt(rows_[j][state]);
}

uint64_t CountTable::kmax() const {
  return (wide_rows_.empty() ? rows_.size() : wide_rows_.size()) - 1;
}

namespace {

template <class T>
void run_count_dp(const Field& f, const std::vector<Elem>& D,
                  const MomentSpace& ms, const std::vector<uint32_t>& active,
                  uint64_t kmax, std::vector<std::vector<T>>& rows) {
  rows.assign(kmax + 1, std::vector<T>(ms.size));
  rows[0][0] = 1;
  AddTranslator<T> tr(ms);
  uint64_t seen = 0;
  for (Elem y : D) {
    ++seen;
    const uint64_t delta = moment_delta(f, ms, active, y);
    const uint64_t hi = std::min<uint64_t>(kmax, seen);
    for (uint64_t j = hi; j >= 1; --j)
      tr.add_translated(rows[j - 1], rows[j], delta);
  }
}

}  // namespace

CountTable count_table(const Field& f, const std::vector<Elem>& D,
                       const MomentSpace& ms, const std::vector<uint32_t>& active,
                       uint64_t kmax, const EngineLimits& lim) {
  require_sorted(D);
  const uint64_t d = D.size();
  // every entry is at most C(d, j); pick the word width accordingly
  const uint64_t jpeak = std::min(kmax, d / 2);
  const bool wide = binomial(d, jpeak) >= (BigInt(1) << 63);
  check_table_limits(d, kmax, ms.size, 64, wide ? sizeof(BigInt) : 8, lim,
                     "count table");
  CountTable t;
  if (wide)
    run_count_dp<BigInt>(f, D, ms, active, kmax, t.wide_rows_);
  else
    run_count_dp<uint64_t>(f, D, ms, active, kmax, t.rows_);
  return t;
}

// ---- brute enumeration -----------------------------------------------------

std::vector<std::vector<uint64_t>> brute_histogram(
    const Field& f, const std::vector<Elem>& D, const MomentSpace& ms,
    const std::vector<uint32_t>& active, uint64_t kmax, uint64_t cap) {
  require_sorted(D);
  const uint64_t d = D.size();
  BigInt nodes = 0;
  for (uint64_t j = 0; j <= std::min(kmax, d); ++j) nodes += binomial(d, j);
  if (nodes > cap)
    throw BudgetExceeded("brute histogram: " + nodes.str() + " subsets exceed cap");
  std::vector<std::vector<uint64_t>> hist(kmax + 1,
                                          std::vector<uint64_t>(ms.size, 0));
  std::vector<uint64_t> deltas(d);
  for (uint64_t i = 0; i < d; ++i)
    deltas[i] = moment_delta(f, ms, active, D[i]);
  // depth-first over index-increasing subsets
  struct Frame {
    uint64_t next, size, state;
  };
  std::vector<Frame> stack;
  stack.push_back({0, 0, 0});
  while (!stack.empty()) {
    Frame fr = stack.back();
    stack.pop_back();
    hist[fr.size][fr.state]++;
    if (fr.size == kmax) continue;
    for (uint64_t i = fr.next; i < d; ++i)
      stack.push_back({i + 1, fr.size + 1, ms.add(fr.state, deltas[i])});
  }
  return hist;
}

BigInt count_brute(const Field& f, const ImageSet& D, const MomentTarget& t,
                   uint64_t k, const EngineLimits& lim) {
  const uint64_t d = D.size();
  if (k > d) return 0;
  if (binomial(d, k) > lim.brute_cap)
    throw BudgetExceeded("brute count: C(" + std::to_string(d) + "," +
                         std::to_string(k) + ") exceeds cap " +
                         std::to_string(lim.brute_cap));
  const uint32_t m = t.m();
  // per-element power vectors, then a depth-first scan over k-subsets
  std::vector<std::vector<Elem>> pows(d, std::vector<Elem>(m));
  for (uint64_t i = 0; i < d; ++i)
    for (uint32_t j = 1; j <= m; ++j)
      pows[i][j - 1] = f.pow(D.elements[i], j);
  uint64_t hits = 0;
  std::vector<Elem> acc(m, 0);
  // iterative DFS with explicit undo to keep the accumulator exact
  std::vector<uint64_t> chosen;
  auto rec = [&](auto&& self, uint64_t next, uint64_t size) -> void {
    if (size == k) {
      bool ok = true;
      for (uint32_t j = 0; j < m; ++j)
        if (acc[j] != t.b[j]) {
          ok = false;
          break;
        }
      hits += ok;
      return;
    }
    // not enough elements left to finish
    for (uint64_t i = next; i + (k - size) <= d; ++i) {
      for (uint32_t j = 0; j < m; ++j) acc[j] = f.add(acc[j], pows[i][j]);
      self(self, i + 1, size + 1);
      for (uint32_t j = 0; j < m; ++j) acc[j] = f.sub(acc[j], pows[i][j]);
    }
  };
  rec(rec, 0, 0);
  return BigInt(hits);
}

// ---- instance-level operations ----------------------------------------------

BigInt count_exact_dp(const Field& f, const ImageSet& D, const ReducedTarget& t,
                      uint64_t k, const EngineLimits& lim) {
  if (!t.consistent) return 0;
  if (k > D.size()) return 0;
  MomentSpace ms = MomentSpace::make(f, t.m_p);
  CountTable tab = count_table(f, D.elements, ms, t.active, k, lim);
  return tab.at(k, ms.pack(t.b));
}

BigInt ordered_count(const Field& f, const ImageSet& D, const ReducedTarget& t,
                     uint64_t k, const EngineLimits& lim) {
  return factorial(k) * count_exact_dp(f, D, t, k, lim);
}

DualInstance duality_transform(const Field& f, const ImageSet& D,
                               const ReducedTarget& t, uint64_t k) {
  if (k > D.size())
    throw std::invalid_argument("duality: k exceeds |D|");
  DualInstance out;
  out.k = D.size() - k;
  out.target = t;
  for (size_t i = 0; i < t.active.size(); ++i) {
    Elem s = 0;
    for (Elem y : D.elements) s = f.add(s, f.pow(y, t.active[i]));
    out.target.b[i] = f.sub(s, t.b[i]);
  }
  return out;
}

std::optional<std::vector<Elem>> find_witness(const Field& f,
                                              const std::vector<Elem>& D,
                                              const MomentSpace& ms,
                                              const std::vector<uint32_t>& active,
                                              uint64_t k, uint64_t target_state,
                                              const EngineLimits& lim) {
  require_sorted(D);
  const uint64_t d = D.size();
  if (k > d) return std::nullopt;
  // suffix[i] holds reachability over D[i..d); built back to front.
  // memory: (d+1) * (k+1) * states bits
  const BigInt mem = BigInt(d + 1) * (k + 1) * ((ms.size + 63) / 64) * 8;
  if (mem > lim.memory)
    throw BudgetExceeded("witness table memory " + mem.str() + " exceeds limit");
  const BigInt cost = BigInt(d) * (k ? k : 1) * ms.size;
  if (cost > lim.budget)
    throw BudgetExceeded("witness table cost " + cost.str() + " exceeds budget");
  std::vector<uint64_t> deltas(d);
  for (uint64_t i = 0; i < d; ++i)
    deltas[i] = moment_delta(f, ms, active, D[i]);
  std::vector<ReachTable> suffix;
  suffix.reserve(d + 1);
  for (uint64_t i = 0; i <= d; ++i) suffix.emplace_back(k, ms.size);
  suffix[d].rows_[0].set(0);
  BitTranslator tr(ms);
  for (uint64_t i = d; i-- > 0;) {
    for (uint64_t j = 0; j <= k; ++j) {
      suffix[i].rows_[j] = suffix[i + 1].rows_[j];
      if (j >= 1)
        tr.or_translated(suffix[i + 1].rows_[j - 1], suffix[i].rows_[j],
                         deltas[i]);
    }
  }
  if (!suffix[0].at(k, target_state)) return std::nullopt;
  std::vector<Elem> out;
  uint64_t state = target_state, need = k;
  for (uint64_t i = 0; i < d && need > 0; ++i) {
    const uint64_t prev = ms.sub(state, deltas[i]);
    if (suffix[i + 1].at(need - 1, prev)) {
      out.push_back(D[i]);
      state = prev;
      --need;
    }
  }
  if (need != 0 || state != 0)
    throw std::logic_error("witness reconstruction lost the trail");
  return out;
}

}  // namespace mss
