#pragma once
// Condensed oracle suites behind the `selftest` subcommand: each suite
// replays a few of the small-instance cross-checks from the test corpus so a
// deployed binary can vouch for itself in seconds.

#include <cstdint>
#include <ostream>

namespace mss {

struct SelfTestReport {
  uint64_t checks = 0;
  uint64_t failures = 0;
  bool ok() const { return failures == 0; }
};

SelfTestReport run_selftest(std::ostream& out);

}  // namespace mss
