#pragma once

// The invariant suite behind the `selftest` subcommand. Every randomized
// draw comes from one seeded generator and nothing time-dependent enters
// the report, so equal seeds give byte-identical text and JSON.

#include <cstdint>
#include <string>
#include <vector>

namespace propertime {

inline constexpr std::uint64_t kDefaultSeed = 20240917;

struct SelftestCheck {
  std::string name;
  double value = 0.0;
  double low = 0.0;   // passes when low <= value <= high
  double high = 0.0;
  bool passed = false;
};

struct SelftestReport {
  std::uint64_t seed = kDefaultSeed;
  std::vector<SelftestCheck> checks;

  bool passed() const;
  std::string text() const;
  std::string json() const;
};

SelftestReport run_selftest(std::uint64_t seed = kDefaultSeed);

}  // namespace propertime
