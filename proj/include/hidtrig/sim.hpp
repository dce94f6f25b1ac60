#pragma once

// Monte Carlo estimates and brute-force oracles for the closed forms in
// prob.hpp.

#include <cstdint>

#include "hidtrig/core.hpp"
#include "hidtrig/exact.hpp"

namespace hidtrig {

struct McEstimate {
  double estimate = 0.0;
  std::uint64_t trials = 0;
  double std_error = 0.0;  // sqrt(est (1 - est) / trials)
  double ci_lo = 0.0;      // estimate -/+ 1.96 std_error, clamped to [0, 1]
  double ci_hi = 0.0;

  friend bool operator==(const McEstimate&, const McEstimate&) = default;
};

McEstimate make_estimate(std::uint64_t hits, std::uint64_t trials);

inline constexpr std::uint64_t kDefaultTrials = 1000;

// Fraction of `trials` random windows of length n that contain the pattern.
// Trial t draws its n elements from Rng(derive_seed(seed, t)), so the result
// does not depend on `threads` (0 = hardware concurrency).
McEstimate mc_probability(std::int64_t n, const ProblemParams& params, const TriggerPattern& pattern,
                          std::uint64_t trials, std::uint64_t seed, unsigned threads = 0);

struct EnumerationCount {
  std::uint64_t containing = 0;
  std::uint64_t total = 0;  // (a h)^n
};

inline constexpr std::uint64_t kEnumerationLimit = 100'000'000;

// Visits every actual sequence of length n; GuardExceeded when (a h)^n
// exceeds kEnumerationLimit.
EnumerationCount enumerate_count(std::int64_t n, const ProblemParams& params, const TriggerPattern& pattern);
Rational exact_enumeration(std::int64_t n, const ProblemParams& params, const TriggerPattern& pattern);

// Forward distribution of the greedy matcher's progress 0..l, advancing with
// probability 1/(a h) per element; returns the mass absorbed at l.
double dp_probability(std::int64_t n, const ProblemParams& params, std::int64_t l);

}  // namespace hidtrig
