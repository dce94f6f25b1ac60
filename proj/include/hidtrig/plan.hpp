#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "hidtrig/core.hpp"
#include "hidtrig/exact.hpp"

namespace hidtrig {

// Which probability a window must reach: a particular actual trigger
// (p_binom), a same-hidden trigger (p_same_hidden) or an apparent-only trigger
// (q_apparent, h ignored).
enum class WindowMode { Particular, SameHidden, Apparent };

WindowMode parse_window_mode(std::string_view name);
const char* to_string(WindowMode mode);

double window_probability(std::int64_t n, const ProblemParams& params, WindowMode mode);

// Smallest n with window_probability(n) >= confidence. Exponential then binary
// search. confidence must lie in (0, 1]; 1 is Unreachable unless the alphabet
// is degenerate.
std::int64_t min_window(double confidence, const ProblemParams& params, WindowMode mode);

// How a power boundary was decided.
enum class BoundaryMethod { Exact, Mpfr, Float };

const char* to_string(BoundaryMethod method);

struct PowerBound {
  std::uint64_t exponent = 0;
  BoundaryMethod method = BoundaryMethod::Exact;
};

// Smallest e >= 1 with base^e < alpha, for base and alpha in (0, 1). Decided
// with exact integer powers when they stay small enough, otherwise by 512-bit
// MPFR logarithms.
PowerBound smallest_power_below(const Rational& base, const Rational& alpha);

struct DataPlan {
  Rational alpha;
  std::int64_t window = 0;
  int a = 0;
  int l = 0;
  // Probability that one positive window fails to eliminate a given false
  // candidate, i.e. q_apparent(window).
  double g = 0.0;
  std::optional<Rational> g_exact;
  std::uint64_t m = 0;  // windows per elimination run: G^m < alpha <= G^(m-1)
  std::uint64_t r = 0;  // runs: ((F-1)/F)^r < alpha <= ((F-1)/F)^(r-1)
  std::uint64_t total = 0;
  std::uint64_t false_candidates = 0;  // F = a^l - 1
  bool exact = false;
  BoundaryMethod m_method = BoundaryMethod::Exact;
  BoundaryMethod r_method = BoundaryMethod::Exact;
};

// Exact rational G whenever window <= 64 or force_exact is set; otherwise
// floating point, which fails with Precision once G rounds to 1.
DataPlan data_plan(const Rational& alpha, std::int64_t window, int a, int l, bool force_exact = false);
DataPlan data_plan(double alpha, std::int64_t window, int a, int l, bool force_exact = false);

struct DifficultyRow {
  int a = 0;
  DataPlan plan;
};

// data_plan(alpha, n, a, l) for each a. h only labels the curve: the
// apparent-sequence quantities do not depend on it.
std::vector<DifficultyRow> difficulty_curve(std::int64_t n, int h, int l, std::span<const int> a_values,
                                            const Rational& alpha = Rational(1, 20));

}  // namespace hidtrig
