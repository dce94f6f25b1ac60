#pragma once

// Occurrence probability of a length-l trigger in a window of n i.i.d. uniform
// elements, by several independent routes that must agree, plus the exact
// apparent-sequence counts used by the data planner.
//
// With a*h actual symbols, every element advances a greedy matcher with
// probability 1/(a*h) no matter which entry it waits for, so the trigger is
// present iff at least l of the n elements are "correct":
//
//   p(n) = sum_{k=l..n} C(n,k) ((ah-1)/ah)^(n-k) (1/ah)^k

#include <cstdint>

#include "hidtrig/core.hpp"
#include "hidtrig/exact.hpp"

namespace hidtrig {

// Real in [0, 1]. Rounding excursions up to 1e-9 past either end are clamped;
// anything further, or NaN, is an internal error.
class Probability {
 public:
  constexpr Probability() = default;
  explicit Probability(double value);

  constexpr double value() const { return value_; }
  explicit constexpr operator double() const { return value_; }

 private:
  double value_ = 0.0;
};

// Binomial tail. 0 for n < l. Log-space terms, stable for large n.
Probability p_binom(std::int64_t n, const ProblemParams& params);
Rational p_binom_exact(std::int64_t n, const ProblemParams& params);

// 1 - p_binom, summed directly over k < l so that tiny miss probabilities keep
// their relative precision.
double p_binom_miss(std::int64_t n, const ProblemParams& params);

// Negative-binomial route: the l-th correct element lands at position i.
Probability p_negbinom(std::int64_t n, const ProblemParams& params);

// First-order recurrence from p(0) = 0. Its correction terms assume exactly two
// earlier correct elements, so it is only defined for l == 3 (Unsupported
// otherwise).
Probability p_iter(std::int64_t n, const ProblemParams& params);

// Two-dimensional recurrence
//   p(m+1, j) = ((ah-1)/ah) p(m, j) + (1/ah) p(m, j-1),
//   p(m, 0) = 1, p(0, j > 0) = 0.
// Only a and h are taken from params.
Probability p_rec(std::int64_t n, std::int64_t l, const ProblemParams& params);
inline Probability p_rec(std::int64_t n, const ProblemParams& params) { return p_rec(n, params.l, params); }

// Special case a = 2, h = 4, pattern X_i X_i Y_i: condition on the number k of
// elements that are X_i or Y_i, split them binomially into x X's and y Y's,
// and subtract the (y+1) arrangements that avoid the pattern.
Probability p_repeated(std::int64_t n);

// 1 - (1 - p(n))^h: estimator and lower bound of the probability that the
// trigger occurs for at least one common hidden state.
Probability p_same_hidden(std::int64_t n, const ProblemParams& params);
Rational p_same_hidden_exact(std::int64_t n, const ProblemParams& params);

// Apparent sequences of length n over a letters that avoid a fixed length-l
// pattern: sum_{k<l} C(n,k) (a-1)^(n-k). For a = 2, l = 3 this is
// (n^2 + n + 2) / 2.
BigInt count_noncontaining(std::int64_t n, int a, int l);

// Probability that a random apparent window contains a fixed pattern; the same
// code path as p_binom with h = 1.
Probability q_apparent(std::int64_t n, int a, int l);
Rational q_apparent_exact(std::int64_t n, int a, int l);

enum class Formula { Binom, NegBinom, Iter, Rec, Repeated, SameHidden, Q };

// Parses "binom", "negbinom", "iter", "rec", "repeated", "same-hidden", "q".
Formula parse_formula(std::string_view name);
const char* to_string(Formula formula);

// Repeated requires (a, h, l) = (2, 4, 3); Iter requires l = 3.
Probability evaluate(Formula formula, std::int64_t n, const ProblemParams& params);
// Exact rational for Binom, SameHidden and Q (Unsupported for the others).
Rational evaluate_exact(Formula formula, std::int64_t n, const ProblemParams& params);

}  // namespace hidtrig
