#include "hidtrig/prob.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace hidtrig {

namespace {

constexpr std::int64_t kMaxLinearN = 100'000'000;
constexpr std::int64_t kMaxQuadraticN = 20'000;
constexpr double kClampSlack = 1e-9;

void check_n(std::int64_t n, std::int64_t limit = kMaxLinearN) {
  if (n < 0) fail(ErrorKind::InvalidInput, "window length n must be >= 0, got " + std::to_string(n));
  if (n > limit)
    fail(ErrorKind::GuardExceeded, "window length n=" + std::to_string(n) + " exceeds the bound " + std::to_string(limit));
}

// log C(n, k), accumulated as a product of ratios.
double log_choose(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return -INFINITY;
  if (k > n - k) k = n - k;
  double acc = 0.0;
  for (std::int64_t j = 0; j < k; ++j) acc += std::log(static_cast<double>(n - j)) - std::log(static_cast<double>(j + 1));
  return acc;
}

// log(x!) - log(sqrt(2 pi x) (x/e)^x).
double stirling_error(double x) {
  if (x <= 15.0) return std::lgamma(x + 1.0) - (x + 0.5) * std::log(x) + x - 0.5 * std::log(2.0 * M_PI);
  const double xx = x * x;
  return (1.0 / 12 - (1.0 / 360 - (1.0 / 1260 - (1.0 / 1680 - 1.0 / (1188 * xx)) / xx) / xx) / xx) / x;
}

// x log(x / m) + m - x without cancellation near x = m.
double deviance(double x, double m) {
  if (std::fabs(x - m) < 0.1 * (x + m)) {
    double v = (x - m) / (x + m);
    double sum = (x - m) * v;
    double ej = 2 * x * v;
    v *= v;
    for (int j = 1; j < 1000; ++j) {
      ej *= v;
      const double next = sum + ej / (2 * j + 1);
      if (next == sum) break;
      sum = next;
    }
    return sum;
  }
  return x * std::log(x / m) + m - x;
}

// Binomial(n, q) pmf at k: formed directly when that is a normal double, so
// dyadic cases stay exact, otherwise by the saddle-point expansion.
double binomial_pmf(std::int64_t n, double q, std::int64_t k) {
  double c = 1.0;
  for (std::int64_t j = 0; j < std::min(k, n - k) && c < 1e300; ++j)
    c = c * static_cast<double>(n - j) / static_cast<double>(j + 1);
  const double direct = c * std::pow(q, static_cast<double>(k)) * std::pow(1.0 - q, static_cast<double>(n - k));
  if (c < 1e300 && std::isnormal(direct)) return direct;
  const double dn = static_cast<double>(n);
  const double dk = static_cast<double>(k);
  if (k == 0) return std::exp(dn * std::log1p(-q));
  if (k == n) return std::exp(dn * std::log(q));
  const double lc = stirling_error(dn) - stirling_error(dk) - stirling_error(dn - dk) - deviance(dk, dn * q) -
                    deviance(dn - dk, dn * (1.0 - q));
  return std::exp(lc) * std::sqrt(dn / (2.0 * M_PI * dk * (dn - dk)));
}

// Sum of the pmf from `from` towards `to`, walking away from the mode so the
// terms shrink and the walk can stop once they no longer matter.
double binomial_walk(std::int64_t n, double q, std::int64_t from, std::int64_t to) {
  const double ratio = q / (1.0 - q);
  double term = binomial_pmf(n, q, from);
  double sum = 0.0;
  const std::int64_t step = to >= from ? 1 : -1;
  for (std::int64_t k = from;; k += step) {
    sum += term;
    if (k == to || (term < sum * 1e-18)) break;
    if (step > 0)
      term *= static_cast<double>(n - k) / static_cast<double>(k + 1) * ratio;
    else
      term *= static_cast<double>(k) / static_cast<double>(n - k + 1) / ratio;
  }
  return sum;
}

// Sum of Binomial(n, q) pmf over k in [lo, hi].
double binomial_range(std::int64_t n, double q, std::int64_t lo, std::int64_t hi) {
  lo = std::max<std::int64_t>(lo, 0);
  hi = std::min(hi, n);
  if (lo > hi) return 0.0;
  if (q >= 1.0) return hi == n ? 1.0 : 0.0;
  if (q <= 0.0) return lo == 0 ? 1.0 : 0.0;
  const auto mode = static_cast<std::int64_t>(std::floor(static_cast<double>(n + 1) * q));
  if (hi <= mode) return binomial_walk(n, q, hi, lo);
  if (lo >= mode) return binomial_walk(n, q, lo, hi);
  return binomial_walk(n, q, mode, lo) + binomial_walk(n, q, mode + 1, hi);
}

// Upper tail P(X >= l), through the complement when l is below the mode.
double binomial_tail(std::int64_t n, double q, std::int64_t l) {
  if (static_cast<double>(l) <= static_cast<double>(n + 1) * q)
    return 1.0 - binomial_range(n, q, 0, l - 1);
  return binomial_range(n, q, l, n);
}

BigInt power(const BigInt& base, std::int64_t exponent) {
  BigInt out;
  mpz_pow_ui(out.get_mpz_t(), base.get_mpz_t(), static_cast<unsigned long>(exponent));
  return out;
}

BigInt binomial(std::int64_t n, std::int64_t k) {
  BigInt out;
  mpz_bin_uiui(out.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return out;
}

// Sequences of length n over `alphabet` symbols in which exactly k of the
// positions hold one distinguished symbol class, summed over k in [lo, hi].
BigInt count_range(std::int64_t n, std::int64_t alphabet, std::int64_t lo, std::int64_t hi) {
  BigInt total = 0;
  const BigInt others = alphabet - 1;
  for (std::int64_t k = std::max<std::int64_t>(lo, 0); k <= std::min(hi, n); ++k)
    total += binomial(n, k) * power(others, n - k);
  return total;
}

}  // namespace

Probability::Probability(double value) {
  if (std::isnan(value) || value < -kClampSlack || value > 1.0 + kClampSlack)
    fail(ErrorKind::Precision, "probability out of range: " + format_double(value));
  value_ = std::clamp(value, 0.0, 1.0);
}

Probability p_binom(std::int64_t n, const ProblemParams& params) {
  params.validate();
  check_n(n);
  if (n < params.l) return Probability(0.0);
  const double q = 1.0 / static_cast<double>(params.actual_alphabet());
  return Probability(binomial_tail(n, q, params.l));
}

double p_binom_miss(std::int64_t n, const ProblemParams& params) {
  params.validate();
  check_n(n);
  if (n < params.l) return 1.0;
  const double q = 1.0 / static_cast<double>(params.actual_alphabet());
  return binomial_range(n, q, 0, params.l - 1);
}

Rational p_binom_exact(std::int64_t n, const ProblemParams& params) {
  params.validate();
  check_n(n, 1'000'000);
  if (n < params.l) return Rational(0);
  const std::int64_t ah = params.actual_alphabet();
  Rational r(count_range(n, ah, params.l, n), power(BigInt(static_cast<long>(ah)), n));
  r.canonicalize();
  return r;
}

Probability p_negbinom(std::int64_t n, const ProblemParams& params) {
  params.validate();
  check_n(n);
  const std::int64_t l = params.l;
  if (n < l) return Probability(0.0);
  const double q = 1.0 / static_cast<double>(params.actual_alphabet());
  if (q >= 1.0) return Probability(1.0);
  const double log_q = std::log(q);
  const double log_r = std::log1p(-q);
  // term(i) = C(i-1, l-1) r^(i-l) q^l, starting at i = l.
  double log_term = static_cast<double>(l) * log_q;
  double sum = 0.0;
  for (std::int64_t i = l;; ++i) {
    sum += std::exp(log_term);
    if (i == n) break;
    log_term += std::log(static_cast<double>(i)) - std::log(static_cast<double>(i - l + 1)) + log_r;
  }
  return Probability(sum);
}

Probability p_iter(std::int64_t n, const ProblemParams& params) {
  params.validate();
  check_n(n);
  if (params.l != 3)
    fail(ErrorKind::Unsupported, "the iterative form is only defined for l = 3, got l=" + std::to_string(params.l));
  const double q = 1.0 / static_cast<double>(params.actual_alphabet());
  const double r = 1.0 - q;
  double p = 0.0;
  double r_pow = 1.0;       // r^k
  double r_pow_prev = 0.0;  // r^(k-1); the k = 0 term carries a factor k = 0
  for (std::int64_t k = 0; k < n; ++k) {
    const double one_prior = static_cast<double>(k) * r_pow_prev * q;
    p = r * p + q * (1.0 - r_pow - one_prior);
    r_pow_prev = r_pow;
    r_pow *= r;
  }
  return Probability(p);
}

Probability p_rec(std::int64_t n, std::int64_t l, const ProblemParams& params) {
  params.validate();
  if (n < 0 || l < 0)
    fail(ErrorKind::InvalidInput, "recurrence arguments must be non-negative (n=" + std::to_string(n) + ", l=" + std::to_string(l) + ")");
  check_n(n);
  if ((n + 1) * (l + 1) > 1'000'000'000)
    fail(ErrorKind::GuardExceeded, "recurrence table (n+1)(l+1) exceeds 1e9 cells");
  if (l == 0) return Probability(1.0);
  if (l > n) return Probability(0.0);
  const double q = 1.0 / static_cast<double>(params.actual_alphabet());
  const double r = 1.0 - q;
  // row[j] = p(m, j); updated in place from high j to low j.
  std::vector<double> row(static_cast<std::size_t>(l) + 1, 0.0);
  row[0] = 1.0;
  for (std::int64_t m = 0; m < n; ++m) {
    const std::int64_t top = std::min(l, m + 1);
    for (std::int64_t j = top; j >= 1; --j) row[j] = r * row[j] + q * row[j - 1];
  }
  return Probability(row[static_cast<std::size_t>(l)]);
}

Probability p_repeated(std::int64_t n) {
  check_n(n, kMaxQuadraticN);
  if (n < 3) return Probability(0.0);
  // k necessary elements (X_i or Y_i), probability 1/4 each at a = 2, h = 4.
  const double log_q = std::log(0.25);
  const double log_r = std::log(0.75);
  const double log_half = std::log(0.5);
  double total = 0.0;
  double log_outer_choose = log_choose(n, 3);
  for (std::int64_t k = 3; k <= n; ++k) {
    const double outer = std::exp(log_outer_choose + static_cast<double>(n - k) * log_r + static_cast<double>(k) * log_q);
    double avoid = 0.0;
    double lc = 0.0;  // log C(k, x)
    for (std::int64_t x = 0; x <= k; ++x) {
      const std::int64_t y = k - x;
      const double gamma = std::exp(lc + static_cast<double>(k) * log_half);
      double arrangement = 1.0;
      if (x >= 2 && y >= 1) arrangement = std::min(1.0, static_cast<double>(y + 1) * std::exp(-lc));
      avoid += gamma * arrangement;
      lc += std::log(static_cast<double>(k - x)) - std::log(static_cast<double>(x + 1));
    }
    total += outer * (1.0 - avoid);
    log_outer_choose += std::log(static_cast<double>(n - k)) - std::log(static_cast<double>(k + 1));
  }
  return Probability(total);
}

Probability p_same_hidden(std::int64_t n, const ProblemParams& params) {
  const double p = p_binom(n, params).value();
  if (p >= 1.0) return Probability(1.0);
  return Probability(-std::expm1(static_cast<double>(params.h) * std::log1p(-p)));
}

Rational p_same_hidden_exact(std::int64_t n, const ProblemParams& params) {
  const Rational miss = 1 - p_binom_exact(n, params);
  BigInt num;
  BigInt den;
  mpz_pow_ui(num.get_mpz_t(), miss.get_num_mpz_t(), static_cast<unsigned long>(params.h));
  mpz_pow_ui(den.get_mpz_t(), miss.get_den_mpz_t(), static_cast<unsigned long>(params.h));
  Rational out = 1 - Rational(num, den);
  out.canonicalize();
  return out;
}

BigInt count_noncontaining(std::int64_t n, int a, int l) {
  ProblemParams{a, 1, l}.validate();
  check_n(n, 1'000'000);
  return count_range(n, a, 0, l - 1);
}

Probability q_apparent(std::int64_t n, int a, int l) { return p_binom(n, ProblemParams{a, 1, l}); }

Rational q_apparent_exact(std::int64_t n, int a, int l) {
  Rational r(count_noncontaining(n, a, l), power(BigInt(a), n));
  r.canonicalize();
  return 1 - r;
}

Formula parse_formula(std::string_view name) {
  if (name == "binom") return Formula::Binom;
  if (name == "negbinom") return Formula::NegBinom;
  if (name == "iter") return Formula::Iter;
  if (name == "rec") return Formula::Rec;
  if (name == "repeated") return Formula::Repeated;
  if (name == "same-hidden") return Formula::SameHidden;
  if (name == "q") return Formula::Q;
  fail(ErrorKind::InvalidInput, "unknown formula '" + std::string(name) + "'");
}

const char* to_string(Formula formula) {
  switch (formula) {
    case Formula::Binom: return "binom";
    case Formula::NegBinom: return "negbinom";
    case Formula::Iter: return "iter";
    case Formula::Rec: return "rec";
    case Formula::Repeated: return "repeated";
    case Formula::SameHidden: return "same-hidden";
    case Formula::Q: return "q";
  }
  return "?";
}

Probability evaluate(Formula formula, std::int64_t n, const ProblemParams& params) {
  switch (formula) {
    case Formula::Binom: return p_binom(n, params);
    case Formula::NegBinom: return p_negbinom(n, params);
    case Formula::Iter: return p_iter(n, params);
    case Formula::Rec: return p_rec(n, params);
    case Formula::Repeated:
      if (params != ProblemParams{2, 4, 3})
        fail(ErrorKind::Unsupported, "the repeated-element form is only defined for a=2, h=4, l=3");
      return p_repeated(n);
    case Formula::SameHidden: return p_same_hidden(n, params);
    case Formula::Q: return q_apparent(n, params.a, params.l);
  }
  fail(ErrorKind::InvalidInput, "unknown formula");
}

Rational evaluate_exact(Formula formula, std::int64_t n, const ProblemParams& params) {
  switch (formula) {
    case Formula::Binom: return p_binom_exact(n, params);
    case Formula::SameHidden: return p_same_hidden_exact(n, params);
    case Formula::Q: return q_apparent_exact(n, params.a, params.l);
    default: break;
  }
  fail(ErrorKind::Unsupported, std::string("no exact form for formula '") + to_string(formula) + "'");
}

}  // namespace hidtrig
