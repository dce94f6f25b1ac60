#include "hidtrig/plan.hpp"

#include <cmath>
#include <limits>
#include <mpfr.h>

#include "hidtrig/prob.hpp"

namespace hidtrig {

namespace {

constexpr std::int64_t kMaxSearchWindow = std::int64_t{1} << 27;
constexpr std::size_t kMaxExactBits = std::size_t{1} << 25;
constexpr std::uint64_t kMaxExponent = std::uint64_t{1} << 62;
constexpr mpfr_prec_t kMpfrBits = 512;

class MpFloat {
 public:
  MpFloat() { mpfr_init2(value_, kMpfrBits); }
  explicit MpFloat(const Rational& q) : MpFloat() { mpfr_set_q(value_, q.get_mpq_t(), MPFR_RNDN); }
  MpFloat(const MpFloat&) = delete;
  MpFloat& operator=(const MpFloat&) = delete;
  ~MpFloat() { mpfr_clear(value_); }

  mpfr_ptr get() { return value_; }

 private:
  mpfr_t value_;
};

// e * log_base < log_alpha, i.e. base^e < alpha.
bool mpfr_below(std::uint64_t e, mpfr_ptr log_base, mpfr_ptr log_alpha) {
  MpFloat prod;
  mpfr_mul_ui(prod.get(), log_base, e, MPFR_RNDN);
  return mpfr_less_p(prod.get(), log_alpha) != 0;
}

bool exact_below(std::uint64_t e, const Rational& base, const Rational& alpha) {
  BigInt lhs;
  BigInt rhs;
  mpz_pow_ui(lhs.get_mpz_t(), base.get_num_mpz_t(), e);
  mpz_pow_ui(rhs.get_mpz_t(), base.get_den_mpz_t(), e);
  lhs *= alpha.get_den();
  rhs *= alpha.get_num();
  return lhs < rhs;
}

void check_unit_interval(const Rational& value, const char* what) {
  if (value <= 0 || value >= 1)
    fail(ErrorKind::InvalidInput, std::string(what) + " must lie strictly between 0 and 1, got " + to_string(value));
}

}  // namespace

WindowMode parse_window_mode(std::string_view name) {
  if (name == "particular") return WindowMode::Particular;
  if (name == "same-hidden") return WindowMode::SameHidden;
  if (name == "apparent") return WindowMode::Apparent;
  fail(ErrorKind::InvalidInput, "unknown window mode '" + std::string(name) + "'");
}

const char* to_string(WindowMode mode) {
  switch (mode) {
    case WindowMode::Particular: return "particular";
    case WindowMode::SameHidden: return "same-hidden";
    case WindowMode::Apparent: return "apparent";
  }
  return "?";
}

const char* to_string(BoundaryMethod method) {
  switch (method) {
    case BoundaryMethod::Exact: return "exact";
    case BoundaryMethod::Mpfr: return "mpfr512";
    case BoundaryMethod::Float: return "float";
  }
  return "?";
}

double window_probability(std::int64_t n, const ProblemParams& params, WindowMode mode) {
  switch (mode) {
    case WindowMode::Particular: return p_binom(n, params).value();
    case WindowMode::SameHidden: return p_same_hidden(n, params).value();
    case WindowMode::Apparent: return q_apparent(n, params.a, params.l).value();
  }
  fail(ErrorKind::InvalidInput, "unknown window mode");
}

std::int64_t min_window(double confidence, const ProblemParams& params, WindowMode mode) {
  params.validate();
  if (!(confidence > 0.0 && confidence <= 1.0))
    fail(ErrorKind::InvalidInput, "confidence must lie in (0, 1), got " + format_double(confidence));
  const std::int64_t symbols = mode == WindowMode::Apparent ? params.a : params.actual_alphabet();
  if (confidence == 1.0 && symbols >= 2)
    fail(ErrorKind::Unreachable, "confidence 1 is never reached with more than one symbol per element");

  auto reaches = [&](std::int64_t n) { return window_probability(n, params, mode) >= confidence; };
  // Invariant: !reaches(lo) && reaches(hi).
  std::int64_t lo = params.l - 1;
  std::int64_t hi = params.l;
  while (!reaches(hi)) {
    lo = hi;
    hi *= 2;
    if (hi > kMaxSearchWindow)
      fail(ErrorKind::GuardExceeded, "no window up to " + std::to_string(kMaxSearchWindow) + " reaches confidence " + format_double(confidence));
  }
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    (reaches(mid) ? hi : lo) = mid;
  }
  return hi;
}

PowerBound smallest_power_below(const Rational& base, const Rational& alpha) {
  check_unit_interval(base, "base");
  check_unit_interval(alpha, "alpha");

  MpFloat log_base(base);
  mpfr_log(log_base.get(), log_base.get(), MPFR_RNDN);
  MpFloat log_alpha(alpha);
  mpfr_log(log_alpha.get(), log_alpha.get(), MPFR_RNDN);
  MpFloat ratio;
  mpfr_div(ratio.get(), log_alpha.get(), log_base.get(), MPFR_RNDN);
  mpfr_ceil(ratio.get(), ratio.get());
  if (mpfr_cmp_ui_2exp(ratio.get(), 1, 62) > 0)
    fail(ErrorKind::GuardExceeded, "power boundary exceeds 2^62");
  std::uint64_t e = std::max<unsigned long>(1, mpfr_get_ui(ratio.get(), MPFR_RNDN));

  const std::size_t bits = std::max(mpz_sizeinbase(base.get_num_mpz_t(), 2), mpz_sizeinbase(base.get_den_mpz_t(), 2));
  const bool exact = e <= kMaxExactBits / bits;

  auto below = [&](std::uint64_t k) {
    return exact ? exact_below(k, base, alpha) : mpfr_below(k, log_base.get(), log_alpha.get());
  };
  while (!below(e)) ++e;
  while (e > 1 && below(e - 1)) --e;
  return {e, exact ? BoundaryMethod::Exact : BoundaryMethod::Mpfr};
}

DataPlan data_plan(const Rational& alpha, std::int64_t window, int a, int l, bool force_exact) {
  ProblemParams{a, 1, l}.validate();
  check_unit_interval(alpha, "alpha");
  if (window < l)
    fail(ErrorKind::InvalidInput, "window " + std::to_string(window) + " is shorter than l=" + std::to_string(l));

  BigInt candidates;
  mpz_ui_pow_ui(candidates.get_mpz_t(), static_cast<unsigned long>(a), static_cast<unsigned long>(l));
  const BigInt false_candidates = candidates - 1;
  if (false_candidates < 2)
    fail(ErrorKind::InvalidInput, "a^l - 1 = " + to_string(false_candidates) + " false candidates; at least 2 are required");
  if (false_candidates > BigInt(static_cast<unsigned long>(kMaxExponent)))
    fail(ErrorKind::GuardExceeded, "a^l exceeds 2^62 candidates");

  DataPlan plan;
  plan.alpha = alpha;
  plan.window = window;
  plan.a = a;
  plan.l = l;
  plan.false_candidates = false_candidates.get_ui();
  plan.exact = force_exact || window <= 64;

  if (plan.exact) {
    plan.g_exact = q_apparent_exact(window, a, l);
    plan.g = plan.g_exact->get_d();
    const auto bound = smallest_power_below(*plan.g_exact, alpha);
    plan.m = bound.exponent;
    plan.m_method = bound.method;
  } else {
    plan.g = q_apparent(window, a, l).value();
    const double miss = p_binom_miss(window, ProblemParams{a, 1, l});
    if (plan.g >= 1.0 || 1.0 - miss == 1.0)
      fail(ErrorKind::Precision, "G = Q(" + std::to_string(window) + ") rounds to 1 in double precision; use exact mode");
    const double log_g = std::log1p(-miss);
    const double log_alpha = std::log(alpha.get_d());
    const double estimate = std::ceil(log_alpha / log_g);
    if (!(estimate < static_cast<double>(kMaxExponent)))
      fail(ErrorKind::GuardExceeded, "m exceeds 2^62");
    std::uint64_t m = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(estimate));
    auto below = [&](std::uint64_t k) { return static_cast<double>(k) * log_g < log_alpha; };
    while (!below(m)) ++m;
    while (m > 1 && below(m - 1)) --m;
    plan.m = m;
    plan.m_method = BoundaryMethod::Float;
  }

  const auto runs = smallest_power_below(Rational(false_candidates - 1, false_candidates), alpha);
  plan.r = runs.exponent;
  plan.r_method = runs.method;
  if (plan.m > std::numeric_limits<std::uint64_t>::max() / plan.r)
    fail(ErrorKind::GuardExceeded, "total m*r overflows 64 bits");
  plan.total = plan.m * plan.r;
  return plan;
}

DataPlan data_plan(double alpha, std::int64_t window, int a, int l, bool force_exact) {
  if (!(alpha > 0.0 && alpha < 1.0))
    fail(ErrorKind::InvalidInput, "alpha must lie strictly between 0 and 1, got " + format_double(alpha));
  return data_plan(rational_from_double(alpha), window, a, l, force_exact);
}

std::vector<DifficultyRow> difficulty_curve(std::int64_t n, int h, int l, std::span<const int> a_values,
                                            const Rational& alpha) {
  if (h < 1) fail(ErrorKind::InvalidInput, "h must be >= 1");
  std::vector<DifficultyRow> rows;
  rows.reserve(a_values.size());
  for (int a : a_values) {
    if (a < 2) fail(ErrorKind::InvalidInput, "difficulty curve needs a >= 2, got " + std::to_string(a));
    rows.push_back({a, data_plan(alpha, n, a, l)});
  }
  return rows;
}

}  // namespace hidtrig
