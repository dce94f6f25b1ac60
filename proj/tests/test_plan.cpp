#include <array>
#include <cmath>
#include <functional>

#include "doctest.h"
#include "hidtrig/plan.hpp"
#include "hidtrig/prob.hpp"

using namespace hidtrig;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::Io;
}

Rational pow_q(const Rational& base, unsigned long e) {
  BigInt num, den;
  mpz_pow_ui(num.get_mpz_t(), base.get_num_mpz_t(), e);
  mpz_pow_ui(den.get_mpz_t(), base.get_den_mpz_t(), e);
  Rational out(num, den);
  out.canonicalize();
  return out;
}

}  // namespace

TEST_CASE("minimum windows at 95 percent") {
  const ProblemParams p{2, 4, 3};
  struct Case {
    WindowMode mode;
    ProblemParams params;
    std::int64_t expected;
  };
  for (const auto& c : {Case{WindowMode::SameHidden, p, 22}, Case{WindowMode::Particular, p, 49},
                        Case{WindowMode::Apparent, {2, 1, 3}, 11}, Case{WindowMode::Apparent, {2, 1, 2}, 8}}) {
    const auto n = min_window(0.95, c.params, c.mode);
    CHECK(n == c.expected);
    CHECK(window_probability(n, c.params, c.mode) >= 0.95);
    CHECK(window_probability(n - 1, c.params, c.mode) < 0.95);
  }
  // Apparent ignores h.
  CHECK(min_window(0.95, p, WindowMode::Apparent) == 11);
}

TEST_CASE("window solver definition check across parameters") {
  for (int a : {2, 3, 5})
    for (int h : {1, 2, 4})
      for (int l : {1, 2, 4})
        for (double conf : {0.5, 0.9, 0.99})
          for (auto mode : {WindowMode::Particular, WindowMode::SameHidden, WindowMode::Apparent}) {
            const ProblemParams p{a, h, l};
            const auto n = min_window(conf, p, mode);
            CHECK(window_probability(n, p, mode) >= conf);
            if (n > 0) CHECK(window_probability(n - 1, p, mode) < conf);
          }
}

TEST_CASE("window solver errors") {
  const ProblemParams p{2, 4, 3};
  CHECK(kind_of([&] { min_window(1.0, p, WindowMode::Particular); }) == ErrorKind::Unreachable);
  CHECK(kind_of([&] { min_window(0.0, p, WindowMode::Particular); }) == ErrorKind::InvalidInput);
  CHECK(kind_of([&] { min_window(1.2, p, WindowMode::Particular); }) == ErrorKind::InvalidInput);
  CHECK(min_window(1.0, {1, 1, 3}, WindowMode::Particular) == 3);
  CHECK(parse_window_mode("same-hidden") == WindowMode::SameHidden);
  CHECK(std::string(to_string(WindowMode::Apparent)) == "apparent");
  CHECK_THROWS_AS(parse_window_mode("x"), Error);
}

TEST_CASE("power boundary against brute force") {
  for (int num = 1; num < 20; ++num)
    for (int den : {20, 21, 37}) {
      const Rational base(num, den);
      for (const Rational& alpha : {Rational(1, 20), Rational(1, 2), Rational(1, 1000)}) {
        const auto b = smallest_power_below(base, alpha);
        unsigned long e = 1;
        while (pow_q(base, e) >= alpha) ++e;
        CHECK(b.exponent == e);
        CHECK(b.method == BoundaryMethod::Exact);
      }
    }
  CHECK(smallest_power_below(Rational(1, 2), Rational(1, 20)).exponent == 5);
  CHECK(smallest_power_below(Rational(6, 7), Rational(1, 20)).exponent == 20);
  CHECK_THROWS_AS(smallest_power_below(Rational(1), Rational(1, 2)), Error);
  CHECK_THROWS_AS(smallest_power_below(Rational(1, 2), Rational(0)), Error);
}

TEST_CASE("data plan at window 22") {
  const auto plan = data_plan(0.05, 22, 2, 3);
  REQUIRE(plan.g_exact);
  CHECK(*plan.g_exact == Rational(2097025, 2097152));
  CHECK(std::fabs(plan.g - 0.999939441681) < 1e-12);
  CHECK(plan.alpha == Rational(1, 20));
  CHECK(plan.false_candidates == 7);
  CHECK(plan.r == 20);
  CHECK(plan.m == 49468);
  CHECK(plan.total == 989360);
  CHECK(plan.exact);
  CHECK(plan.m_method == BoundaryMethod::Exact);
  // Exact boundary check: G^m < alpha <= G^(m-1).
  CHECK(pow_q(*plan.g_exact, plan.m) < plan.alpha);
  CHECK(pow_q(*plan.g_exact, plan.m - 1) >= plan.alpha);
  const Rational f67(6, 7);
  CHECK(pow_q(f67, plan.r) < plan.alpha);
  CHECK(pow_q(f67, plan.r - 1) >= plan.alpha);
}

TEST_CASE("data plan small example") {
  const auto plan = data_plan(0.5, 3, 2, 2);
  CHECK(*plan.g_exact == Rational(1, 2));
  CHECK(plan.m == 2);
  CHECK(plan.false_candidates == 3);
  CHECK(plan.r == 2);
  CHECK(plan.total == 4);
}

TEST_CASE("data plan inputs") {
  CHECK(kind_of([] { data_plan(0.05, 2, 2, 3); }) == ErrorKind::InvalidInput);
  CHECK(kind_of([] { data_plan(0.05, 10, 2, 1); }) == ErrorKind::InvalidInput);
  CHECK(kind_of([] { data_plan(0.0, 10, 2, 3); }) == ErrorKind::InvalidInput);
  CHECK(kind_of([] { data_plan(1.0, 10, 2, 3); }) == ErrorKind::InvalidInput);
  CHECK(data_plan(Rational(1, 20), 22, 2, 3).m == data_plan(0.05, 22, 2, 3).m);
  CHECK(rational_from_double(0.05) == Rational(1, 20));
}

TEST_CASE("floating and exact plans agree") {
  for (std::int64_t w : {65, 80, 110})
    for (int a : {4, 6}) {
      const auto fp = data_plan(0.05, w, a, 3);
      const auto ex = data_plan(0.05, w, a, 3, true);
      CHECK_FALSE(fp.exact);
      CHECK(ex.exact);
      CHECK(fp.r == ex.r);
      CHECK(std::fabs(static_cast<double>(fp.m) - static_cast<double>(ex.m)) <= 1.0);
      CHECK(std::fabs(fp.g - ex.g) < 1e-12);
    }
  // G rounds to 1 in double precision.
  CHECK(kind_of([] { data_plan(0.05, 66, 2, 3); }) == ErrorKind::Precision);
  const auto forced = data_plan(0.05, 66, 2, 3, true);
  CHECK(forced.exact);
  CHECK(forced.m_method == BoundaryMethod::Mpfr);
  // m near 1e56 is beyond any run count.
  CHECK(kind_of([] { data_plan(0.05, 200, 2, 3, true); }) == ErrorKind::GuardExceeded);
}

TEST_CASE("large-exponent boundary by MPFR") {
  const auto plan = data_plan(0.05, 50, 2, 3);
  CHECK(plan.exact);
  CHECK(plan.m_method == BoundaryMethod::Mpfr);
  // m = ceil(log(alpha) / log(G)) computed independently in long double.
  const long double g = 1.0L - 1276.0L / 1125899906842624.0L;
  const long double m = std::ceil(std::log(0.05L) / std::log1p(-(1.0L - g)));
  CHECK(std::fabs(static_cast<long double>(plan.m) - m) <= 1.0L);
}

TEST_CASE("difficulty curve") {
  const std::array a_values{2, 3, 4, 5, 6};
  const auto rows = difficulty_curve(50, 4, 3, a_values);
  REQUIRE(rows.size() == 5);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].a == a_values[i]);
    CHECK(rows[i].plan.window == 50);
    CHECK(rows[i].plan.total == rows[i].plan.m * rows[i].plan.r);
    if (i) CHECK(rows[i].plan.total <= rows[i - 1].plan.total);
  }
  CHECK_THROWS_AS(difficulty_curve(50, 4, 3, std::array{1}), Error);
}
