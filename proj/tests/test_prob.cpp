#include <cmath>
#include <functional>

#include "doctest.h"
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

}  // namespace

TEST_CASE("three-element trigger in three elements") {
  const ProblemParams p{2, 4, 3};
  CHECK(p_binom(3, p).value() == 1.0 / 512);
  CHECK(p_binom_exact(3, p) == Rational(1, 512));
  CHECK(p_binom(3, p).value() < 0.002);
}

TEST_CASE("non-containing counts") {
  CHECK(count_noncontaining(3, 2, 3) == 7);
  CHECK(count_noncontaining(10, 2, 3) == 56);
  CHECK(count_noncontaining(22, 2, 3) == 254);
  for (std::int64_t n = 0; n <= 100; ++n) CHECK(count_noncontaining(n, 2, 3) == BigInt((n * n + n + 2) / 2));
  CHECK(count_noncontaining(0, 5, 1) == 1);
  CHECK(count_noncontaining(4, 3, 1) == 16);
}

TEST_CASE("apparent containment at window 22") {
  CHECK(std::fabs(q_apparent(22, 2, 3).value() - 0.999939441681) < 1e-12);
  CHECK(q_apparent_exact(22, 2, 3) == 1 - Rational(127, 2097152));
}

TEST_CASE("closed forms agree on the parameter grid") {
  for (int a : {1, 2, 4, 8})
    for (int h : {1, 2, 4, 8})
      for (int l : {1, 2, 3, 5}) {
        const ProblemParams p{a, h, l};
        for (std::int64_t n = 0; n <= 200; ++n) {
          const double b = p_binom(n, p).value();
          CHECK(std::fabs(b - p_negbinom(n, p).value()) <= 1e-9);
          CHECK(std::fabs(b - p_rec(n, p).value()) <= 1e-9);
          if (l == 3) CHECK(std::fabs(b - p_iter(n, p).value()) <= 1e-9);
        }
      }
  for (std::int64_t n = 0; n <= 200; ++n)
    CHECK(std::fabs(p_binom(n, {2, 4, 3}).value() - p_repeated(n).value()) <= 1e-9);
}

TEST_CASE("floating point against exact rationals") {
  for (int a : {1, 2, 3})
    for (int h : {1, 4})
      for (int l : {1, 3, 6}) {
        const ProblemParams p{a, h, l};
        for (std::int64_t n = 0; n <= 120; n += 7) {
          const double exact = p_binom_exact(n, p).get_d();
          CHECK(std::fabs(p_binom(n, p).value() - exact) <= 1e-12);
          CHECK(std::fabs(p_same_hidden(n, p).value() - p_same_hidden_exact(n, p).get_d()) <= 1e-12);
        }
      }
}

TEST_CASE("boundary values and monotonicity") {
  const ProblemParams p{2, 4, 3};
  for (std::int64_t n = 0; n < 3; ++n) CHECK(p_binom(n, p).value() == 0.0);
  CHECK(p_binom(3, p).value() == std::pow(1.0 / 8, 3));
  double prev = 0.0;
  for (std::int64_t n = 0; n <= 500; ++n) {
    const double v = p_binom(n, p).value();
    CHECK(v >= prev);
    CHECK(v <= 1.0);
    prev = v;
  }
  CHECK(p_binom(10, {1, 1, 3}).value() == 1.0);
  CHECK(p_binom(2, {1, 1, 3}).value() == 0.0);
  CHECK(p_rec(5, 0, p).value() == 1.0);
}

TEST_CASE("miss probability is the complement") {
  for (std::int64_t n : {3, 10, 50, 400, 5000}) {
    const ProblemParams p{2, 4, 3};
    CHECK(std::fabs(p_binom(n, p).value() + p_binom_miss(n, p) - 1.0) < 1e-14);
  }
}

TEST_CASE("large windows stay accurate") {
  // Reference values from an independent binomial survival function.
  CHECK(std::fabs(p_binom(100000, {2, 4, 12300}).value() - 0.9725944984679107) < 1e-12);
  CHECK(std::fabs(p_binom(100'000'000, {2, 4, 12'500'000}).value() - 0.5000452358025798) < 1e-10);
  CHECK(p_binom(100'000'000, {2, 4, 3}).value() == 1.0);
}

TEST_CASE("same-hidden estimator") {
  const ProblemParams p{2, 4, 3};
  for (std::int64_t n = 0; n <= 100; ++n) {
    const double b = p_binom(n, p).value();
    const double t = p_same_hidden(n, p).value();
    CHECK(t >= b);
    CHECK(std::fabs(t - (1 - std::pow(1 - b, 4))) < 1e-12);
  }
  CHECK(p_same_hidden(3, {2, 1, 3}).value() == p_binom(3, {2, 1, 3}).value());
}

TEST_CASE("domain errors") {
  const ProblemParams p{2, 4, 3};
  CHECK(kind_of([&] { p_binom(-1, p); }) == ErrorKind::InvalidInput);
  CHECK(kind_of([&] { p_binom(100'000'001, p); }) == ErrorKind::GuardExceeded);
  CHECK(kind_of([&] { p_iter(10, {2, 4, 2}); }) == ErrorKind::Unsupported);
  CHECK(kind_of([&] { evaluate(Formula::Repeated, 10, {2, 2, 3}); }) == ErrorKind::Unsupported);
  CHECK(kind_of([&] { evaluate_exact(Formula::Rec, 10, p); }) == ErrorKind::Unsupported);
  CHECK(kind_of([&] { p_binom_exact(2'000'000, p); }) == ErrorKind::GuardExceeded);
  CHECK(kind_of([&] { p_binom(5, {2, 4, 0}); }) == ErrorKind::InvalidInput);
  CHECK(kind_of([&] { Probability(1.5); }) == ErrorKind::Precision);
  CHECK(Probability(1.0 + 1e-12).value() == 1.0);
  CHECK(Probability(-1e-12).value() == 0.0);
}

TEST_CASE("formula names") {
  for (auto f : {Formula::Binom, Formula::NegBinom, Formula::Iter, Formula::Rec, Formula::Repeated,
                 Formula::SameHidden, Formula::Q})
    CHECK(parse_formula(to_string(f)) == f);
  CHECK_THROWS_AS(parse_formula("bogus"), Error);
  CHECK(evaluate(Formula::Q, 22, {2, 4, 3}).value() == q_apparent(22, 2, 3).value());
  CHECK(evaluate_exact(Formula::Binom, 3, {2, 4, 3}) == Rational(1, 512));
}
