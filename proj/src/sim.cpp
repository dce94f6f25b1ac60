#include "hidtrig/sim.hpp"

#include <algorithm>
#include <cmath>
#include <thread>
#include <vector>

namespace hidtrig {

namespace {

constexpr std::int64_t kMaxSimLength = 10'000'000;

std::uint64_t count_hits(std::int64_t n, const ProblemParams& params, const TriggerPattern& pattern,
                         std::uint64_t seed, std::uint64_t first, std::uint64_t last) {
  std::vector<Element> window(static_cast<std::size_t>(n));
  std::uint64_t hits = 0;
  for (std::uint64_t t = first; t < last; ++t) {
    Rng rng(derive_seed(seed, t));
    for (auto& e : window) e = draw_element(rng, params);
    if (contains(window, pattern)) ++hits;
  }
  return hits;
}

}  // namespace

McEstimate make_estimate(std::uint64_t hits, std::uint64_t trials) {
  if (trials == 0) fail(ErrorKind::InvalidInput, "trials must be >= 1");
  if (hits > trials) fail(ErrorKind::InvalidInput, "hits exceed trials");
  McEstimate est;
  est.trials = trials;
  est.estimate = static_cast<double>(hits) / static_cast<double>(trials);
  est.std_error = std::sqrt(est.estimate * (1.0 - est.estimate) / static_cast<double>(trials));
  est.ci_lo = std::clamp(est.estimate - 1.96 * est.std_error, 0.0, 1.0);
  est.ci_hi = std::clamp(est.estimate + 1.96 * est.std_error, 0.0, 1.0);
  return est;
}

McEstimate mc_probability(std::int64_t n, const ProblemParams& params, const TriggerPattern& pattern,
                          std::uint64_t trials, std::uint64_t seed, unsigned threads) {
  params.validate();
  pattern.validate(params);
  if (trials == 0) fail(ErrorKind::InvalidInput, "trials must be >= 1");
  if (n < 0) fail(ErrorKind::InvalidInput, "n must be >= 0");
  if (n > kMaxSimLength) fail(ErrorKind::GuardExceeded, "simulated window longer than 1e7");

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  const std::uint64_t min_chunk = 4096;
  const std::uint64_t workers = std::clamp<std::uint64_t>(trials / min_chunk, 1, threads);

  std::vector<std::uint64_t> partial(workers, 0);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::uint64_t w = 0; w < workers; ++w) {
      const std::uint64_t first = trials * w / workers;
      const std::uint64_t last = trials * (w + 1) / workers;
      pool.emplace_back([&, w, first, last] { partial[w] = count_hits(n, params, pattern, seed, first, last); });
    }
  }
  std::uint64_t hits = 0;
  for (auto h : partial) hits += h;
  return make_estimate(hits, trials);
}

EnumerationCount enumerate_count(std::int64_t n, const ProblemParams& params, const TriggerPattern& pattern) {
  params.validate();
  pattern.validate(params);
  if (n < 0) fail(ErrorKind::InvalidInput, "n must be >= 0");
  const auto symbols = static_cast<std::uint64_t>(params.actual_alphabet());
  std::uint64_t total = 1;
  for (std::int64_t i = 0; i < n; ++i) {
    if (total > kEnumerationLimit / symbols)
      fail(ErrorKind::GuardExceeded, "(a*h)^n exceeds the enumeration bound 1e8");
    total *= symbols;
  }

  const auto h = static_cast<std::uint64_t>(params.h);
  std::vector<std::uint64_t> code(static_cast<std::size_t>(n), 0);
  std::vector<Element> seq(static_cast<std::size_t>(n));
  EnumerationCount out;
  out.total = total;
  for (std::uint64_t visited = 0; visited < total; ++visited) {
    if (contains(seq, pattern)) ++out.containing;
    // Odometer increment, least significant position last.
    for (std::size_t i = seq.size(); i-- > 0;) {
      if (++code[i] < symbols) {
        seq[i] = {static_cast<State>(code[i] / h), static_cast<State>(code[i] % h)};
        break;
      }
      code[i] = 0;
      seq[i] = {0, 0};
    }
  }
  return out;
}

Rational exact_enumeration(std::int64_t n, const ProblemParams& params, const TriggerPattern& pattern) {
  const auto c = enumerate_count(n, params, pattern);
  Rational r(BigInt(static_cast<unsigned long>(c.containing)), BigInt(static_cast<unsigned long>(c.total)));
  r.canonicalize();
  return r;
}

double dp_probability(std::int64_t n, const ProblemParams& params, std::int64_t l) {
  params.validate();
  if (n < 0 || l < 0) fail(ErrorKind::InvalidInput, "n and l must be >= 0");
  if (l == 0) return 1.0;
  const double q = 1.0 / static_cast<double>(params.actual_alphabet());
  std::vector<double> mass(static_cast<std::size_t>(l) + 1, 0.0);
  mass[0] = 1.0;
  for (std::int64_t step = 0; step < n; ++step) {
    mass[l] += q * mass[l - 1];
    for (std::int64_t j = l - 1; j >= 1; --j) mass[j] = (1.0 - q) * mass[j] + q * mass[j - 1];
    mass[0] *= 1.0 - q;
  }
  return mass[static_cast<std::size_t>(l)];
}

}  // namespace hidtrig
