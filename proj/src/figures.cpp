#include "hidtrig/figures.hpp"

#include <array>

#include "hidtrig/plan.hpp"
#include "hidtrig/prob.hpp"
#include "hidtrig/sim.hpp"

namespace hidtrig {

void FigureTable::validate() const {
  for (const auto& row : rows)
    if (row.size() != columns.size()) fail(ErrorKind::InvalidInput, "figure table '" + name + "' is not rectangular");
}

namespace {

TriggerPattern repeated_first(const ProblemParams& p) {
  TriggerPattern t;
  t.entries.assign(static_cast<std::size_t>(p.l), PatternEntry{0, 0});
  return t;
}

TriggerPattern alternating(const ProblemParams& p) {
  TriggerPattern t;
  for (int i = 0; i < p.l; ++i) t.entries.push_back({static_cast<State>(i % p.a), 0});
  return t;
}

// X...XY with one shared hidden state, e.g. LiLiSi.
TriggerPattern shared_tail(const ProblemParams& p) {
  TriggerPattern t;
  t.constraint = HiddenConstraint::SharedExistential;
  t.entries.assign(static_cast<std::size_t>(p.l), PatternEntry{0, 0});
  t.entries.back().apparent = static_cast<State>(1 % p.a);
  return t;
}

std::vector<FigureTable> figure1(const FigureOptions& o) {
  if (!o.seed) fail(ErrorKind::InvalidInput, "figure 1 is stochastic and needs a seed");
  const auto& p = o.params;
  const std::int64_t max_n = o.max_n.value_or(50);
  const std::array patterns{repeated_first(p), alternating(p), shared_tail(p)};
  FigureTable t{"fig1",
                {"n", "p", "mc_repeated", "se_repeated", "mc_alternating", "se_alternating", "P_t", "mc_shared",
                 "se_shared"},
                {}};
  for (std::int64_t n = 0; n <= max_n; ++n) {
    std::array<McEstimate, 3> mc;
    for (std::size_t k = 0; k < patterns.size(); ++k)
      mc[k] = mc_probability(n, p, patterns[k], o.trials, derive_seed(derive_seed(*o.seed, k), static_cast<std::uint64_t>(n)));
    t.rows.push_back({static_cast<double>(n), p_binom(n, p).value(), mc[0].estimate, mc[0].std_error, mc[1].estimate,
                      mc[1].std_error, p_same_hidden(n, p).value(), mc[2].estimate, mc[2].std_error});
  }
  return {t};
}

std::vector<FigureTable> figure2(const FigureOptions& o) {
  const std::int64_t max_n = o.max_n.value_or(100);
  FigureTable t{"fig2", {"n", "p", "P_t"}, {}};
  for (std::int64_t n = 0; n <= max_n; ++n)
    t.rows.push_back({static_cast<double>(n), p_binom(n, o.params).value(), p_same_hidden(n, o.params).value()});
  return {t};
}

std::vector<FigureTable> figure3(const FigureOptions& o) {
  const auto& p = o.params;
  const std::int64_t max_n = o.max_n.value_or(50);
  FigureTable q{"fig3_q", {"n", "Q"}, {}};
  for (std::int64_t n = 0; n <= max_n; ++n)
    q.rows.push_back({static_cast<double>(n), q_apparent(n, p.a, p.l).value()});

  FigureTable d{"fig3_difficulty", {"a", "window", "G", "m", "r", "total"}, {}};
  const std::array a_values{2, 3, 4, 5, 6};
  for (const auto& row : difficulty_curve(50, p.h, p.l, a_values))
    d.rows.push_back({static_cast<double>(row.a), 50.0, row.plan.g, static_cast<double>(row.plan.m),
                      static_cast<double>(row.plan.r), static_cast<double>(row.plan.total)});
  return {q, d};
}

std::vector<FigureTable> figure8(const FigureOptions& o) {
  const auto& p = o.params;
  const std::int64_t max_n = o.max_n.value_or(50);
  const bool iter = p.l == 3;
  const bool repeated = p == ProblemParams{2, 4, 3};
  FigureTable t{"fig8", {"n", "binom", "negbinom"}, {}};
  if (iter) t.columns.push_back("iter");
  t.columns.push_back("rec");
  if (repeated) t.columns.push_back("repeated");
  for (std::int64_t n = 0; n <= max_n; ++n) {
    std::vector<double> row{static_cast<double>(n), p_binom(n, p).value(), p_negbinom(n, p).value()};
    if (iter) row.push_back(p_iter(n, p).value());
    row.push_back(p_rec(n, p).value());
    if (repeated) row.push_back(p_repeated(n).value());
    t.rows.push_back(std::move(row));
  }
  return {t};
}

}  // namespace

std::vector<FigureTable> figure(int which, const FigureOptions& options) {
  options.params.validate();
  if (options.max_n && *options.max_n < 0) fail(ErrorKind::InvalidInput, "max n must be >= 0");
  switch (which) {
    case 1: return figure1(options);
    case 2: return figure2(options);
    case 3: return figure3(options);
    case 8: return figure8(options);
    default: break;
  }
  fail(ErrorKind::InvalidInput, "unknown figure " + std::to_string(which) + " (expected 1, 2, 3 or 8)");
}

}  // namespace hidtrig
