#include <cmath>
#include <fstream>
#include <sstream>
#include <tuple>

#include "doctest.h"
#include "hidtrig/datagen.hpp"
#include "hidtrig/plan.hpp"
#include "support.hpp"

using namespace hidtrig;

namespace {

std::vector<Element> parse(std::string_view text, const ProblemParams& p) {
  return parse_elements(text, p, Alphabet::for_states(p.a));
}

StreamConfig config(ProblemParams p, std::string_view trigger, bool hidden, std::int64_t length, std::uint64_t seed,
                    std::optional<std::int64_t> span, MatchMode mode = MatchMode::Subsequence) {
  StreamConfig c;
  c.params = p;
  c.trigger = parse_pattern(trigger, p, Alphabet::for_states(p.a), mode);
  c.hidden = hidden;
  c.length = length;
  c.seed = seed;
  c.span_bound = span;
  return c;
}

// Search-based re-statement of the event policy for a single matcher: find
// the first element of the attempt, then each later entry greedily; a match
// that would stretch past `bound` restarts at the first element outside it.
std::vector<std::size_t> oracle_events(const std::vector<Element>& xs, const TriggerPattern& t,
                                       std::optional<std::int64_t> bound) {
  auto ok = [&](const Element& x, const PatternEntry& e) {
    return x.apparent == e.apparent && (t.constraint != HiddenConstraint::Fixed || x.hidden == e.hidden);
  };
  std::vector<std::size_t> events;
  std::size_t s = 0;
  while (s < xs.size()) {
    std::size_t first = s;
    while (first < xs.size() && !ok(xs[first], t.entries[0])) ++first;
    if (first == xs.size()) break;
    const std::size_t limit = bound ? std::min(xs.size(), first + static_cast<std::size_t>(*bound)) : xs.size();
    std::size_t pos = first;
    std::size_t k = 1;
    for (; k < t.size(); ++k) {
      ++pos;
      while (pos < limit && !ok(xs[pos], t.entries[k])) ++pos;
      if (pos >= limit) break;
    }
    if (k == t.size()) {
      events.push_back(pos);
      s = pos + 1;
    } else if (limit == xs.size()) {
      break;
    } else {
      s = limit;
    }
  }
  return events;
}

}  // namespace

TEST_CASE("scenario names") {
  for (auto mode : {MatchMode::Subsequence, MatchMode::Consecutive})
    for (bool hidden : {true, false}) {
      const Scenario s{mode, hidden};
      CHECK(parse_scenario(to_string(s)) == s);
    }
  CHECK(to_string(Scenario{MatchMode::Consecutive, false}) == "consecutive-nohidden");
  CHECK_THROWS_AS(parse_scenario("sideways"), Error);
}

TEST_CASE("consecutive trigger examples") {
  const ProblemParams p{2, 1, 3};
  auto t = parse_pattern("LLS", p, Alphabet::for_states(2), MatchMode::Consecutive);
  CHECK(mark_events(parse("L1S1L1L1S1L1L1S1", p), t, std::nullopt) == std::vector<std::size_t>{4, 7});

  const ProblemParams one{2, 1, 1};
  auto single = parse_pattern("L", one, Alphabet::for_states(2), MatchMode::Consecutive);
  const auto xs = parse("L1S1L1L1S1S1L1", one);
  CHECK(mark_events(xs, single, std::nullopt) == std::vector<std::size_t>{0, 2, 3, 6});
}

TEST_CASE("consecutive matches do not reuse elements") {
  const ProblemParams p{2, 1, 2};
  auto t = parse_pattern("LL", p, Alphabet::for_states(2), MatchMode::Consecutive);
  CHECK(mark_events(parse("L1L1L1L1", p), t, std::nullopt) == std::vector<std::size_t>{1, 3});
}

TEST_CASE("subsequence policy matches the search oracle") {
  Rng rng(2024);
  for (const auto& [p, trigger] : {std::pair{ProblemParams{2, 1, 3}, "SLS"}, std::pair{ProblemParams{2, 4, 3}, "L2S1L2"},
                                   std::pair{ProblemParams{3, 2, 4}, "ABCA"}}) {
    auto t = parse_pattern(trigger, p, Alphabet::for_states(p.a));
    for (std::optional<std::int64_t> bound : {std::optional<std::int64_t>{}, std::optional<std::int64_t>{p.l},
                                              std::optional<std::int64_t>{11}, std::optional<std::int64_t>{30}}) {
      std::vector<Element> xs(20000);
      for (auto& x : xs) x = draw_element(rng, p);
      CHECK(mark_events(xs, t, bound) == oracle_events(xs, t, bound));
    }
  }
}

TEST_CASE("event rate matches an independent re-simulation") {
  const ProblemParams p{2, 1, 3};
  const auto c = config(p, "SLS", false, 1'000'000, 17, 11);
  const auto seq = generate_stream(c);
  Rng rng(99);
  std::vector<Element> xs(1'000'000);
  for (auto& x : xs) x = draw_element(rng, p);
  const auto reference = oracle_events(xs, c.trigger, 11);
  const double rate = static_cast<double>(seq.events.size());
  const double expected = static_cast<double>(reference.size());
  CHECK(std::fabs(rate - expected) / expected < 0.02);

  // Without a span bound the gaps are negative binomial with mean l*a*h.
  const auto free_run = generate_stream(config({2, 4, 3}, "L1S2L3", true, 1'000'000, 5, std::nullopt));
  CHECK(std::fabs(static_cast<double>(free_run.events.size()) - 1e6 / 24) / (1e6 / 24) < 0.02);
}

TEST_CASE("event soundness and refractory period") {
  for (const auto& [p, trigger, hidden] :
       {std::tuple{ProblemParams{2, 4, 3}, "L1S2L3", true}, std::tuple{ProblemParams{2, 4, 3}, "LiLiSi", true},
        std::tuple{ProblemParams{2, 1, 3}, "LLS", false}}) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const std::int64_t bound = 22;
      const auto seq = generate_stream(config(p, trigger, hidden, 20000, seed, bound));
      REQUIRE_FALSE(seq.events.empty());
      std::size_t prev_end = 0;
      for (auto e : seq.events) {
        const std::size_t from = std::max(prev_end, e + 1 >= static_cast<std::size_t>(bound) ? e + 1 - bound : 0);
        const std::span<const Element> span(seq.elements.data() + from, e + 1 - from);
        CHECK(contains(span, parse_pattern(trigger, p, Alphabet::for_states(2))));
        prev_end = e + 1;
      }
    }
  }
}

TEST_CASE("shared-hidden trigger runs one matcher per hidden state") {
  const ProblemParams p{2, 4, 3};
  auto t = parse_pattern("LiLiSi", p, Alphabet::for_states(2));
  CHECK(mark_events(parse("L1L2L1L2S2S1", p), t, std::nullopt) == std::vector<std::size_t>{4});
  CHECK(mark_events(parse("L1L2S3L1", p), t, std::nullopt).empty());
}

TEST_CASE("span bound resets partial matches") {
  const ProblemParams p{2, 1, 3};
  auto t = parse_pattern("LLS", p, Alphabet::for_states(2));
  const auto xs = parse("L1S1S1L1S1S1", p);
  CHECK(mark_events(xs, t, std::nullopt) == std::vector<std::size_t>{4});
  // L(0) L(3) S(4) spans five elements.
  CHECK(mark_events(xs, t, 5) == std::vector<std::size_t>{4});
  CHECK(mark_events(xs, t, 4).empty());
}

TEST_CASE("generation is deterministic and scenario-degenerate") {
  const auto a = generate_stream(config({2, 4, 3}, "L1S2L3", true, 5000, 3, 49));
  const auto b = generate_stream(config({2, 4, 3}, "L1S2L3", true, 5000, 3, 49));
  CHECK(a == b);
  const auto hidden = generate_stream(config({2, 1, 3}, "L1S1L1", true, 20000, 8, 11));
  const auto plain = generate_stream(config({2, 1, 3}, "LSL", false, 20000, 8, 11));
  CHECK(observe(hidden) == observe(plain));
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS(config({2, 4, 3}, "LSL", true, 10, 1, std::nullopt).validate(), Error);
  CHECK_THROWS_AS(config({2, 4, 3}, "L1S1L1", false, 10, 1, std::nullopt).validate(), Error);
  CHECK_NOTHROW(config({2, 4, 3}, "LSL", false, 10, 1, std::nullopt).validate());
  CHECK_THROWS_AS(config({2, 1, 3}, "LSL", false, 10, 1, 2).validate(), Error);
  CHECK_THROWS_AS(config({2, 1, 3}, "LSL", false, -1, 1, 5).validate(), Error);
  CHECK_THROWS_AS(config({2, 1, 3}, "LS", false, 10, 1, 5).validate(), Error);
}

TEST_CASE("default span bound follows the trigger class") {
  const ProblemParams p{2, 4, 3};
  const auto ab = Alphabet::for_states(2);
  CHECK(default_span_bound(p, parse_pattern("L1S1L1", p, ab)) == 49);
  CHECK(default_span_bound(p, parse_pattern("LiSiLi", p, ab)) == 22);
  CHECK(default_span_bound(p, parse_pattern("LSL", p, ab)) == 11);
}

TEST_CASE("random triggers") {
  const ProblemParams p{3, 4, 5};
  Rng rng(4);
  const auto hidden = random_trigger(p, {MatchMode::Subsequence, true}, rng);
  CHECK(hidden.size() == 5);
  CHECK(hidden.constraint == HiddenConstraint::Fixed);
  CHECK_NOTHROW(hidden.validate(p));
  const auto plain = random_trigger(p, {MatchMode::Consecutive, false}, rng);
  CHECK(plain.constraint == HiddenConstraint::Ignore);
  CHECK(plain.mode == MatchMode::Consecutive);
}

TEST_CASE("window example with one event") {
  ObservedStream s{2, {0, 1, 1, 0}, {2}};
  const std::array<std::int64_t, 1> n{3};
  const auto ds = window_dataset(s, n, 3, {}, 0);
  REQUIRE(ds.records.size() == 1);
  CHECK(ds.records[0] == WindowRecord{{0, 1, 1}, 1, 0});
  CHECK(ds.status == WindowStatus::Ok);
}

TEST_CASE("window invariants") {
  const auto seq = generate_stream(config({2, 4, 3}, "S1L2L2", true, 50000, 6, 22));
  const auto obs = observe(seq);
  const std::array<std::int64_t, 3> lengths{11, 22, 30};
  const auto ds = window_dataset(obs, lengths, 3, {}, 12);
  std::vector<char> is_event(obs.tokens.size(), 0);
  for (auto e : obs.events) is_event[e] = 1;
  std::array<int, 3> used{};
  for (const auto& r : ds.records) {
    const auto last = static_cast<std::size_t>(r.offset + r.n() - 1);
    for (std::size_t i = static_cast<std::size_t>(r.offset); i < last; ++i) REQUIRE_FALSE(is_event[i]);
    CHECK(r.label == is_event[last]);
    CHECK(std::equal(r.tokens.begin(), r.tokens.end(), obs.tokens.begin() + r.offset));
    for (std::size_t k = 0; k < lengths.size(); ++k)
      if (r.n() == lengths[k]) ++used[k];
  }
  for (int u : used) CHECK(u > 0);
}

TEST_CASE("positive windows contain the trigger when the span bound fits") {
  const ProblemParams p{2, 1, 3};
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    auto c = config(p, "LLL", false, 3000, seed, 11);
    c.trigger = random_trigger(p, {MatchMode::Subsequence, false}, rng);
    const auto seq = generate_stream(c);
    const std::array<std::int64_t, 1> n{11};
    const auto ds = window_dataset(observe(seq), n, 3, {}, seed);
    const auto pattern = c.trigger.apparent();
    for (const auto& r : ds.records)
      if (r.label == 1) REQUIRE(contains_subsequence(r.tokens, pattern));
  }
}

TEST_CASE("balancing") {
  const auto seq = generate_stream(config({2, 4, 3}, "L1L2L3", true, 200000, 2, 49));
  const auto obs = observe(seq);
  const std::array<std::int64_t, 1> n{22};
  const auto all = window_dataset(obs, n, 3, {Balance::KeepAll, 1.0}, 1);
  const auto pos = count_positive(all.records);
  CHECK(all.records.size() - pos > 10 * pos);
  const auto bal = window_dataset(obs, n, 3, {Balance::DownsampleNegatives, 1.0}, 1);
  const auto bal_pos = count_positive(bal.records);
  CHECK(bal_pos == pos);
  CHECK(std::llabs(static_cast<long long>(bal.records.size() - bal_pos) - static_cast<long long>(bal_pos)) <= 1);
  for (std::size_t i = 1; i < bal.records.size(); ++i) CHECK(bal.records[i - 1].offset < bal.records[i].offset);
  const auto again = window_dataset(obs, n, 3, {Balance::DownsampleNegatives, 1.0}, 1);
  CHECK(again.records == bal.records);
  CHECK_THROWS_AS(window_dataset(obs, n, 3, {Balance::DownsampleNegatives, -1.0}, 1), Error);
}

TEST_CASE("short streams and bad window lengths") {
  ObservedStream s{2, {0, 1}, {}};
  const std::array<std::int64_t, 1> n{3};
  const auto ds = window_dataset(s, n, 3, {}, 0);
  CHECK(ds.status == WindowStatus::StreamTooShort);
  CHECK(ds.records.empty());
  const std::array<std::int64_t, 1> tiny{2};
  CHECK_THROWS_AS(window_dataset(s, tiny, 3, {}, 0), Error);
  CHECK_THROWS_AS(window_dataset(s, std::span<const std::int64_t>{}, 3, {}, 0), Error);
}

TEST_CASE("stream and truth files") {
  const auto dir = test_support::scratch("datagen_files");
  const auto c = config({2, 4, 3}, "L1L1S1", true, 3000, 21, 49);
  const auto seq = generate_stream(c);
  const auto path = dir / "stream.json";
  write_stream(path, c, seq);
  CHECK(read_stream(path) == observe(seq));
  const auto gt = read_truth(truth_path(path));
  CHECK(gt.trigger_text == "L1L1S1");
  CHECK(gt.config.trigger == c.trigger);
  CHECK(gt.config.seed == 21);
  CHECK(gt.config.span_bound == std::optional<std::int64_t>{49});
  CHECK(gt.events == seq.events);
  REQUIRE(gt.hidden.size() == seq.size());
  for (std::size_t i = 0; i < seq.size(); ++i) CHECK(gt.hidden[i] == seq.elements[i].hidden);

  // Observed file carries no hidden states.
  CHECK(read_file(path).find("hidden") == std::string::npos);

  // Byte-identical on regeneration.
  const auto again = dir / "again.json";
  write_stream(again, c, generate_stream(c));
  CHECK(read_file(path) == read_file(again));
  CHECK(read_file(truth_path(path)) == read_file(truth_path(again)));
}

TEST_CASE("dataset round trip and errors") {
  const auto dir = test_support::scratch("datagen_dataset");
  Rng rng(3);
  std::vector<WindowRecord> records(10000);
  for (std::size_t i = 0; i < records.size(); ++i) {
    records[i].tokens.resize(1 + rng.uniform(30));
    for (auto& t : records[i].tokens) t = static_cast<State>(rng.uniform(4));
    records[i].label = static_cast<int>(rng.uniform(2));
    records[i].offset = static_cast<std::int64_t>(i * 3);
  }
  const auto path = dir / "d.jsonl";
  write_dataset(path, records);
  CHECK(read_dataset(path) == records);

  const auto bad = dir / "bad.jsonl";
  {
    std::ofstream out(bad);
    out << R"({"format":1,"tokens":[0,1],"label":1,"offset":0,"n":2})" << '\n' << "{not json\n";
  }
  try {
    (void)read_dataset(bad);
    FAIL("expected a format error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Format);
    CHECK(std::string(e.what()).find(":2:") != std::string::npos);
  }
  {
    std::ofstream out(bad);
    out << R"({"format":1,"tokens":[0,1],"label":1,"offset":0,"n":3})" << '\n';
  }
  CHECK_THROWS_AS(read_dataset(bad), Error);
  try {
    (void)read_dataset(dir / "missing.jsonl");
    FAIL("expected an io error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Io);
  }
}
