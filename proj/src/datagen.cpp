#include "hidtrig/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "hidtrig/plan.hpp"
#include "json.hpp"

namespace hidtrig {

using nlohmann::json;

Scenario parse_scenario(std::string_view name) {
  if (name == "consecutive-hidden") return {MatchMode::Consecutive, true};
  if (name == "consecutive-nohidden") return {MatchMode::Consecutive, false};
  if (name == "subsequence-hidden") return {MatchMode::Subsequence, true};
  if (name == "subsequence-nohidden") return {MatchMode::Subsequence, false};
  fail(ErrorKind::InvalidInput, "unknown scenario '" + std::string(name) + "'");
}

std::string to_string(const Scenario& scenario) {
  std::string out = scenario.mode == MatchMode::Consecutive ? "consecutive" : "subsequence";
  return out + (scenario.hidden ? "-hidden" : "-nohidden");
}

void StreamConfig::validate() const {
  params.validate();
  trigger.validate(params);
  if (length < 0) fail(ErrorKind::InvalidInput, "stream length must be >= 0");
  if (!hidden && params.h != 1 && trigger.constraint != HiddenConstraint::Ignore)
    fail(ErrorKind::InvalidInput, "a no-hidden scenario needs h = 1 or an apparent-only trigger");
  if (hidden && trigger.constraint == HiddenConstraint::Ignore)
    fail(ErrorKind::InvalidInput, "a hidden-state scenario needs a trigger with hidden constraints");
  if (span_bound && *span_bound < params.l)
    fail(ErrorKind::InvalidInput, "span bound " + std::to_string(*span_bound) + " shorter than l=" + std::to_string(params.l));
}

std::int64_t default_span_bound(const ProblemParams& params, const TriggerPattern& trigger) {
  switch (trigger.constraint) {
    case HiddenConstraint::Fixed: return min_window(0.95, params, WindowMode::Particular);
    case HiddenConstraint::SharedExistential: return min_window(0.95, params, WindowMode::SameHidden);
    case HiddenConstraint::Ignore: return min_window(0.95, params, WindowMode::Apparent);
  }
  return params.l;
}

TriggerPattern random_trigger(const ProblemParams& params, const Scenario& scenario, Rng& rng) {
  params.validate();
  TriggerPattern t;
  t.mode = scenario.mode;
  t.constraint = scenario.hidden ? HiddenConstraint::Fixed : HiddenConstraint::Ignore;
  for (int i = 0; i < params.l; ++i) {
    PatternEntry e;
    e.apparent = static_cast<State>(rng.uniform(static_cast<std::uint64_t>(params.a)));
    if (scenario.hidden) e.hidden = static_cast<State>(rng.uniform(static_cast<std::uint64_t>(params.h)));
    t.entries.push_back(e);
  }
  return t;
}

namespace {

struct Partial {
  std::size_t matched = 0;
  std::size_t start = 0;
};

bool advances(const Element& x, const PatternEntry& e, HiddenConstraint c) {
  if (x.apparent != e.apparent) return false;
  return c != HiddenConstraint::Fixed || x.hidden == e.hidden;
}

std::vector<std::size_t> mark_subsequence(std::span<const Element> elements, const TriggerPattern& trigger,
                                          std::optional<std::int64_t> span_bound) {
  const std::size_t l = trigger.size();
  const bool shared = trigger.constraint == HiddenConstraint::SharedExistential;
  State max_hidden = 0;
  if (shared)
    for (const auto& x : elements) max_hidden = std::max(max_hidden, x.hidden);
  // One matcher per hidden state when shared, otherwise a single one.
  std::vector<Partial> matchers(shared ? std::size_t{max_hidden} + 1 : 1);

  std::vector<std::size_t> events;
  for (std::size_t p = 0; p < elements.size(); ++p) {
    const Element& x = elements[p];
    Partial& m = matchers[shared ? x.hidden : 0];
    if (m.matched > 0 && span_bound && p - m.start + 1 > static_cast<std::size_t>(*span_bound)) m.matched = 0;
    if (!advances(x, trigger.entries[m.matched], trigger.constraint)) continue;
    if (m.matched == 0) m.start = p;
    if (++m.matched == l) {
      events.push_back(p);
      for (auto& other : matchers) other.matched = 0;
    }
  }
  return events;
}

std::vector<std::size_t> mark_consecutive(std::span<const Element> elements, const TriggerPattern& trigger) {
  const std::size_t l = trigger.size();
  std::vector<std::size_t> events;
  // Elements at or before `fresh_from - 1` were consumed by the previous event.
  std::size_t fresh_from = 0;
  for (std::size_t p = 0; p < elements.size(); ++p) {
    if (p + 1 < l || p + 1 - l < fresh_from) continue;
    if (contains(elements.subspan(p + 1 - l, l), trigger)) {
      events.push_back(p);
      fresh_from = p + 1;
    }
  }
  return events;
}

}  // namespace

std::vector<std::size_t> mark_events(std::span<const Element> elements, const TriggerPattern& trigger,
                                     std::optional<std::int64_t> span_bound) {
  if (trigger.empty()) fail(ErrorKind::InvalidInput, "trigger must not be empty");
  if (trigger.mode == MatchMode::Consecutive) return mark_consecutive(elements, trigger);
  return mark_subsequence(elements, trigger, span_bound);
}

Sequence generate_stream(const StreamConfig& config) {
  config.validate();
  Sequence seq;
  seq.params = config.params;
  seq.elements.resize(static_cast<std::size_t>(config.length));
  Rng rng(config.seed);
  for (auto& e : seq.elements) e = draw_element(rng, config.params);
  seq.events = mark_events(seq.elements, config.trigger, config.span_bound);
  return seq;
}

ObservedStream observe(const Sequence& sequence) {
  ObservedStream out;
  out.a = sequence.params.a;
  out.tokens.reserve(sequence.size());
  for (const auto& e : sequence.elements) out.tokens.push_back(e.apparent);
  out.events = sequence.events;
  return out;
}

WindowDataset window_dataset(const ObservedStream& stream, std::span<const std::int64_t> window_lengths, int l,
                             const BalancePolicy& balance, std::uint64_t seed) {
  if (window_lengths.empty()) fail(ErrorKind::InvalidInput, "at least one window length is required");
  for (auto n : window_lengths)
    if (n < l || n < 1)
      fail(ErrorKind::InvalidInput, "window length " + std::to_string(n) + " shorter than l=" + std::to_string(l));
  if (balance.kind == Balance::DownsampleNegatives && !(balance.ratio >= 0.0))
    fail(ErrorKind::InvalidInput, "negative-to-positive ratio must be >= 0");

  WindowDataset out;
  const auto size = stream.tokens.size();
  const auto longest = static_cast<std::size_t>(*std::max_element(window_lengths.begin(), window_lengths.end()));
  if (size < longest) {
    out.status = WindowStatus::StreamTooShort;
    return out;
  }

  std::vector<char> event_after(size, 0);
  for (auto e : stream.events) {
    if (e >= size) fail(ErrorKind::InvalidInput, "event position beyond stream end");
    event_after[e] = 1;
  }
  // events_before[i]: events after elements 0..i-1.
  std::vector<std::size_t> events_before(size + 1, 0);
  for (std::size_t i = 0; i < size; ++i) events_before[i + 1] = events_before[i] + static_cast<std::size_t>(event_after[i]);

  Rng rng(seed);
  std::vector<WindowRecord> all;
  for (std::size_t end = 1; end <= size; ++end) {
    const std::size_t n = static_cast<std::size_t>(
        window_lengths.size() == 1 ? window_lengths[0] : window_lengths[rng.uniform(window_lengths.size())]);
    if (end < n) continue;
    const std::size_t begin = end - n;
    if (events_before[end - 1] != events_before[begin]) continue;
    WindowRecord rec;
    rec.tokens.assign(stream.tokens.begin() + static_cast<std::ptrdiff_t>(begin),
                      stream.tokens.begin() + static_cast<std::ptrdiff_t>(end));
    rec.label = event_after[end - 1];
    rec.offset = static_cast<std::int64_t>(begin);
    all.push_back(std::move(rec));
  }

  if (balance.kind == Balance::KeepAll) {
    out.records = std::move(all);
    return out;
  }

  std::vector<std::size_t> negatives;
  for (std::size_t i = 0; i < all.size(); ++i)
    if (all[i].label == 0) negatives.push_back(i);
  const std::size_t positives = all.size() - negatives.size();
  const auto target = std::min(negatives.size(),
                               static_cast<std::size_t>(std::llround(balance.ratio * static_cast<double>(positives))));
  // Partial Fisher-Yates: the first `target` slots become the kept negatives.
  for (std::size_t i = 0; i < target; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.uniform(negatives.size() - i));
    std::swap(negatives[i], negatives[j]);
  }
  std::vector<char> keep(all.size(), 1);
  for (std::size_t i = target; i < negatives.size(); ++i) keep[negatives[i]] = 0;
  for (std::size_t i = 0; i < all.size(); ++i)
    if (keep[i]) out.records.push_back(std::move(all[i]));
  return out;
}

std::size_t count_positive(std::span<const WindowRecord> records) {
  return static_cast<std::size_t>(std::count_if(records.begin(), records.end(), [](const auto& r) { return r.label == 1; }));
}

// ---------------------------------------------------------------------------

namespace {

const char* constraint_name(HiddenConstraint c) {
  switch (c) {
    case HiddenConstraint::Fixed: return "fixed";
    case HiddenConstraint::SharedExistential: return "shared";
    case HiddenConstraint::Ignore: return "ignore";
  }
  return "?";
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
  return out;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

json parse_object(const std::filesystem::path& path) {
  json doc;
  try {
    doc = json::parse(slurp(path));
  } catch (const json::parse_error& e) {
    fail(ErrorKind::Format, path.string() + ": " + e.what());
  }
  if (!doc.is_object() || doc.value("format", 0) != kFormatVersion)
    fail(ErrorKind::Format, path.string() + ": expected an object with \"format\": 1");
  return doc;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) fail(ErrorKind::Io, "write to '" + path.string() + "' failed");
}

}  // namespace

std::filesystem::path truth_path(const std::filesystem::path& path) {
  auto p = path;
  p += ".truth.json";
  return p;
}

std::string stream_document(const ObservedStream& observed) {
  const json doc = {
      {"format", kFormatVersion}, {"kind", "stream"}, {"a", observed.a},
      {"length", observed.tokens.size()}, {"tokens", observed.tokens}, {"events", observed.events},
  };
  return doc.dump() + "\n";
}

std::string truth_document(const StreamConfig& config, const Sequence& sequence) {
  std::vector<State> hidden;
  hidden.reserve(sequence.size());
  for (const auto& e : sequence.elements) hidden.push_back(e.hidden);
  const auto alphabet = Alphabet::for_states(config.params.a);
  const json cfg = {
      {"a", config.params.a},
      {"h", config.params.h},
      {"l", config.params.l},
      {"length", config.length},
      {"seed", config.seed},
      {"scenario", to_string(config.scenario())},
      {"span_bound", config.span_bound ? json(*config.span_bound) : json(nullptr)},
      {"trigger_constraint", constraint_name(config.trigger.constraint)},
  };
  const json doc = {
      {"format", kFormatVersion}, {"kind", "truth"},       {"config", cfg},
      {"seed", config.seed},      {"trigger", render(config.trigger, alphabet)},
      {"hidden", hidden},         {"events", sequence.events},
  };
  return doc.dump() + "\n";
}

void write_file(const std::filesystem::path& path, std::string_view text) {
  auto out = open_out(path);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  finish(out, path);
}

std::string read_file(const std::filesystem::path& path) { return slurp(path); }

void write_stream(const std::filesystem::path& path, const StreamConfig& config, const Sequence& sequence) {
  write_file(path, stream_document(observe(sequence)));
  write_file(truth_path(path), truth_document(config, sequence));
}

ObservedStream read_stream(const std::filesystem::path& path) {
  const json doc = parse_object(path);
  try {
    if (doc.at("kind") != "stream") fail(ErrorKind::Format, path.string() + ": not a stream file");
    ObservedStream s;
    s.a = doc.at("a").get<int>();
    s.tokens = doc.at("tokens").get<std::vector<State>>();
    s.events = doc.at("events").get<std::vector<std::size_t>>();
    for (auto t : s.tokens)
      if (t >= s.a) fail(ErrorKind::Format, path.string() + ": token outside a=" + std::to_string(s.a));
    for (std::size_t i = 0; i < s.events.size(); ++i)
      if (s.events[i] >= s.tokens.size() || (i > 0 && s.events[i] <= s.events[i - 1]))
        fail(ErrorKind::Format, path.string() + ": events must be increasing positions inside the stream");
    return s;
  } catch (const json::exception& e) {
    fail(ErrorKind::Format, path.string() + ": " + e.what());
  }
}

GroundTruth read_truth(const std::filesystem::path& path) {
  const json doc = parse_object(path);
  try {
    if (doc.at("kind") != "truth") fail(ErrorKind::Format, path.string() + ": not a ground-truth file");
    const json& cfg = doc.at("config");
    GroundTruth gt;
    gt.config.params = {cfg.at("a").get<int>(), cfg.at("h").get<int>(), cfg.at("l").get<int>()};
    gt.config.length = cfg.at("length").get<std::int64_t>();
    gt.config.seed = cfg.at("seed").get<std::uint64_t>();
    const Scenario scenario = parse_scenario(cfg.at("scenario").get<std::string>());
    gt.config.hidden = scenario.hidden;
    if (!cfg.at("span_bound").is_null()) gt.config.span_bound = cfg.at("span_bound").get<std::int64_t>();
    gt.trigger_text = doc.at("trigger").get<std::string>();
    gt.config.trigger = parse_pattern(gt.trigger_text, gt.config.params, Alphabet::for_states(gt.config.params.a),
                                      scenario.mode);
    gt.hidden = doc.at("hidden").get<std::vector<State>>();
    gt.events = doc.at("events").get<std::vector<std::size_t>>();
    return gt;
  } catch (const json::exception& e) {
    fail(ErrorKind::Format, path.string() + ": " + e.what());
  }
}

void write_dataset(const std::filesystem::path& path, std::span<const WindowRecord> records) {
  auto out = open_out(path);
  for (const auto& r : records) {
    const json line = {{"format", kFormatVersion}, {"tokens", r.tokens}, {"label", r.label},
                       {"offset", r.offset},       {"n", r.n()}};
    out << line.dump() << '\n';
  }
  finish(out, path);
}

std::vector<WindowRecord> read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open '" + path.string() + "'");
  std::vector<WindowRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto where = path.string() + ":" + std::to_string(line_no) + ": ";
    try {
      const json obj = json::parse(line);
      if (!obj.is_object() || obj.value("format", 0) != kFormatVersion)
        fail(ErrorKind::Format, where + "expected an object with \"format\": 1");
      WindowRecord r;
      r.tokens = obj.at("tokens").get<std::vector<State>>();
      r.label = obj.at("label").get<int>();
      r.offset = obj.at("offset").get<std::int64_t>();
      const auto n = obj.at("n").get<std::int64_t>();
      if (r.label != 0 && r.label != 1) fail(ErrorKind::Format, where + "label must be 0 or 1");
      if (n != r.n()) fail(ErrorKind::Format, where + "n does not match the token count");
      records.push_back(std::move(r));
    } catch (const json::exception& e) {
      fail(ErrorKind::Format, where + e.what());
    }
  }
  return records;
}

}  // namespace hidtrig
