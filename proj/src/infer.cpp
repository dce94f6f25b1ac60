#include "hidtrig/infer.hpp"

#include <algorithm>
#include <numeric>

#include "json.hpp"

namespace hidtrig {

std::vector<std::vector<State>> enumerate_candidates(int a, int l) {
  ProblemParams{a, 1, l}.validate();
  std::uint64_t count = 1;
  for (int i = 0; i < l; ++i) {
    if (count > kCandidateLimit / static_cast<std::uint64_t>(a))
      fail(ErrorKind::GuardExceeded, "a^l exceeds the candidate bound 1e6");
    count *= static_cast<std::uint64_t>(a);
  }
  std::vector<std::vector<State>> out;
  out.reserve(count);
  std::vector<State> current(static_cast<std::size_t>(l), 0);
  for (std::uint64_t c = 0; c < count; ++c) {
    out.push_back(current);
    for (std::size_t i = current.size(); i-- > 0;) {
      if (++current[i] < a) break;
      current[i] = 0;
    }
  }
  return out;
}

EliminationMode parse_elimination_mode(std::string_view name) {
  if (name == "strict") return EliminationMode::Strict;
  if (name == "ranked") return EliminationMode::Ranked;
  fail(ErrorKind::InvalidInput, "unknown elimination mode '" + std::string(name) + "'");
}

const char* to_string(EliminationMode mode) { return mode == EliminationMode::Strict ? "strict" : "ranked"; }

const char* to_string(InferStatus status) {
  switch (status) {
    case InferStatus::Ok: return "ok";
    case InferStatus::InsufficientData: return "insufficient_data";
    case InferStatus::NoSurvivor: return "no_survivor";
  }
  return "?";
}

CandidateTable::CandidateTable(int a, int l, EliminationMode mode, std::uint64_t tolerance)
    : a_(a), l_(l), mode_(mode), tolerance_(tolerance), candidates_(enumerate_candidates(a, l)),
      miss_(candidates_.size(), 0) {}

void CandidateTable::add(std::span<const State> window) {
  if (window.size() < static_cast<std::size_t>(l_))
    fail(ErrorKind::InvalidInput, "window shorter than l=" + std::to_string(l_));
  ++positives_;
  for (std::size_t i = 0; i < candidates_.size(); ++i)
    if (!contains_subsequence(window, candidates_[i])) ++miss_[i];
}

void CandidateTable::merge(const CandidateTable& other) {
  if (other.a_ != a_ || other.l_ != l_) fail(ErrorKind::InvalidInput, "cannot merge tables over different (a, l)");
  positives_ += other.positives_;
  for (std::size_t i = 0; i < miss_.size(); ++i) miss_[i] += other.miss_[i];
}

std::vector<std::size_t> CandidateTable::survivors() const {
  std::vector<std::size_t> out;
  if (mode_ == EliminationMode::Strict) {
    for (std::size_t i = 0; i < miss_.size(); ++i)
      if (!eliminated(i)) out.push_back(i);
    return out;
  }
  const auto best = *std::min_element(miss_.begin(), miss_.end());
  for (std::size_t i = 0; i < miss_.size(); ++i)
    if (miss_[i] == best) out.push_back(i);
  return out;
}

std::vector<std::size_t> CandidateTable::ranking() const {
  std::vector<std::size_t> order(miss_.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return miss_[x] < miss_[y]; });
  return order;
}

CandidateTable eliminate(std::span<const WindowRecord> positives, int a, int l, EliminationMode mode,
                         std::uint64_t tolerance) {
  CandidateTable table(a, l, mode, tolerance);
  for (const auto& r : positives) {
    if (r.label != 1) fail(ErrorKind::InvalidInput, "elimination takes positive windows only");
    for (auto t : r.tokens)
      if (t >= a) fail(ErrorKind::InvalidInput, "window token outside a=" + std::to_string(a));
    table.add(r.tokens);
  }
  return table;
}

std::string InferReport::render_candidate(std::size_t i) const {
  const auto& c = table.candidate(i);
  if (table.a() <= 26) return render_apparent(c, Alphabet::for_states(table.a()));
  std::string out;
  for (std::size_t k = 0; k < c.size(); ++k) out += (k ? "-" : "") + std::to_string(c[k]);
  return out;
}

std::string InferReport::to_json() const {
  using nlohmann::json;
  json candidates = json::array();
  for (auto i : table.ranking())
    candidates.push_back({{"pattern", render_candidate(i)},
                          {"miss_count", table.miss_count(i)},
                          {"eliminated", table.eliminated(i)}});
  json survivors = json::array();
  for (auto i : table.survivors()) survivors.push_back(render_candidate(i));
  json doc = {
      {"status", to_string(status)},
      {"mode", to_string(table.mode())},
      {"a", table.a()},
      {"l", table.l()},
      {"tolerance", table.tolerance()},
      {"records_read", records_read},
      {"positives", table.positives()},
      {"survivors", survivors},
      {"candidates", candidates},
      {"truth", nullptr},
  };
  if (truth)
    doc["truth"] = {{"trigger", truth->trigger},
                    {"apparent", truth->apparent},
                    {"among_survivors", truth->among_survivors},
                    {"unique_survivor", truth->unique_survivor}};
  return doc.dump();
}

InferReport infer_records(std::span<const WindowRecord> records, int a, int l, EliminationMode mode,
                          std::uint64_t tolerance, const std::optional<TriggerPattern>& truth) {
  std::vector<WindowRecord> positives;
  for (const auto& r : records)
    if (r.label == 1) positives.push_back(r);
  InferReport report{InferStatus::Ok, eliminate(positives, a, l, mode, tolerance), records.size(), std::nullopt};
  const auto survivors = report.table.survivors();
  if (report.table.positives() == 0)
    report.status = InferStatus::InsufficientData;
  else if (survivors.empty())
    report.status = InferStatus::NoSurvivor;

  if (truth) {
    TruthComparison cmp;
    const auto apparent = truth->apparent();
    if (a <= 26) {
      const auto alphabet = Alphabet::for_states(a);
      cmp.trigger = render(*truth, alphabet);
      cmp.apparent = render_apparent(apparent, alphabet);
    }
    for (auto i : survivors)
      if (report.table.candidate(i) == apparent) cmp.among_survivors = true;
    cmp.unique_survivor = cmp.among_survivors && survivors.size() == 1;
    report.truth = cmp;
  }
  return report;
}

InferReport infer_trigger(const std::filesystem::path& dataset, int a, int l, EliminationMode mode,
                          std::uint64_t tolerance) {
  const auto records = read_dataset(dataset);
  std::optional<TriggerPattern> truth;
  const auto sidecar = truth_path(dataset);
  if (std::filesystem::exists(sidecar)) {
    const auto gt = read_truth(sidecar);
    if (gt.config.params.a != a || gt.config.params.l != l)
      fail(ErrorKind::InvalidInput, "ground truth was generated with different (a, l)");
    truth = gt.config.trigger;
  }
  return infer_records(records, a, l, mode, tolerance, truth);
}

}  // namespace hidtrig
