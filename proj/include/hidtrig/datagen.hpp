#pragma once

// Synthetic streams with trigger-caused events, labelled windows, and the
// on-disk formats shared with downstream tools.
//
// Files (UTF-8, every object carries "format": 1):
//   stream    <path>             {"kind":"stream","a","length","tokens","events"}
//   truth     <path>.truth.json  {"kind":"truth","config",...,"trigger","hidden","events"}
//   dataset   <path>             one {"tokens","label","offset","n"} object per line
//   dataset truth sidecar        <path>.truth.json, copied from the stream

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hidtrig/core.hpp"

namespace hidtrig {

inline constexpr int kFormatVersion = 1;

struct Scenario {
  MatchMode mode = MatchMode::Subsequence;
  bool hidden = true;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

// "consecutive-hidden", "consecutive-nohidden", "subsequence-hidden",
// "subsequence-nohidden".
Scenario parse_scenario(std::string_view name);
std::string to_string(const Scenario& scenario);

struct StreamConfig {
  ProblemParams params;
  TriggerPattern trigger;  // trigger.mode is the scenario's match mode
  bool hidden = true;
  std::int64_t length = 0;
  std::uint64_t seed = 0;
  // Longest stretch a subsequence match may span; nullopt = unbounded.
  std::optional<std::int64_t> span_bound;

  Scenario scenario() const { return {trigger.mode, hidden}; }
  void validate() const;
};

// The window a trigger of this kind needs for 95% containment: same-hidden
// for SharedExistential, particular for Fixed, apparent for Ignore.
std::int64_t default_span_bound(const ProblemParams& params, const TriggerPattern& trigger);

// Random trigger of length l drawn from rng (Fixed constraint unless the
// scenario has no hidden states, then Ignore).
TriggerPattern random_trigger(const ProblemParams& params, const Scenario& scenario, Rng& rng);

// Event positions produced by the trigger policy over existing elements: the
// event fires right after the completing element, the matcher then restarts,
// and a partial match spanning more than span_bound elements is discarded.
std::vector<std::size_t> mark_events(std::span<const Element> elements, const TriggerPattern& trigger,
                                     std::optional<std::int64_t> span_bound);

Sequence generate_stream(const StreamConfig& config);

// What an observer sees: apparent states and event positions.
struct ObservedStream {
  int a = 2;
  std::vector<State> tokens;
  std::vector<std::size_t> events;

  friend bool operator==(const ObservedStream&, const ObservedStream&) = default;
};

ObservedStream observe(const Sequence& sequence);

struct WindowRecord {
  std::vector<State> tokens;
  int label = 0;
  std::int64_t offset = 0;  // stream index of the first token

  std::int64_t n() const { return static_cast<std::int64_t>(tokens.size()); }
  friend bool operator==(const WindowRecord&, const WindowRecord&) = default;
};

enum class Balance { KeepAll, DownsampleNegatives };

struct BalancePolicy {
  Balance kind = Balance::KeepAll;
  double ratio = 1.0;  // negatives kept per positive
};

enum class WindowStatus { Ok, StreamTooShort };

struct WindowDataset {
  std::vector<WindowRecord> records;
  WindowStatus status = WindowStatus::Ok;
};

// One window per stream position, ending right before it, with a length drawn
// uniformly from window_lengths. Windows with an event strictly inside are
// skipped; label 1 iff an event follows the last token.
WindowDataset window_dataset(const ObservedStream& stream, std::span<const std::int64_t> window_lengths, int l,
                             const BalancePolicy& balance, std::uint64_t seed);

std::size_t count_positive(std::span<const WindowRecord> records);

// ---------------------------------------------------------------------------
// Files

std::filesystem::path truth_path(const std::filesystem::path& path);

struct GroundTruth {
  StreamConfig config;
  std::string trigger_text;
  std::vector<State> hidden;
  std::vector<std::size_t> events;
};

// Single-line JSON documents for the stream and truth files.
std::string stream_document(const ObservedStream& stream);
std::string truth_document(const StreamConfig& config, const Sequence& sequence);
void write_file(const std::filesystem::path& path, std::string_view text);
std::string read_file(const std::filesystem::path& path);

// Writes the observed stream to `path` and the ground truth next to it.
void write_stream(const std::filesystem::path& path, const StreamConfig& config, const Sequence& sequence);
ObservedStream read_stream(const std::filesystem::path& path);
GroundTruth read_truth(const std::filesystem::path& path);

void write_dataset(const std::filesystem::path& path, std::span<const WindowRecord> records);
// Format errors name the offending line.
std::vector<WindowRecord> read_dataset(const std::filesystem::path& path);

}  // namespace hidtrig
