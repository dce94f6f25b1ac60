#pragma once

// Trigger inference by candidate elimination: a positive window that does
// not contain an apparent pattern proves that pattern is not the trigger.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hidtrig/core.hpp"
#include "hidtrig/datagen.hpp"

namespace hidtrig {

inline constexpr std::uint64_t kCandidateLimit = 1'000'000;

// All a^l apparent patterns, lexicographic (first position most significant).
std::vector<std::vector<State>> enumerate_candidates(int a, int l);

enum class EliminationMode { Strict, Ranked };

EliminationMode parse_elimination_mode(std::string_view name);
const char* to_string(EliminationMode mode);

class CandidateTable {
 public:
  CandidateTable(int a, int l, EliminationMode mode = EliminationMode::Strict, std::uint64_t tolerance = 0);

  // One positive window.
  void add(std::span<const State> window);
  // Counters are additive, so shards can be processed separately.
  void merge(const CandidateTable& other);

  int a() const { return a_; }
  int l() const { return l_; }
  EliminationMode mode() const { return mode_; }
  std::uint64_t tolerance() const { return tolerance_; }
  std::uint64_t positives() const { return positives_; }

  std::size_t size() const { return candidates_.size(); }
  const std::vector<State>& candidate(std::size_t i) const { return candidates_[i]; }
  std::uint64_t miss_count(std::size_t i) const { return miss_[i]; }
  bool eliminated(std::size_t i) const { return miss_[i] > tolerance_; }

  // Strict: candidates not eliminated. Ranked: the minimum-miss set. Both in
  // lexicographic order.
  std::vector<std::size_t> survivors() const;
  // Indices ordered by ascending miss count, ties lexicographic.
  std::vector<std::size_t> ranking() const;

 private:
  int a_;
  int l_;
  EliminationMode mode_;
  std::uint64_t tolerance_;
  std::uint64_t positives_ = 0;
  std::vector<std::vector<State>> candidates_;
  std::vector<std::uint64_t> miss_;
};

// Every record must be positive (InvalidInput otherwise).
CandidateTable eliminate(std::span<const WindowRecord> positives, int a, int l,
                         EliminationMode mode = EliminationMode::Strict, std::uint64_t tolerance = 0);

enum class InferStatus { Ok, InsufficientData, NoSurvivor };

const char* to_string(InferStatus status);

struct TruthComparison {
  std::string trigger;   // rendered with hidden constraints
  std::string apparent;  // apparent projection
  bool among_survivors = false;
  bool unique_survivor = false;
};

struct InferReport {
  InferStatus status = InferStatus::Ok;
  CandidateTable table;
  std::size_t records_read = 0;
  std::optional<TruthComparison> truth;

  std::string render_candidate(std::size_t i) const;
  // Single JSON object (survivors, ranked candidates, status, truth).
  std::string to_json() const;
};

// read_dataset, keep positives, eliminate; compares with the ground-truth
// sidecar when one exists.
InferReport infer_trigger(const std::filesystem::path& dataset, int a, int l,
                          EliminationMode mode = EliminationMode::Strict, std::uint64_t tolerance = 0);

// Same, for records already in memory.
InferReport infer_records(std::span<const WindowRecord> records, int a, int l, EliminationMode mode,
                          std::uint64_t tolerance, const std::optional<TriggerPattern>& truth);

}  // namespace hidtrig
