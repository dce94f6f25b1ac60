#pragma once

// Domain types shared by every module: problem parameters, elements with an
// apparent and a hidden state, trigger patterns, the token text format, the
// SplitMix64 generator and the greedy subsequence matcher.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hidtrig/error.hpp"

namespace hidtrig {

using State = std::uint16_t;

// a apparent states, h hidden states, trigger length l.
struct ProblemParams {
  int a = 2;
  int h = 1;
  int l = 1;

  // a*h; an element matches a fixed entry with probability 1/(a*h).
  std::int64_t actual_alphabet() const { return std::int64_t{a} * h; }
  void validate() const;

  friend bool operator==(const ProblemParams&, const ProblemParams&) = default;
};

struct Element {
  State apparent = 0;
  State hidden = 0;

  friend bool operator==(const Element&, const Element&) = default;
};

// Events are out-of-band: position p means the event fires immediately after
// element p.
struct Sequence {
  ProblemParams params;
  std::vector<Element> elements;
  std::vector<std::size_t> events;

  std::size_t size() const { return elements.size(); }
  void validate() const;

  friend bool operator==(const Sequence&, const Sequence&) = default;
};

enum class HiddenConstraint { Fixed, SharedExistential, Ignore };
enum class MatchMode { Subsequence, Consecutive };

struct PatternEntry {
  State apparent = 0;
  State hidden = 0;  // meaningful only under HiddenConstraint::Fixed

  friend bool operator==(const PatternEntry&, const PatternEntry&) = default;
};

// Constraint is stored once per pattern, so patterns are homogeneous by
// construction.
struct TriggerPattern {
  std::vector<PatternEntry> entries;
  HiddenConstraint constraint = HiddenConstraint::Fixed;
  MatchMode mode = MatchMode::Subsequence;

  std::size_t size() const { return entries.size(); }
  bool empty() const { return entries.empty(); }

  // Apparent symbols only.
  std::vector<State> apparent() const;

  // Entries in range of params; throws InvalidInput otherwise.
  void check_alphabet(const ProblemParams& params) const;
  // check_alphabet plus size() == params.l.
  void validate(const ProblemParams& params) const;

  friend bool operator==(const TriggerPattern&, const TriggerPattern&) = default;
};

// ---------------------------------------------------------------------------
// Matching

// Greedy left-to-right matcher. Does not check alphabet bounds.
bool contains(std::span<const Element> window, const TriggerPattern& pattern);

// Checked variant: InvalidInput when pattern entries fall outside params.
bool contains(std::span<const Element> window, const TriggerPattern& pattern,
              const ProblemParams& params);

// Apparent-only greedy subsequence test.
bool contains_subsequence(std::span<const State> tokens,
                          std::span<const State> pattern);

// ---------------------------------------------------------------------------
// Token text

class Alphabet {
 public:
  // "LS" for a == 2, otherwise 'A', 'B', ...; a must be in [1, 26].
  static Alphabet for_states(int a);
  explicit Alphabet(std::string letters);

  char letter(State apparent) const;
  // -1 when c is not a letter of this alphabet.
  int index(char c) const;
  std::size_t size() const { return letters_.size(); }
  const std::string& letters() const { return letters_; }

 private:
  std::string letters_;
};

// Canonical tokens, e.g. "L1L1S1" (hidden index rendered 1-based).
std::string render(std::span<const Element> elements, const Alphabet& alphabet);
// Fixed: "L1L3S2"; Ignore: "LLS"; SharedExistential: "LiLiSi".
std::string render(const TriggerPattern& pattern, const Alphabet& alphabet);
std::string render_apparent(std::span<const State> tokens,
                            const Alphabet& alphabet);

// Parse errors carry the character offset of the offending token.
std::vector<Element> parse_elements(std::string_view text,
                                    const ProblemParams& params,
                                    const Alphabet& alphabet);
TriggerPattern parse_pattern(std::string_view text, const ProblemParams& params,
                             const Alphabet& alphabet,
                             MatchMode mode = MatchMode::Subsequence);

// ---------------------------------------------------------------------------
// Random numbers

// SplitMix64. uniform(k) rejects draws below 2^64 mod k and returns x mod k,
// so streams are reproducible across implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept;
  std::uint64_t uniform(std::uint64_t bound);
  // 53-bit uniform in [0, 1).
  double uniform01() noexcept;

  std::uint64_t state() const noexcept { return state_; }

 private:
  std::uint64_t state_;
};

// SplitMix64 finaliser.
std::uint64_t mix64(std::uint64_t z) noexcept;

// Independent sub-seed for work item `index`; used for order-insensitive
// parallel simulation.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept;

// Apparent state first, then hidden state.
Element draw_element(Rng& rng, const ProblemParams& params);

}  // namespace hidtrig
