#include "hidtrig/core.hpp"

#include <algorithm>
#include <charconv>
#include <limits>

namespace hidtrig {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidInput: return "invalid_input";
    case ErrorKind::Unsupported: return "unsupported_parameter";
    case ErrorKind::Unreachable: return "unreachable_target";
    case ErrorKind::Parse: return "parse_error";
    case ErrorKind::GuardExceeded: return "guard_exceeded";
    case ErrorKind::Precision: return "precision_error";
    case ErrorKind::Io: return "io_error";
    case ErrorKind::Format: return "format_error";
  }
  return "unknown";
}

namespace {

constexpr int kMaxStates = std::numeric_limits<State>::max();

}  // namespace

void ProblemParams::validate() const {
  if (a < 1 || a > kMaxStates)
    fail(ErrorKind::InvalidInput, "apparent state count a must be in [1, 65535], got " + std::to_string(a));
  if (h < 1 || h > kMaxStates)
    fail(ErrorKind::InvalidInput, "hidden state count h must be in [1, 65535], got " + std::to_string(h));
  if (l < 1)
    fail(ErrorKind::InvalidInput, "trigger length l must be >= 1, got " + std::to_string(l));
}

void Sequence::validate() const {
  params.validate();
  for (std::size_t i = 0; i < elements.size(); ++i) {
    const auto& e = elements[i];
    if (e.apparent >= params.a || e.hidden >= params.h)
      fail(ErrorKind::InvalidInput, "element " + std::to_string(i) + " out of alphabet range");
  }
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (events[i] >= elements.size())
      fail(ErrorKind::InvalidInput, "event position " + std::to_string(events[i]) + " beyond sequence end");
    if (i > 0 && events[i] <= events[i - 1])
      fail(ErrorKind::InvalidInput, "event positions must be strictly increasing");
  }
}

std::vector<State> TriggerPattern::apparent() const {
  std::vector<State> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.apparent);
  return out;
}

void TriggerPattern::check_alphabet(const ProblemParams& params) const {
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].apparent >= params.a)
      fail(ErrorKind::InvalidInput, "pattern entry " + std::to_string(i) + ": apparent index outside a=" + std::to_string(params.a));
    if (constraint == HiddenConstraint::Fixed && entries[i].hidden >= params.h)
      fail(ErrorKind::InvalidInput, "pattern entry " + std::to_string(i) + ": hidden index outside h=" + std::to_string(params.h));
  }
}

void TriggerPattern::validate(const ProblemParams& params) const {
  params.validate();
  check_alphabet(params);
  if (entries.size() != static_cast<std::size_t>(params.l))
    fail(ErrorKind::InvalidInput, "pattern length " + std::to_string(entries.size()) + " differs from l=" + std::to_string(params.l));
}

// ---------------------------------------------------------------------------

namespace {

bool subsequence_fixed(std::span<const Element> w, std::span<const PatternEntry> p) {
  std::size_t j = 0;
  for (const auto& x : w) {
    if (x.apparent == p[j].apparent && x.hidden == p[j].hidden && ++j == p.size()) return true;
  }
  return false;
}

bool subsequence_ignore(std::span<const Element> w, std::span<const PatternEntry> p) {
  std::size_t j = 0;
  for (const auto& x : w) {
    if (x.apparent == p[j].apparent && ++j == p.size()) return true;
  }
  return false;
}

// One greedy counter per hidden state, advanced in a single pass.
bool subsequence_shared(std::span<const Element> w, std::span<const PatternEntry> p) {
  State max_hidden = 0;
  for (const auto& x : w) max_hidden = std::max(max_hidden, x.hidden);
  std::vector<std::size_t> matched(std::size_t{max_hidden} + 1, 0);
  for (const auto& x : w) {
    auto& j = matched[x.hidden];
    if (x.apparent == p[j].apparent && ++j == p.size()) return true;
  }
  return false;
}

bool entry_matches(const Element& x, const PatternEntry& e, HiddenConstraint c, State shared) {
  if (x.apparent != e.apparent) return false;
  switch (c) {
    case HiddenConstraint::Fixed: return x.hidden == e.hidden;
    case HiddenConstraint::SharedExistential: return x.hidden == shared;
    case HiddenConstraint::Ignore: return true;
  }
  return false;
}

bool consecutive(std::span<const Element> w, const TriggerPattern& p) {
  const std::size_t l = p.size();
  if (w.size() < l) return false;
  for (std::size_t s = 0; s + l <= w.size(); ++s) {
    const State shared = w[s].hidden;
    bool ok = true;
    for (std::size_t j = 0; j < l && ok; ++j) ok = entry_matches(w[s + j], p.entries[j], p.constraint, shared);
    if (ok) return true;
  }
  return false;
}

}  // namespace

bool contains(std::span<const Element> window, const TriggerPattern& pattern) {
  if (pattern.empty()) return true;
  if (pattern.mode == MatchMode::Consecutive) return consecutive(window, pattern);
  switch (pattern.constraint) {
    case HiddenConstraint::Fixed: return subsequence_fixed(window, pattern.entries);
    case HiddenConstraint::Ignore: return subsequence_ignore(window, pattern.entries);
    case HiddenConstraint::SharedExistential: return subsequence_shared(window, pattern.entries);
  }
  return false;
}

bool contains(std::span<const Element> window, const TriggerPattern& pattern,
              const ProblemParams& params) {
  pattern.check_alphabet(params);
  return contains(window, pattern);
}

bool contains_subsequence(std::span<const State> tokens, std::span<const State> pattern) {
  if (pattern.empty()) return true;
  std::size_t j = 0;
  for (State t : tokens) {
    if (t == pattern[j] && ++j == pattern.size()) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------

Alphabet Alphabet::for_states(int a) {
  if (a < 1 || a > 26)
    fail(ErrorKind::InvalidInput, "letter rendering needs 1 <= a <= 26, got " + std::to_string(a));
  if (a == 2) return Alphabet("LS");
  std::string letters;
  for (int i = 0; i < a; ++i) letters.push_back(static_cast<char>('A' + i));
  return Alphabet(std::move(letters));
}

Alphabet::Alphabet(std::string letters) : letters_(std::move(letters)) {
  for (std::size_t i = 0; i < letters_.size(); ++i) {
    const char c = letters_[i];
    if (!((c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z')) || c == 'i')
      fail(ErrorKind::InvalidInput, std::string("alphabet letter '") + c + "' is not usable");
    if (letters_.find(c) != i)
      fail(ErrorKind::InvalidInput, std::string("duplicate alphabet letter '") + c + "'");
  }
}

char Alphabet::letter(State apparent) const {
  if (apparent >= letters_.size())
    fail(ErrorKind::InvalidInput, "apparent index " + std::to_string(apparent) + " has no letter");
  return letters_[apparent];
}

int Alphabet::index(char c) const {
  const auto pos = letters_.find(c);
  return pos == std::string::npos ? -1 : static_cast<int>(pos);
}

std::string render(std::span<const Element> elements, const Alphabet& alphabet) {
  std::string out;
  out.reserve(elements.size() * 2);
  for (const auto& e : elements) {
    out.push_back(alphabet.letter(e.apparent));
    out += std::to_string(e.hidden + 1);
  }
  return out;
}

std::string render(const TriggerPattern& pattern, const Alphabet& alphabet) {
  std::string out;
  for (const auto& e : pattern.entries) {
    out.push_back(alphabet.letter(e.apparent));
    switch (pattern.constraint) {
      case HiddenConstraint::Fixed: out += std::to_string(e.hidden + 1); break;
      case HiddenConstraint::SharedExistential: out.push_back('i'); break;
      case HiddenConstraint::Ignore: break;
    }
  }
  return out;
}

std::string render_apparent(std::span<const State> tokens, const Alphabet& alphabet) {
  std::string out;
  out.reserve(tokens.size());
  for (State t : tokens) out.push_back(alphabet.letter(t));
  return out;
}

namespace {

enum class Suffix { None, Digits, Shared };

struct Token {
  State apparent;
  Suffix suffix;
  State hidden;
};

std::vector<Token> tokenize(std::string_view text, const ProblemParams& params, const Alphabet& alphabet) {
  std::vector<Token> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const char c = text[pos];
    if (c == ' ' || c == '\t' || c == ',') {
      ++pos;
      continue;
    }
    const int idx = alphabet.index(c);
    if (idx < 0)
      fail(ErrorKind::Parse, "position " + std::to_string(pos) + ": unknown letter '" + std::string(1, c) + "'");
    if (idx >= params.a)
      fail(ErrorKind::Parse, "position " + std::to_string(pos) + ": letter '" + std::string(1, c) + "' outside a=" + std::to_string(params.a));
    const std::size_t start = pos++;
    Token tok{static_cast<State>(idx), Suffix::None, 0};
    if (pos < text.size() && text[pos] == 'i') {
      tok.suffix = Suffix::Shared;
      ++pos;
    } else if (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
      std::size_t end = pos;
      while (end < text.size() && text[end] >= '0' && text[end] <= '9') ++end;
      long value = 0;
      const auto res = std::from_chars(text.data() + pos, text.data() + end, value);
      if (res.ec != std::errc{} || value < 1 || value > params.h)
        fail(ErrorKind::Parse, "position " + std::to_string(start) + ": hidden index " +
                                   std::string(text.substr(pos, end - pos)) + " outside [1, " + std::to_string(params.h) + "]");
      tok.suffix = Suffix::Digits;
      tok.hidden = static_cast<State>(value - 1);
      pos = end;
    }
    out.push_back(tok);
  }
  return out;
}

}  // namespace

std::vector<Element> parse_elements(std::string_view text, const ProblemParams& params, const Alphabet& alphabet) {
  std::vector<Element> out;
  std::size_t n = 0;
  for (const auto& t : tokenize(text, params, alphabet)) {
    if (t.suffix != Suffix::Digits)
      fail(ErrorKind::Parse, "token " + std::to_string(n) + ": sequence elements need a hidden index");
    out.push_back({t.apparent, t.hidden});
    ++n;
  }
  return out;
}

TriggerPattern parse_pattern(std::string_view text, const ProblemParams& params, const Alphabet& alphabet,
                             MatchMode mode) {
  const auto tokens = tokenize(text, params, alphabet);
  TriggerPattern p;
  p.mode = mode;
  p.constraint = HiddenConstraint::Ignore;
  if (tokens.empty()) return p;
  const Suffix kind = tokens.front().suffix;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i].suffix != kind)
      fail(ErrorKind::Parse, "token " + std::to_string(i) + ": mixed hidden constraints in one pattern");
    p.entries.push_back({tokens[i].apparent, tokens[i].hidden});
  }
  p.constraint = kind == Suffix::Digits   ? HiddenConstraint::Fixed
                 : kind == Suffix::Shared ? HiddenConstraint::SharedExistential
                                          : HiddenConstraint::Ignore;
  return p;
}

// ---------------------------------------------------------------------------

std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t Rng::next() noexcept {
  state_ += 0x9E3779B97F4A7C15ULL;
  return mix64(state_);
}

std::uint64_t Rng::uniform(std::uint64_t bound) {
  if (bound == 0) fail(ErrorKind::InvalidInput, "uniform bound must be positive");
  // 2^64 mod bound, computed in 64-bit arithmetic.
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t x = next();
    if (x >= threshold) return x % bound;
  }
}

double Rng::uniform01() noexcept {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  return mix64(seed + (index + 1) * 0x9E3779B97F4A7C15ULL);
}

Element draw_element(Rng& rng, const ProblemParams& params) {
  Element e;
  e.apparent = static_cast<State>(rng.uniform(static_cast<std::uint64_t>(params.a)));
  e.hidden = static_cast<State>(rng.uniform(static_cast<std::uint64_t>(params.h)));
  return e;
}

}  // namespace hidtrig
