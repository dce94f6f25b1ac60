#include "hidtrig/hidtrig.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <memory>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include "hidtrig/datagen.hpp"
#include "hidtrig/exact.hpp"
#include "hidtrig/figures.hpp"
#include "hidtrig/infer.hpp"
#include "hidtrig/plan.hpp"
#include "hidtrig/prob.hpp"
#include "hidtrig/sim.hpp"

using namespace hidtrig;

struct ht_pattern {
  ProblemParams params;
  TriggerPattern pattern;
};

struct ht_stream {
  ObservedStream observed;
  std::optional<StreamConfig> config;
  std::optional<Sequence> sequence;  // only for generated streams
  std::optional<std::string> truth_text;
};

struct ht_dataset {
  std::vector<WindowRecord> records;
  std::optional<std::string> truth_text;
};

struct ht_report {
  InferReport report;
};

struct ht_tables {
  std::vector<FigureTable> tables;
};

namespace {

thread_local std::string last_error;

ht_status status_of(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return HT_ERR_INVALID_INPUT;
    case ErrorKind::Unsupported: return HT_ERR_UNSUPPORTED;
    case ErrorKind::Unreachable: return HT_ERR_UNREACHABLE;
    case ErrorKind::Parse: return HT_ERR_PARSE;
    case ErrorKind::GuardExceeded: return HT_ERR_GUARD;
    case ErrorKind::Precision: return HT_ERR_PRECISION;
    case ErrorKind::Io: return HT_ERR_IO;
    case ErrorKind::Format: return HT_ERR_FORMAT;
  }
  return HT_ERR_INTERNAL;
}

template <class F>
ht_status guarded(F&& body) noexcept {
  try {
    body();
    return HT_OK;
  } catch (const Error& e) {
    last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
  } catch (const std::exception& e) {
    last_error = e.what();
  } catch (...) {
    last_error = "unknown exception";
  }
  return HT_ERR_INTERNAL;
}

void require(const void* p, const char* what) {
  if (!p) fail(ErrorKind::InvalidInput, std::string(what) + " is null");
}

char* dup(const std::string& s) {
  auto* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

ProblemParams params_of(ht_params p) {
  ProblemParams out{p.a, p.h, p.l};
  out.validate();
  return out;
}

Formula formula_of(ht_formula f) {
  switch (f) {
    case HT_FORMULA_BINOM: return Formula::Binom;
    case HT_FORMULA_NEGBINOM: return Formula::NegBinom;
    case HT_FORMULA_ITER: return Formula::Iter;
    case HT_FORMULA_REC: return Formula::Rec;
    case HT_FORMULA_REPEATED: return Formula::Repeated;
    case HT_FORMULA_SAME_HIDDEN: return Formula::SameHidden;
    case HT_FORMULA_Q: return Formula::Q;
  }
  fail(ErrorKind::InvalidInput, "unknown formula code");
}

WindowMode window_mode_of(ht_window_mode m) {
  switch (m) {
    case HT_WINDOW_PARTICULAR: return WindowMode::Particular;
    case HT_WINDOW_SAME_HIDDEN: return WindowMode::SameHidden;
    case HT_WINDOW_APPARENT: return WindowMode::Apparent;
  }
  fail(ErrorKind::InvalidInput, "unknown window mode code");
}

ht_boundary boundary_of(BoundaryMethod m) {
  switch (m) {
    case BoundaryMethod::Exact: return HT_BOUNDARY_EXACT;
    case BoundaryMethod::Mpfr: return HT_BOUNDARY_MPFR;
    case BoundaryMethod::Float: return HT_BOUNDARY_FLOAT;
  }
  return HT_BOUNDARY_FLOAT;
}

MatchMode match_of(ht_match_mode m) {
  if (m == HT_MATCH_SUBSEQUENCE) return MatchMode::Subsequence;
  if (m == HT_MATCH_CONSECUTIVE) return MatchMode::Consecutive;
  fail(ErrorKind::InvalidInput, "unknown match mode code");
}

EliminationMode elimination_of(ht_elimination m) {
  if (m == HT_ELIMINATION_STRICT) return EliminationMode::Strict;
  if (m == HT_ELIMINATION_RANKED) return EliminationMode::Ranked;
  fail(ErrorKind::InvalidInput, "unknown elimination mode code");
}

const FigureTable& table_at(const ht_tables* t, std::size_t i) { return t->tables.at(i); }

}  // namespace

extern "C" {

const char* ht_version(void) { return "1.0.0"; }

const char* ht_status_name(ht_status status) {
  switch (status) {
    case HT_OK: return "ok";
    case HT_ERR_INVALID_INPUT: return "invalid_input";
    case HT_ERR_UNSUPPORTED: return "unsupported";
    case HT_ERR_UNREACHABLE: return "unreachable";
    case HT_ERR_PARSE: return "parse";
    case HT_ERR_GUARD: return "guard_exceeded";
    case HT_ERR_PRECISION: return "precision";
    case HT_ERR_IO: return "io";
    case HT_ERR_FORMAT: return "format";
    case HT_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* ht_last_error(void) { return last_error.c_str(); }

void ht_string_free(char* s) { std::free(s); }

ht_status ht_formula_from_name(const char* name, ht_formula* out) {
  return guarded([&] {
    require(name, "name");
    require(out, "out");
    *out = static_cast<ht_formula>(static_cast<int>(parse_formula(name)));
  });
}

ht_status ht_probability(ht_formula formula, int64_t n, ht_params params, double* out) {
  return guarded([&] {
    require(out, "out");
    *out = evaluate(formula_of(formula), n, params_of(params)).value();
  });
}

ht_status ht_probability_exact(ht_formula formula, int64_t n, ht_params params, char** out) {
  return guarded([&] {
    require(out, "out");
    *out = dup(to_string(evaluate_exact(formula_of(formula), n, params_of(params))));
  });
}

ht_status ht_noncontaining_count(int64_t n, int32_t a, int32_t l, char** out) {
  return guarded([&] {
    require(out, "out");
    *out = dup(to_string(count_noncontaining(n, a, l)));
  });
}

ht_status ht_window_mode_from_name(const char* name, ht_window_mode* out) {
  return guarded([&] {
    require(name, "name");
    require(out, "out");
    *out = static_cast<ht_window_mode>(static_cast<int>(parse_window_mode(name)));
  });
}

ht_status ht_window_probability(int64_t n, ht_params params, ht_window_mode mode, double* out) {
  return guarded([&] {
    require(out, "out");
    *out = window_probability(n, params_of(params), window_mode_of(mode));
  });
}

ht_status ht_min_window(double confidence, ht_params params, ht_window_mode mode, int64_t* out) {
  return guarded([&] {
    require(out, "out");
    *out = min_window(confidence, params_of(params), window_mode_of(mode));
  });
}

const char* ht_boundary_name(ht_boundary method) {
  switch (method) {
    case HT_BOUNDARY_EXACT: return to_string(BoundaryMethod::Exact);
    case HT_BOUNDARY_MPFR: return to_string(BoundaryMethod::Mpfr);
    case HT_BOUNDARY_FLOAT: return to_string(BoundaryMethod::Float);
  }
  return "unknown";
}

ht_status ht_plan_data(const char* alpha, int64_t window, int32_t a, int32_t l, int32_t force_exact,
                       ht_data_plan* out, char** g_exact) {
  return guarded([&] {
    require(alpha, "alpha");
    require(out, "out");
    const auto plan = data_plan(rational_from_text(alpha), window, a, l, force_exact != 0);
    *out = ht_data_plan{plan.window, plan.a, plan.l, plan.g, plan.m, plan.r, plan.total, plan.false_candidates,
                        plan.exact ? 1 : 0, boundary_of(plan.m_method), boundary_of(plan.r_method)};
    if (g_exact) *g_exact = plan.g_exact ? dup(to_string(*plan.g_exact)) : nullptr;
  });
}

ht_status ht_pattern_parse(const char* text, ht_params params, ht_match_mode mode, ht_pattern** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    const auto p = params_of(params);
    auto pattern = parse_pattern(text, p, Alphabet::for_states(p.a), match_of(mode));
    pattern.check_alphabet(p);
    *out = new ht_pattern{p, std::move(pattern)};
  });
}

void ht_pattern_free(ht_pattern* pattern) { delete pattern; }

ht_status ht_pattern_render(const ht_pattern* pattern, char** out) {
  return guarded([&] {
    require(pattern, "pattern");
    require(out, "out");
    *out = dup(render(pattern->pattern, Alphabet::for_states(pattern->params.a)));
  });
}

ht_status ht_pattern_constraint(const ht_pattern* pattern, ht_constraint* out) {
  return guarded([&] {
    require(pattern, "pattern");
    require(out, "out");
    switch (pattern->pattern.constraint) {
      case HiddenConstraint::Fixed: *out = HT_CONSTRAINT_FIXED; break;
      case HiddenConstraint::SharedExistential: *out = HT_CONSTRAINT_SHARED; break;
      case HiddenConstraint::Ignore: *out = HT_CONSTRAINT_IGNORE; break;
    }
  });
}

ht_status ht_pattern_length(const ht_pattern* pattern, size_t* out) {
  return guarded([&] {
    require(pattern, "pattern");
    require(out, "out");
    *out = pattern->pattern.size();
  });
}

ht_status ht_pattern_contains(const ht_pattern* pattern, const char* elements, int32_t* out) {
  return guarded([&] {
    require(pattern, "pattern");
    require(elements, "elements");
    require(out, "out");
    const auto& p = pattern->params;
    const auto seq = parse_elements(elements, p, Alphabet::for_states(p.a));
    *out = contains(seq, pattern->pattern, p) ? 1 : 0;
  });
}

ht_status ht_mc_probability(int64_t n, ht_params params, const ht_pattern* pattern, uint64_t trials, uint64_t seed,
                            uint32_t threads, ht_mc_estimate* out) {
  return guarded([&] {
    require(pattern, "pattern");
    require(out, "out");
    const auto e = mc_probability(n, params_of(params), pattern->pattern, trials, seed, threads);
    *out = ht_mc_estimate{e.estimate, e.trials, e.std_error, e.ci_lo, e.ci_hi};
  });
}

ht_status ht_exact_enumeration(int64_t n, ht_params params, const ht_pattern* pattern, uint64_t* containing,
                               uint64_t* total) {
  return guarded([&] {
    require(pattern, "pattern");
    require(containing, "containing");
    require(total, "total");
    const auto c = enumerate_count(n, params_of(params), pattern->pattern);
    *containing = c.containing;
    *total = c.total;
  });
}

ht_status ht_dp_probability(int64_t n, ht_params params, double* out) {
  return guarded([&] {
    require(out, "out");
    const auto p = params_of(params);
    *out = dp_probability(n, p, p.l);
  });
}

ht_status ht_stream_generate(const ht_stream_config* config, ht_stream** out) {
  return guarded([&] {
    require(config, "config");
    require(out, "out");
    StreamConfig c;
    c.params = params_of(config->params);
    c.hidden = config->hidden != 0;
    c.length = config->length;
    c.seed = config->seed;
    const Scenario scenario{match_of(config->match), c.hidden};
    if (config->trigger) {
      c.trigger = parse_pattern(config->trigger, c.params, Alphabet::for_states(c.params.a), scenario.mode);
    } else {
      Rng rng(derive_seed(config->seed, 0));
      c.trigger = random_trigger(c.params, scenario, rng);
    }
    if (config->span_bound > 0)
      c.span_bound = config->span_bound;
    else if (config->span_bound == 0)
      c.span_bound = default_span_bound(c.params, c.trigger);
    auto seq = generate_stream(c);
    auto s = std::make_unique<ht_stream>();
    s->observed = observe(seq);
    s->truth_text = truth_document(c, seq);
    s->config = std::move(c);
    s->sequence = std::move(seq);
    *out = s.release();
  });
}

ht_status ht_stream_write(const ht_stream* stream, const char* path) {
  return guarded([&] {
    require(stream, "stream");
    require(path, "path");
    write_file(path, stream_document(stream->observed));
    if (stream->truth_text) write_file(truth_path(path), *stream->truth_text);
  });
}

ht_status ht_stream_read(const char* path, ht_stream** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    auto s = std::make_unique<ht_stream>();
    s->observed = read_stream(path);
    const auto sidecar = truth_path(path);
    if (std::filesystem::exists(sidecar)) {
      auto gt = read_truth(sidecar);
      if (gt.config.params.a != s->observed.a) fail(ErrorKind::Format, "ground truth alphabet does not match stream");
      s->config = std::move(gt.config);
      s->truth_text = read_file(sidecar);
    }
    *out = s.release();
  });
}

void ht_stream_free(ht_stream* stream) { delete stream; }

ht_status ht_stream_length(const ht_stream* stream, size_t* out) {
  return guarded([&] {
    require(stream, "stream");
    require(out, "out");
    *out = stream->observed.tokens.size();
  });
}

ht_status ht_stream_event_count(const ht_stream* stream, size_t* out) {
  return guarded([&] {
    require(stream, "stream");
    require(out, "out");
    *out = stream->observed.events.size();
  });
}

ht_status ht_stream_alphabet(const ht_stream* stream, int32_t* a) {
  return guarded([&] {
    require(stream, "stream");
    require(a, "a");
    *a = stream->observed.a;
  });
}

ht_status ht_stream_trigger(const ht_stream* stream, char** out) {
  return guarded([&] {
    require(stream, "stream");
    require(out, "out");
    if (!stream->config) fail(ErrorKind::InvalidInput, "stream has no ground truth");
    *out = dup(render(stream->config->trigger, Alphabet::for_states(stream->config->params.a)));
  });
}

ht_status ht_stream_span_bound(const ht_stream* stream, int64_t* out) {
  return guarded([&] {
    require(stream, "stream");
    require(out, "out");
    if (!stream->config) fail(ErrorKind::InvalidInput, "stream has no ground truth");
    *out = stream->config->span_bound.value_or(-1);
  });
}

ht_status ht_dataset_from_stream(const ht_stream* stream, const int64_t* window_lengths, size_t count, int32_t l,
                                 ht_balance balance, double ratio, uint64_t seed, ht_dataset** out,
                                 int32_t* too_short) {
  return guarded([&] {
    require(stream, "stream");
    require(window_lengths, "window_lengths");
    require(out, "out");
    BalancePolicy policy;
    if (balance == HT_BALANCE_KEEP_ALL)
      policy.kind = Balance::KeepAll;
    else if (balance == HT_BALANCE_DOWNSAMPLE)
      policy.kind = Balance::DownsampleNegatives;
    else
      fail(ErrorKind::InvalidInput, "unknown balance code");
    policy.ratio = ratio;
    auto ds = window_dataset(stream->observed, std::span(window_lengths, count), l, policy, seed);
    if (too_short) *too_short = ds.status == WindowStatus::StreamTooShort ? 1 : 0;
    *out = new ht_dataset{std::move(ds.records), stream->truth_text};
  });
}

ht_status ht_dataset_write(const ht_dataset* dataset, const char* path) {
  return guarded([&] {
    require(dataset, "dataset");
    require(path, "path");
    write_dataset(path, dataset->records);
    if (dataset->truth_text) write_file(truth_path(path), *dataset->truth_text);
  });
}

ht_status ht_dataset_read(const char* path, ht_dataset** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    auto ds = std::make_unique<ht_dataset>();
    ds->records = read_dataset(path);
    const auto sidecar = truth_path(path);
    if (std::filesystem::exists(sidecar)) ds->truth_text = read_file(sidecar);
    *out = ds.release();
  });
}

void ht_dataset_free(ht_dataset* dataset) { delete dataset; }

ht_status ht_dataset_size(const ht_dataset* dataset, size_t* out) {
  return guarded([&] {
    require(dataset, "dataset");
    require(out, "out");
    *out = dataset->records.size();
  });
}

ht_status ht_dataset_positive_count(const ht_dataset* dataset, size_t* out) {
  return guarded([&] {
    require(dataset, "dataset");
    require(out, "out");
    *out = count_positive(dataset->records);
  });
}

ht_status ht_infer_file(const char* dataset_path, int32_t a, int32_t l, ht_elimination mode, uint64_t tolerance,
                        ht_report** out) {
  return guarded([&] {
    require(dataset_path, "dataset_path");
    require(out, "out");
    *out = new ht_report{infer_trigger(dataset_path, a, l, elimination_of(mode), tolerance)};
  });
}

ht_status ht_infer_dataset(const ht_dataset* dataset, int32_t a, int32_t l, ht_elimination mode, uint64_t tolerance,
                           const char* truth, ht_report** out) {
  return guarded([&] {
    require(dataset, "dataset");
    require(out, "out");
    std::optional<TriggerPattern> t;
    if (truth) {
      const ProblemParams p{a, 65535, l};
      t = parse_pattern(truth, p, Alphabet::for_states(a));
    }
    *out = new ht_report{infer_records(dataset->records, a, l, elimination_of(mode), tolerance, t)};
  });
}

void ht_report_free(ht_report* report) { delete report; }

ht_status ht_report_json(const ht_report* report, char** out) {
  return guarded([&] {
    require(report, "report");
    require(out, "out");
    *out = dup(report->report.to_json());
  });
}

ht_status ht_report_status(const ht_report* report, ht_infer_status* out) {
  return guarded([&] {
    require(report, "report");
    require(out, "out");
    switch (report->report.status) {
      case InferStatus::Ok: *out = HT_INFER_OK; break;
      case InferStatus::InsufficientData: *out = HT_INFER_INSUFFICIENT_DATA; break;
      case InferStatus::NoSurvivor: *out = HT_INFER_NO_SURVIVOR; break;
    }
  });
}

ht_status ht_report_survivor_count(const ht_report* report, size_t* out) {
  return guarded([&] {
    require(report, "report");
    require(out, "out");
    *out = report->report.table.survivors().size();
  });
}

ht_status ht_report_survivor(const ht_report* report, size_t index, char** out) {
  return guarded([&] {
    require(report, "report");
    require(out, "out");
    const auto survivors = report->report.table.survivors();
    if (index >= survivors.size()) fail(ErrorKind::InvalidInput, "survivor index out of range");
    *out = dup(report->report.render_candidate(survivors[index]));
  });
}

ht_status ht_report_truth_unique(const ht_report* report, int32_t* out) {
  return guarded([&] {
    require(report, "report");
    require(out, "out");
    *out = report->report.truth && report->report.truth->unique_survivor ? 1 : 0;
  });
}

ht_status ht_figure(int32_t which, const ht_figure_options* options, ht_tables** out) {
  return guarded([&] {
    require(options, "options");
    require(out, "out");
    FigureOptions o;
    o.params = ProblemParams{options->params.a, options->params.h, options->params.l};
    if (options->max_n >= 0) o.max_n = options->max_n;
    o.trials = options->trials;
    if (options->has_seed) o.seed = options->seed;
    *out = new ht_tables{figure(which, o)};
  });
}

void ht_tables_free(ht_tables* tables) { delete tables; }

size_t ht_tables_count(const ht_tables* tables) { return tables ? tables->tables.size() : 0; }

const char* ht_table_name(const ht_tables* tables, size_t table) {
  if (!tables || table >= tables->tables.size()) return nullptr;
  return table_at(tables, table).name.c_str();
}

size_t ht_table_column_count(const ht_tables* tables, size_t table) {
  if (!tables || table >= tables->tables.size()) return 0;
  return table_at(tables, table).columns.size();
}

const char* ht_table_column(const ht_tables* tables, size_t table, size_t column) {
  if (!tables || table >= tables->tables.size()) return nullptr;
  const auto& t = table_at(tables, table);
  return column < t.columns.size() ? t.columns[column].c_str() : nullptr;
}

size_t ht_table_row_count(const ht_tables* tables, size_t table) {
  if (!tables || table >= tables->tables.size()) return 0;
  return table_at(tables, table).rows.size();
}

double ht_table_value(const ht_tables* tables, size_t table, size_t row, size_t column) {
  if (!tables || table >= tables->tables.size()) return 0.0;
  const auto& t = table_at(tables, table);
  if (row >= t.rows.size() || column >= t.columns.size()) return 0.0;
  return t.rows[row][column];
}

ht_status ht_format_double(double value, char** out) {
  return guarded([&] {
    require(out, "out");
    *out = dup(format_double(value));
  });
}

}  // extern "C"
