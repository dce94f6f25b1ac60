// Command-line front end. Talks to the library only through hidtrig.h.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hidtrig/hidtrig.h"
#include "json.hpp"

using nlohmann::json;

namespace {

struct Failure {
  ht_status status;
  std::string message;
};

void check(ht_status s) {
  if (s != HT_OK) throw Failure{s, ht_last_error()};
}

int exit_code(ht_status s) {
  switch (s) {
    case HT_OK: return 0;
    case HT_ERR_GUARD:
    case HT_ERR_PRECISION: return 2;
    case HT_ERR_IO:
    case HT_ERR_FORMAT: return 3;
    default: return 1;
  }
}

std::string num(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

struct CString {
  char* p = nullptr;
  ~CString() { ht_string_free(p); }
  std::string str() const { return p ? std::string(p) : std::string(); }
};

template <class T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(p); }
};

using Pattern = Handle<ht_pattern, ht_pattern_free>;
using Stream = Handle<ht_stream, ht_stream_free>;
using Dataset = Handle<ht_dataset, ht_dataset_free>;
using Report = Handle<ht_report, ht_report_free>;
using Tables = Handle<ht_tables, ht_tables_free>;

// JSON text with doubles in the same shortest round-trip form as the csv.
void emit(std::ostream& out, const json& j) {
  switch (j.type()) {
    case json::value_t::object: {
      out << '{';
      bool first = true;
      for (const auto& [k, v] : j.items()) {
        if (!first) out << ',';
        first = false;
        out << json(k).dump() << ':';
        emit(out, v);
      }
      out << '}';
      break;
    }
    case json::value_t::array: {
      out << '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out << ',';
        emit(out, j[i]);
      }
      out << ']';
      break;
    }
    case json::value_t::number_float: {
      const double v = j.get<double>();
      out << (std::isfinite(v) ? num(v) : "null");
      break;
    }
    default: out << j.dump();
  }
}

std::string emit(const json& j) {
  std::ostringstream s;
  emit(s, j);
  return s.str();
}

enum class Format { Csv, Json };

struct Common {
  int a = 2;
  int h = 4;
  int l = 3;
  std::string format = "csv";

  Format fmt() const { return format == "json" ? Format::Json : Format::Csv; }
  ht_params params() const { return {a, h, l}; }
};

// --h is the hidden-state count, so help is long-form only.
void add_params(CLI::App* cmd, Common& c) {
  cmd->set_help_flag("--help", "Print this help message and exit");
  cmd->add_option("--a", c.a, "apparent states")->capture_default_str();
  cmd->add_option("--h", c.h, "hidden states")->capture_default_str();
  cmd->add_option("--l", c.l, "trigger length")->capture_default_str();
}

void add_format(CLI::App* cmd, Common& c) {
  cmd->add_option("--format", c.format, "output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
}

// csv: a header line and one row; json: one object. Values are preformatted
// json so that both forms share one number rendering.
void print_record(std::ostream& out, Format f, const std::vector<std::pair<std::string, json>>& fields) {
  if (f == Format::Json) {
    json j = json::object();
    for (const auto& [k, v] : fields) j[k] = v;
    out << emit(j) << '\n';
    return;
  }
  for (std::size_t i = 0; i < fields.size(); ++i) out << (i ? "," : "") << fields[i].first;
  out << '\n';
  for (std::size_t i = 0; i < fields.size(); ++i) {
    const auto& v = fields[i].second;
    out << (i ? "," : "");
    if (v.is_string())
      out << v.get<std::string>();
    else if (!v.is_null())
      out << emit(v);
  }
  out << '\n';
}

ht_formula formula(const std::string& name) {
  ht_formula f;
  check(ht_formula_from_name(name.c_str(), &f));
  return f;
}

ht_window_mode window_mode(const std::string& name) {
  ht_window_mode m;
  check(ht_window_mode_from_name(name.c_str(), &m));
  return m;
}

ht_match_mode match_mode(const std::string& name) {
  if (name == "consecutive") return HT_MATCH_CONSECUTIVE;
  return HT_MATCH_SUBSEQUENCE;
}

std::string default_pattern(const Common& c) {
  const std::string token = std::string(1, c.a == 2 ? 'L' : 'A') + "1";
  std::string out;
  for (int i = 0; i < c.l; ++i) out += token;
  return out;
}

// ---------------------------------------------------------------------------

struct ProbArgs {
  Common c;
  std::int64_t n = 0;
  std::string formula = "binom";
  bool exact = false;
};

void run_prob(const ProbArgs& o) {
  const auto f = formula(o.formula);
  double v = 0;
  check(ht_probability(f, o.n, o.c.params(), &v));
  CString exact;
  if (o.exact) check(ht_probability_exact(f, o.n, o.c.params(), &exact.p));
  if (o.c.fmt() == Format::Json) {
    std::vector<std::pair<std::string, json>> fields{{"formula", o.formula}, {"n", o.n},     {"a", o.c.a},
                                                     {"h", o.c.h},           {"l", o.c.l},   {"value", v}};
    if (o.exact) fields.emplace_back("exact", exact.str());
    print_record(std::cout, Format::Json, fields);
    return;
  }
  std::cout << num(v);
  if (o.exact) std::cout << ',' << exact.str();
  std::cout << '\n';
}

struct WindowArgs {
  Common c;
  double confidence = 0.95;
  std::string mode = "same-hidden";
};

void run_window(const WindowArgs& o) {
  const auto m = window_mode(o.mode);
  std::int64_t n = 0;
  check(ht_min_window(o.confidence, o.c.params(), m, &n));
  double at = 0, before = 0;
  check(ht_window_probability(n, o.c.params(), m, &at));
  check(ht_window_probability(n - 1, o.c.params(), m, &before));
  if (o.c.fmt() == Format::Csv) {
    std::cout << n << '\n';
    return;
  }
  print_record(std::cout, Format::Json,
               {{"mode", o.mode}, {"confidence", o.confidence}, {"a", o.c.a}, {"h", o.c.h}, {"l", o.c.l},
                {"window", n}, {"probability", at}, {"previous", before}});
}

struct DatasizeArgs {
  Common c;
  std::int64_t n = 22;
  std::string alpha = "0.05";
  bool exact = false;
};

void run_datasize(const DatasizeArgs& o) {
  ht_data_plan plan{};
  CString g_exact;
  check(ht_plan_data(o.alpha.c_str(), o.n, o.c.a, o.c.l, o.exact ? 1 : 0, &plan, &g_exact.p));
  print_record(std::cout, o.c.fmt(),
               {{"alpha", o.alpha},
                {"window", plan.window},
                {"a", plan.a},
                {"l", plan.l},
                {"G", plan.g},
                {"G_exact", g_exact.p ? json(g_exact.str()) : json(nullptr)},
                {"m", plan.m},
                {"r", plan.r},
                {"total", plan.total},
                {"false_candidates", plan.false_candidates},
                {"exact", plan.exact != 0},
                {"m_method", ht_boundary_name(plan.m_method)},
                {"r_method", ht_boundary_name(plan.r_method)}});
}

struct SimulateArgs {
  Common c;
  std::int64_t n = 22;
  std::uint64_t trials = 1000;
  std::uint64_t seed = 0;
  std::string pattern;
  std::string match = "subsequence";
  unsigned threads = 0;
};

void run_simulate(const SimulateArgs& o) {
  const auto text = o.pattern.empty() ? default_pattern(o.c) : o.pattern;
  Pattern p;
  check(ht_pattern_parse(text.c_str(), o.c.params(), match_mode(o.match), &p.p));
  ht_constraint constraint;
  check(ht_pattern_constraint(p.p, &constraint));
  ht_mc_estimate mc{};
  check(ht_mc_probability(o.n, o.c.params(), p.p, o.trials, o.seed, o.threads, &mc));
  CString rendered;
  check(ht_pattern_render(p.p, &rendered.p));

  json analytic = nullptr;
  std::string analytic_name = "none";
  if (match_mode(o.match) == HT_MATCH_SUBSEQUENCE) {
    ht_formula f = HT_FORMULA_BINOM;
    ht_params params = o.c.params();
    if (constraint == HT_CONSTRAINT_SHARED) f = HT_FORMULA_SAME_HIDDEN;
    if (constraint == HT_CONSTRAINT_IGNORE) f = HT_FORMULA_Q;
    double v = 0;
    check(ht_probability(f, o.n, params, &v));
    analytic = v;
    analytic_name = f == HT_FORMULA_BINOM ? "binom" : f == HT_FORMULA_Q ? "q" : "same-hidden";
  }
  print_record(std::cout, o.c.fmt(),
               {{"pattern", rendered.str()},
                {"match", o.match},
                {"n", o.n},
                {"trials", mc.trials},
                {"seed", o.seed},
                {"estimate", mc.estimate},
                {"std_error", mc.std_error},
                {"ci_lo", mc.ci_lo},
                {"ci_hi", mc.ci_hi},
                {"analytic_formula", analytic_name},
                {"analytic", analytic}});
}

struct GenerateArgs {
  Common c;
  std::int64_t length = 100000;
  std::uint64_t seed = 0;
  std::string scenario = "subsequence-hidden";
  std::string pattern;
  std::string span_bound = "default";
  std::string out;
};

std::int64_t parse_span_bound(const std::string& text) {
  if (text == "default") return 0;
  if (text == "none") return -1;
  std::int64_t v = 0;
  const auto* end = text.data() + text.size();
  const auto r = std::from_chars(text.data(), end, v);
  if (r.ec != std::errc{} || r.ptr != end || v <= 0)
    throw Failure{HT_ERR_INVALID_INPUT, "--span-bound expects a positive integer, 'default' or 'none'"};
  return v;
}

void run_generate(const GenerateArgs& o) {
  ht_stream_config cfg{};
  cfg.params = o.c.params();
  cfg.trigger = o.pattern.empty() ? nullptr : o.pattern.c_str();
  cfg.hidden = o.scenario.ends_with("-hidden") && !o.scenario.ends_with("-nohidden");
  cfg.match = o.scenario.starts_with("consecutive") ? HT_MATCH_CONSECUTIVE : HT_MATCH_SUBSEQUENCE;
  cfg.length = o.length;
  cfg.seed = o.seed;
  cfg.span_bound = parse_span_bound(o.span_bound);
  Stream s;
  check(ht_stream_generate(&cfg, &s.p));
  check(ht_stream_write(s.p, o.out.c_str()));
  std::size_t events = 0;
  std::int64_t span = 0;
  CString trigger;
  check(ht_stream_event_count(s.p, &events));
  check(ht_stream_span_bound(s.p, &span));
  check(ht_stream_trigger(s.p, &trigger.p));
  print_record(std::cout, o.c.fmt(),
               {{"path", o.out},
                {"scenario", o.scenario},
                {"length", o.length},
                {"events", events},
                {"trigger", trigger.str()},
                {"span_bound", span < 0 ? json(nullptr) : json(span)}});
}

struct WindowsArgs {
  Common c;
  std::string stream;
  std::vector<std::int64_t> lengths{22};
  std::string balance = "keep-all";
  double ratio = 1.0;
  std::uint64_t seed = 0;
  std::string out;
};

void run_windows(const WindowsArgs& o) {
  Stream s;
  check(ht_stream_read(o.stream.c_str(), &s.p));
  Dataset d;
  int too_short = 0;
  const auto balance = o.balance == "downsample" ? HT_BALANCE_DOWNSAMPLE : HT_BALANCE_KEEP_ALL;
  check(ht_dataset_from_stream(s.p, o.lengths.data(), o.lengths.size(), o.c.l, balance, o.ratio, o.seed, &d.p,
                               &too_short));
  check(ht_dataset_write(d.p, o.out.c_str()));
  std::size_t size = 0, positives = 0;
  check(ht_dataset_size(d.p, &size));
  check(ht_dataset_positive_count(d.p, &positives));
  print_record(std::cout, o.c.fmt(),
               {{"path", o.out},
                {"records", size},
                {"positives", positives},
                {"status", too_short ? "stream_too_short" : "ok"}});
}

struct InferArgs {
  Common c;
  std::string dataset;
  std::string mode = "strict";
  std::uint64_t tolerance = 0;
};

void run_infer(const InferArgs& o) {
  Report r;
  const auto mode = o.mode == "ranked" ? HT_ELIMINATION_RANKED : HT_ELIMINATION_STRICT;
  check(ht_infer_file(o.dataset.c_str(), o.c.a, o.c.l, mode, o.tolerance, &r.p));
  CString text;
  check(ht_report_json(r.p, &text.p));
  const auto doc = json::parse(text.str());
  if (o.c.fmt() == Format::Json) {
    std::cout << emit(doc) << '\n';
    return;
  }
  // Ranked candidate table; survivors first.
  std::cout << "pattern,miss_count,eliminated,survivor\n";
  const auto& survivors = doc.at("survivors");
  for (const auto& c : doc.at("candidates")) {
    const auto pattern = c.at("pattern").get<std::string>();
    const bool survivor = std::find(survivors.begin(), survivors.end(), json(pattern)) != survivors.end();
    std::cout << pattern << ',' << c.at("miss_count").get<std::uint64_t>() << ','
              << (c.at("eliminated").get<bool>() ? "true" : "false") << ',' << (survivor ? "true" : "false") << '\n';
  }
  std::cerr << "status: " << doc.at("status").get<std::string>() << ", positives: " << doc.at("positives")
            << ", survivors: " << survivors.size();
  if (!doc.at("truth").is_null())
    std::cerr << ", truth: " << doc["truth"].at("apparent").get<std::string>()
              << (doc["truth"].at("unique_survivor").get<bool>() ? " (unique survivor)" : "");
  std::cerr << '\n';
}

struct FiguresArgs {
  Common c;
  int which = 8;
  std::optional<std::int64_t> max_n;
  std::uint64_t trials = 1000;
  std::optional<std::uint64_t> seed;
  std::string out;
};

void write_table_csv(std::ostream& out, const ht_tables* t, std::size_t k) {
  const auto cols = ht_table_column_count(t, k);
  for (std::size_t c = 0; c < cols; ++c) out << (c ? "," : "") << ht_table_column(t, k, c);
  out << '\n';
  for (std::size_t r = 0; r < ht_table_row_count(t, k); ++r) {
    for (std::size_t c = 0; c < cols; ++c) out << (c ? "," : "") << num(ht_table_value(t, k, r, c));
    out << '\n';
  }
}

json table_json(const ht_tables* t, std::size_t k) {
  json cols = json::array();
  for (std::size_t c = 0; c < ht_table_column_count(t, k); ++c) cols.push_back(ht_table_column(t, k, c));
  json rows = json::array();
  for (std::size_t r = 0; r < ht_table_row_count(t, k); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < cols.size(); ++c) row.push_back(ht_table_value(t, k, r, c));
    rows.push_back(std::move(row));
  }
  return {{"name", ht_table_name(t, k)}, {"columns", cols}, {"rows", rows}};
}

void run_figures(const FiguresArgs& o) {
  ht_figure_options opt{};
  opt.params = o.c.params();
  opt.max_n = o.max_n.value_or(-1);
  opt.trials = o.trials;
  opt.has_seed = o.seed.has_value();
  opt.seed = o.seed.value_or(0);
  Tables t;
  check(ht_figure(o.which, &opt, &t.p));
  const auto count = ht_tables_count(t.p);
  const bool json_out = o.c.fmt() == Format::Json;

  if (!o.out.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(o.out, ec);
    if (ec) throw Failure{HT_ERR_IO, "cannot create directory " + o.out + ": " + ec.message()};
    for (std::size_t k = 0; k < count; ++k) {
      const auto path = std::filesystem::path(o.out) / (std::string(ht_table_name(t.p, k)) + (json_out ? ".json" : ".csv"));
      std::ofstream f(path, std::ios::binary);
      if (!f) throw Failure{HT_ERR_IO, "cannot open " + path.string()};
      if (json_out)
        f << emit(table_json(t.p, k)) << '\n';
      else
        write_table_csv(f, t.p, k);
      if (!f.flush()) throw Failure{HT_ERR_IO, "write failed: " + path.string()};
      std::cout << path.string() << '\n';
    }
    return;
  }
  if (json_out) {
    json tables = json::array();
    for (std::size_t k = 0; k < count; ++k) tables.push_back(table_json(t.p, k));
    std::cout << emit(json{{"figure", o.which}, {"tables", tables}}) << '\n';
    return;
  }
  for (std::size_t k = 0; k < count; ++k) {
    if (count > 1) std::cout << (k ? "\n" : "") << "# " << ht_table_name(t.p, k) << '\n';
    write_table_csv(std::cout, t.p, k);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hidden-state trigger probability, data planning, simulation and inference"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ht_version()));

  ProbArgs prob;
  auto* cmd_prob = app.add_subcommand("prob", "Trigger occurrence probability in a window of n elements");
  add_params(cmd_prob, prob.c);
  add_format(cmd_prob, prob.c);
  cmd_prob->add_option("--n", prob.n, "window length")->required();
  cmd_prob->add_option("--formula", prob.formula)
      ->check(CLI::IsMember({"binom", "negbinom", "iter", "rec", "repeated", "same-hidden", "q"}))
      ->capture_default_str();
  cmd_prob->add_flag("--exact", prob.exact, "also print the exact rational");

  WindowArgs window;
  auto* cmd_window = app.add_subcommand("window", "Smallest window reaching a containment confidence");
  add_params(cmd_window, window.c);
  add_format(cmd_window, window.c);
  cmd_window->add_option("--confidence", window.confidence)->capture_default_str();
  cmd_window->add_option("--mode", window.mode)
      ->check(CLI::IsMember({"particular", "same-hidden", "apparent"}))
      ->capture_default_str();

  DatasizeArgs datasize;
  auto* cmd_datasize = app.add_subcommand("datasize", "Positive windows needed to isolate the trigger");
  add_params(cmd_datasize, datasize.c);
  add_format(cmd_datasize, datasize.c);
  cmd_datasize->add_option("--n", datasize.n, "window length")->capture_default_str();
  cmd_datasize->add_option("--alpha", datasize.alpha, "risk, decimal or p/q")->capture_default_str();
  cmd_datasize->add_flag("--exact", datasize.exact, "exact rational G for any window length");

  SimulateArgs simulate;
  auto* cmd_simulate = app.add_subcommand("simulate", "Monte Carlo containment estimate next to the closed form");
  add_params(cmd_simulate, simulate.c);
  add_format(cmd_simulate, simulate.c);
  cmd_simulate->add_option("--n", simulate.n, "window length")->capture_default_str();
  cmd_simulate->add_option("--trials", simulate.trials)->capture_default_str();
  cmd_simulate->add_option("--seed", simulate.seed)->required();
  cmd_simulate->add_option("--pattern", simulate.pattern, "trigger tokens (default: first symbol repeated, hidden 1)");
  cmd_simulate->add_option("--match", simulate.match)
      ->check(CLI::IsMember({"subsequence", "consecutive"}))
      ->capture_default_str();
  cmd_simulate->add_option("--threads", simulate.threads, "0 = all cores")->capture_default_str();

  GenerateArgs generate;
  auto* cmd_generate = app.add_subcommand("generate", "Synthetic stream with trigger-caused events");
  add_params(cmd_generate, generate.c);
  add_format(cmd_generate, generate.c);
  cmd_generate->add_option("--length", generate.length)->capture_default_str();
  cmd_generate->add_option("--seed", generate.seed)->required();
  cmd_generate->add_option("--scenario", generate.scenario)
      ->check(CLI::IsMember({"consecutive-hidden", "consecutive-nohidden", "subsequence-hidden", "subsequence-nohidden"}))
      ->capture_default_str();
  cmd_generate->add_option("--pattern", generate.pattern, "trigger tokens (default: random from the seed)");
  cmd_generate->add_option("--span-bound", generate.span_bound, "integer, 'default' or 'none'")->capture_default_str();
  cmd_generate->add_option("--out", generate.out, "stream path")->required();

  WindowsArgs windows;
  auto* cmd_windows = app.add_subcommand("windows", "Labelled windows from a stream");
  add_params(cmd_windows, windows.c);
  add_format(cmd_windows, windows.c);
  cmd_windows->add_option("--stream", windows.stream)->required();
  cmd_windows->add_option("--window-lengths", windows.lengths, "comma separated")->delimiter(',')->capture_default_str();
  cmd_windows->add_option("--balance", windows.balance)
      ->check(CLI::IsMember({"keep-all", "downsample"}))
      ->capture_default_str();
  cmd_windows->add_option("--ratio", windows.ratio, "negatives kept per positive")->capture_default_str();
  cmd_windows->add_option("--seed", windows.seed)->required();
  cmd_windows->add_option("--out", windows.out, "dataset path")->required();

  InferArgs infer;
  auto* cmd_infer = app.add_subcommand("infer", "Candidate elimination over positive windows");
  add_params(cmd_infer, infer.c);
  add_format(cmd_infer, infer.c);
  cmd_infer->add_option("--dataset", infer.dataset)->required();
  cmd_infer->add_option("--mode", infer.mode)->check(CLI::IsMember({"strict", "ranked"}))->capture_default_str();
  cmd_infer->add_option("--tolerance", infer.tolerance, "misses allowed before elimination")->capture_default_str();

  FiguresArgs figures;
  auto* cmd_figures = app.add_subcommand("figures", "Data tables behind the figures");
  add_params(cmd_figures, figures.c);
  add_format(cmd_figures, figures.c);
  cmd_figures->add_option("--which", figures.which)->check(CLI::IsMember({1, 2, 3, 8}))->capture_default_str();
  cmd_figures->add_option("--n", figures.max_n, "largest n (per-figure default)");
  cmd_figures->add_option("--trials", figures.trials)->capture_default_str();
  cmd_figures->add_option("--seed", figures.seed, "required by figure 1");
  cmd_figures->add_option("--out", figures.out, "write one file per table into this directory");

  const bool json_errors = [&] {
    for (int i = 1; i + 1 < argc; ++i)
      if (std::string(argv[i]) == "--format" && std::string(argv[i + 1]) == "json") return true;
    for (int i = 1; i < argc; ++i)
      if (std::string(argv[i]) == "--format=json") return true;
    return false;
  }();

  auto report = [&](ht_status status, const std::string& code, const std::string& message) {
    if (json_errors)
      std::cerr << json{{"error", {{"code", code}, {"message", message}}}}.dump() << '\n';
    else
      std::cerr << "error: " << message << '\n';
    return exit_code(status);
  };

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report(HT_ERR_INVALID_INPUT, "invalid_arguments", e.what());
  }

  try {
    if (cmd_figures->parsed() && figures.which == 1 && !figures.seed)
      throw Failure{HT_ERR_INVALID_INPUT, "figure 1 is stochastic: --seed is required"};
    if (cmd_prob->parsed()) run_prob(prob);
    if (cmd_window->parsed()) run_window(window);
    if (cmd_datasize->parsed()) run_datasize(datasize);
    if (cmd_simulate->parsed()) run_simulate(simulate);
    if (cmd_generate->parsed()) run_generate(generate);
    if (cmd_windows->parsed()) run_windows(windows);
    if (cmd_infer->parsed()) run_infer(infer);
    if (cmd_figures->parsed()) run_figures(figures);
  } catch (const Failure& f) {
    return report(f.status, ht_status_name(f.status), f.message);
  } catch (const std::exception& e) {
    return report(HT_ERR_INTERNAL, "internal", e.what());
  }
  std::cout.flush();
  if (!std::cout) return report(HT_ERR_IO, "io", "cannot write to standard output");
  return 0;
}
