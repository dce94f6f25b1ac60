#include <cmath>
#include <cstring>
#include <string>

#include "doctest.h"
#include "hidtrig/hidtrig.h"
#include "support.hpp"

namespace {

// Takes ownership of a returned C string.
std::string take(char* s) {
  REQUIRE(s != nullptr);
  std::string out(s);
  ht_string_free(s);
  return out;
}

const ht_params k243{2, 4, 3};

}  // namespace

TEST_CASE("status names and last error") {
  CHECK(std::string(ht_status_name(HT_OK)) == "ok");
  CHECK(std::string(ht_status_name(HT_ERR_GUARD)) == "guard_exceeded");
  CHECK(std::string(ht_status_name(HT_ERR_IO)) == "io");
  CHECK(std::strlen(ht_version()) > 0);
  double v = 0;
  CHECK(ht_probability(HT_FORMULA_BINOM, -1, k243, &v) == HT_ERR_INVALID_INPUT);
  CHECK(std::strlen(ht_last_error()) > 0);
  CHECK(ht_probability(HT_FORMULA_BINOM, 3, k243, nullptr) == HT_ERR_INVALID_INPUT);
  ht_string_free(nullptr);
  ht_pattern_free(nullptr);
  ht_stream_free(nullptr);
  ht_dataset_free(nullptr);
  ht_report_free(nullptr);
  ht_tables_free(nullptr);
}

TEST_CASE("probabilities through the C API") {
  double v = 0;
  REQUIRE(ht_probability(HT_FORMULA_BINOM, 3, k243, &v) == HT_OK);
  CHECK(v == 1.0 / 512);
  char* s = nullptr;
  REQUIRE(ht_probability_exact(HT_FORMULA_BINOM, 3, k243, &s) == HT_OK);
  CHECK(take(s) == "1/512");
  CHECK(ht_probability_exact(HT_FORMULA_REC, 3, k243, &s) == HT_ERR_UNSUPPORTED);
  REQUIRE(ht_noncontaining_count(8, 2, 3, &s) == HT_OK);
  CHECK(take(s) == "37");
  ht_formula f{};
  REQUIRE(ht_formula_from_name("negbinom", &f) == HT_OK);
  CHECK(f == HT_FORMULA_NEGBINOM);
  CHECK(ht_formula_from_name("nope", &f) == HT_ERR_INVALID_INPUT);
  for (int n = 0; n <= 60; n += 7) {
    double b = 0, r = 0;
    REQUIRE(ht_probability(HT_FORMULA_BINOM, n, k243, &b) == HT_OK);
    REQUIRE(ht_probability(HT_FORMULA_REC, n, k243, &r) == HT_OK);
    CHECK(std::fabs(b - r) < 1e-12);
  }
  REQUIRE(ht_dp_probability(22, k243, &v) == HT_OK);
  double b = 0;
  REQUIRE(ht_probability(HT_FORMULA_BINOM, 22, k243, &b) == HT_OK);
  CHECK(std::fabs(v - b) < 1e-12);
  CHECK(ht_probability(HT_FORMULA_BINOM, 100'000'000'000LL, k243, &v) == HT_ERR_GUARD);
}

TEST_CASE("windows and data plan") {
  int64_t n = 0;
  REQUIRE(ht_min_window(0.95, k243, HT_WINDOW_SAME_HIDDEN, &n) == HT_OK);
  CHECK(n == 22);
  REQUIRE(ht_min_window(0.95, k243, HT_WINDOW_PARTICULAR, &n) == HT_OK);
  CHECK(n == 49);
  CHECK(ht_min_window(1.0, k243, HT_WINDOW_PARTICULAR, &n) == HT_ERR_UNREACHABLE);
  ht_window_mode mode{};
  REQUIRE(ht_window_mode_from_name("apparent", &mode) == HT_OK);
  REQUIRE(ht_min_window(0.95, ht_params{2, 1, 3}, mode, &n) == HT_OK);
  CHECK(n == 11);

  ht_data_plan plan{};
  char* g = nullptr;
  REQUIRE(ht_plan_data("0.05", 22, 2, 3, 0, &plan, &g) == HT_OK);
  CHECK(take(g) == "2097025/2097152");
  CHECK(plan.m == 49468);
  CHECK(plan.r == 20);
  CHECK(plan.total == 989360);
  CHECK(plan.exact == 1);
  CHECK(std::string(ht_boundary_name(plan.m_method)) == "exact");
  REQUIRE(ht_plan_data("1/20", 22, 2, 3, 0, &plan, nullptr) == HT_OK);
  CHECK(plan.m == 49468);
  CHECK(ht_plan_data("0.05", 66, 2, 3, 0, &plan, nullptr) == HT_ERR_PRECISION);
  CHECK(ht_plan_data("abc", 22, 2, 3, 0, &plan, nullptr) == HT_ERR_PARSE);
  CHECK(ht_plan_data(nullptr, 22, 2, 3, 0, &plan, nullptr) == HT_ERR_INVALID_INPUT);
}

TEST_CASE("patterns, containment and simulation") {
  ht_pattern* p = nullptr;
  REQUIRE(ht_pattern_parse("L1L1L1", k243, HT_MATCH_SUBSEQUENCE, &p) == HT_OK);
  char* s = nullptr;
  REQUIRE(ht_pattern_render(p, &s) == HT_OK);
  CHECK(take(s) == "L1L1L1");
  ht_constraint c{};
  REQUIRE(ht_pattern_constraint(p, &c) == HT_OK);
  CHECK(c == HT_CONSTRAINT_FIXED);
  size_t len = 0;
  REQUIRE(ht_pattern_length(p, &len) == HT_OK);
  CHECK(len == 3);
  int32_t hit = -1;
  REQUIRE(ht_pattern_contains(p, "L1S2L1S1L1", &hit) == HT_OK);
  CHECK(hit == 1);
  REQUIRE(ht_pattern_contains(p, "L1L2L1", &hit) == HT_OK);
  CHECK(hit == 0);
  CHECK(ht_pattern_contains(p, "L9", &hit) == HT_ERR_PARSE);

  uint64_t containing = 0, total = 0;
  REQUIRE(ht_exact_enumeration(3, k243, p, &containing, &total) == HT_OK);
  CHECK(containing == 1);
  CHECK(total == 512);

  ht_mc_estimate a{}, b{};
  REQUIRE(ht_mc_probability(10, k243, p, 5000, 9, 1, &a) == HT_OK);
  REQUIRE(ht_mc_probability(10, k243, p, 5000, 9, 3, &b) == HT_OK);
  CHECK(a.estimate == b.estimate);
  CHECK(a.trials == 5000);
  ht_pattern_free(p);

  CHECK(ht_pattern_parse("L1X", k243, HT_MATCH_SUBSEQUENCE, &p) == HT_ERR_PARSE);
  CHECK(ht_pattern_parse(nullptr, k243, HT_MATCH_SUBSEQUENCE, &p) == HT_ERR_INVALID_INPUT);
}

TEST_CASE("stream, dataset and inference round trip") {
  const auto dir = test_support::scratch("capi_pipeline");
  const std::string stream_path = (dir / "s.txt").string();
  const std::string data_path = (dir / "d.jsonl").string();

  ht_stream_config cfg{};
  cfg.params = ht_params{2, 1, 3};
  cfg.trigger = "SLS";
  cfg.hidden = 0;
  cfg.match = HT_MATCH_SUBSEQUENCE;
  cfg.length = 40000;
  cfg.seed = 4;
  cfg.span_bound = 11;
  ht_stream* st = nullptr;
  REQUIRE(ht_stream_generate(&cfg, &st) == HT_OK);
  size_t len = 0, events = 0;
  REQUIRE(ht_stream_length(st, &len) == HT_OK);
  REQUIRE(ht_stream_event_count(st, &events) == HT_OK);
  CHECK(len == 40000);
  CHECK(events > 0);
  int64_t span = 0;
  REQUIRE(ht_stream_span_bound(st, &span) == HT_OK);
  CHECK(span == 11);
  REQUIRE(ht_stream_write(st, stream_path.c_str()) == HT_OK);
  ht_stream_free(st);

  ht_stream* back = nullptr;
  REQUIRE(ht_stream_read(stream_path.c_str(), &back) == HT_OK);
  char* trig = nullptr;
  REQUIRE(ht_stream_trigger(back, &trig) == HT_OK);
  CHECK(take(trig) == "SLS");
  int32_t a = 0;
  REQUIRE(ht_stream_alphabet(back, &a) == HT_OK);
  CHECK(a == 2);

  const int64_t lengths[] = {11};
  ht_dataset* ds = nullptr;
  int32_t too_short = -1;
  REQUIRE(ht_dataset_from_stream(back, lengths, 1, 3, HT_BALANCE_DOWNSAMPLE, 1.0, 4, &ds, &too_short) == HT_OK);
  CHECK(too_short == 0);
  size_t size = 0, pos = 0;
  REQUIRE(ht_dataset_size(ds, &size) == HT_OK);
  REQUIRE(ht_dataset_positive_count(ds, &pos) == HT_OK);
  CHECK(pos > 0);
  CHECK(size - pos <= pos + 1);
  REQUIRE(ht_dataset_write(ds, data_path.c_str()) == HT_OK);

  ht_report* rep = nullptr;
  REQUIRE(ht_infer_file(data_path.c_str(), 2, 3, HT_ELIMINATION_STRICT, 0, &rep) == HT_OK);
  ht_infer_status status{};
  REQUIRE(ht_report_status(rep, &status) == HT_OK);
  CHECK(status == HT_INFER_OK);
  size_t nsurv = 0;
  REQUIRE(ht_report_survivor_count(rep, &nsurv) == HT_OK);
  REQUIRE(nsurv >= 1);
  bool found = false;
  for (size_t i = 0; i < nsurv; ++i) {
    char* name = nullptr;
    REQUIRE(ht_report_survivor(rep, i, &name) == HT_OK);
    found = found || take(name) == "SLS";
  }
  CHECK(found);
  int32_t unique = -1;
  REQUIRE(ht_report_truth_unique(rep, &unique) == HT_OK);
  CHECK(unique == (nsurv == 1 ? 1 : 0));
  char* json = nullptr;
  REQUIRE(ht_report_json(rep, &json) == HT_OK);
  CHECK(take(json).find("\"survivors\"") != std::string::npos);
  char* none = nullptr;
  CHECK(ht_report_survivor(rep, nsurv, &none) == HT_ERR_INVALID_INPUT);
  ht_report_free(rep);

  ht_dataset* again = nullptr;
  REQUIRE(ht_dataset_read(data_path.c_str(), &again) == HT_OK);
  REQUIRE(ht_infer_dataset(again, 2, 3, HT_ELIMINATION_RANKED, 0, "SLS", &rep) == HT_OK);
  REQUIRE(ht_report_survivor_count(rep, &nsurv) == HT_OK);
  CHECK(nsurv >= 1);
  ht_report_free(rep);
  ht_dataset_free(again);

  CHECK(ht_dataset_read((dir / "missing.jsonl").string().c_str(), &again) == HT_ERR_IO);
  CHECK(ht_infer_file(data_path.c_str(), 3, 3, HT_ELIMINATION_STRICT, 0, &rep) != HT_OK);
  ht_dataset_free(ds);
  ht_stream_free(back);
}

TEST_CASE("figure tables and number formatting") {
  ht_figure_options o{};
  o.params = k243;
  o.max_n = 30;
  ht_tables* t = nullptr;
  REQUIRE(ht_figure(8, &o, &t) == HT_OK);
  REQUIRE(ht_tables_count(t) == 1);
  CHECK(std::string(ht_table_name(t, 0)) == "fig8");
  const size_t cols = ht_table_column_count(t, 0);
  CHECK(cols == 6);
  CHECK(std::string(ht_table_column(t, 0, 0)) == "n");
  CHECK(ht_table_row_count(t, 0) == 31);
  CHECK(ht_table_value(t, 0, 3, 1) == 1.0 / 512);
  for (size_t r = 0; r < ht_table_row_count(t, 0); ++r)
    for (size_t c = 2; c < cols; ++c) CHECK(std::fabs(ht_table_value(t, 0, r, c) - ht_table_value(t, 0, r, 1)) < 1e-9);
  ht_tables_free(t);

  CHECK(ht_figure(1, &o, &t) == HT_ERR_INVALID_INPUT);
  CHECK(ht_figure(5, &o, &t) == HT_ERR_INVALID_INPUT);

  char* s = nullptr;
  REQUIRE(ht_format_double(0.1, &s) == HT_OK);
  CHECK(take(s) == "0.1");
  REQUIRE(ht_format_double(1.0 / 3, &s) == HT_OK);
  const std::string third = take(s);
  CHECK(std::stod(third) == 1.0 / 3);
}
