/* hidtrig C API.
 *
 * Every function returns an ht_status; on failure a message is available from
 * ht_last_error() on the calling thread until the next failing call. Strings
 * returned through char** are owned by the caller and released with
 * ht_string_free. Handles are released with their *_free function; passing
 * NULL to a free function is a no-op. */
#ifndef HIDTRIG_H
#define HIDTRIG_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define HT_API __declspec(dllexport)
#else
#define HT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ht_status {
  HT_OK = 0,
  HT_ERR_INVALID_INPUT = 1,
  HT_ERR_UNSUPPORTED = 2,
  HT_ERR_UNREACHABLE = 3,
  HT_ERR_PARSE = 4,
  HT_ERR_GUARD = 5,
  HT_ERR_PRECISION = 6,
  HT_ERR_IO = 7,
  HT_ERR_FORMAT = 8,
  HT_ERR_INTERNAL = 9
} ht_status;

HT_API const char* ht_version(void);
/* snake_case name, e.g. "guard_exceeded". */
HT_API const char* ht_status_name(ht_status status);
HT_API const char* ht_last_error(void);
HT_API void ht_string_free(char* s);

typedef struct ht_params {
  int32_t a;
  int32_t h;
  int32_t l;
} ht_params;

/* ---- probability ------------------------------------------------------ */

typedef enum ht_formula {
  HT_FORMULA_BINOM = 0,
  HT_FORMULA_NEGBINOM = 1,
  HT_FORMULA_ITER = 2,
  HT_FORMULA_REC = 3,
  HT_FORMULA_REPEATED = 4,
  HT_FORMULA_SAME_HIDDEN = 5,
  HT_FORMULA_Q = 6
} ht_formula;

HT_API ht_status ht_formula_from_name(const char* name, ht_formula* out);
HT_API ht_status ht_probability(ht_formula formula, int64_t n, ht_params params, double* out);
/* Canonical "num/den" text; binom, same-hidden and q only. */
HT_API ht_status ht_probability_exact(ht_formula formula, int64_t n, ht_params params, char** out);
/* Decimal count of length-n apparent sequences avoiding a length-l pattern. */
HT_API ht_status ht_noncontaining_count(int64_t n, int32_t a, int32_t l, char** out);

/* ---- planning --------------------------------------------------------- */

typedef enum ht_window_mode {
  HT_WINDOW_PARTICULAR = 0,
  HT_WINDOW_SAME_HIDDEN = 1,
  HT_WINDOW_APPARENT = 2
} ht_window_mode;

HT_API ht_status ht_window_mode_from_name(const char* name, ht_window_mode* out);
HT_API ht_status ht_window_probability(int64_t n, ht_params params, ht_window_mode mode, double* out);
HT_API ht_status ht_min_window(double confidence, ht_params params, ht_window_mode mode, int64_t* out);

typedef enum ht_boundary { HT_BOUNDARY_EXACT = 0, HT_BOUNDARY_MPFR = 1, HT_BOUNDARY_FLOAT = 2 } ht_boundary;

HT_API const char* ht_boundary_name(ht_boundary method);

typedef struct ht_data_plan {
  int64_t window;
  int32_t a;
  int32_t l;
  double g;
  uint64_t m;
  uint64_t r;
  uint64_t total;
  uint64_t false_candidates;
  int32_t exact;
  ht_boundary m_method;
  ht_boundary r_method;
} ht_data_plan;

/* alpha is decimal or "p/q" text, read exactly. g_exact receives the exact G
 * as "num/den" when the plan is exact, otherwise NULL; pass NULL to skip. */
HT_API ht_status ht_plan_data(const char* alpha, int64_t window, int32_t a, int32_t l, int32_t force_exact,
                              ht_data_plan* out, char** g_exact);

/* ---- patterns --------------------------------------------------------- */

typedef struct ht_pattern ht_pattern;

typedef enum ht_match_mode { HT_MATCH_SUBSEQUENCE = 0, HT_MATCH_CONSECUTIVE = 1 } ht_match_mode;
typedef enum ht_constraint { HT_CONSTRAINT_FIXED = 0, HT_CONSTRAINT_SHARED = 1, HT_CONSTRAINT_IGNORE = 2 } ht_constraint;

/* Token text: "L1L3S2" (fixed), "LiLiSi" (shared), "LLS" (apparent only). */
HT_API ht_status ht_pattern_parse(const char* text, ht_params params, ht_match_mode mode, ht_pattern** out);
HT_API void ht_pattern_free(ht_pattern* pattern);
HT_API ht_status ht_pattern_render(const ht_pattern* pattern, char** out);
HT_API ht_status ht_pattern_constraint(const ht_pattern* pattern, ht_constraint* out);
HT_API ht_status ht_pattern_length(const ht_pattern* pattern, size_t* out);
/* elements: token text of an actual sequence, e.g. "L1S2L1". */
HT_API ht_status ht_pattern_contains(const ht_pattern* pattern, const char* elements, int32_t* out);

/* ---- simulation ------------------------------------------------------- */

typedef struct ht_mc_estimate {
  double estimate;
  uint64_t trials;
  double std_error;
  double ci_lo;
  double ci_hi;
} ht_mc_estimate;

/* threads = 0 uses every hardware thread; the result does not depend on it. */
HT_API ht_status ht_mc_probability(int64_t n, ht_params params, const ht_pattern* pattern, uint64_t trials,
                                   uint64_t seed, uint32_t threads, ht_mc_estimate* out);
HT_API ht_status ht_exact_enumeration(int64_t n, ht_params params, const ht_pattern* pattern, uint64_t* containing,
                                      uint64_t* total);
HT_API ht_status ht_dp_probability(int64_t n, ht_params params, double* out);

/* ---- streams ---------------------------------------------------------- */

typedef struct ht_stream ht_stream;

typedef struct ht_stream_config {
  ht_params params;
  /* NULL draws a random trigger of length l from the seed. */
  const char* trigger;
  int32_t hidden;
  ht_match_mode match;
  int64_t length;
  uint64_t seed;
  /* > 0 explicit, 0 per-trigger default, < 0 unbounded. */
  int64_t span_bound;
} ht_stream_config;

HT_API ht_status ht_stream_generate(const ht_stream_config* config, ht_stream** out);
/* Writes the observed stream and its ground-truth sidecar. */
HT_API ht_status ht_stream_write(const ht_stream* stream, const char* path);
/* Reads an observed stream; the ground truth is attached when the sidecar exists. */
HT_API ht_status ht_stream_read(const char* path, ht_stream** out);
HT_API void ht_stream_free(ht_stream* stream);
HT_API ht_status ht_stream_length(const ht_stream* stream, size_t* out);
HT_API ht_status ht_stream_event_count(const ht_stream* stream, size_t* out);
HT_API ht_status ht_stream_alphabet(const ht_stream* stream, int32_t* a);
/* Rendered trigger; HT_ERR_INVALID_INPUT when the stream has no ground truth. */
HT_API ht_status ht_stream_trigger(const ht_stream* stream, char** out);
/* -1 when unbounded. */
HT_API ht_status ht_stream_span_bound(const ht_stream* stream, int64_t* out);

/* ---- window datasets -------------------------------------------------- */

typedef struct ht_dataset ht_dataset;

typedef enum ht_balance { HT_BALANCE_KEEP_ALL = 0, HT_BALANCE_DOWNSAMPLE = 1 } ht_balance;

/* too_short (optional) is set to 1 when the stream is shorter than every
 * requested window; the dataset is then empty but the call succeeds. */
HT_API ht_status ht_dataset_from_stream(const ht_stream* stream, const int64_t* window_lengths, size_t count,
                                        int32_t l, ht_balance balance, double ratio, uint64_t seed,
                                        ht_dataset** out, int32_t* too_short);
/* JSONL; the stream's ground truth, if any, is copied next to it. */
HT_API ht_status ht_dataset_write(const ht_dataset* dataset, const char* path);
HT_API ht_status ht_dataset_read(const char* path, ht_dataset** out);
HT_API void ht_dataset_free(ht_dataset* dataset);
HT_API ht_status ht_dataset_size(const ht_dataset* dataset, size_t* out);
HT_API ht_status ht_dataset_positive_count(const ht_dataset* dataset, size_t* out);

/* ---- inference -------------------------------------------------------- */

typedef struct ht_report ht_report;

typedef enum ht_elimination { HT_ELIMINATION_STRICT = 0, HT_ELIMINATION_RANKED = 1 } ht_elimination;
typedef enum ht_infer_status { HT_INFER_OK = 0, HT_INFER_INSUFFICIENT_DATA = 1, HT_INFER_NO_SURVIVOR = 2 } ht_infer_status;

HT_API ht_status ht_infer_file(const char* dataset_path, int32_t a, int32_t l, ht_elimination mode,
                               uint64_t tolerance, ht_report** out);
/* truth: optional trigger text for the comparison block. */
HT_API ht_status ht_infer_dataset(const ht_dataset* dataset, int32_t a, int32_t l, ht_elimination mode,
                                  uint64_t tolerance, const char* truth, ht_report** out);
HT_API void ht_report_free(ht_report* report);
HT_API ht_status ht_report_json(const ht_report* report, char** out);
HT_API ht_status ht_report_status(const ht_report* report, ht_infer_status* out);
HT_API ht_status ht_report_survivor_count(const ht_report* report, size_t* out);
HT_API ht_status ht_report_survivor(const ht_report* report, size_t index, char** out);
/* 1 when ground truth was available and it is the only survivor. */
HT_API ht_status ht_report_truth_unique(const ht_report* report, int32_t* out);

/* ---- figure tables ---------------------------------------------------- */

typedef struct ht_tables ht_tables;

typedef struct ht_figure_options {
  ht_params params;
  int64_t max_n; /* < 0: per-figure default */
  uint64_t trials;
  uint64_t seed;
  int32_t has_seed;
} ht_figure_options;

HT_API ht_status ht_figure(int32_t which, const ht_figure_options* options, ht_tables** out);
HT_API void ht_tables_free(ht_tables* tables);
HT_API size_t ht_tables_count(const ht_tables* tables);
HT_API const char* ht_table_name(const ht_tables* tables, size_t table);
HT_API size_t ht_table_column_count(const ht_tables* tables, size_t table);
HT_API const char* ht_table_column(const ht_tables* tables, size_t table, size_t column);
HT_API size_t ht_table_row_count(const ht_tables* tables, size_t table);
HT_API double ht_table_value(const ht_tables* tables, size_t table, size_t row, size_t column);

/* Shortest decimal text that reads back to the same double. */
HT_API ht_status ht_format_double(double value, char** out);

#ifdef __cplusplus
}
#endif

#endif
