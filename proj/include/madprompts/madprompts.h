#ifndef MADPROMPTS_MADPROMPTS_H
#define MADPROMPTS_MADPROMPTS_H

#include <stddef.h>

#if defined(MADP_BUILDING_LIBRARY)
#define MADP_API __attribute__((visibility("default")))
#else
#define MADP_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum madp_status {
  MADP_OK = 0,
  MADP_ERR_INVALID_ARGUMENT = 1,
  MADP_ERR_ZERO_NORM = 2,
  MADP_ERR_DIMENSION_MISMATCH = 3,
  MADP_ERR_EMPTY_IMAGE = 4,
  MADP_ERR_IMAGE_DECODE = 5,
  MADP_ERR_BACKEND_UNAVAILABLE = 6,
  MADP_ERR_KEY_MISSING = 7,
  MADP_ERR_TOKENIZATION_OVERFLOW = 8,
  MADP_ERR_MALFORMED_TEMPLATE = 9,
  MADP_ERR_DEGENERATE_CLASS_COUNTS = 10,
  MADP_ERR_EMPTY_LIST = 11,
  MADP_ERR_CONFIG = 12,
  MADP_ERR_DATA = 13,
  MADP_ERR_MISSING_EMBEDDING = 14,
  MADP_ERR_IO = 15,
  MADP_ERR_FAILURE_BUDGET = 16, /* embed: more than 1% of samples failed */
  MADP_ERR_BUFFER_TOO_SMALL = 17,
  MADP_ERR_INTERNAL = 99
} madp_status;

typedef enum madp_label { MADP_BONA_FIDE = 0, MADP_ATTACK = 1 } madp_label;

typedef enum madp_fixed_metric { MADP_FIX_BPCER = 0, MADP_FIX_APCER = 1 } madp_fixed_metric;

typedef enum madp_log_level {
  MADP_LOG_DEBUG = 0,
  MADP_LOG_INFO = 1,
  MADP_LOG_WARN = 2,
  MADP_LOG_ERROR = 3
} madp_log_level;

MADP_API const char* madp_version(void);
MADP_API const char* madp_status_string(madp_status status);

/* Message of the last failed call on this thread; "" after a success. */
MADP_API const char* madp_last_error(void);

/* 0 success, 2 config, 3 data, 4 backend, 1 anything else. */
MADP_API int madp_exit_code(madp_status status);

typedef void (*madp_log_fn)(madp_log_level level, const char* message, void* user);
/* NULL restores logging to stderr. */
MADP_API void madp_set_log_callback(madp_log_fn fn, void* user);

/* ---- string lists ---- */

typedef struct madp_strlist madp_strlist;
MADP_API size_t madp_strlist_size(const madp_strlist* list);
MADP_API const char* madp_strlist_get(const madp_strlist* list, size_t index);
MADP_API void madp_strlist_destroy(madp_strlist* list);

/* ---- run configuration ---- */

typedef struct madp_config madp_config;
MADP_API madp_status madp_config_create(madp_config** out);
MADP_API void madp_config_destroy(madp_config* config);
/* Same keys as the config file: manifest, backend, cache, text_cache, out,
   text_out, selector, dot, norm, normalize_before_average, aggregate_raw,
   preserve_aspect, check_paths, workers, preset. */
MADP_API madp_status madp_config_set(madp_config* config, const char* key, const char* value);
MADP_API madp_status madp_config_load_file(madp_config* config, const char* path);
MADP_API madp_status madp_preset_names(madp_strlist** out);
MADP_API madp_status madp_selector_names(madp_strlist** out);

/* ---- embedding backends ---- */

typedef struct madp_backend madp_backend;
/* text_cache may be NULL: prompt lookups then use the image cache. */
MADP_API madp_status madp_backend_open_cache(const char* image_cache, const char* text_cache,
                                             madp_backend** out);
MADP_API madp_status madp_backend_open_neural(const char* directory, madp_backend** out);
MADP_API void madp_backend_close(madp_backend* backend);
MADP_API size_t madp_backend_dim(const madp_backend* backend);

/* Raw embeddings; out must hold madp_backend_dim() values. */
MADP_API madp_status madp_backend_embed_text(const madp_backend* backend, const char* prompt,
                                             double* out, size_t capacity);
MADP_API madp_status madp_backend_embed_key(const madp_backend* backend, const char* sample_id,
                                            double* out, size_t capacity);
/* Neural backends only. norm is "clip" or "half"; NULL means "clip". */
MADP_API madp_status madp_backend_embed_file(const madp_backend* backend, const char* path,
                                             const char* norm, double* out, size_t capacity);

/* ---- prompt prototypes and scoring ---- */

typedef struct madp_prototype madp_prototype;
MADP_API madp_status madp_prototype_build(const madp_backend* backend, const char* selector,
                                          int dot_mode, int normalize_before_average,
                                          madp_prototype** out);
/* Unit-normalizes both vectors. */
MADP_API madp_status madp_prototype_from_vectors(const double* bona_fide, const double* attack,
                                                 size_t dim, madp_prototype** out);
MADP_API void madp_prototype_destroy(madp_prototype* proto);
MADP_API size_t madp_prototype_dim(const madp_prototype* proto);
MADP_API size_t madp_prototype_prompt_count(const madp_prototype* proto);
MADP_API madp_status madp_prototype_vectors(const madp_prototype* proto, double* bona_fide,
                                            double* attack, size_t capacity);

/* Mean of count row-major embeddings, optionally normalizing each first,
   then renormalized. */
MADP_API madp_status madp_aggregate(const double* embeddings, size_t count, size_t dim,
                                    int normalize_before_average, double* out);

/* score = cos(e, attack) - cos(e, bona fide); decision is a madp_label. */
MADP_API madp_status madp_score(const madp_prototype* proto, const double* image_embedding,
                                size_t dim, double* score, int* decision);

/* ---- metrics (percent) ---- */

MADP_API madp_status madp_eer(const double* bona_fide, size_t n_bona_fide, const double* attack,
                              size_t n_attack, double* eer);
MADP_API madp_status madp_error_at_fixed(const double* bona_fide, size_t n_bona_fide,
                                         const double* attack, size_t n_attack,
                                         madp_fixed_metric fix, double target_percent,
                                         double* value, double* threshold, int* constraint_met);

/* ---- commands ---- */

typedef struct madp_embed_result {
  size_t total;
  size_t written;
  size_t failed;
  size_t text_written;
} madp_embed_result;

/* Writes the cache even when returning MADP_ERR_FAILURE_BUDGET. result may
   be NULL. */
MADP_API madp_status madp_run_embed(const madp_config* config, madp_embed_result* result);

/* files receives the written report paths; may be NULL. */
MADP_API madp_status madp_run_eval(const madp_config* config, madp_strlist** files);

/* Metrics over a score CSV. format is "json", "csv" or "table"; the single
   list entry holds the rendered report. */
MADP_API madp_status madp_run_metrics(const char* scores_csv, const char* format,
                                      madp_strlist** out);

/* One entry per expanded prompt. */
MADP_API madp_status madp_prompts_dump(const char* selector, madp_label label, int dot_mode,
                                       madp_strlist** out);

#ifdef __cplusplus
}
#endif

#endif
