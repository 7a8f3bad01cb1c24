#include "madprompts/madprompts.h"

#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "backend/backend.hpp"
#include "classifier/classifier.hpp"
#include "core/errors.hpp"
#include "core/logging.hpp"
#include "harness/commands.hpp"
#include "harness/config.hpp"
#include "metrics/metrics.hpp"
#include "metrics/report.hpp"
#include "prompts/prompt_engine.hpp"

struct madp_strlist {
  std::vector<std::string> items;
};

struct madp_config {
  madp::RunConfig run;
};

struct madp_backend {
  std::unique_ptr<madp::EmbeddingBackend> impl;
};

struct madp_prototype {
  madp::ClassPrototype proto;
};

namespace {

thread_local std::string g_last_error;

madp_status to_status(madp::ErrorCode code) {
  using madp::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument: return MADP_ERR_INVALID_ARGUMENT;
    case ErrorCode::ZeroNorm: return MADP_ERR_ZERO_NORM;
    case ErrorCode::DimensionMismatch: return MADP_ERR_DIMENSION_MISMATCH;
    case ErrorCode::EmptyImage: return MADP_ERR_EMPTY_IMAGE;
    case ErrorCode::ImageDecode: return MADP_ERR_IMAGE_DECODE;
    case ErrorCode::BackendUnavailable: return MADP_ERR_BACKEND_UNAVAILABLE;
    case ErrorCode::KeyMissing: return MADP_ERR_KEY_MISSING;
    case ErrorCode::TokenizationOverflow: return MADP_ERR_TOKENIZATION_OVERFLOW;
    case ErrorCode::MalformedTemplate: return MADP_ERR_MALFORMED_TEMPLATE;
    case ErrorCode::DegenerateClassCounts: return MADP_ERR_DEGENERATE_CLASS_COUNTS;
    case ErrorCode::EmptyList: return MADP_ERR_EMPTY_LIST;
    case ErrorCode::Config: return MADP_ERR_CONFIG;
    case ErrorCode::Data: return MADP_ERR_DATA;
    case ErrorCode::MissingEmbedding: return MADP_ERR_MISSING_EMBEDDING;
    case ErrorCode::Io: return MADP_ERR_IO;
  }
  return MADP_ERR_INTERNAL;
}

madp_status fail_with(madp_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

template <class F>
madp_status guarded(F&& body) {
  try {
    g_last_error.clear();
    return body();
  } catch (const madp::Error& e) {
    return fail_with(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail_with(MADP_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail_with(MADP_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail_with(MADP_ERR_INTERNAL, "unknown error");
  }
}

void require(bool ok, const char* what) {
  if (!ok) madp::fail(madp::ErrorCode::InvalidArgument, what);
}

madp_status copy_out(const madp::Embedding& e, double* out, size_t capacity) {
  if (capacity < e.dim()) {
    return fail_with(MADP_ERR_BUFFER_TOO_SMALL,
                     "output buffer holds " + std::to_string(capacity) + " values, need " +
                         std::to_string(e.dim()));
  }
  std::copy(e.values().begin(), e.values().end(), out);
  return MADP_OK;
}

madp::ScoreSet score_set(const double* bona_fide, size_t n_bona_fide, const double* attack,
                         size_t n_attack) {
  require(bona_fide || n_bona_fide == 0, "bona_fide is NULL");
  require(attack || n_attack == 0, "attack is NULL");
  madp::ScoreSet s;
  if (n_bona_fide) s.bona_fide.assign(bona_fide, bona_fide + n_bona_fide);
  if (n_attack) s.attack.assign(attack, attack + n_attack);
  return s;
}

madp::PromptSetSelector selector_arg(const char* name) {
  require(name != nullptr, "selector is NULL");
  const auto s = madp::parse_selector(name);
  if (!s) madp::fail(madp::ErrorCode::Config, std::string("unknown selector '") + name + "'");
  return *s;
}

madp_strlist* new_list(std::vector<std::string> items) {
  return new madp_strlist{std::move(items)};
}

}  // namespace

extern "C" {

const char* madp_version(void) { return "0.1.0"; }

const char* madp_status_string(madp_status status) {
  switch (status) {
    case MADP_OK: return "ok";
    case MADP_ERR_INVALID_ARGUMENT: return "invalid argument";
    case MADP_ERR_ZERO_NORM: return "zero norm";
    case MADP_ERR_DIMENSION_MISMATCH: return "dimension mismatch";
    case MADP_ERR_EMPTY_IMAGE: return "empty image";
    case MADP_ERR_IMAGE_DECODE: return "image decode error";
    case MADP_ERR_BACKEND_UNAVAILABLE: return "backend unavailable";
    case MADP_ERR_KEY_MISSING: return "key missing";
    case MADP_ERR_TOKENIZATION_OVERFLOW: return "tokenization overflow";
    case MADP_ERR_MALFORMED_TEMPLATE: return "malformed template";
    case MADP_ERR_DEGENERATE_CLASS_COUNTS: return "degenerate class counts";
    case MADP_ERR_EMPTY_LIST: return "empty list";
    case MADP_ERR_CONFIG: return "config error";
    case MADP_ERR_DATA: return "data error";
    case MADP_ERR_MISSING_EMBEDDING: return "missing embedding";
    case MADP_ERR_IO: return "i/o error";
    case MADP_ERR_FAILURE_BUDGET: return "too many failed samples";
    case MADP_ERR_BUFFER_TOO_SMALL: return "buffer too small";
    case MADP_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* madp_last_error(void) { return g_last_error.c_str(); }

int madp_exit_code(madp_status status) {
  switch (status) {
    case MADP_OK:
      return 0;
    case MADP_ERR_CONFIG:
    case MADP_ERR_INVALID_ARGUMENT:
    case MADP_ERR_MALFORMED_TEMPLATE:
      return 2;
    case MADP_ERR_ZERO_NORM:
    case MADP_ERR_DIMENSION_MISMATCH:
    case MADP_ERR_EMPTY_IMAGE:
    case MADP_ERR_IMAGE_DECODE:
    case MADP_ERR_KEY_MISSING:
    case MADP_ERR_DEGENERATE_CLASS_COUNTS:
    case MADP_ERR_EMPTY_LIST:
    case MADP_ERR_DATA:
    case MADP_ERR_MISSING_EMBEDDING:
    case MADP_ERR_IO:
    case MADP_ERR_FAILURE_BUDGET:
      return 3;
    case MADP_ERR_BACKEND_UNAVAILABLE:
    case MADP_ERR_TOKENIZATION_OVERFLOW:
      return 4;
    case MADP_ERR_BUFFER_TOO_SMALL:
    case MADP_ERR_INTERNAL:
      return 1;
  }
  return 1;
}

void madp_set_log_callback(madp_log_fn fn, void* user) {
  if (!fn) {
    madp::log::set_sink({});
    return;
  }
  madp::log::set_sink([fn, user](madp::log::Level level, std::string_view message) {
    const std::string text(message);
    fn(static_cast<madp_log_level>(level), text.c_str(), user);
  });
}

size_t madp_strlist_size(const madp_strlist* list) { return list ? list->items.size() : 0; }

const char* madp_strlist_get(const madp_strlist* list, size_t index) {
  if (!list || index >= list->items.size()) return nullptr;
  return list->items[index].c_str();
}

void madp_strlist_destroy(madp_strlist* list) { delete list; }

madp_status madp_config_create(madp_config** out) {
  return guarded([&] {
    require(out != nullptr, "out is NULL");
    *out = new madp_config{};
    return MADP_OK;
  });
}

void madp_config_destroy(madp_config* config) { delete config; }

madp_status madp_config_set(madp_config* config, const char* key, const char* value) {
  return guarded([&] {
    require(config && key && value, "config, key and value must be non-NULL");
    madp::apply_setting(config->run, key, value);
    return MADP_OK;
  });
}

madp_status madp_config_load_file(madp_config* config, const char* path) {
  return guarded([&] {
    require(config && path, "config and path must be non-NULL");
    madp::load_config_file(config->run, path);
    return MADP_OK;
  });
}

madp_status madp_preset_names(madp_strlist** out) {
  return guarded([&] {
    require(out != nullptr, "out is NULL");
    std::vector<std::string> names;
    for (std::string_view n : madp::preset_names()) names.emplace_back(n);
    *out = new_list(std::move(names));
    return MADP_OK;
  });
}

madp_status madp_selector_names(madp_strlist** out) {
  return guarded([&] {
    require(out != nullptr, "out is NULL");
    std::vector<std::string> names;
    for (auto s : madp::kAllSelectors) names.emplace_back(madp::selector_name(s));
    *out = new_list(std::move(names));
    return MADP_OK;
  });
}

madp_status madp_backend_open_cache(const char* image_cache, const char* text_cache,
                                    madp_backend** out) {
  return guarded([&] {
    require(image_cache && out, "image_cache and out must be non-NULL");
    std::optional<std::filesystem::path> text;
    if (text_cache) text = text_cache;
    *out = new madp_backend{madp::open_cache_backend(image_cache, text)};
    return MADP_OK;
  });
}

madp_status madp_backend_open_neural(const char* directory, madp_backend** out) {
  return guarded([&] {
    require(directory && out, "directory and out must be non-NULL");
    *out = new madp_backend{madp::open_neural_backend(directory)};
    return MADP_OK;
  });
}

void madp_backend_close(madp_backend* backend) { delete backend; }

size_t madp_backend_dim(const madp_backend* backend) {
  return backend ? backend->impl->dim() : 0;
}

madp_status madp_backend_embed_text(const madp_backend* backend, const char* prompt, double* out,
                                    size_t capacity) {
  return guarded([&] {
    require(backend && prompt && out, "backend, prompt and out must be non-NULL");
    return copy_out(backend->impl->embed_text(prompt), out, capacity);
  });
}

madp_status madp_backend_embed_key(const madp_backend* backend, const char* sample_id,
                                   double* out, size_t capacity) {
  return guarded([&] {
    require(backend && sample_id && out, "backend, sample_id and out must be non-NULL");
    return copy_out(backend->impl->embed_image(std::string_view(sample_id)), out, capacity);
  });
}

madp_status madp_backend_embed_file(const madp_backend* backend, const char* path,
                                    const char* norm, double* out, size_t capacity) {
  return guarded([&] {
    require(backend && path && out, "backend, path and out must be non-NULL");
    madp::PreprocessOptions options;
    if (norm) options.profile = &madp::NormalizationProfile::parse(norm);
    const madp::PixelTensor tensor =
        madp::preprocess(madp::decode_image(path), std::nullopt, options);
    return copy_out(backend->impl->embed_image(tensor), out, capacity);
  });
}

madp_status madp_prototype_build(const madp_backend* backend, const char* selector, int dot_mode,
                                 int normalize_before_average, madp_prototype** out) {
  return guarded([&] {
    require(backend && out, "backend and out must be non-NULL");
    *out = new madp_prototype{madp::aggregate(*backend->impl, selector_arg(selector),
                                              dot_mode != 0, normalize_before_average != 0)};
    return MADP_OK;
  });
}

madp_status madp_prototype_from_vectors(const double* bona_fide, const double* attack,
                                        size_t dim, madp_prototype** out) {
  return guarded([&] {
    require(bona_fide && attack && out, "vectors and out must be non-NULL");
    require(dim > 0, "dim must be positive");
    madp::Embedding bf(std::vector<double>(bona_fide, bona_fide + dim));
    madp::Embedding atk(std::vector<double>(attack, attack + dim));
    *out = new madp_prototype{
        madp::ClassPrototype{madp::l2_normalize(bf), madp::l2_normalize(atk)}};
    return MADP_OK;
  });
}

void madp_prototype_destroy(madp_prototype* proto) { delete proto; }

size_t madp_prototype_dim(const madp_prototype* proto) {
  return proto ? proto->proto.bona_fide.dim() : 0;
}

size_t madp_prototype_prompt_count(const madp_prototype* proto) {
  return proto ? proto->proto.prompt_count : 0;
}

madp_status madp_prototype_vectors(const madp_prototype* proto, double* bona_fide,
                                   double* attack, size_t capacity) {
  return guarded([&] {
    require(proto && bona_fide && attack, "proto and outputs must be non-NULL");
    const madp_status s = copy_out(proto->proto.bona_fide, bona_fide, capacity);
    if (s != MADP_OK) return s;
    return copy_out(proto->proto.attack, attack, capacity);
  });
}

madp_status madp_aggregate(const double* embeddings, size_t count, size_t dim,
                           int normalize_before_average, double* out) {
  return guarded([&] {
    require(out != nullptr, "out is NULL");
    require(embeddings || count == 0, "embeddings is NULL");
    require(dim > 0 || count == 0, "dim must be positive");
    std::vector<madp::Embedding> rows;
    rows.reserve(count);
    for (size_t i = 0; i < count; ++i) {
      rows.emplace_back(std::vector<double>(embeddings + i * dim, embeddings + (i + 1) * dim));
    }
    return copy_out(madp::aggregate_embeddings(rows, normalize_before_average != 0), out, dim);
  });
}

madp_status madp_score(const madp_prototype* proto, const double* image_embedding, size_t dim,
                       double* score, int* decision) {
  return guarded([&] {
    require(proto && image_embedding && score, "proto, embedding and score must be non-NULL");
    require(dim > 0, "dim must be positive");
    const madp::Embedding e(std::vector<double>(image_embedding, image_embedding + dim));
    *score = madp::differential_score(madp::l2_normalize(e), proto->proto);
    if (decision) *decision = madp::to_int(madp::decide(*score));
    return MADP_OK;
  });
}

madp_status madp_eer(const double* bona_fide, size_t n_bona_fide, const double* attack,
                     size_t n_attack, double* eer) {
  return guarded([&] {
    require(eer != nullptr, "eer is NULL");
    *eer = madp::eer(score_set(bona_fide, n_bona_fide, attack, n_attack));
    return MADP_OK;
  });
}

madp_status madp_error_at_fixed(const double* bona_fide, size_t n_bona_fide,
                                const double* attack, size_t n_attack, madp_fixed_metric fix,
                                double target_percent, double* value, double* threshold,
                                int* constraint_met) {
  return guarded([&] {
    require(value != nullptr, "value is NULL");
    require(fix == MADP_FIX_BPCER || fix == MADP_FIX_APCER, "unknown fixed metric");
    const auto r = madp::error_at_fixed(
        score_set(bona_fide, n_bona_fide, attack, n_attack),
        fix == MADP_FIX_BPCER ? madp::FixedMetric::BPCER : madp::FixedMetric::APCER,
        target_percent);
    *value = r.value;
    if (threshold) *threshold = r.threshold;
    if (constraint_met) *constraint_met = r.constraint_met ? 1 : 0;
    return MADP_OK;
  });
}

madp_status madp_run_embed(const madp_config* config, madp_embed_result* result) {
  return guarded([&] {
    require(config != nullptr, "config is NULL");
    const madp::EmbedSummary s = madp::run_embed(config->run);
    if (result) *result = {s.total, s.written, s.failures.size(), s.text_written};
    if (!s.within_budget()) {
      return fail_with(MADP_ERR_FAILURE_BUDGET,
                       std::to_string(s.failures.size()) + " of " + std::to_string(s.total) +
                           " samples failed");
    }
    return MADP_OK;
  });
}

madp_status madp_run_eval(const madp_config* config, madp_strlist** files) {
  return guarded([&] {
    require(config != nullptr, "config is NULL");
    const madp::EvalOutput out = madp::run_eval(config->run);
    if (files) {
      std::vector<std::string> paths;
      for (const auto& p : out.files) paths.push_back(p.string());
      *files = new_list(std::move(paths));
    }
    return MADP_OK;
  });
}

madp_status madp_run_metrics(const char* scores_csv, const char* format, madp_strlist** out) {
  return guarded([&] {
    require(scores_csv && out, "scores_csv and out must be non-NULL");
    const std::string fmt = format ? format : "json";
    std::ifstream in(scores_csv);
    if (!in) madp::fail(madp::ErrorCode::Io, std::string("cannot open '") + scores_csv + "'");
    const auto records = madp::read_scores_csv(in);
    const madp::EvaluationReport report = madp::evaluate_scores(records);
    std::ostringstream text;
    if (fmt == "json") {
      madp::write_json(text, report);
    } else if (fmt == "csv") {
      madp::write_csv(text, report);
    } else if (fmt == "table") {
      madp::write_table(text, report);
    } else {
      madp::fail(madp::ErrorCode::Config, "unknown format '" + fmt + "'");
    }
    *out = new_list({text.str()});
    return MADP_OK;
  });
}

madp_status madp_prompts_dump(const char* selector, madp_label label, int dot_mode,
                              madp_strlist** out) {
  return guarded([&] {
    require(out != nullptr, "out is NULL");
    require(label == MADP_BONA_FIDE || label == MADP_ATTACK, "unknown label");
    madp::PromptLists lists = madp::build_prompt_lists(selector_arg(selector), dot_mode != 0);
    *out = new_list(label == MADP_ATTACK ? std::move(lists.attack) : std::move(lists.bona_fide));
    return MADP_OK;
  });
}

}  // extern "C"
