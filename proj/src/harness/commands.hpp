#pragma once

#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "backend/backend.hpp"
#include "classifier/classifier.hpp"
#include "harness/config.hpp"
#include "metrics/report.hpp"

namespace madp {

// Cache backend when config.cache is set, otherwise the neural runtime in
// config.backend_dir. Throws Config when neither is given.
std::unique_ptr<EmbeddingBackend> open_backend(const RunConfig& config);

inline constexpr double kEmbedFailureBudgetPercent = 1.0;

struct EmbedSummary {
  std::size_t total = 0;
  std::size_t written = 0;
  std::size_t text_written = 0;
  std::vector<SampleFailure> failures;

  bool within_budget() const noexcept {
    return static_cast<double>(failures.size()) * 100.0 <=
           kEmbedFailureBudgetPercent * static_cast<double>(total);
  }
};

// Encodes every manifest sample with the neural runtime into config.out
// (EMB1). Missing or unreadable samples are skipped and logged. With config.text_out,
// every shipped prompt is encoded into a second cache.
EmbedSummary run_embed(const RunConfig& config);

struct EvalOutput {
  std::vector<EvaluationReport> reports;  // one per selector
  std::vector<std::filesystem::path> files;
};

// Scores the manifest for the configured selector (or every selector with
// grid) and writes report_<selector>_<dot|nodot>.{json,csv} plus the score
// file into config.out. A sample without an embedding is fatal
// (MissingEmbedding).
EvalOutput run_eval(const RunConfig& config);

// Metrics over already computed scores. Bona-fide records form the shared
// pool; each attack subset gets its own row.
EvaluationReport evaluate_scores(std::span<const ScoreRecord> records);

std::string report_stem(PromptSetSelector selector, bool dot_mode);

}  // namespace madp
