#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "core/embedding.hpp"
#include "core/errors.hpp"
#include "preprocess/image.hpp"
#include "prompts/prompt_engine.hpp"

namespace madp {

class EmbeddingBackend;

struct ScoreRecord {
  std::string sample_id;
  std::string subset;
  Label truth = Label::BonaFide;
  double score = 0.0;  // higher is more attack-like, in [-2, 2]
  Label decision = Label::Attack;
};

// Attack unless the bona-fide similarity is strictly greater; a zero score
// decides Attack.
constexpr Label decide(double score) noexcept {
  return score >= 0.0 ? Label::Attack : Label::BonaFide;
}

// cos(e, attack) - cos(e, bona_fide). Throws DimensionMismatch.
double differential_score(const Embedding& image_embedding, const ClassPrototype& proto);

ScoreRecord score_sample(const SampleRef& sample, const Embedding& image_embedding,
                         const ClassPrototype& proto);

struct SampleFailure {
  std::string sample_id;
  ErrorCode code;
  std::string message;
};

struct BatchResult {
  std::vector<ScoreRecord> records;  // manifest order, failures omitted
  std::vector<SampleFailure> failures;
};

// Produces the raw image embedding of one sample.
using ImageEmbedder = std::function<Embedding(const SampleRef&)>;

// Cache backends look samples up by id; neural backends decode, preprocess
// and encode the image file.
ImageEmbedder backend_image_embedder(const EmbeddingBackend& backend,
                                     const PreprocessOptions& options);

// Scores every sample; per-sample errors are logged and collected, the batch
// carries on. Image embeddings are normalized before scoring.
BatchResult classify_batch(std::span<const SampleRef> samples, const ImageEmbedder& embedder,
                           const ClassPrototype& proto, unsigned workers = 1);

// sample_id,subset,truth,score,decision with scores at 9 significant digits.
void write_scores_csv(std::ostream& out, std::span<const ScoreRecord> records);
std::vector<ScoreRecord> read_scores_csv(std::istream& in);

}  // namespace madp
