#include "classifier/classifier.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>

#include "backend/backend.hpp"
#include "core/logging.hpp"
#include "core/parallel.hpp"
#include "harness/csv.hpp"

namespace madp {

double differential_score(const Embedding& image_embedding, const ClassPrototype& proto) {
  return cosine_similarity(image_embedding, proto.attack) -
         cosine_similarity(image_embedding, proto.bona_fide);
}

ScoreRecord score_sample(const SampleRef& sample, const Embedding& image_embedding,
                         const ClassPrototype& proto) {
  const double score = differential_score(image_embedding, proto);
  return ScoreRecord{sample.id, sample.subset, sample.label, score, decide(score)};
}

ImageEmbedder backend_image_embedder(const EmbeddingBackend& backend,
                                     const PreprocessOptions& options) {
  if (backend.keyed_images()) {
    return [&backend](const SampleRef& s) { return backend.embed_image(s.id); };
  }
  return [&backend, options](const SampleRef& s) {
    return backend.embed_image(preprocess(decode_image(s.path), s.box, options));
  };
}

BatchResult classify_batch(std::span<const SampleRef> samples, const ImageEmbedder& embedder,
                           const ClassPrototype& proto, unsigned workers) {
  struct Slot {
    std::optional<ScoreRecord> record;
    std::optional<SampleFailure> failure;
  };
  std::vector<Slot> slots(samples.size());
  parallel_for(samples.size(), workers, [&](std::size_t i) {
    const SampleRef& s = samples[i];
    try {
      slots[i].record = score_sample(s, l2_normalize(embedder(s)), proto);
    } catch (const Error& e) {
      slots[i].failure = SampleFailure{s.id, e.code(), e.what()};
    } catch (const std::exception& e) {
      slots[i].failure = SampleFailure{s.id, ErrorCode::Data, e.what()};
    }
  });

  BatchResult result;
  result.records.reserve(samples.size());
  for (Slot& slot : slots) {
    if (slot.record) {
      result.records.push_back(std::move(*slot.record));
    } else {
      log::warn("skipping sample '" + slot.failure->sample_id + "': " + slot.failure->message);
      result.failures.push_back(std::move(*slot.failure));
    }
  }
  return result;
}

void write_scores_csv(std::ostream& out, std::span<const ScoreRecord> records) {
  out << "sample_id,subset,truth,score,decision\n";
  char number[32];
  for (const ScoreRecord& r : records) {
    std::snprintf(number, sizeof number, "%.9g", r.score);
    out << csv::quote(r.sample_id) << ',' << csv::quote(r.subset) << ',' << to_int(r.truth) << ','
        << number << ',' << to_int(r.decision) << '\n';
  }
}

std::vector<ScoreRecord> read_scores_csv(std::istream& in) {
  csv::Reader reader(in);
  const auto header = reader.header();
  const std::vector<std::string> expected{"sample_id", "subset", "truth", "score", "decision"};
  if (header.size() < 4 ||
      !std::equal(expected.begin(), expected.begin() + 4, header.begin())) {
    fail(ErrorCode::Data, "score CSV header must start with sample_id,subset,truth,score");
  }
  std::vector<ScoreRecord> records;
  std::vector<std::string> row;
  while (reader.next(row)) {
    if (row.size() != header.size()) {
      fail(ErrorCode::Data, "score CSV line " + std::to_string(reader.line()) +
                                " has " + std::to_string(row.size()) + " fields");
    }
    ScoreRecord r;
    r.sample_id = row[0];
    r.subset = row[1];
    r.truth = label_from_int(csv::parse_int(row[2], reader.line()));
    r.score = csv::parse_double(row[3], reader.line());
    r.decision = decide(r.score);
    records.push_back(std::move(r));
  }
  return records;
}

}  // namespace madp
