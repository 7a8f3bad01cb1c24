#include "harness/commands.hpp"

#include <fstream>
#include <map>
#include <optional>

#include "backend/embedding_cache.hpp"
#include "core/errors.hpp"
#include "core/logging.hpp"
#include "core/parallel.hpp"
#include "harness/manifest.hpp"

namespace madp {
namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot write '" + path.string() + "'");
  return out;
}

std::vector<MetricReport> subset_reports(std::span<const double> bona_fide,
                                         std::span<const std::string> attack_subsets,
                                         const std::map<std::string, std::vector<double>>& attacks) {
  std::vector<MetricReport> rows;
  for (const std::string& name : attack_subsets) {
    ScoreSet set;
    set.bona_fide.assign(bona_fide.begin(), bona_fide.end());
    set.attack = attacks.at(name);
    rows.push_back(evaluate(name, set));
  }
  return rows;
}

void fill_aggregates(EvaluationReport& report) {
  const AggregateRows agg = aggregate_rows(report.subsets);
  report.average = agg.average;
  report.worst = agg.worst;
}

}  // namespace

std::unique_ptr<EmbeddingBackend> open_backend(const RunConfig& config) {
  if (!config.cache.empty()) {
    std::optional<std::filesystem::path> text;
    if (!config.text_cache.empty()) text = config.text_cache;
    return open_cache_backend(config.cache, text);
  }
  if (!config.backend_dir.empty()) return open_neural_backend(config.backend_dir);
  fail(ErrorCode::Config, "no embedding source: set a cache or a backend directory");
}

std::string report_stem(PromptSetSelector selector, bool dot_mode) {
  return std::string(selector_name(selector)) + (dot_mode ? "_dot" : "_nodot");
}

EmbedSummary run_embed(const RunConfig& config) {
  if (config.manifest.empty()) fail(ErrorCode::Config, "embed needs a manifest");
  if (config.out.empty()) fail(ErrorCode::Config, "embed needs an output cache path");
  if (config.backend_dir.empty()) fail(ErrorCode::Config, "embed needs a backend directory");

  const DatasetManifest manifest = load_manifest(config.manifest, PathCheck::Skip);
  const auto backend = open_neural_backend(config.backend_dir);
  const PreprocessOptions options{config.profile, config.preserve_aspect};
  const ImageEmbedder embedder = backend_image_embedder(*backend, options);

  const auto& samples = manifest.samples;
  std::vector<std::optional<Embedding>> embedded(samples.size());
  std::vector<std::optional<SampleFailure>> failed(samples.size());
  parallel_for(samples.size(), resolve_workers(config.workers), [&](std::size_t i) {
    try {
      embedded[i] = embedder(samples[i]);
    } catch (const Error& e) {
      failed[i] = SampleFailure{samples[i].id, e.code(), e.what()};
    } catch (const std::exception& e) {
      failed[i] = SampleFailure{samples[i].id, ErrorCode::Data, e.what()};
    }
  });

  EmbedSummary summary;
  summary.total = samples.size();
  EmbeddingCache cache(backend->dim());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (embedded[i]) {
      cache.insert(samples[i].id, std::move(*embedded[i]));
    } else {
      log::warn("skipping sample '" + failed[i]->sample_id + "': " + failed[i]->message);
      summary.failures.push_back(std::move(*failed[i]));
    }
  }
  summary.written = cache.size();
  cache.write(config.out);

  if (!config.text_out.empty()) {
    EmbeddingCache texts(backend->dim());
    for (std::string& prompt : all_shipped_prompts()) {
      Embedding e = backend->embed_text(prompt);
      texts.insert(std::move(prompt), std::move(e));
    }
    summary.text_written = texts.size();
    texts.write(config.text_out);
  }

  log::info("embedded " + std::to_string(summary.written) + "/" + std::to_string(summary.total) +
            " samples");
  return summary;
}

EvalOutput run_eval(const RunConfig& config) {
  if (config.manifest.empty()) fail(ErrorCode::Config, "eval needs a manifest");
  if (config.out.empty()) fail(ErrorCode::Config, "eval needs an output directory");

  const auto backend = open_backend(config);
  const PathCheck check =
      config.check_paths && !backend->keyed_images() ? PathCheck::Require : PathCheck::Skip;
  const DatasetManifest manifest = load_manifest(config.manifest, check);
  if (manifest.attack_subsets.empty()) {
    fail(ErrorCode::DegenerateClassCounts, "manifest has no attack subset");
  }

  const PreprocessOptions options{config.profile, config.preserve_aspect};
  const ImageEmbedder embedder = backend_image_embedder(*backend, options);
  const auto& samples = manifest.samples;
  std::vector<std::optional<Embedding>> unit(samples.size());
  std::vector<std::string> missing(samples.size());
  parallel_for(samples.size(), resolve_workers(config.workers), [&](std::size_t i) {
    try {
      unit[i] = l2_normalize(embedder(samples[i]));
    } catch (const std::exception& e) {
      missing[i] = e.what();
    }
  });
  std::size_t n_missing = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (unit[i]) continue;
    log::error("no embedding for sample '" + samples[i].id + "': " + missing[i]);
    ++n_missing;
  }
  if (n_missing > 0) {
    fail(ErrorCode::MissingEmbedding,
         std::to_string(n_missing) + " sample(s) have no embedding");
  }

  std::vector<PromptSetSelector> selectors;
  if (config.grid) {
    selectors.assign(kAllSelectors.begin(), kAllSelectors.end());
  } else {
    selectors.push_back(config.selector);
  }

  std::filesystem::create_directories(config.out);
  PrototypeStore store(*backend);
  EvalOutput output;
  for (PromptSetSelector selector : selectors) {
    const ClassPrototype& proto =
        store.get(selector, config.dot_mode, config.normalize_before_average);

    std::vector<ScoreRecord> records;
    records.reserve(samples.size());
    std::vector<double> bona_fide;
    std::map<std::string, std::vector<double>> attacks;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      records.push_back(score_sample(samples[i], *unit[i], proto));
      const ScoreRecord& r = records.back();
      if (r.truth == Label::BonaFide) {
        bona_fide.push_back(r.score);
      } else {
        attacks[r.subset].push_back(r.score);
      }
    }

    EvaluationReport report;
    report.selector = std::string(selector_name(selector));
    report.dot_mode = config.dot_mode;
    report.normalization = std::string(config.profile->name());
    report.normalize_before_average = config.normalize_before_average;
    report.prompt_count = proto.prompt_count;
    report.bona_fide_subset = manifest.bona_fide_subset;
    report.subsets = subset_reports(bona_fide, manifest.attack_subsets, attacks);
    fill_aggregates(report);

    const std::string stem = report_stem(selector, config.dot_mode);
    const auto json_path = config.out / ("report_" + stem + ".json");
    const auto csv_path = config.out / ("report_" + stem + ".csv");
    const auto scores_path = config.out / ("scores_" + stem + ".csv");
    {
      auto out = open_out(json_path);
      write_json(out, report);
    }
    {
      auto out = open_out(csv_path);
      write_csv(out, report);
    }
    {
      auto out = open_out(scores_path);
      write_scores_csv(out, records);
    }
    output.files.insert(output.files.end(), {json_path, csv_path, scores_path});
    output.reports.push_back(std::move(report));
  }
  return output;
}

EvaluationReport evaluate_scores(std::span<const ScoreRecord> records) {
  std::vector<double> bona_fide;
  std::vector<std::string> order;
  std::map<std::string, std::vector<double>> attacks;
  std::string bona_fide_subset;
  for (const ScoreRecord& r : records) {
    if (r.truth == Label::BonaFide) {
      bona_fide.push_back(r.score);
      if (bona_fide_subset.empty()) bona_fide_subset = r.subset;
      continue;
    }
    auto [it, inserted] = attacks.try_emplace(r.subset);
    if (inserted) order.push_back(r.subset);
    it->second.push_back(r.score);
  }
  if (order.empty()) fail(ErrorCode::DegenerateClassCounts, "no attack scores");

  EvaluationReport report;
  report.selector = "scores";
  report.normalization = "n/a";
  report.bona_fide_subset = bona_fide_subset;
  report.subsets = subset_reports(bona_fide, order, attacks);
  fill_aggregates(report);
  return report;
}

}  // namespace madp
