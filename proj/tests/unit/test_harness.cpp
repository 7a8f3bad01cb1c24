#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "backend/embedding_cache.hpp"
#include "core/errors.hpp"
#include "harness/commands.hpp"
#include "harness/config.hpp"
#include "harness/manifest.hpp"
#include "metrics_oracle.hpp"
#include "synthetic_fixture.hpp"

namespace madp {
namespace {

const std::filesystem::path kNeural = std::filesystem::path(MADP_TEST_DATA) / "neural";

template <class F>
ErrorCode code_of(F&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no madp::Error thrown";
  return ErrorCode::Io;
}

DatasetManifest parse(const std::string& text, PathCheck check = PathCheck::Skip) {
  std::istringstream in(text);
  return parse_manifest(in, "/data", check);
}

// ---- manifest ----

TEST(Manifest, ParsesRowsAndBoxes) {
  const auto m = parse(
      "id,path,label,subset,x0,y0,x1,y1\n"
      "a,img/a.png,0,bf,1,2,11,22\n"
      "b,/abs/b.png,1,morph_x,,,,\n"
      "c,c.png,1,morph_y,0,0,5,5\n");
  ASSERT_EQ(m.samples.size(), 3u);
  EXPECT_EQ(m.samples[0].path, std::filesystem::path("/data/img/a.png"));
  EXPECT_EQ(m.samples[1].path, std::filesystem::path("/abs/b.png"));
  EXPECT_EQ(m.samples[0].box, (BoundingBox{1, 2, 11, 22}));
  EXPECT_FALSE(m.samples[1].box.has_value());
  EXPECT_EQ(m.bona_fide_subset, "bf");
  EXPECT_EQ(m.attack_subsets, (std::vector<std::string>{"morph_x", "morph_y"}));
  EXPECT_EQ(m.subset("morph_y").size(), 1u);
}

TEST(Manifest, RejectsInvalidContent) {
  const std::vector<std::string> bad{
      "id,path,subset,label\na,a.png,bf,0\n",
      "id,path,label,subset\na,a.png,0,bf\na,b.png,1,m\n",
      "id,path,label,subset\na,a.png,2,bf\n",
      "id,path,label,subset\na,a.png,0,\n",
      "id,path,label,subset\na,a.png,0,bf\nb,b.png,1,bf\n",
      "id,path,label,subset\na,a.png,0,bf\nb,b.png,0,bf2\n",
      "id,path,label,subset\nb,b.png,1,m\n",
      "id,path,label,subset\na,a.png,0\n",
      "id,path,label,subset,x0,y0,x1,y1\na,a.png,0,bf,5,5,5,9\n",
  };
  for (const std::string& text : bad) {
    EXPECT_EQ(code_of([&] { parse(text); }), ErrorCode::Data) << text;
  }
}

TEST(Manifest, PathCheck) {
  const std::string text = "id,path,label,subset\na,missing.png,0,bf\n";
  EXPECT_EQ(code_of([&] { parse(text, PathCheck::Require); }), ErrorCode::Data);
  EXPECT_NO_THROW(parse(text, PathCheck::Skip));
  EXPECT_EQ(code_of([] { load_manifest("/nonexistent/m.csv", PathCheck::Skip); }), ErrorCode::Io);
}

// ---- config ----

TEST(Config, PresetsCoverTheGrid) {
  EXPECT_EQ(preset_names().size(), 10u);
  for (std::string_view name : preset_names()) {
    RunConfig c;
    EXPECT_NO_THROW(apply_preset(c, name)) << name;
  }
  RunConfig c;
  apply_preset(c, "TI");
  EXPECT_EQ(c.selector, PromptSetSelector::Single);
  EXPECT_FALSE(c.dot_mode);
  EXPECT_EQ(c.profile, &NormalizationProfile::half());
  apply_preset(c, "TI_wo_Dot");
  EXPECT_FALSE(c.dot_mode);
  EXPECT_EQ(c.profile, &NormalizationProfile::clip_native());
  apply_preset(c, "TI-Dot");
  EXPECT_TRUE(c.dot_mode);
  EXPECT_EQ(c.selector, PromptSetSelector::Single);
  apply_preset(c, "Pr+Ap");
  EXPECT_EQ(c.selector, PromptSetSelector::Pr_Ap);
  EXPECT_TRUE(c.dot_mode);
  EXPECT_EQ(code_of([&] { apply_preset(c, "Ex"); }), ErrorCode::Config);
}

TEST(Config, SettingsAndFile) {
  const auto dir = testing::make_temp_dir("config");
  std::ofstream(dir / "run.toml") << "# grid run\n[eval]\nmanifest = \"m.csv\"\nselector = grid\n"
                                     "dot = false\nnorm = half\naggregate_raw = true\n"
                                     "workers = 3  # fixed\n";
  RunConfig c;
  load_config_file(c, dir / "run.toml");
  EXPECT_EQ(c.manifest, std::filesystem::path("m.csv"));
  EXPECT_TRUE(c.grid);
  EXPECT_FALSE(c.dot_mode);
  EXPECT_EQ(c.profile, &NormalizationProfile::half());
  EXPECT_FALSE(c.normalize_before_average);
  EXPECT_EQ(c.workers, 3u);
  apply_setting(c, "selector", "ID+Ap");
  EXPECT_FALSE(c.grid);
  EXPECT_EQ(c.selector, PromptSetSelector::ID_Ap);

  for (auto [k, v] : {std::pair{"colour", "red"}, {"dot", "maybe"}, {"workers", "-1"},
                      {"selector", "Ex"}, {"norm", "imagenet"}}) {
    EXPECT_EQ(code_of([&] { apply_setting(c, k, v); }), ErrorCode::Config) << k;
  }
  std::ofstream(dir / "bad.toml") << "manifest\n";
  EXPECT_EQ(code_of([&] { load_config_file(c, dir / "bad.toml"); }), ErrorCode::Config);
  EXPECT_EQ(code_of([&] { load_config_file(c, dir / "absent.toml"); }), ErrorCode::Config);
  std::filesystem::remove_all(dir);
}

TEST(Config, WorkerResolution) {
  EXPECT_EQ(resolve_workers(5), 5u);
  ::setenv("MADPROMPTS_THREADS", "3", 1);
  EXPECT_EQ(resolve_workers(0), 3u);
  ::setenv("MADPROMPTS_THREADS", "zero", 1);
  EXPECT_GE(resolve_workers(0), 1u);
  ::unsetenv("MADPROMPTS_THREADS");
  EXPECT_GE(resolve_workers(0), 1u);
}

// ---- eval ----

class Eval : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = testing::make_temp_dir("eval");
    fx_ = testing::make_synthetic_fixture(dir_ / "fixture");
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }

  RunConfig config(const std::string& out) const {
    RunConfig c;
    c.manifest = fx_.manifest;
    c.cache = fx_.image_cache;
    c.text_cache = fx_.text_cache;
    c.out = dir_ / out;
    c.workers = 4;
    return c;
  }

  std::filesystem::path dir_;
  testing::SyntheticFixture fx_;
};

TEST_F(Eval, ReportsMatchOracleOverWrittenScores) {
  RunConfig c = config("out");
  c.selector = PromptSetSelector::Pr_Ap;
  const EvalOutput out = run_eval(c);
  ASSERT_EQ(out.files.size(), 3u);
  EXPECT_EQ(out.files[0].filename(), "report_Pr_Ap_dot.json");
  EXPECT_EQ(out.files[2].filename(), "scores_Pr_Ap_dot.csv");

  std::ifstream scores_in(out.files[2]);
  const auto records = read_scores_csv(scores_in);
  ASSERT_EQ(records.size(), fx_.n_bona_fide + 6 * fx_.n_per_attack);
  std::vector<double> bf;
  for (const auto& r : records) {
    if (r.truth == Label::BonaFide) bf.push_back(r.score);
  }

  std::ifstream json_in(out.files[0]);
  const auto j = nlohmann::json::parse(json_in);
  EXPECT_EQ(j["prompt_count"], 40);
  ASSERT_EQ(j["rows"].size(), 8u);
  double eer_sum = 0.0;
  for (std::size_t s = 0; s < 6; ++s) {
    const auto& row = j["rows"][s];
    EXPECT_EQ(row["subset"], fx_.attack_subsets[s]);
    std::vector<double> ma;
    for (const auto& r : records) {
      if (r.subset == fx_.attack_subsets[s]) ma.push_back(r.score);
    }
    // scores were written at 9 significant digits; no pair sits that close
    EXPECT_NEAR(row["eer"].get<double>(), testing::oracle_eer(bf, ma).percent(), 1e-9);
    for (int t : kOperatingTargets) {
      const auto a = testing::oracle_error_at_fixed(bf, ma, true, t);
      const auto b = testing::oracle_error_at_fixed(bf, ma, false, t);
      EXPECT_NEAR(row["apcer_at_bpcer"][std::to_string(t)].get<double>(), a.value.percent(), 1e-9);
      EXPECT_NEAR(row["bpcer_at_apcer"][std::to_string(t)].get<double>(), b.value.percent(), 1e-9);
    }
    eer_sum += row["eer"].get<double>();
  }
  EXPECT_NEAR(j["rows"][6]["eer"].get<double>(), eer_sum / 6.0, 1e-12);
  EXPECT_GT(j["rows"][7]["eer"].get<double>(), 0.0);
}

TEST_F(Eval, SeparableFixtureHasNoErrors) {
  const auto sep = testing::make_synthetic_fixture(dir_ / "separable", 3, true);
  RunConfig c = config("sep");
  c.manifest = sep.manifest;
  c.cache = sep.image_cache;
  c.text_cache = sep.text_cache;
  for (const EvaluationReport& r : run_eval(c).reports) {
    for (const MetricReport& row : r.subsets) {
      EXPECT_EQ(row.eer, 0.0);
      for (int t : kOperatingTargets) {
        EXPECT_EQ(row.apcer_at_bpcer.at(t), 0.0);
        EXPECT_EQ(row.bpcer_at_apcer.at(t), 0.0);
      }
    }
  }
}

TEST_F(Eval, DeterministicAcrossRunsAndWorkerCounts) {
  RunConfig a = config("a");
  RunConfig b = config("b");
  b.workers = 1;
  run_eval(a);
  run_eval(b);
  for (const char* f : {"report_Single_dot.json", "report_Single_dot.csv", "scores_Single_dot.csv"}) {
    EXPECT_EQ(testing::read_file(a.out / f), testing::read_file(b.out / f)) << f;
  }
}

TEST_F(Eval, GridWritesOneReportPerSelector) {
  RunConfig c = config("grid");
  c.grid = true;
  c.dot_mode = false;
  const EvalOutput out = run_eval(c);
  EXPECT_EQ(out.reports.size(), 8u);
  EXPECT_EQ(out.files.size(), 24u);
  for (PromptSetSelector s : kAllSelectors) {
    EXPECT_TRUE(std::filesystem::exists(c.out / ("report_" + report_stem(s, false) + ".json")));
  }
}

TEST_F(Eval, MissingEmbeddingIsFatal) {
  std::ofstream(fx_.manifest, std::ios::app) << "ghost,images/ghost.png,1,morph_a\n";
  EXPECT_EQ(code_of([&] { run_eval(config("ghost")); }), ErrorCode::MissingEmbedding);
}

TEST_F(Eval, ConfigErrors) {
  RunConfig c = config("x");
  c.cache.clear();
  EXPECT_EQ(code_of([&] { run_eval(c); }), ErrorCode::Config);
  c = config("x");
  c.out.clear();
  EXPECT_EQ(code_of([&] { run_eval(c); }), ErrorCode::Config);
}

TEST_F(Eval, ScoresCanBeReEvaluated) {
  RunConfig c = config("again");
  const EvalOutput out = run_eval(c);
  std::ifstream in(out.files[2]);
  const auto records = read_scores_csv(in);
  const EvaluationReport r = evaluate_scores(records);
  ASSERT_EQ(r.subsets.size(), 6u);
  EXPECT_NEAR(r.average.eer, out.reports[0].average.eer, 1e-9);
}

// ---- embed ----

class Embed : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = testing::make_temp_dir("embed");
    std::ofstream m(dir_ / "manifest.csv");
    m << "id,path,label,subset\n";
    for (int i = 0; i < 10; ++i) {
      char line[128];
      std::snprintf(line, sizeof line, "img_%03d,%s/images/img_%03d.png,%d,%s\n", i,
                    kNeural.c_str(), i, i < 5 ? 0 : 1, i < 5 ? "bf" : "morph");
      m << line;
    }
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }

  RunConfig config() const {
    RunConfig c;
    c.manifest = dir_ / "manifest.csv";
    c.backend_dir = kNeural;
    c.out = dir_ / "images.emb";
    c.workers = 3;
    return c;
  }

  std::filesystem::path dir_;
};

TEST_F(Embed, WritesOneEntryPerSampleIdempotently) {
  RunConfig c = config();
  c.text_out = dir_ / "prompts.emb";
  const EmbedSummary s = run_embed(c);
  EXPECT_EQ(s.total, 10u);
  EXPECT_EQ(s.written, 10u);
  EXPECT_TRUE(s.within_budget());
  EXPECT_EQ(s.text_written, all_shipped_prompts().size());
  const EmbeddingCache cache = EmbeddingCache::read(c.out);
  EXPECT_EQ(cache.size(), 10u);
  EXPECT_EQ(cache.dim(), 16u);
  const std::string first = testing::read_file(c.out);
  c.workers = 1;
  run_embed(c);
  EXPECT_EQ(testing::read_file(c.out), first);
}

TEST_F(Embed, MissingFileIsSkippedButBreaksBudget) {
  std::ofstream(dir_ / "manifest.csv", std::ios::app) << "extra,nowhere.png,1,morph\n";
  const EmbedSummary s = run_embed(config());
  EXPECT_EQ(s.total, 11u);
  EXPECT_EQ(s.written, 10u);
  ASSERT_EQ(s.failures.size(), 1u);
  EXPECT_EQ(s.failures[0].sample_id, "extra");
  EXPECT_FALSE(s.within_budget());
  EXPECT_FALSE(EmbeddingCache::read(config().out).contains("extra"));
}

TEST_F(Embed, NeedsNeuralBackend) {
  RunConfig c = config();
  c.backend_dir.clear();
  EXPECT_EQ(code_of([&] { run_embed(c); }), ErrorCode::Config);
  c = config();
  c.backend_dir = dir_;
  EXPECT_EQ(code_of([&] { run_embed(c); }), ErrorCode::BackendUnavailable);
}

TEST_F(Embed, CacheEvalMatchesLiveEval) {
  RunConfig e = config();
  e.text_out = dir_ / "prompts.emb";
  run_embed(e);

  RunConfig live;
  live.manifest = dir_ / "manifest.csv";
  live.backend_dir = kNeural;
  live.selector = PromptSetSelector::All;
  live.out = dir_ / "live";
  RunConfig cached = live;
  cached.backend_dir.clear();
  cached.cache = e.out;
  cached.text_cache = e.text_out;
  cached.out = dir_ / "cached";
  const EvaluationReport a = run_eval(live).reports[0];
  const EvaluationReport b = run_eval(cached).reports[0];

  std::ifstream ia(live.out / "scores_All_dot.csv");
  std::ifstream ib(cached.out / "scores_All_dot.csv");
  const auto ra = read_scores_csv(ia);
  const auto rb = read_scores_csv(ib);
  ASSERT_EQ(ra.size(), rb.size());
  for (std::size_t i = 0; i < ra.size(); ++i) EXPECT_NEAR(ra[i].score, rb[i].score, 1e-4);
  EXPECT_EQ(a.subsets[0].eer, b.subsets[0].eer);
}

}  // namespace
}  // namespace madp
