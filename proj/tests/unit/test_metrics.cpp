#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "core/errors.hpp"
#include "metrics/metrics.hpp"
#include "metrics/report.hpp"
#include "metrics_oracle.hpp"

namespace madp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ScoreSet set(std::vector<double> bf, std::vector<double> ma) { return {std::move(bf), std::move(ma)}; }

TEST(Sweep, PerfectSeparation) {
  const auto points = sweep(set({-1.0}, {1.0}));
  ASSERT_EQ(points.size(), 3u);
  EXPECT_EQ(points[1].threshold, 1.0);
  EXPECT_EQ(points[1].apcer, 0.0);
  EXPECT_EQ(points[1].bpcer, 0.0);
  EXPECT_EQ(points[2].threshold, kInf);
}

TEST(Sweep, SmallCrossing) {
  for (const OperatingPoint& p : sweep(set({0.1, 0.4}, {0.3, 0.6}))) {
    if (p.threshold == 0.4) {
      EXPECT_EQ(p.apcer, 0.5);
      EXPECT_EQ(p.bpcer, 0.5);
    }
  }
}

TEST(Sweep, AllScoresEqual) {
  const auto points = sweep(set({0.2, 0.2}, {0.2}));
  ASSERT_EQ(points.size(), 2u);
  EXPECT_EQ(points[0].threshold, 0.2);
  EXPECT_EQ(points[0].apcer, 0.0);
  EXPECT_EQ(points[0].bpcer, 1.0);
  EXPECT_EQ(points[1].apcer, 1.0);
  EXPECT_EQ(points[1].bpcer, 0.0);
}

TEST(Sweep, Errors) {
  for (const ScoreSet& s : {set({}, {1.0}), set({1.0}, {})}) {
    try {
      sweep(s);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::DegenerateClassCounts);
    }
  }
  try {
    sweep(set({std::nan("")}, {1.0}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Data);
  }
}

TEST(Sweep, Monotone) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 200; ++i) {
    const auto points = sweep(testing::random_score_set(rng));
    for (std::size_t k = 1; k < points.size(); ++k) {
      EXPECT_LT(points[k - 1].threshold, points[k].threshold);
      EXPECT_LE(points[k - 1].apcer, points[k].apcer);
      EXPECT_GE(points[k - 1].bpcer, points[k].bpcer);
    }
  }
}

TEST(Eer, Examples) {
  EXPECT_EQ(eer(set({-1.0}, {1.0})), 0.0);
  EXPECT_EQ(eer(set({0.1, 0.4}, {0.3, 0.6})), 50.0);
  EXPECT_EQ(eer(set({1.0}, {-1.0})), 100.0);
}

TEST(ErrorAtFixed, Examples) {
  const auto perfect = error_at_fixed(set({-1.0}, {1.0}), FixedMetric::BPCER, 10);
  EXPECT_EQ(perfect.value, 0.0);
  EXPECT_TRUE(perfect.constraint_met);
  EXPECT_EQ(error_at_fixed(set({0.0}, {1.0}), FixedMetric::APCER, 1).value, 0.0);

  std::vector<double> bf, ma;
  for (int i = 1; i <= 10; ++i) {
    bf.push_back(i / 10.0);
    ma.push_back(0.45 + i / 10.0);
  }
  const ScoreSet s = set(bf, ma);
  const auto want = testing::oracle_error_at_fixed(bf, ma, true, 20);
  const auto got = error_at_fixed(s, FixedMetric::BPCER, 20);
  EXPECT_NEAR(got.value, want.value.percent(), 1e-12);
  EXPECT_EQ(got.threshold, want.threshold);
  // BPCER <= 20% first holds at t = 0.85, leaving attacks 0.55, 0.65, 0.75 missed
  EXPECT_NEAR(got.value, 30.0, 1e-12);
}

TEST(ErrorAtFixed, InfinityPointAlwaysFeasibleForBpcer) {
  const auto r = error_at_fixed(set({5.0, 5.0}, {-5.0}), FixedMetric::BPCER, 1);
  EXPECT_TRUE(r.constraint_met);
  EXPECT_EQ(r.value, 100.0);
  EXPECT_EQ(r.threshold, kInf);
  const auto low = error_at_fixed(set({5.0, 5.0}, {-5.0}), FixedMetric::APCER, 1);
  EXPECT_TRUE(low.constraint_met);
  EXPECT_EQ(low.value, 100.0);
  EXPECT_EQ(low.threshold, -5.0);
}

TEST(Oracle, RandomizedEquivalence) {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 300; ++i) {
    const ScoreSet s = testing::random_score_set(rng);
    const std::string mismatch = testing::oracle_mismatch(s);
    ASSERT_TRUE(mismatch.empty()) << "set " << i << ": " << mismatch;
  }
}

TEST(Oracle, SymmetryUnderNegationAndLabelSwap) {
  std::mt19937_64 rng(77);
  for (int i = 0; i < 200; ++i) {
    const ScoreSet s = testing::random_score_set(rng);
    ScoreSet flipped;
    for (double v : s.attack) flipped.bona_fide.push_back(-v);
    for (double v : s.bona_fide) flipped.attack.push_back(-v);
    EXPECT_NEAR(eer(flipped), eer(s),
                100.0 / static_cast<double>(std::min(s.bona_fide.size(), s.attack.size())));
    const auto a = testing::oracle_eer(flipped.bona_fide, flipped.attack);
    EXPECT_NEAR(eer(flipped), a.percent(), 1e-9);
  }
}

TEST(Oracle, StrictlyIncreasingTransformKeepsMetrics) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    const ScoreSet s = testing::random_score_set(rng);
    ScoreSet t;
    for (double v : s.bona_fide) t.bona_fide.push_back(std::exp(3.0 * v) + 7.0);
    for (double v : s.attack) t.attack.push_back(std::exp(3.0 * v) + 7.0);
    const MetricReport a = evaluate("x", s);
    const MetricReport b = evaluate("x", t);
    EXPECT_EQ(a.eer, b.eer);
    EXPECT_EQ(a.apcer_at_bpcer, b.apcer_at_bpcer);
    EXPECT_EQ(a.bpcer_at_apcer, b.bpcer_at_apcer);
  }
}

MetricReport with_eer(std::string name, double v) {
  MetricReport r = evaluate(std::move(name), set({0.0}, {1.0}));
  r.eer = v;
  return r;
}

TEST(AggregateRows, Examples) {
  const std::vector<MetricReport> one{with_eer("a", 12.5)};
  const AggregateRows single = aggregate_rows(one);
  EXPECT_EQ(single.average.eer, 12.5);
  EXPECT_EQ(single.worst.eer, 12.5);

  const std::vector<MetricReport> two{with_eer("a", 10.0), with_eer("b", 20.0)};
  const AggregateRows pair = aggregate_rows(two);
  EXPECT_EQ(pair.average.eer, 15.0);
  EXPECT_EQ(pair.worst.eer, 20.0);
  EXPECT_EQ(pair.average.n_attack, 2u);
  EXPECT_EQ(pair.average.n_bf, 1u);
  EXPECT_EQ(pair.average.subset, "Average");
  EXPECT_EQ(pair.worst.subset, "Worst");

  std::vector<MetricReport> six;
  for (double v : {18.10, 5.40, 3.50, 16.06, 18.40, 24.50}) six.push_back(with_eer("s", v));
  const AggregateRows table = aggregate_rows(six);
  EXPECT_NEAR(table.average.eer, 14.33, 0.005);
  EXPECT_EQ(table.worst.eer, 24.50);

  try {
    aggregate_rows({});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyList);
  }
}

TEST(AggregateRows, ConstraintFlagsPropagate) {
  std::vector<MetricReport> rows{with_eer("a", 1.0), with_eer("b", 2.0)};
  rows[1].apcer_at_bpcer_met[1] = false;
  const AggregateRows agg = aggregate_rows(rows);
  EXPECT_FALSE(agg.average.apcer_at_bpcer_met.at(1));
  EXPECT_TRUE(agg.worst.apcer_at_bpcer_met.at(10));
}

EvaluationReport sample_report() {
  EvaluationReport r;
  r.selector = "Pr_Ap";
  r.normalization = "clip";
  r.prompt_count = 40;
  r.bona_fide_subset = "bona_fide";
  r.subsets.push_back(evaluate("m,a", set({0.1, 0.4}, {0.3, 0.6})));
  r.subsets.push_back(evaluate("m_b", set({-1.0}, {1.0})));
  const AggregateRows agg = aggregate_rows(r.subsets);
  r.average = agg.average;
  r.worst = agg.worst;
  return r;
}

TEST(Report, JsonSchema) {
  std::ostringstream out;
  write_json(out, sample_report());
  const auto j = nlohmann::json::parse(out.str());
  EXPECT_EQ(j["selector"], "Pr_Ap");
  ASSERT_EQ(j["rows"].size(), 4u);
  const auto& row = j["rows"][0];
  EXPECT_EQ(row["subset"], "m,a");
  EXPECT_EQ(row["n_bf"], 2);
  EXPECT_EQ(row["eer"].get<double>(), 50.0);
  for (const char* k : {"1", "10", "20"}) {
    EXPECT_TRUE(row["apcer_at_bpcer"].contains(k));
    EXPECT_TRUE(row["bpcer_at_apcer"].contains(k));
    EXPECT_TRUE(row["constraint_flags"]["apcer_at_bpcer"][k].is_boolean());
  }
  EXPECT_EQ(j["rows"][2]["subset"], "Average");
  EXPECT_EQ(j["rows"][3]["subset"], "Worst");
  EXPECT_EQ(out.str().back(), '\n');
}

TEST(Report, CsvTwoDecimals) {
  std::ostringstream out;
  write_csv(out, sample_report());
  std::istringstream in(out.str());
  std::string header, first;
  std::getline(in, header);
  std::getline(in, first);
  EXPECT_EQ(header,
            "subset,n_bf,n_attack,eer,apcer_at_bpcer_1,apcer_at_bpcer_10,apcer_at_bpcer_20,"
            "bpcer_at_apcer_1,bpcer_at_apcer_10,bpcer_at_apcer_20");
  EXPECT_EQ(first.substr(0, 21), "\"m,a\",2,2,50.00,50.00");
}

TEST(Report, TableMentionsEveryRow) {
  std::ostringstream out;
  write_table(out, sample_report());
  for (const char* name : {"m_b", "Average", "Worst"}) {
    EXPECT_NE(out.str().find(name), std::string::npos);
  }
}

}  // namespace
}  // namespace madp
