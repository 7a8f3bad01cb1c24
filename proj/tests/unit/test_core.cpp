#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <random>
#include <vector>

#include "core/embedding.hpp"
#include "core/errors.hpp"
#include "core/logging.hpp"
#include "core/parallel.hpp"

namespace madp {
namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no madp::Error thrown";
  return ErrorCode::Io;
}

TEST(Embedding, RejectsEmpty) {
  EXPECT_EQ(code_of([] { Embedding e(std::vector<double>{}); }), ErrorCode::InvalidArgument);
}

TEST(Embedding, FromFloatsWidens) {
  const std::vector<float> f{0.5f, -0.25f, 1.0f};
  const Embedding e = Embedding::from_floats(f);
  ASSERT_EQ(e.dim(), 3u);
  EXPECT_EQ(e[1], -0.25);
}

TEST(Embedding, NormalizeGivesUnitVector) {
  const Embedding n = l2_normalize(Embedding({3.0, 4.0}));
  EXPECT_DOUBLE_EQ(n[0], 0.6);
  EXPECT_DOUBLE_EQ(n[1], 0.8);
  EXPECT_TRUE(n.is_unit());
}

TEST(Embedding, NormalizeBelowFloorThrows) {
  EXPECT_EQ(code_of([] { l2_normalize(Embedding({0.0, 0.0, 0.0})); }), ErrorCode::ZeroNorm);
  EXPECT_EQ(code_of([] { l2_normalize(Embedding({1e-13, 0.0})); }), ErrorCode::ZeroNorm);
  EXPECT_NO_THROW(l2_normalize(Embedding({1e-11, 0.0})));
}

TEST(Embedding, CosineBasics) {
  const Embedding a({1.0, 0.0});
  const Embedding b({0.0, 2.0});
  EXPECT_DOUBLE_EQ(cosine_similarity(a, a), 1.0);
  EXPECT_DOUBLE_EQ(cosine_similarity(a, b), 0.0);
  EXPECT_DOUBLE_EQ(cosine_similarity(a, Embedding({-5.0, 0.0})), -1.0);
}

TEST(Embedding, CosineErrors) {
  EXPECT_EQ(code_of([] { cosine_similarity(Embedding({1.0}), Embedding({1.0, 0.0})); }),
            ErrorCode::DimensionMismatch);
  EXPECT_EQ(code_of([] { cosine_similarity(Embedding({1.0, 0.0}), Embedding({0.0, 0.0})); }),
            ErrorCode::ZeroNorm);
}

TEST(Embedding, CosineStaysInRange) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int i = 0; i < 200; ++i) {
    std::vector<double> v(17);
    for (double& x : v) x = g(rng);
    const Embedding e(v);
    const double c = cosine_similarity(e, e);
    EXPECT_LE(c, 1.0);
    EXPECT_NEAR(c, 1.0, 1e-12);
  }
}

TEST(Label, RoundTrip) {
  EXPECT_EQ(label_from_int(0), Label::BonaFide);
  EXPECT_EQ(label_from_int(1), Label::Attack);
  EXPECT_EQ(to_int(Label::Attack), 1);
  EXPECT_EQ(code_of([] { label_from_int(2); }), ErrorCode::InvalidArgument);
}

TEST(Errors, EveryCodeHasAName) {
  for (int c = 0; c <= static_cast<int>(ErrorCode::Io); ++c) {
    EXPECT_FALSE(to_string(static_cast<ErrorCode>(c)).empty());
  }
}

TEST(Logging, SinkReceivesMessages) {
  std::vector<std::pair<log::Level, std::string>> seen;
  log::set_sink([&](log::Level l, std::string_view m) { seen.emplace_back(l, std::string(m)); });
  log::warn("careful");
  log::error("broken");
  log::set_sink({});
  ASSERT_EQ(seen.size(), 2u);
  EXPECT_EQ(seen[0].first, log::Level::Warn);
  EXPECT_EQ(seen[1].second, "broken");
}

TEST(Parallel, VisitsEveryIndexOnce) {
  for (unsigned workers : {1u, 2u, 8u}) {
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(hits.size(), workers, [&](std::size_t i) { ++hits[i]; });
    for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  }
}

TEST(Parallel, RethrowsAfterJoin) {
  std::atomic<int> done{0};
  EXPECT_THROW(parallel_for(100, 4,
                            [&](std::size_t i) {
                              if (i == 37) throw std::runtime_error("boom");
                              ++done;
                            }),
               std::runtime_error);
  EXPECT_EQ(done.load(), 99);
}

}  // namespace
}  // namespace madp
