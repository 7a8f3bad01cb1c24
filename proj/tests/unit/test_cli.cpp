#include <gtest/gtest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <string>

#include "synthetic_fixture.hpp"

namespace {

const std::string kCli = MADP_CLI_PATH;
const std::string kNeural = std::string(MADP_TEST_DATA) + "/neural";

struct CliResult {
  int code;
  std::string out;
};

CliResult run(const std::string& args) {
  const std::string cmd = kCli + " " + args + " 2>/dev/null";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  CliResult r{-1, {}};
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) r.out.append(buf, n);
  const int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = madp::testing::make_temp_dir("cli");
    fx_ = madp::testing::make_synthetic_fixture(dir_ / "fx");
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }

  std::string eval_args(const std::string& out) const {
    return "eval --manifest " + fx_.manifest.string() + " --cache " + fx_.image_cache.string() +
           " --text-cache " + fx_.text_cache.string() + " --out " + (dir_ / out).string();
  }

  std::filesystem::path dir_;
  madp::testing::SyntheticFixture fx_;
};

TEST_F(Cli, PromptsDump) {
  EXPECT_EQ(run("prompts dump --selector Single --label attack --dot").out,
            "face image morphing attack.\n");
  const CliResult id = run("prompts dump --selector ID --label bona_fide");
  EXPECT_EQ(id.code, 0);
  EXPECT_EQ(id.out.substr(id.out.size() - 29), "teen bona-fide presentation.\n");
  const CliResult all = run("prompts dump --selector All --label attack --no-dot");
  EXPECT_EQ(std::count(all.out.begin(), all.out.end(), '\n'), 60);
  EXPECT_EQ(all.out.find(".\n"), std::string::npos);
  EXPECT_EQ(run("prompts dump --selector Ex").code, 2);
}

TEST_F(Cli, EvalWritesReportsAndIsDeterministic) {
  const CliResult a = run(eval_args("a") + " --selector Pr+Ap --dot --norm clip");
  ASSERT_EQ(a.code, 0);
  EXPECT_NE(a.out.find("report_Pr_Ap_dot.json"), std::string::npos);
  ASSERT_EQ(run(eval_args("b") + " --preset Pr+Ap --workers 1").code, 0);
  EXPECT_EQ(madp::testing::read_file(dir_ / "a" / "report_Pr_Ap_dot.json"),
            madp::testing::read_file(dir_ / "b" / "report_Pr_Ap_dot.json"));
}

TEST_F(Cli, ConfigFileAndFlagPrecedence) {
  std::ofstream(dir_ / "run.toml") << "selector = ID\ndot = true\n";
  ASSERT_EQ(run(eval_args("c") + " --config " + (dir_ / "run.toml").string() + " --no-dot").code, 0);
  EXPECT_TRUE(std::filesystem::exists(dir_ / "c" / "report_ID_nodot.json"));
  ASSERT_EQ(run(eval_args("g") + " --selector grid").code, 0);
  int n = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir_ / "g")) {
    n += e.path().extension() == ".json" ? 1 : 0;
  }
  EXPECT_EQ(n, 8);
}

TEST_F(Cli, MetricsFromScores) {
  ASSERT_EQ(run(eval_args("m")).code, 0);
  const CliResult json = run("metrics --scores " + (dir_ / "m" / "scores_Single_dot.csv").string());
  EXPECT_EQ(json.code, 0);
  EXPECT_NE(json.out.find("\"Worst\""), std::string::npos);
  const CliResult table =
      run("metrics --format table --scores " + (dir_ / "m" / "scores_Single_dot.csv").string());
  EXPECT_NE(table.out.find("Average"), std::string::npos);
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("eval --manifest x").code, 2);
  EXPECT_EQ(run(eval_args("e") + " --norm imagenet").code, 2);
  std::ofstream(fx_.manifest, std::ios::app) << "ghost,g.png,1,morph_a\n";
  EXPECT_EQ(run(eval_args("e")).code, 3);
  EXPECT_EQ(run("eval --manifest " + fx_.manifest.string() + " --backend /nonexistent --out " +
                (dir_ / "e").string())
                .code,
            4);
  EXPECT_EQ(run("metrics --scores /nonexistent.csv").code, 3);
}

TEST_F(Cli, EmbedBudget) {
  {
    std::ofstream m(dir_ / "m.csv");
    m << "id,path,label,subset\n";
    for (int i = 0; i < 10; ++i) {
      m << "img_" << i << ',' << kNeural << "/images/img_00" << i << ".png," << (i < 5 ? 0 : 1)
        << ',' << (i < 5 ? "bf" : "morph") << '\n';
    }
  }
  const std::string base = "embed --manifest " + (dir_ / "m.csv").string() + " --backend " +
                           kNeural + " --out " + (dir_ / "c.emb").string();
  const CliResult ok = run(base);
  EXPECT_EQ(ok.code, 0);
  EXPECT_NE(ok.out.find("embedded 10 of 10"), std::string::npos);
  std::ofstream(dir_ / "m.csv", std::ios::app) << "lost,nowhere.png,1,morph\n";
  const CliResult over = run(base);
  EXPECT_EQ(over.code, 3);
  EXPECT_NE(over.out.find("embedded 10 of 11"), std::string::npos);
}

}  // namespace
