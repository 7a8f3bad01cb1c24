#include <cstdio>
#include <deque>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "madprompts/madprompts.h"

namespace {

using Settings = std::vector<std::pair<std::string, std::string>>;

int report(madp_status status) {
  if (status != MADP_OK) {
    std::fprintf(stderr, "madprompts: %s: %s\n", madp_status_string(status), madp_last_error());
  }
  return madp_exit_code(status);
}

struct ConfigGuard {
  madp_config* cfg = nullptr;
  ~ConfigGuard() { madp_config_destroy(cfg); }
};

// Config file first, then the preset, then explicit flags.
madp_status build_config(const std::string& file, const Settings& flags, ConfigGuard& guard) {
  madp_status s = madp_config_create(&guard.cfg);
  if (s != MADP_OK) return s;
  if (!file.empty() && (s = madp_config_load_file(guard.cfg, file.c_str())) != MADP_OK) return s;
  for (const auto& [key, value] : flags) {
    if (key != "preset") continue;
    if ((s = madp_config_set(guard.cfg, key.c_str(), value.c_str())) != MADP_OK) return s;
  }
  for (const auto& [key, value] : flags) {
    if (key == "preset") continue;
    if ((s = madp_config_set(guard.cfg, key.c_str(), value.c_str())) != MADP_OK) return s;
  }
  return MADP_OK;
}

void print_list(const madp_strlist* list) {
  for (size_t i = 0; i < madp_strlist_size(list); ++i) std::puts(madp_strlist_get(list, i));
}

// Options that map onto config keys; only the ones given on the command line
// are forwarded.
class FlagSet {
 public:
  explicit FlagSet(CLI::App* app) : app_(app) {}

  void text(const std::string& name, const std::string& key, const std::string& help) {
    Entry& e = entries_.emplace_back();
    e.key = key;
    e.option = app_->add_option(name, e.text, help);
  }

  // negate: the flag being present sets key to false.
  void toggle(const std::string& name, const std::string& key, const std::string& help,
              bool negate = false) {
    Entry& e = entries_.emplace_back();
    e.key = key;
    e.is_flag = true;
    e.negate = negate;
    e.option = app_->add_flag(name, e.flag, help);
  }

  Settings collect() const {
    Settings out;
    for (const Entry& e : entries_) {
      if (e.option->count() == 0) continue;
      if (e.is_flag) {
        out.emplace_back(e.key, e.flag != e.negate ? "true" : "false");
      } else {
        out.emplace_back(e.key, e.text);
      }
    }
    return out;
  }

 private:
  struct Entry {
    std::string key;
    std::string text;
    bool flag = false;
    bool is_flag = false;
    bool negate = false;
    CLI::Option* option = nullptr;
  };

  CLI::App* app_;
  std::deque<Entry> entries_;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Zero-shot morphing attack detection with prompt ensembles"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(madp_version()));

  std::string config_file;

  CLI::App* embed = app.add_subcommand("embed", "Encode manifest images into an embedding cache");
  embed->add_option("--config", config_file, "key=value config file");
  FlagSet embed_flags{embed};
  embed_flags.text("--manifest", "manifest", "Dataset manifest CSV");
  embed_flags.text("--backend", "backend", "Neural backend directory");
  embed_flags.text("--out", "out", "Output image cache (EMB1)");
  embed_flags.text("--text-out", "text_out", "Also write prompt embeddings to this cache");
  embed_flags.text("--norm", "norm", "clip or half");
  embed_flags.text("--workers", "workers", "Worker threads (0: MADPROMPTS_THREADS or all CPUs)");
  embed_flags.toggle("--preserve-aspect", "preserve_aspect", "Resize shorter side then center-crop");

  CLI::App* eval = app.add_subcommand("eval", "Score a manifest and write metric reports");
  eval->add_option("--config", config_file, "key=value config file");
  FlagSet eval_flags{eval};
  eval_flags.text("--manifest", "manifest", "Dataset manifest CSV");
  eval_flags.text("--cache", "cache", "Image embedding cache (EMB1)");
  eval_flags.text("--text-cache", "text_cache", "Prompt embedding cache (EMB1)");
  eval_flags.text("--backend", "backend", "Neural backend directory");
  eval_flags.text("--preset", "preset", "TI, TI_wo_Dot, TI-Dot, ID, Pr, Ap, ID+Pr, ID+Ap, Pr+Ap, All");
  eval_flags.text("--selector", "selector", "Single, ID, Pr, Ap, ID+Pr, ID+Ap, Pr+Ap, All or grid");
  eval_flags.text("--norm", "norm", "clip or half");
  eval_flags.text("--out", "out", "Report directory");
  eval_flags.text("--workers", "workers", "Worker threads (0: MADPROMPTS_THREADS or all CPUs)");
  eval_flags.toggle("--dot,!--no-dot", "dot", "Terminate prompts with a period");
  eval_flags.toggle("--aggregate-raw", "aggregate_raw", "Average prompt embeddings without normalizing");
  eval_flags.toggle("--preserve-aspect", "preserve_aspect", "Resize shorter side then center-crop");
  eval_flags.toggle("--skip-path-check", "check_paths", "Do not require image files to exist",
                    true);

  CLI::App* prompts = app.add_subcommand("prompts", "Prompt listings");
  prompts->require_subcommand(1);
  CLI::App* dump = prompts->add_subcommand("dump", "Print expanded prompts, one per line");
  std::string dump_selector = "Single";
  std::string dump_label = "attack";
  bool dump_dot = true;
  dump->add_option("--selector", dump_selector, "Prompt selector");
  dump->add_option("--label", dump_label, "bona_fide or attack")
      ->check(CLI::IsMember({"bona_fide", "bonafide", "attack", "0", "1"}, CLI::ignore_case));
  dump->add_flag("--dot,!--no-dot", dump_dot, "Terminate prompts with a period");

  CLI::App* metrics = app.add_subcommand("metrics", "Metrics from a score CSV");
  std::string scores_path;
  std::string format = "json";
  metrics->add_option("--scores", scores_path, "Score CSV")->required();
  metrics->add_option("--format", format, "json, csv or table")
      ->check(CLI::IsMember({"json", "csv", "table"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  if (embed->parsed()) {
    ConfigGuard guard;
    madp_status s = build_config(config_file, embed_flags.collect(), guard);
    if (s != MADP_OK) return report(s);
    madp_embed_result result{};
    s = madp_run_embed(guard.cfg, &result);
    if (s == MADP_OK || s == MADP_ERR_FAILURE_BUDGET) {
      std::printf("embedded %zu of %zu samples (%zu failed)\n", result.written, result.total,
                  result.failed);
      if (result.text_written) std::printf("embedded %zu prompts\n", result.text_written);
    }
    return report(s);
  }

  if (eval->parsed()) {
    ConfigGuard guard;
    madp_status s = build_config(config_file, eval_flags.collect(), guard);
    if (s != MADP_OK) return report(s);
    madp_strlist* files = nullptr;
    s = madp_run_eval(guard.cfg, &files);
    print_list(files);
    madp_strlist_destroy(files);
    return report(s);
  }

  if (dump->parsed()) {
    const bool attack = dump_label == "attack" || dump_label == "1";
    madp_strlist* list = nullptr;
    const madp_status s =
        madp_prompts_dump(dump_selector.c_str(), attack ? MADP_ATTACK : MADP_BONA_FIDE,
                          dump_dot ? 1 : 0, &list);
    print_list(list);
    madp_strlist_destroy(list);
    return report(s);
  }

  if (metrics->parsed()) {
    madp_strlist* out = nullptr;
    const madp_status s = madp_run_metrics(scores_path.c_str(), format.c_str(), &out);
    if (s == MADP_OK) std::fputs(madp_strlist_get(out, 0), stdout);
    madp_strlist_destroy(out);
    return report(s);
  }
  return 0;
}
