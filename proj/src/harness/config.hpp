#pragma once

#include <filesystem>
#include <span>
#include <string_view>

#include "preprocess/image.hpp"
#include "prompts/prompt_engine.hpp"

namespace madp {

struct RunConfig {
  std::filesystem::path manifest;
  std::filesystem::path backend_dir;  // neural runtime
  std::filesystem::path cache;        // image embedding cache
  std::filesystem::path text_cache;   // prompt embedding cache (optional)
  std::filesystem::path out;          // embed: cache file, eval: directory
  std::filesystem::path text_out;     // embed: optional prompt cache

  PromptSetSelector selector = PromptSetSelector::Single;
  bool grid = false;  // every selector in one run
  bool dot_mode = true;
  const NormalizationProfile* profile = &NormalizationProfile::clip_native();
  bool normalize_before_average = true;
  bool preserve_aspect = false;
  bool check_paths = true;
  unsigned workers = 0;  // 0: MADPROMPTS_THREADS, else logical CPUs
};

// Keys: manifest, backend, cache, text_cache, out, text_out, selector
// (a selector name or "grid"), dot, norm, normalize_before_average,
// aggregate_raw, preserve_aspect, check_paths, workers, preset.
// Throws Config on unknown keys or bad values.
void apply_setting(RunConfig& config, std::string_view key, std::string_view value);

// TI, TI_wo_Dot, TI-Dot, ID, Pr, Ap, ID+Pr, ID+Ap, Pr+Ap, All.
void apply_preset(RunConfig& config, std::string_view preset);
std::span<const std::string_view> preset_names() noexcept;

// key = value lines; '#' starts a comment, [sections] are ignored, values may
// be double-quoted.
void load_config_file(RunConfig& config, const std::filesystem::path& path);

unsigned resolve_workers(unsigned configured);

}  // namespace madp
