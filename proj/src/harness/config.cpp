#include "harness/config.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <string>
#include <thread>

#include "core/errors.hpp"

namespace madp {
namespace {

constexpr std::array<std::string_view, 10> kPresets = {
    "TI", "TI_wo_Dot", "TI-Dot", "ID", "Pr", "Ap", "ID+Pr", "ID+Ap", "Pr+Ap", "All"};

std::string fold(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '+' || c == '-' || c == ' ') c = '_';
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_bool(std::string_view key, std::string_view value) {
  const std::string v = fold(value);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  fail(ErrorCode::Config, "'" + std::string(key) + "' expects a boolean, got '" +
                              std::string(value) + "'");
}

}  // namespace

std::span<const std::string_view> preset_names() noexcept { return kPresets; }

void apply_preset(RunConfig& config, std::string_view preset) {
  const std::string p = fold(preset);
  config.grid = false;
  config.profile = &NormalizationProfile::clip_native();
  if (p == "ti") {
    config.selector = PromptSetSelector::Single;
    config.dot_mode = false;
    config.profile = &NormalizationProfile::half();
  } else if (p == "ti_wo_dot") {
    config.selector = PromptSetSelector::Single;
    config.dot_mode = false;
  } else if (p == "ti_dot") {
    config.selector = PromptSetSelector::Single;
    config.dot_mode = true;
  } else if (const auto s = parse_selector(preset); s && *s != PromptSetSelector::Single) {
    config.selector = *s;
    config.dot_mode = true;
  } else {
    fail(ErrorCode::Config, "unknown preset '" + std::string(preset) + "'");
  }
}

void apply_setting(RunConfig& config, std::string_view key, std::string_view value) {
  const std::string k = fold(key);
  if (k == "manifest") {
    config.manifest = std::string(value);
  } else if (k == "backend") {
    config.backend_dir = std::string(value);
  } else if (k == "cache") {
    config.cache = std::string(value);
  } else if (k == "text_cache") {
    config.text_cache = std::string(value);
  } else if (k == "out") {
    config.out = std::string(value);
  } else if (k == "text_out") {
    config.text_out = std::string(value);
  } else if (k == "selector") {
    if (fold(value) == "grid") {
      config.grid = true;
    } else if (const auto s = parse_selector(value)) {
      config.grid = false;
      config.selector = *s;
    } else {
      fail(ErrorCode::Config, "unknown selector '" + std::string(value) + "'");
    }
  } else if (k == "dot") {
    config.dot_mode = parse_bool(key, value);
  } else if (k == "norm" || k == "normalization") {
    config.profile = &NormalizationProfile::parse(value);
  } else if (k == "normalize_before_average") {
    config.normalize_before_average = parse_bool(key, value);
  } else if (k == "aggregate_raw") {
    config.normalize_before_average = !parse_bool(key, value);
  } else if (k == "preserve_aspect") {
    config.preserve_aspect = parse_bool(key, value);
  } else if (k == "check_paths") {
    config.check_paths = parse_bool(key, value);
  } else if (k == "workers" || k == "threads") {
    unsigned n = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), n);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
      fail(ErrorCode::Config, "workers expects a non-negative integer");
    }
    config.workers = n;
  } else if (k == "preset") {
    apply_preset(config, value);
  } else {
    fail(ErrorCode::Config, "unknown setting '" + std::string(key) + "'");
  }
}

void load_config_file(RunConfig& config, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Config, "cannot open config file '" + path.string() + "'");
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty() || line.front() == '[') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      fail(ErrorCode::Config, path.string() + ":" + std::to_string(line_no) + ": expected key = value");
    }
    const std::string_view key = trim(line.substr(0, eq));
    std::string_view value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    apply_setting(config, key, value);
  }
}

unsigned resolve_workers(unsigned configured) {
  if (configured > 0) return configured;
  if (const char* env = std::getenv("MADPROMPTS_THREADS")) {
    unsigned n = 0;
    const std::string_view v = env;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), n);
    if (ec == std::errc() && ptr == v.data() + v.size() && n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace madp
