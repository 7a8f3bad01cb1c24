#include "prompts/prompt_engine.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "backend/backend.hpp"
#include "core/errors.hpp"

namespace madp {
namespace {

constexpr std::array<std::string_view, 20> kIdentity = {
    "male {}.",   "female {}.", "young {}.",          "elderly {}.", "child {}.",
    "adult {}.",  "asian {}.",  "black {}.",          "white {}.",   "latino {}.",
    "middle eastern {}.", "indian {}.", "blonde {}.", "brunette {}.", "redhead {}.",
    "tall {}.",   "short {}.",  "thin {}.",           "obese {}.",   "teen {}."};

constexpr std::array<std::string_view, 20> kPresentation = {
    "frontal {}.",  "profile {}.",   "tilted {}.",     "rotated {}.",   "upward {}.",
    "downward {}.", "sideways {}.",  "leftward {}.",   "rightward {}.", "angled {}.",
    "inclined {}.", "declined {}.",  "oblique {}.",    "twisted {}.",   "turned {}.",
    "slanted {}.",  "offcenter {}.", "misaligned {}.", "skewed {}.",    "asymmetric {}."};

constexpr std::array<std::string_view, 20> kAppearance = {
    "bearded {}.",  "moustached {}.", "smiling {}.",        "frowning {}.", "eyeglasses {}.",
    "sunglasses {}.", "wrinkled {}.", "balding {}.",        "occluded {}.", "scarred {}.",
    "pierced {}.",  "tanned {}.",     "pale {}.",           "makeup {}.",   "freckled {}.",
    "chubby-cheeked {}.", "sweaty {}.", "dirty {}.",        "blinking {}.", "tearful {}."};

constexpr std::string_view kSingleTemplate = "{}";
constexpr std::string_view kPlaceholder = "{}";

std::string fold(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '+') c = '_';
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

}  // namespace

std::string_view selector_name(PromptSetSelector selector) noexcept {
  switch (selector) {
    case PromptSetSelector::Single: return "Single";
    case PromptSetSelector::ID: return "ID";
    case PromptSetSelector::Pr: return "Pr";
    case PromptSetSelector::Ap: return "Ap";
    case PromptSetSelector::ID_Pr: return "ID_Pr";
    case PromptSetSelector::ID_Ap: return "ID_Ap";
    case PromptSetSelector::Pr_Ap: return "Pr_Ap";
    case PromptSetSelector::All: return "All";
  }
  return "?";
}

std::optional<PromptSetSelector> parse_selector(std::string_view name) {
  const std::string wanted = fold(name);
  for (PromptSetSelector s : kAllSelectors) {
    if (fold(selector_name(s)) == wanted) return s;
  }
  return std::nullopt;
}

std::vector<PromptCategory> selector_categories(PromptSetSelector selector) {
  using C = PromptCategory;
  switch (selector) {
    case PromptSetSelector::Single: return {};
    case PromptSetSelector::ID: return {C::Identity};
    case PromptSetSelector::Pr: return {C::Presentation};
    case PromptSetSelector::Ap: return {C::Appearance};
    case PromptSetSelector::ID_Pr: return {C::Identity, C::Presentation};
    case PromptSetSelector::ID_Ap: return {C::Identity, C::Appearance};
    case PromptSetSelector::Pr_Ap: return {C::Presentation, C::Appearance};
    case PromptSetSelector::All: return {C::Identity, C::Presentation, C::Appearance};
  }
  return {};
}

std::size_t prompt_count(PromptSetSelector selector) noexcept {
  const std::size_t categories = selector_categories(selector).size();
  return categories == 0 ? 1 : 20 * categories;
}

std::span<const std::string_view> category_templates(PromptCategory category) noexcept {
  switch (category) {
    case PromptCategory::Identity: return kIdentity;
    case PromptCategory::Presentation: return kPresentation;
    case PromptCategory::Appearance: return kAppearance;
  }
  return {};
}

std::string_view class_definition(Label label) noexcept {
  return label == Label::BonaFide ? "bona-fide presentation" : "face image morphing attack";
}

PromptTemplate::PromptTemplate(std::string text) : text_(std::move(text)) {
  const auto first = text_.find(kPlaceholder);
  if (first == std::string::npos || text_.find(kPlaceholder, first + 1) != std::string::npos) {
    fail(ErrorCode::MalformedTemplate,
         "template '" + text_ + "' must contain exactly one {} placeholder");
  }
  if (std::any_of(text_.begin(), text_.end(),
                  [](unsigned char c) { return std::isupper(c) != 0; })) {
    fail(ErrorCode::MalformedTemplate, "template '" + text_ + "' must be lowercase");
  }
}

std::string expand(const PromptTemplate& tmpl, Label label, bool dot_mode) {
  std::string out = tmpl.text();
  out.replace(out.find(kPlaceholder), kPlaceholder.size(), class_definition(label));
  const bool has_dot = !out.empty() && out.back() == '.';
  if (dot_mode && !has_dot) out += '.';
  if (!dot_mode && has_dot) out.pop_back();
  return out;
}

PromptLists build_prompt_lists(PromptSetSelector selector, bool dot_mode) {
  std::vector<std::string_view> templates;
  const auto categories = selector_categories(selector);
  if (categories.empty()) {
    templates.push_back(kSingleTemplate);
  }
  for (PromptCategory c : categories) {
    const auto list = category_templates(c);
    templates.insert(templates.end(), list.begin(), list.end());
  }
  PromptLists lists;
  lists.bona_fide.reserve(templates.size());
  lists.attack.reserve(templates.size());
  for (std::string_view t : templates) {
    const PromptTemplate tmpl{std::string(t)};
    lists.bona_fide.push_back(expand(tmpl, Label::BonaFide, dot_mode));
    lists.attack.push_back(expand(tmpl, Label::Attack, dot_mode));
  }
  return lists;
}

std::vector<std::string> all_shipped_prompts() {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (bool dot : {true, false}) {
    for (PromptSetSelector s : {PromptSetSelector::Single, PromptSetSelector::All}) {
      const PromptLists lists = build_prompt_lists(s, dot);
      for (const auto* list : {&lists.bona_fide, &lists.attack}) {
        for (const std::string& p : *list) {
          if (seen.insert(p).second) out.push_back(p);
        }
      }
    }
  }
  return out;
}

Embedding aggregate_embeddings(std::span<const Embedding> embeddings,
                               bool normalize_before_average) {
  if (embeddings.empty()) fail(ErrorCode::EmptyList, "cannot aggregate an empty prompt set");
  // N = 1 is the single-prompt decision; normalizing twice could move the last bit
  if (embeddings.size() == 1) return l2_normalize(embeddings.front());
  const std::size_t dim = embeddings.front().dim();
  std::vector<double> sum(dim, 0.0);
  for (const Embedding& e : embeddings) {
    if (e.dim() != dim) {
      fail(ErrorCode::DimensionMismatch, "prompt embeddings disagree on dim");
    }
    if (normalize_before_average) {
      const Embedding unit = l2_normalize(e);
      for (std::size_t i = 0; i < dim; ++i) sum[i] += unit[i];
    } else {
      for (std::size_t i = 0; i < dim; ++i) sum[i] += e[i];
    }
  }
  const double n = static_cast<double>(embeddings.size());
  for (double& v : sum) v /= n;
  try {
    return l2_normalize(Embedding(std::move(sum)));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ZeroNorm) throw;
    fail(ErrorCode::ZeroNorm, "aggregated prompt embedding collapsed below the norm floor");
  }
}

ClassPrototype aggregate(const EmbeddingBackend& backend, PromptSetSelector selector,
                         bool dot_mode, bool normalize_before_average) {
  const PromptLists lists = build_prompt_lists(selector, dot_mode);
  auto embed_all = [&](const std::vector<std::string>& prompts) {
    std::vector<Embedding> out;
    out.reserve(prompts.size());
    for (const std::string& p : prompts) out.push_back(backend.embed_text(p));
    return aggregate_embeddings(out, normalize_before_average);
  };
  return ClassPrototype{embed_all(lists.bona_fide), embed_all(lists.attack), selector,
                        dot_mode,                   normalize_before_average,
                        lists.bona_fide.size()};
}

const ClassPrototype& PrototypeStore::get(PromptSetSelector selector, bool dot_mode,
                                          bool normalize_before_average) {
  std::lock_guard lock(mutex_);
  const auto key = std::tuple{selector, dot_mode, normalize_before_average};
  auto it = built_.find(key);
  if (it == built_.end()) {
    it = built_.emplace(key, aggregate(backend_, selector, dot_mode, normalize_before_average))
             .first;
  }
  return it->second;
}

}  // namespace madp
