#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "core/embedding.hpp"

namespace madp {

class EmbeddingBackend;

enum class PromptCategory { Identity, Presentation, Appearance };

enum class PromptSetSelector { Single, ID, Pr, Ap, ID_Pr, ID_Ap, Pr_Ap, All };

inline constexpr std::array<PromptSetSelector, 8> kAllSelectors = {
    PromptSetSelector::Single, PromptSetSelector::ID,    PromptSetSelector::Pr,
    PromptSetSelector::Ap,     PromptSetSelector::ID_Pr, PromptSetSelector::ID_Ap,
    PromptSetSelector::Pr_Ap,  PromptSetSelector::All};

std::string_view selector_name(PromptSetSelector selector) noexcept;

// Accepts the canonical names ("Pr_Ap") and the "+" spelling ("Pr+Ap"),
// case-insensitively.
std::optional<PromptSetSelector> parse_selector(std::string_view name);

// Categories concatenated by a selector, in ID, Pr, Ap order. Empty for Single.
std::vector<PromptCategory> selector_categories(PromptSetSelector selector);

// Prompts per class: 1, 20, 40 or 60.
std::size_t prompt_count(PromptSetSelector selector) noexcept;

// The 20 templates of one attribute list, in table order.
std::span<const std::string_view> category_templates(PromptCategory category) noexcept;

// Text substituted for "{}".
std::string_view class_definition(Label label) noexcept;

class PromptTemplate {
 public:
  // Throws MalformedTemplate unless the text holds exactly one "{}" and no
  // uppercase letters.
  explicit PromptTemplate(std::string text);

  const std::string& text() const noexcept { return text_; }

 private:
  std::string text_;
};

// Substitutes the class definition; the result ends in "." iff dot_mode.
std::string expand(const PromptTemplate& tmpl, Label label, bool dot_mode);

struct PromptLists {
  std::vector<std::string> bona_fide;
  std::vector<std::string> attack;

  const std::vector<std::string>& for_label(Label label) const noexcept {
    return label == Label::BonaFide ? bona_fide : attack;
  }
};

PromptLists build_prompt_lists(PromptSetSelector selector, bool dot_mode);

// Every distinct prompt string any selector can produce, for both dot modes
// (2 x 122 strings).
std::vector<std::string> all_shipped_prompts();

struct ClassPrototype {
  Embedding bona_fide;
  Embedding attack;
  PromptSetSelector selector = PromptSetSelector::Single;
  bool dot_mode = true;
  bool normalize_before_average = true;
  std::size_t prompt_count = 1;
};

// Mean of the given embeddings (each unit-normalized first when requested),
// renormalized. Throws EmptyList, DimensionMismatch, or ZeroNorm when the
// mean collapses.
Embedding aggregate_embeddings(std::span<const Embedding> embeddings,
                               bool normalize_before_average);

ClassPrototype aggregate(const EmbeddingBackend& backend, PromptSetSelector selector,
                         bool dot_mode, bool normalize_before_average = true);

// Builds each prototype once per configuration and hands out shared
// read-only references afterwards.
class PrototypeStore {
 public:
  explicit PrototypeStore(const EmbeddingBackend& backend) : backend_(backend) {}

  const ClassPrototype& get(PromptSetSelector selector, bool dot_mode,
                            bool normalize_before_average);

 private:
  const EmbeddingBackend& backend_;
  std::mutex mutex_;
  std::map<std::tuple<PromptSetSelector, bool, bool>, ClassPrototype> built_;
};

}  // namespace madp
