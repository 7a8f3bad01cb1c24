#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace madp {

// Byte-level BPE tokenizer in the CLIP convention: lowercased, whitespace
// collapsed, words split by the CLIP pre-tokenizer pattern, "</w>" marking
// the last symbol of each word, wrapped in start/end-of-text tokens.
// Loaded from a HuggingFace-style tokenizer.json.
class ClipTokenizer {
 public:
  static constexpr std::size_t kDefaultContextLength = 77;

  static ClipTokenizer from_file(const std::filesystem::path& path);
  static ClipTokenizer from_json(std::string_view json_text);

  // Ids including start/end tokens. Throws TokenizationOverflow when the
  // sequence exceeds the context length.
  std::vector<std::int64_t> encode(std::string_view text) const;

  // encode() padded with pad_id() up to context_length().
  std::vector<std::int64_t> encode_padded(std::string_view text) const;

  std::size_t context_length() const noexcept { return context_length_; }
  std::int64_t start_id() const noexcept { return start_id_; }
  std::int64_t end_id() const noexcept { return end_id_; }
  std::int64_t pad_id() const noexcept { return pad_id_; }
  std::size_t vocab_size() const noexcept { return vocab_.size(); }

 private:
  ClipTokenizer() = default;

  void bpe(const std::string& word, std::vector<std::int64_t>& out) const;

  std::unordered_map<std::string, std::int64_t> vocab_;
  std::unordered_map<std::string, std::size_t> merge_rank_;
  std::string end_of_word_ = "</w>";
  std::int64_t start_id_ = 0;
  std::int64_t end_id_ = 0;
  std::int64_t pad_id_ = 0;
  std::size_t context_length_ = kDefaultContextLength;
};

// Lowercase (ASCII), collapse whitespace runs to one space, trim.
std::string clean_text(std::string_view text);

// CLIP pre-tokenizer split:
//   <|startoftext|> | <|endoftext|> | 's|'t|'re|'ve|'m|'ll|'d | letters+ | digit | other+
// Non-ASCII bytes count as letters.
std::vector<std::string> split_words(std::string_view cleaned);

}  // namespace madp
