#include "backend/clip_tokenizer.hpp"

#include <array>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "core/errors.hpp"

namespace madp {
namespace {

constexpr std::string_view kStartToken = "<|startoftext|>";
constexpr std::string_view kEndToken = "<|endoftext|>";

void append_utf8(std::string& out, unsigned cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

// GPT-2 byte-to-unicode table: printable bytes map to themselves, the rest
// to code points from 256 upward.
const std::array<std::string, 256>& byte_symbols() {
  static const std::array<std::string, 256> table = [] {
    std::array<std::string, 256> t;
    auto printable = [](unsigned b) {
      return (b >= '!' && b <= '~') || (b >= 0xA1 && b <= 0xAC) || (b >= 0xAE && b <= 0xFF);
    };
    unsigned extra = 0;
    for (unsigned b = 0; b < 256; ++b) {
      const unsigned cp = printable(b) ? b : 256 + extra++;
      append_utf8(t[b], cp);
    }
    return t;
  }();
  return table;
}

bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}
bool is_letter(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}
bool is_digit(unsigned char c) { return c >= '0' && c <= '9'; }

}  // namespace

std::string clean_text(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (unsigned char c : text) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out += ' ';
      pending_space = false;
    }
    out += (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c);
  }
  return out;
}

std::vector<std::string> split_words(std::string_view s) {
  static constexpr std::array<std::string_view, 7> kContractions = {"'s", "'t", "'re", "'ve",
                                                                    "'m", "'ll", "'d"};
  std::vector<std::string> words;
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    if (is_space(c)) {
      ++i;
      continue;
    }
    const std::string_view rest = s.substr(i);
    std::size_t len = 0;
    if (rest.starts_with(kStartToken)) {
      len = kStartToken.size();
    } else if (rest.starts_with(kEndToken)) {
      len = kEndToken.size();
    } else if (c == '\'') {
      for (std::string_view k : kContractions) {
        if (rest.starts_with(k)) {
          len = k.size();
          break;
        }
      }
    }
    if (len == 0) {
      if (is_letter(c)) {
        while (len < rest.size() && is_letter(static_cast<unsigned char>(rest[len]))) ++len;
      } else if (is_digit(c)) {
        len = 1;
      } else {
        while (len < rest.size()) {
          const auto d = static_cast<unsigned char>(rest[len]);
          if (is_space(d) || is_letter(d) || is_digit(d)) break;
          ++len;
        }
      }
    }
    words.emplace_back(rest.substr(0, len));
    i += len;
  }
  return words;
}

ClipTokenizer ClipTokenizer::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::BackendUnavailable, "cannot open tokenizer spec '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

ClipTokenizer ClipTokenizer::from_json(std::string_view json_text) {
  using nlohmann::json;
  json spec;
  try {
    spec = json::parse(json_text);
  } catch (const json::exception& e) {
    fail(ErrorCode::BackendUnavailable, std::string("tokenizer spec is not valid JSON: ") + e.what());
  }
  ClipTokenizer tok;
  try {
    const json& model = spec.at("model");
    for (const auto& [piece, id] : model.at("vocab").items()) {
      tok.vocab_.emplace(piece, id.get<std::int64_t>());
    }
    std::size_t rank = 0;
    for (const json& merge : model.at("merges")) {
      std::string key;
      if (merge.is_string()) {
        key = merge.get<std::string>();
      } else {
        key = merge.at(0).get<std::string>() + " " + merge.at(1).get<std::string>();
      }
      tok.merge_rank_.emplace(std::move(key), rank++);
    }
    if (model.contains("end_of_word_suffix") && model["end_of_word_suffix"].is_string()) {
      tok.end_of_word_ = model["end_of_word_suffix"].get<std::string>();
    }
    bool have_start = false;
    bool have_end = false;
    if (spec.contains("added_tokens")) {
      for (const json& t : spec["added_tokens"]) {
        const auto content = t.at("content").get<std::string>();
        const auto id = t.at("id").get<std::int64_t>();
        tok.vocab_[content] = id;
        if (content == kStartToken) { tok.start_id_ = id; have_start = true; }
        if (content == kEndToken) { tok.end_id_ = id; have_end = true; }
      }
    }
    if (!have_start || !have_end) {
      for (auto [name, id, have] : {std::tuple{kStartToken, &tok.start_id_, &have_start},
                                    std::tuple{kEndToken, &tok.end_id_, &have_end}}) {
        if (*have) continue;
        const auto it = tok.vocab_.find(std::string(name));
        if (it == tok.vocab_.end()) {
          fail(ErrorCode::BackendUnavailable,
               "tokenizer spec lacks special token " + std::string(name));
        }
        *id = it->second;
      }
    }
    if (spec.contains("padding") && spec["padding"].is_object()) {
      const json& pad = spec["padding"];
      if (pad.contains("pad_id")) tok.pad_id_ = pad["pad_id"].get<std::int64_t>();
      if (pad.contains("strategy") && pad["strategy"].is_object() &&
          pad["strategy"].contains("Fixed")) {
        tok.context_length_ = pad["strategy"]["Fixed"].get<std::size_t>();
      }
    }
    if (spec.contains("truncation") && spec["truncation"].is_object() &&
        spec["truncation"].contains("max_length")) {
      tok.context_length_ = spec["truncation"]["max_length"].get<std::size_t>();
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::BackendUnavailable, std::string("malformed tokenizer spec: ") + e.what());
  }
  return tok;
}

void ClipTokenizer::bpe(const std::string& word, std::vector<std::int64_t>& out) const {
  if (word == kStartToken || word == kEndToken) {
    out.push_back(vocab_.at(word));
    return;
  }
  const auto& symbols = byte_symbols();
  std::vector<std::string> parts;
  parts.reserve(word.size());
  for (unsigned char b : word) parts.push_back(symbols[b]);
  parts.back() += end_of_word_;

  for (;;) {
    std::size_t best_rank = std::numeric_limits<std::size_t>::max();
    std::size_t best_at = 0;
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
      const auto it = merge_rank_.find(parts[i] + " " + parts[i + 1]);
      if (it != merge_rank_.end() && it->second < best_rank) {
        best_rank = it->second;
        best_at = i;
      }
    }
    if (best_rank == std::numeric_limits<std::size_t>::max()) break;
    const std::string first = parts[best_at];
    const std::string second = parts[best_at + 1];
    std::vector<std::string> merged;
    merged.reserve(parts.size());
    for (std::size_t i = 0; i < parts.size();) {
      if (i + 1 < parts.size() && parts[i] == first && parts[i + 1] == second) {
        merged.push_back(first + second);
        i += 2;
      } else {
        merged.push_back(parts[i]);
        ++i;
      }
    }
    parts = std::move(merged);
  }
  for (const std::string& p : parts) {
    const auto it = vocab_.find(p);
    if (it == vocab_.end()) {
      fail(ErrorCode::BackendUnavailable, "tokenizer vocabulary lacks piece '" + p + "'");
    }
    out.push_back(it->second);
  }
}

std::vector<std::int64_t> ClipTokenizer::encode(std::string_view text) const {
  std::vector<std::int64_t> ids{start_id_};
  for (const std::string& word : split_words(clean_text(text))) bpe(word, ids);
  ids.push_back(end_id_);
  if (ids.size() > context_length_) {
    fail(ErrorCode::TokenizationOverflow,
         "prompt needs " + std::to_string(ids.size()) + " tokens, context length is " +
             std::to_string(context_length_));
  }
  return ids;
}

std::vector<std::int64_t> ClipTokenizer::encode_padded(std::string_view text) const {
  auto ids = encode(text);
  ids.resize(context_length_, pad_id_);
  return ids;
}

}  // namespace madp
