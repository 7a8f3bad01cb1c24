#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "core/embedding.hpp"

namespace madp {

// In-memory view of an EMB1 file:
//   "EMB1" | u32 dim | { u16 key_len | key bytes | dim x f32 }*
// All integers and floats little-endian. Entries keep insertion order so a
// rewrite of the same content is byte-identical.
class EmbeddingCache {
 public:
  explicit EmbeddingCache(std::size_t dim);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return keys_.size(); }
  bool contains(std::string_view key) const;

  // Throws KeyMissing.
  const Embedding& at(std::string_view key) const;

  // Throws DimensionMismatch on wrong dim, InvalidArgument on duplicate or
  // over-long keys.
  void insert(std::string key, Embedding value);

  const std::vector<std::string>& keys() const noexcept { return keys_; }

  static EmbeddingCache read(std::istream& in);
  static EmbeddingCache read(const std::filesystem::path& path);
  void write(std::ostream& out) const;
  void write(const std::filesystem::path& path) const;

 private:
  std::size_t dim_;
  std::vector<std::string> keys_;
  std::vector<Embedding> values_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace madp
