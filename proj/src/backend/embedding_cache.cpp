#include "backend/embedding_cache.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>

#include "core/errors.hpp"

namespace madp {
namespace {

constexpr std::array<char, 4> kMagic{'E', 'M', 'B', '1'};

void put_u16(std::ostream& out, std::uint16_t v) {
  const char b[2] = {static_cast<char>(v & 0xff), static_cast<char>(v >> 8)};
  out.write(b, 2);
}

void put_u32(std::ostream& out, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                     static_cast<char>((v >> 16) & 0xff), static_cast<char>(v >> 24)};
  out.write(b, 4);
}

// Returns false on clean EOF before the first byte.
bool get_bytes(std::istream& in, unsigned char* dst, std::size_t n, bool eof_ok) {
  in.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n));
  const auto got = static_cast<std::size_t>(in.gcount());
  if (got == n) return true;
  if (got == 0 && eof_ok) return false;
  fail(ErrorCode::Data, "truncated EMB1 stream");
}

std::uint32_t le32(const unsigned char* b) {
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace

EmbeddingCache::EmbeddingCache(std::size_t dim) : dim_(dim) {
  if (dim == 0 || dim > std::numeric_limits<std::uint32_t>::max()) {
    fail(ErrorCode::InvalidArgument, "embedding cache dim must be in [1, 2^32)");
  }
}

bool EmbeddingCache::contains(std::string_view key) const {
  return index_.find(std::string(key)) != index_.end();
}

const Embedding& EmbeddingCache::at(std::string_view key) const {
  const auto it = index_.find(std::string(key));
  if (it == index_.end()) {
    fail(ErrorCode::KeyMissing, "no cached embedding for key '" + std::string(key) + "'");
  }
  return values_[it->second];
}

void EmbeddingCache::insert(std::string key, Embedding value) {
  if (value.dim() != dim_) {
    fail(ErrorCode::DimensionMismatch, "cache dim is " + std::to_string(dim_) +
                                           ", entry '" + key + "' has " +
                                           std::to_string(value.dim()));
  }
  if (key.size() > std::numeric_limits<std::uint16_t>::max()) {
    fail(ErrorCode::InvalidArgument, "cache key longer than 65535 bytes");
  }
  if (index_.contains(key)) {
    fail(ErrorCode::InvalidArgument, "duplicate cache key '" + key + "'");
  }
  index_.emplace(key, keys_.size());
  keys_.push_back(std::move(key));
  values_.push_back(std::move(value));
}

EmbeddingCache EmbeddingCache::read(std::istream& in) {
  std::array<unsigned char, 8> header{};
  get_bytes(in, header.data(), header.size(), false);
  if (std::memcmp(header.data(), kMagic.data(), kMagic.size()) != 0) {
    fail(ErrorCode::Data, "not an EMB1 stream (bad magic)");
  }
  const std::uint32_t dim = le32(header.data() + 4);
  if (dim == 0) fail(ErrorCode::Data, "EMB1 stream declares dim 0");
  EmbeddingCache cache(dim);

  std::vector<unsigned char> payload(static_cast<std::size_t>(dim) * 4);
  std::vector<float> floats(dim);
  for (;;) {
    unsigned char len_bytes[2];
    if (!get_bytes(in, len_bytes, 2, true)) break;
    const std::size_t len = static_cast<std::size_t>(len_bytes[0]) |
                            (static_cast<std::size_t>(len_bytes[1]) << 8);
    std::string key(len, '\0');
    if (len > 0) get_bytes(in, reinterpret_cast<unsigned char*>(key.data()), len, false);
    get_bytes(in, payload.data(), payload.size(), false);
    for (std::size_t i = 0; i < dim; ++i) {
      floats[i] = std::bit_cast<float>(le32(payload.data() + 4 * i));
    }
    cache.insert(std::move(key), Embedding::from_floats(floats));
  }
  return cache;
}

EmbeddingCache EmbeddingCache::read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open embedding cache '" + path.string() + "'");
  return read(in);
}

void EmbeddingCache::write(std::ostream& out) const {
  out.write(kMagic.data(), kMagic.size());
  put_u32(out, static_cast<std::uint32_t>(dim_));
  for (std::size_t i = 0; i < keys_.size(); ++i) {
    put_u16(out, static_cast<std::uint16_t>(keys_[i].size()));
    out.write(keys_[i].data(), static_cast<std::streamsize>(keys_[i].size()));
    for (double v : values_[i].values()) {
      put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
    }
  }
}

void EmbeddingCache::write(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::Io, "cannot write embedding cache '" + path.string() + "'");
  write(out);
  out.flush();
  if (!out) fail(ErrorCode::Io, "short write to '" + path.string() + "'");
}

}  // namespace madp
