#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string_view>

#include "core/embedding.hpp"
#include "preprocess/image.hpp"

namespace madp {

enum class BackendKind { Cache, NeuralRuntime };

struct BackendDescriptor {
  BackendKind kind;
  std::filesystem::path source;
  std::size_t dim;
};

// Image and text encoders behind one boundary. Embeddings come back raw;
// callers normalize. Implementations are read-only after construction and
// safe to call concurrently.
class EmbeddingBackend {
 public:
  virtual ~EmbeddingBackend() = default;

  virtual BackendDescriptor descriptor() const = 0;
  std::size_t dim() const { return descriptor().dim; }
  BackendKind kind() const { return descriptor().kind; }

  // Encodes a preprocessed 3x224x224 tensor.
  virtual Embedding embed_image(const PixelTensor& tensor) const = 0;

  // Cache lookup by sample id. Only backends with keyed_images() support it.
  virtual Embedding embed_image(std::string_view sample_id) const = 0;
  virtual bool keyed_images() const noexcept = 0;

  virtual Embedding embed_text(std::string_view prompt) const = 0;
};

class EmbeddingCache;

// Precomputed embeddings: image cache keyed by sample id, text cache keyed by
// the exact prompt string. When no text cache is given, prompt lookups go to
// the image cache file.
std::unique_ptr<EmbeddingBackend> open_cache_backend(
    const std::filesystem::path& image_cache,
    const std::optional<std::filesystem::path>& text_cache = std::nullopt);

std::unique_ptr<EmbeddingBackend> make_cache_backend(std::shared_ptr<const EmbeddingCache> images,
                                                     std::shared_ptr<const EmbeddingCache> texts,
                                                     std::filesystem::path source = {});

// Directory holding image_encoder.onnx, text_encoder.onnx and tokenizer.json.
std::unique_ptr<EmbeddingBackend> open_neural_backend(const std::filesystem::path& directory);

}  // namespace madp
