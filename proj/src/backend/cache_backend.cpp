#include <string>

#include "backend/backend.hpp"
#include "backend/embedding_cache.hpp"
#include "core/errors.hpp"

namespace madp {
namespace {

class CacheBackend final : public EmbeddingBackend {
 public:
  CacheBackend(std::shared_ptr<const EmbeddingCache> images,
               std::shared_ptr<const EmbeddingCache> texts, std::filesystem::path source)
      : images_(std::move(images)), texts_(std::move(texts)), source_(std::move(source)) {
    if (!images_) fail(ErrorCode::InvalidArgument, "cache backend needs an image cache");
    if (!texts_) texts_ = images_;
    if (texts_->dim() != images_->dim()) {
      fail(ErrorCode::Config, "image cache dim " + std::to_string(images_->dim()) +
                                  " differs from text cache dim " +
                                  std::to_string(texts_->dim()));
    }
  }

  BackendDescriptor descriptor() const override {
    return {BackendKind::Cache, source_, images_->dim()};
  }

  Embedding embed_image(const PixelTensor&) const override {
    fail(ErrorCode::BackendUnavailable, "cache backend cannot encode pixel tensors");
  }

  Embedding embed_image(std::string_view sample_id) const override {
    return images_->at(sample_id);
  }

  bool keyed_images() const noexcept override { return true; }

  Embedding embed_text(std::string_view prompt) const override { return texts_->at(prompt); }

 private:
  std::shared_ptr<const EmbeddingCache> images_;
  std::shared_ptr<const EmbeddingCache> texts_;
  std::filesystem::path source_;
};

}  // namespace

std::unique_ptr<EmbeddingBackend> make_cache_backend(std::shared_ptr<const EmbeddingCache> images,
                                                     std::shared_ptr<const EmbeddingCache> texts,
                                                     std::filesystem::path source) {
  return std::make_unique<CacheBackend>(std::move(images), std::move(texts), std::move(source));
}

std::unique_ptr<EmbeddingBackend> open_cache_backend(
    const std::filesystem::path& image_cache,
    const std::optional<std::filesystem::path>& text_cache) {
  auto images = std::make_shared<const EmbeddingCache>(EmbeddingCache::read(image_cache));
  std::shared_ptr<const EmbeddingCache> texts;
  if (text_cache) texts = std::make_shared<const EmbeddingCache>(EmbeddingCache::read(*text_cache));
  return make_cache_backend(std::move(images), std::move(texts), image_cache);
}

}  // namespace madp
