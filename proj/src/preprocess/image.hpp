#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "core/embedding.hpp"

namespace madp {

inline constexpr int kEncoderInputSize = 224;

struct NormalizationProfile {
  enum class Kind { ClipNative, Half };

  Kind kind;
  std::array<float, 3> mean;
  std::array<float, 3> std;

  static const NormalizationProfile& clip_native();
  static const NormalizationProfile& half();
  // Accepts "clip" / "clip_native" and "half".
  static const NormalizationProfile& parse(std::string_view name);

  std::string_view name() const noexcept;
};

// Planar RGB image, channel-major (CHW), float samples.
class PixelTensor {
 public:
  PixelTensor(int height, int width);
  PixelTensor(int height, int width, std::vector<float> chw);

  static PixelTensor filled(int height, int width, float value);

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  bool empty() const noexcept { return height_ == 0 || width_ == 0; }

  float& at(int c, int y, int x) { return data_[index(c, y, x)]; }
  float at(int c, int y, int x) const { return data_[index(c, y, x)]; }

  std::span<float> plane(int c) {
    return {data_.data() + static_cast<std::size_t>(c) * plane_size(), plane_size()};
  }
  std::span<const float> plane(int c) const {
    return {data_.data() + static_cast<std::size_t>(c) * plane_size(), plane_size()};
  }
  std::span<const float> data() const noexcept { return data_; }

  friend bool operator==(const PixelTensor&, const PixelTensor&) = default;

 private:
  std::size_t plane_size() const noexcept {
    return static_cast<std::size_t>(height_) * static_cast<std::size_t>(width_);
  }
  std::size_t index(int c, int y, int x) const noexcept {
    return static_cast<std::size_t>(c) * plane_size() +
           static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int height_;
  int width_;
  std::vector<float> data_;
};

// PNG or JPEG to [0,1] RGB. Alpha is dropped and grayscale replicated.
PixelTensor decode_image(const std::filesystem::path& path);

PixelTensor crop(const PixelTensor& img, const BoundingBox& box);

// Separable bicubic (a = -0.5) with antialiasing when shrinking, matching the
// reference CLIP preprocessing resampler. Output is clamped to [0, 1].
PixelTensor resize(const PixelTensor& img, int out_height = kEncoderInputSize,
                   int out_width = kEncoderInputSize);

// Shorter side to `size`, then a centered size x size crop.
PixelTensor resize_shorter_and_center_crop(const PixelTensor& img, int size = kEncoderInputSize);

PixelTensor normalize(const PixelTensor& img, const NormalizationProfile& profile);
PixelTensor denormalize(const PixelTensor& img, const NormalizationProfile& profile);

struct PreprocessOptions {
  const NormalizationProfile* profile = &NormalizationProfile::clip_native();
  bool preserve_aspect = false;
};

// crop (optional) -> resize -> normalize
PixelTensor preprocess(const PixelTensor& decoded, const std::optional<BoundingBox>& box,
                       const PreprocessOptions& options);

}  // namespace madp
