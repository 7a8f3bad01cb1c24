#include "preprocess/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "core/errors.hpp"

namespace madp {

const NormalizationProfile& NormalizationProfile::clip_native() {
  static const NormalizationProfile profile{
      Kind::ClipNative,
      {0.48145466f, 0.4578275f, 0.40821073f},
      {0.26862954f, 0.26130258f, 0.27577711f}};
  return profile;
}

const NormalizationProfile& NormalizationProfile::half() {
  static const NormalizationProfile profile{Kind::Half, {0.5f, 0.5f, 0.5f}, {0.5f, 0.5f, 0.5f}};
  return profile;
}

const NormalizationProfile& NormalizationProfile::parse(std::string_view name) {
  if (name == "clip" || name == "clip_native" || name == "ClipNative") return clip_native();
  if (name == "half" || name == "Half") return half();
  fail(ErrorCode::Config, "unknown normalization profile '" + std::string(name) + "' (use clip|half)");
}

std::string_view NormalizationProfile::name() const noexcept {
  return kind == Kind::ClipNative ? "clip" : "half";
}

PixelTensor::PixelTensor(int height, int width)
    : height_(height), width_(width), data_(3 * static_cast<std::size_t>(std::max(height, 0)) *
                                            static_cast<std::size_t>(std::max(width, 0))) {
  if (height < 0 || width < 0) fail(ErrorCode::InvalidArgument, "negative image size");
}

PixelTensor::PixelTensor(int height, int width, std::vector<float> chw)
    : height_(height), width_(width), data_(std::move(chw)) {
  if (height < 0 || width < 0 ||
      data_.size() != 3 * static_cast<std::size_t>(height) * static_cast<std::size_t>(width)) {
    fail(ErrorCode::InvalidArgument, "pixel buffer does not match 3 x height x width");
  }
}

PixelTensor PixelTensor::filled(int height, int width, float value) {
  return PixelTensor(height, width,
                     std::vector<float>(3 * static_cast<std::size_t>(height) * width, value));
}

PixelTensor decode_image(const std::filesystem::path& path) {
  cv::Mat raw = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
  if (raw.empty()) {
    fail(ErrorCode::ImageDecode, "cannot decode image '" + path.string() + "'");
  }
  double scale = 1.0 / 255.0;
  switch (raw.depth()) {
    case CV_8U: break;
    case CV_16U: scale = 1.0 / 65535.0; break;
    default: fail(ErrorCode::ImageDecode, "unsupported sample depth in '" + path.string() + "'");
  }
  const int channels = raw.channels();
  if (channels != 1 && channels != 3 && channels != 4) {
    fail(ErrorCode::ImageDecode, "unsupported channel count in '" + path.string() + "'");
  }
  PixelTensor out(raw.rows, raw.cols);
  for (int y = 0; y < raw.rows; ++y) {
    for (int x = 0; x < raw.cols; ++x) {
      for (int c = 0; c < 3; ++c) {
        // OpenCV stores BGR(A); channel 0 of the tensor is red.
        const int src = channels == 1 ? 0 : 2 - c;
        double v = 0.0;
        if (raw.depth() == CV_8U) {
          v = raw.ptr<std::uint8_t>(y)[x * channels + src];
        } else {
          v = raw.ptr<std::uint16_t>(y)[x * channels + src];
        }
        out.at(c, y, x) = static_cast<float>(v * scale);
      }
    }
  }
  return out;
}

PixelTensor crop(const PixelTensor& img, const BoundingBox& box) {
  if (box.x0 < 0 || box.y0 < 0 || box.x1 > img.width() || box.y1 > img.height() ||
      box.width() <= 0 || box.height() <= 0) {
    fail(ErrorCode::InvalidArgument,
         "bounding box (" + std::to_string(box.x0) + "," + std::to_string(box.y0) + "," +
             std::to_string(box.x1) + "," + std::to_string(box.y1) + ") outside " +
             std::to_string(img.width()) + "x" + std::to_string(img.height()) + " image");
  }
  PixelTensor out(box.height(), box.width());
  for (int c = 0; c < 3; ++c) {
    for (int y = 0; y < box.height(); ++y) {
      for (int x = 0; x < box.width(); ++x) {
        out.at(c, y, x) = img.at(c, box.y0 + y, box.x0 + x);
      }
    }
  }
  return out;
}

namespace {

double bicubic_kernel(double x) {
  constexpr double a = -0.5;
  x = std::abs(x);
  if (x < 1.0) return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0;
  if (x < 2.0) return (((x - 5.0) * x + 8.0) * x - 4.0) * a;
  return 0.0;
}

struct Taps {
  int first = 0;
  std::vector<double> weights;
};

// One row of taps per output position. Mirrors the window placement of the
// reference resampler, including its truncating casts.
std::vector<Taps> compute_taps(int in_size, int out_size) {
  constexpr double kSupport = 2.0;
  const double scale = static_cast<double>(in_size) / out_size;
  const double filter_scale = std::max(scale, 1.0);
  const double support = kSupport * filter_scale;
  const double inv = 1.0 / filter_scale;

  std::vector<Taps> taps(static_cast<std::size_t>(out_size));
  for (int i = 0; i < out_size; ++i) {
    const double center = (i + 0.5) * scale;
    int lo = static_cast<int>(center - support + 0.5);
    int hi = static_cast<int>(center + support + 0.5);
    lo = std::max(lo, 0);
    hi = std::min(hi, in_size);
    Taps& t = taps[static_cast<std::size_t>(i)];
    t.first = lo;
    double total = 0.0;
    for (int x = lo; x < hi; ++x) {
      const double w = bicubic_kernel((x - center + 0.5) * inv);
      t.weights.push_back(w);
      total += w;
    }
    if (total != 0.0) {
      for (double& w : t.weights) w /= total;
    }
  }
  return taps;
}

PixelTensor resample_horizontal(const PixelTensor& img, int out_width) {
  const auto taps = compute_taps(img.width(), out_width);
  PixelTensor out(img.height(), out_width);
  for (int c = 0; c < 3; ++c) {
    for (int y = 0; y < img.height(); ++y) {
      for (int x = 0; x < out_width; ++x) {
        const Taps& t = taps[static_cast<std::size_t>(x)];
        double acc = 0.0;
        for (std::size_t k = 0; k < t.weights.size(); ++k) {
          acc += img.at(c, y, t.first + static_cast<int>(k)) * t.weights[k];
        }
        out.at(c, y, x) = static_cast<float>(acc);
      }
    }
  }
  return out;
}

PixelTensor resample_vertical(const PixelTensor& img, int out_height) {
  const auto taps = compute_taps(img.height(), out_height);
  PixelTensor out(out_height, img.width());
  for (int c = 0; c < 3; ++c) {
    for (int y = 0; y < out_height; ++y) {
      const Taps& t = taps[static_cast<std::size_t>(y)];
      for (int x = 0; x < img.width(); ++x) {
        double acc = 0.0;
        for (std::size_t k = 0; k < t.weights.size(); ++k) {
          acc += img.at(c, t.first + static_cast<int>(k), x) * t.weights[k];
        }
        out.at(c, y, x) = static_cast<float>(acc);
      }
    }
  }
  return out;
}

void clamp_unit(PixelTensor& img) {
  for (int c = 0; c < 3; ++c) {
    for (float& v : img.plane(c)) v = std::clamp(v, 0.0f, 1.0f);
  }
}

}  // namespace

PixelTensor resize(const PixelTensor& img, int out_height, int out_width) {
  if (img.empty()) fail(ErrorCode::EmptyImage, "cannot resize an empty image");
  if (out_height <= 0 || out_width <= 0) {
    fail(ErrorCode::InvalidArgument, "resize target must be positive");
  }
  // horizontal pass first, each pass only when that axis changes
  PixelTensor out = img.width() != out_width ? resample_horizontal(img, out_width) : img;
  if (out.height() != out_height) out = resample_vertical(out, out_height);
  clamp_unit(out);
  return out;
}

PixelTensor resize_shorter_and_center_crop(const PixelTensor& img, int size) {
  if (img.empty()) fail(ErrorCode::EmptyImage, "cannot resize an empty image");
  int h = size;
  int w = size;
  if (img.width() < img.height()) {
    h = static_cast<int>(static_cast<long long>(size) * img.height() / img.width());
  } else {
    w = static_cast<int>(static_cast<long long>(size) * img.width() / img.height());
  }
  PixelTensor scaled = resize(img, h, w);
  const int top = static_cast<int>(std::lround((h - size) / 2.0));
  const int left = static_cast<int>(std::lround((w - size) / 2.0));
  return crop(scaled, BoundingBox{left, top, left + size, top + size});
}

PixelTensor normalize(const PixelTensor& img, const NormalizationProfile& profile) {
  PixelTensor out = img;
  for (int c = 0; c < 3; ++c) {
    const float mean = profile.mean[static_cast<std::size_t>(c)];
    const float sd = profile.std[static_cast<std::size_t>(c)];
    for (float& v : out.plane(c)) v = (v - mean) / sd;
  }
  return out;
}

PixelTensor denormalize(const PixelTensor& img, const NormalizationProfile& profile) {
  PixelTensor out = img;
  for (int c = 0; c < 3; ++c) {
    const float mean = profile.mean[static_cast<std::size_t>(c)];
    const float sd = profile.std[static_cast<std::size_t>(c)];
    for (float& v : out.plane(c)) v = v * sd + mean;
  }
  return out;
}

PixelTensor preprocess(const PixelTensor& decoded, const std::optional<BoundingBox>& box,
                       const PreprocessOptions& options) {
  if (decoded.empty()) fail(ErrorCode::EmptyImage, "decoded image is empty");
  const PixelTensor& source = box ? crop(decoded, *box) : decoded;
  PixelTensor sized = options.preserve_aspect ? resize_shorter_and_center_crop(source)
                                              : resize(source);
  return normalize(sized, *options.profile);
}

}  // namespace madp
