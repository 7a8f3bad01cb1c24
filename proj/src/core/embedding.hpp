#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace madp {

// Norms below this are treated as degenerate; operations raise ZeroNorm
// instead of producing NaN.
inline constexpr double kNormFloor = 1e-12;
inline constexpr double kUnitTolerance = 1e-6;

// Dense feature vector shared by the image and text modalities. Values are
// held in double precision; encoders and cache files deal in float.
class Embedding {
 public:
  explicit Embedding(std::vector<double> values);

  static Embedding from_floats(std::span<const float> values);

  std::size_t dim() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  double norm() const noexcept;
  bool is_unit(double tolerance = kUnitTolerance) const noexcept;

  friend bool operator==(const Embedding&, const Embedding&) = default;

 private:
  std::vector<double> values_;
};

// Left-to-right accumulation; a.size() must equal b.size().
double dot(std::span<const double> a, std::span<const double> b) noexcept;

Embedding l2_normalize(const Embedding& v);

// <a,b> / (|a||b|), clamped to [-1, 1].
double cosine_similarity(const Embedding& a, const Embedding& b);

enum class Label : std::uint8_t { BonaFide = 0, Attack = 1 };

constexpr int to_int(Label label) noexcept { return static_cast<int>(label); }
Label label_from_int(int value);
std::string_view to_string(Label label) noexcept;

// Axis-aligned crop in pixel coordinates, [x0, x1) x [y0, y1).
struct BoundingBox {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;

  int width() const noexcept { return x1 - x0; }
  int height() const noexcept { return y1 - y0; }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

struct SampleRef {
  std::string id;
  std::filesystem::path path;
  Label label = Label::BonaFide;
  std::string subset;
  std::optional<BoundingBox> box;
};

}  // namespace madp
