#include "core/embedding.hpp"

#include <algorithm>
#include <cmath>

#include "core/errors.hpp"

namespace madp {

Embedding::Embedding(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) {
    fail(ErrorCode::InvalidArgument, "embedding must have dim > 0");
  }
}

Embedding Embedding::from_floats(std::span<const float> values) {
  return Embedding(std::vector<double>(values.begin(), values.end()));
}

double Embedding::norm() const noexcept { return std::sqrt(dot(values_, values_)); }

bool Embedding::is_unit(double tolerance) const noexcept {
  return std::abs(norm() - 1.0) <= tolerance;
}

double dot(std::span<const double> a, std::span<const double> b) noexcept {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    acc += a[i] * b[i];
  }
  return acc;
}

Embedding l2_normalize(const Embedding& v) {
  const double n = v.norm();
  if (!(n >= kNormFloor)) {
    fail(ErrorCode::ZeroNorm, "cannot normalize a vector with norm below 1e-12");
  }
  std::vector<double> out(v.values().begin(), v.values().end());
  for (double& x : out) {
    x /= n;
  }
  return Embedding(std::move(out));
}

double cosine_similarity(const Embedding& a, const Embedding& b) {
  if (a.dim() != b.dim()) {
    fail(ErrorCode::DimensionMismatch, "cosine_similarity: dims " + std::to_string(a.dim()) +
                                           " and " + std::to_string(b.dim()) + " differ");
  }
  const double na = a.norm();
  const double nb = b.norm();
  if (!(na >= kNormFloor) || !(nb >= kNormFloor)) {
    fail(ErrorCode::ZeroNorm, "cosine_similarity: argument norm below 1e-12");
  }
  return std::clamp(dot(a.values(), b.values()) / (na * nb), -1.0, 1.0);
}

Label label_from_int(int value) {
  switch (value) {
    case 0: return Label::BonaFide;
    case 1: return Label::Attack;
    default: fail(ErrorCode::InvalidArgument, "label must be 0 or 1, got " + std::to_string(value));
  }
}

std::string_view to_string(Label label) noexcept {
  return label == Label::BonaFide ? "bona-fide" : "attack";
}

}  // namespace madp
