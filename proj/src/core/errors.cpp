#include "core/errors.hpp"

namespace madp {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ZeroNorm: return "ZeroNormError";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyImage: return "EmptyImage";
    case ErrorCode::ImageDecode: return "ImageDecode";
    case ErrorCode::BackendUnavailable: return "BackendUnavailable";
    case ErrorCode::KeyMissing: return "KeyMissing";
    case ErrorCode::TokenizationOverflow: return "TokenizationOverflow";
    case ErrorCode::MalformedTemplate: return "MalformedTemplate";
    case ErrorCode::DegenerateClassCounts: return "DegenerateClassCounts";
    case ErrorCode::EmptyList: return "EmptyList";
    case ErrorCode::Config: return "ConfigError";
    case ErrorCode::Data: return "DataError";
    case ErrorCode::MissingEmbedding: return "MissingEmbedding";
    case ErrorCode::Io: return "IoError";
  }
  return "Unknown";
}

}  // namespace madp
