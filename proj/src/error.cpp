#include "taylorvid/error.hpp"

namespace taylorvid {

std::string_view error_name(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::VideoTooShort: return "VideoTooShort";
    case ErrorKind::InsufficientFrames: return "InsufficientFrames";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::EmptyDirectory: return "EmptyDirectory";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::DecodeError: return "DecodeError";
    case ErrorKind::BadMagic: return "BadMagic";
    case ErrorKind::TruncatedPayload: return "TruncatedPayload";
    case ErrorKind::UnsupportedDtype: return "UnsupportedDtype";
    case ErrorKind::CorruptHeader: return "CorruptHeader";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::InvalidGain: return "InvalidGain";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::SequenceTooShort: return "SequenceTooShort";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

bool is_config_error(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidConfig:
    case ErrorKind::VideoTooShort:
    case ErrorKind::InsufficientFrames:
    case ErrorKind::ShapeMismatch:
    case ErrorKind::InvalidInput:
    case ErrorKind::InvalidGain:
    case ErrorKind::EmptyInput:
    case ErrorKind::SequenceTooShort:
      return true;
    default:
      return false;
  }
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(error_name(kind)) + ": " + message), kind_(kind) {}

}  // namespace taylorvid
