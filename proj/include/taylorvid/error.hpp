#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace taylorvid {

/// Every failure the library reports carries one of these kinds. The names
/// are part of the public contract (bindings and the CLI surface them).
enum class ErrorKind {
  InvalidConfig,
  VideoTooShort,
  InsufficientFrames,
  ShapeMismatch,
  InvalidInput,
  EmptyDirectory,
  DimensionMismatch,
  DecodeError,
  BadMagic,
  TruncatedPayload,
  UnsupportedDtype,
  CorruptHeader,
  IoError,
  InvalidGain,
  EmptyInput,
  SequenceTooShort,
  ParseError,
};

std::string_view error_name(ErrorKind kind) noexcept;

/// True for errors caused by the caller's parameters rather than by the
/// filesystem or the content of a file.
bool is_config_error(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }
  std::string_view name() const noexcept { return error_name(kind_); }

private:
  ErrorKind kind_;
};

}  // namespace taylorvid
