#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace physioemo {

enum class ErrorKind {
  MalformedRow,
  EmptyStream,
  NonMonotonicTime,
  NoOverlap,
  MissingChannel,
  InvalidMarkers,
  MarkerOutOfRange,
  SeriesTooShort,
  EmptyMatrix,
  DimensionMismatch,
  MissingChannelColumn,
  ChannelTooShort,
  DegenerateRange,
  SingularSystem,
  NonFiniteLoss,
  NonFiniteGradient,
  TooFewParticipants,
  ZeroVariance,
  LengthMismatch,
  ConstantColumn,
  RankDeficient,
  InvalidConfig,
  Io,
};

std::string_view error_kind_name(ErrorKind kind) noexcept;

/// Pipeline failure with a machine-checkable kind.
///
/// `line()` is the 1-based source line for parse errors; `subject()` names the
/// offending channel, column or participant when one applies.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, std::string subject = {},
        std::size_t line = 0);

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& subject() const noexcept { return subject_; }
  std::size_t line() const noexcept { return line_; }
  /// Message without the kind prefix.
  const std::string& detail() const noexcept { return detail_; }

  /// Same error with "context: " prepended to the message.
  Error annotated(std::string_view context) const;

 private:
  ErrorKind kind_;
  std::string subject_;
  std::size_t line_;
  std::string detail_;
};

}  // namespace physioemo
