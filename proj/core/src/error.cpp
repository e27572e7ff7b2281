#include "physioemo/error.hpp"

namespace physioemo {

std::string_view error_kind_name(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::MalformedRow: return "MalformedRow";
    case ErrorKind::EmptyStream: return "EmptyStream";
    case ErrorKind::NonMonotonicTime: return "NonMonotonicTime";
    case ErrorKind::NoOverlap: return "NoOverlap";
    case ErrorKind::MissingChannel: return "MissingChannel";
    case ErrorKind::InvalidMarkers: return "InvalidMarkers";
    case ErrorKind::MarkerOutOfRange: return "MarkerOutOfRange";
    case ErrorKind::SeriesTooShort: return "SeriesTooShort";
    case ErrorKind::EmptyMatrix: return "EmptyMatrix";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::MissingChannelColumn: return "MissingChannelColumn";
    case ErrorKind::ChannelTooShort: return "ChannelTooShort";
    case ErrorKind::DegenerateRange: return "DegenerateRange";
    case ErrorKind::SingularSystem: return "SingularSystem";
    case ErrorKind::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorKind::NonFiniteGradient: return "NonFiniteGradient";
    case ErrorKind::TooFewParticipants: return "TooFewParticipants";
    case ErrorKind::ZeroVariance: return "ZeroVariance";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::ConstantColumn: return "ConstantColumn";
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message, std::string subject,
             std::size_t line)
    : std::runtime_error(std::string(error_kind_name(kind)) + ": " + message),
      kind_(kind),
      subject_(std::move(subject)),
      line_(line),
      detail_(message) {}

Error Error::annotated(std::string_view context) const {
  return Error(kind_, std::string(context) + ": " + detail_, subject_, line_);
}

}  // namespace physioemo
