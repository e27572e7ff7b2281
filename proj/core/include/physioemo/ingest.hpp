#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace physioemo {

/// The eight wearable channels, in canonical column order.
enum class Channel {
  Yaw,
  Pitch,
  Roll,
  Temperature,
  InternalADCVoltage,
  GSRResistance,
  HeartRate,
  GSRConductance,
};

inline constexpr std::size_t kChannelCount = 8;
inline constexpr std::array<Channel, kChannelCount> kAllChannels = {
    Channel::Yaw,           Channel::Pitch,          Channel::Roll,
    Channel::Temperature,   Channel::InternalADCVoltage, Channel::GSRResistance,
    Channel::HeartRate,     Channel::GSRConductance};

std::string_view channel_name(Channel c) noexcept;
std::optional<Channel> parse_channel(std::string_view name) noexcept;
std::vector<std::string> channel_names();

struct Sample {
  double t = 0.0;  ///< seconds since session start
  double value = 0.0;
  bool operator==(const Sample&) const = default;
};

/// Time-stamped samples of one channel. Invariants: at least one sample and
/// strictly increasing timestamps (checked by the constructor).
class SensorStream {
 public:
  SensorStream(Channel channel, std::vector<Sample> samples);

  Channel channel() const noexcept { return channel_; }
  const std::vector<Sample>& samples() const noexcept { return samples_; }
  /// Sampling rate in Hz when the timestamps are uniformly spaced.
  std::optional<double> native_rate() const noexcept { return native_rate_; }
  double first_time() const noexcept { return samples_.front().t; }
  double last_time() const noexcept { return samples_.back().t; }

 private:
  Channel channel_;
  std::vector<Sample> samples_;
  std::optional<double> native_rate_;
};

/// Selects which CSV column feeds a channel.
struct ChannelSchema {
  Channel channel;
  std::string timestamp_column = "timestamp";
  std::string value_column;  ///< empty means the channel name

  explicit ChannelSchema(Channel c, std::string column = {})
      : channel(c), value_column(std::move(column)) {}
};

/// Parses `timestamp,<channel>` CSV text. Duplicate timestamps keep the last
/// value. Throws MalformedRow (with the 1-based line), EmptyStream or
/// NonMonotonicTime.
SensorStream parse_sensor_csv(std::istream& source, const ChannelSchema& schema);
SensorStream parse_sensor_csv(std::string_view source, const ChannelSchema& schema);

void write_sensor_csv(std::ostream& out, const SensorStream& stream);

/// Uniformly resampled multichannel series in canonical channel order.
struct AlignedSeries {
  std::vector<double> timestamps;
  Eigen::MatrixXd values;  ///< rows x kChannelCount
  double rate = 0.0;
};

/// Linear interpolation of every channel onto a uniform grid spanning the
/// common overlap interval. Throws MissingChannel or NoOverlap.
AlignedSeries align_streams(const std::vector<SensorStream>& streams, double rate);

enum class Marker { T1, T2, T3, T4, T5 };

/// TSST protocol boundaries in seconds. Validated on construction.
class PhaseMarkers {
 public:
  struct SubSegments {
    double anticipatory_start;  ///< AS
    double task_start;          ///< M
  };

  PhaseMarkers(std::array<double, 5> boundaries,
               std::optional<SubSegments> sub_segments = std::nullopt);

  double at(Marker m) const noexcept { return boundaries_[static_cast<std::size_t>(m)]; }
  const std::array<double, 5>& boundaries() const noexcept { return boundaries_; }
  const std::optional<SubSegments>& sub_segments() const noexcept { return sub_; }

 private:
  std::array<double, 5> boundaries_;
  std::optional<SubSegments> sub_;
};

/// Parses `T1=0.0` ... `T5=4800.0` lines with optional `AS=` and `M=`.
PhaseMarkers parse_phase_markers(std::string_view contents);
std::string format_phase_markers(const PhaseMarkers& markers);

enum class Phase { PreStress, Stress, Recovery };
std::string_view phase_name(Phase p) noexcept;

struct RowRange {
  std::size_t begin = 0;
  std::size_t end = 0;  ///< exclusive
  std::size_t size() const noexcept { return end - begin; }
  bool operator==(const RowRange&) const = default;
};

struct PhaseSegmentation {
  std::map<Phase, RowRange> phases;
  std::optional<RowRange> anticipatory;  ///< AS rows, when markers carry it
  std::optional<RowRange> task;          ///< M rows
  /// Phase of every row; a partition of all rows.
  std::vector<Phase> row_phase;
};

/// Assigns rows to waiting/pre-stress [T1,T2), stress [T2,T3) and recovery
/// [T3,T5]. Rows before T1 count as pre-stress and rows after T5 as recovery so
/// that the assignment is a partition. Throws MarkerOutOfRange.
PhaseSegmentation segment_phases(const std::vector<double>& timestamps,
                                 const PhaseMarkers& markers);

/// Flat JSON manifest describing where one participant's files live.
///
/// {"participant_id": "P01", "markers": "markers.txt", "labels": "fea.csv",
///  "Yaw": "shimmer.csv", "HeartRate": "e4.csv:HeartRate", ...}
///
/// A channel value is `file` or `file:column`; the column defaults to the
/// channel name. Paths are relative to the manifest's directory.
struct SessionManifest {
  std::string participant_id;
  std::string markers_path;
  std::string labels_path;
  std::map<Channel, std::pair<std::string, std::string>> channel_sources;  ///< file, column
};

SessionManifest parse_manifest(std::string_view json_text);
std::string format_manifest(const SessionManifest& manifest);

/// One participant's recording after alignment.
struct SessionRecording {
  std::string participant_id;
  std::vector<SensorStream> streams;
  PhaseMarkers markers;
  AlignedSeries aligned;
};

inline constexpr double kDefaultAlignmentRate = 4.0;
inline constexpr const char* kManifestFileName = "manifest.json";

/// Loads and aligns the session described by `dir/manifest.json`.
SessionRecording load_session(const std::string& dir, double rate = kDefaultAlignmentRate);

}  // namespace physioemo
