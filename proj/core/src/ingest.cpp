#include "physioemo/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <istream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "physioemo/error.hpp"
#include "physioemo/text.hpp"

namespace physioemo {

namespace {

constexpr std::array<std::string_view, kChannelCount> kChannelNames = {
    "Yaw",           "Pitch",         "Roll",      "Temperature", "InternalADCVoltage",
    "GSRResistance", "HeartRate",     "GSRConductance"};

std::optional<double> infer_rate(const std::vector<Sample>& samples) {
  if (samples.size() < 2) return std::nullopt;
  const double span = samples.back().t - samples.front().t;
  const double mean_dt = span / static_cast<double>(samples.size() - 1);
  for (std::size_t i = 1; i < samples.size(); ++i) {
    const double dt = samples[i].t - samples[i - 1].t;
    if (std::abs(dt - mean_dt) > 1e-6 * mean_dt) return std::nullopt;
  }
  return 1.0 / mean_dt;
}

std::size_t find_column(const std::vector<std::string_view>& header, std::string_view name) {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (text::trim(header[i]) == name) return i;
  return header.size();
}

}  // namespace

std::string_view channel_name(Channel c) noexcept {
  return kChannelNames[static_cast<std::size_t>(c)];
}

std::optional<Channel> parse_channel(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kChannelCount; ++i)
    if (kChannelNames[i] == name) return static_cast<Channel>(i);
  return std::nullopt;
}

std::vector<std::string> channel_names() {
  return {kChannelNames.begin(), kChannelNames.end()};
}

SensorStream::SensorStream(Channel channel, std::vector<Sample> samples)
    : channel_(channel), samples_(std::move(samples)) {
  if (samples_.empty())
    throw Error(ErrorKind::EmptyStream, "stream has no samples",
                std::string(channel_name(channel)));
  for (std::size_t i = 1; i < samples_.size(); ++i)
    if (!(samples_[i].t > samples_[i - 1].t))
      throw Error(ErrorKind::NonMonotonicTime, "timestamps must be strictly increasing",
                  std::string(channel_name(channel)));
  native_rate_ = infer_rate(samples_);
}

SensorStream parse_sensor_csv(std::istream& source, const ChannelSchema& schema) {
  const std::string value_column = schema.value_column.empty()
                                       ? std::string(channel_name(schema.channel))
                                       : schema.value_column;
  std::string line;
  std::size_t line_no = 0;
  std::size_t t_col = 0, v_col = 0;
  bool have_header = false;
  std::vector<Sample> samples;

  while (std::getline(source, line)) {
    ++line_no;
    const auto trimmed = text::trim(line);
    if (trimmed.empty()) continue;
    const auto fields = text::split(trimmed, ',');
    if (!have_header) {
      t_col = find_column(fields, schema.timestamp_column);
      v_col = find_column(fields, value_column);
      if (t_col == fields.size() || v_col == fields.size())
        throw Error(ErrorKind::MissingChannelColumn,
                    "header lacks '" + schema.timestamp_column + "' or '" + value_column + "'",
                    value_column, line_no);
      have_header = true;
      continue;
    }
    const auto malformed = [&] {
      return Error(ErrorKind::MalformedRow, "bad row at line " + std::to_string(line_no),
                   value_column, line_no);
    };
    if (std::max(t_col, v_col) >= fields.size()) throw malformed();
    const auto t = text::parse_double(fields[t_col]);
    const auto v = text::parse_double(fields[v_col]);
    if (!t || !v || !std::isfinite(*t) || !std::isfinite(*v)) throw malformed();
    if (!samples.empty()) {
      if (*t < samples.back().t)
        throw Error(ErrorKind::NonMonotonicTime,
                    "timestamp decreases at line " + std::to_string(line_no), value_column,
                    line_no);
      if (*t == samples.back().t) {
        samples.back().value = *v;
        continue;
      }
    }
    samples.push_back({*t, *v});
  }
  if (samples.empty())
    throw Error(ErrorKind::EmptyStream, "no data rows", value_column);
  return SensorStream(schema.channel, std::move(samples));
}

SensorStream parse_sensor_csv(std::string_view source, const ChannelSchema& schema) {
  std::istringstream in{std::string(source)};
  return parse_sensor_csv(in, schema);
}

void write_sensor_csv(std::ostream& out, const SensorStream& stream) {
  out << "timestamp," << channel_name(stream.channel()) << '\n';
  for (const auto& s : stream.samples())
    out << text::format_double(s.t) << ',' << text::format_double(s.value) << '\n';
}

AlignedSeries align_streams(const std::vector<SensorStream>& streams, double rate) {
  if (!(rate > 0.0) || !std::isfinite(rate))
    throw Error(ErrorKind::InvalidConfig, "alignment rate must be positive");
  std::array<const SensorStream*, kChannelCount> by_channel{};
  for (const auto& s : streams) by_channel[static_cast<std::size_t>(s.channel())] = &s;
  for (std::size_t c = 0; c < kChannelCount; ++c)
    if (by_channel[c] == nullptr)
      throw Error(ErrorKind::MissingChannel,
                  "channel " + std::string(kChannelNames[c]) + " absent",
                  std::string(kChannelNames[c]));

  double start = -INFINITY, end = INFINITY;
  for (const auto* s : by_channel) {
    start = std::max(start, s->first_time());
    end = std::min(end, s->last_time());
  }
  if (!(end > start)) throw Error(ErrorKind::NoOverlap, "streams share no time interval");

  const auto rows = static_cast<std::size_t>(std::floor((end - start) * rate + 1e-9)) + 1;
  AlignedSeries out;
  out.rate = rate;
  out.timestamps.resize(rows);
  for (std::size_t i = 0; i < rows; ++i)
    out.timestamps[i] = std::min(end, start + static_cast<double>(i) / rate);
  out.values.resize(static_cast<Eigen::Index>(rows), kChannelCount);

  for (std::size_t c = 0; c < kChannelCount; ++c) {
    const auto& samples = by_channel[c]->samples();
    std::size_t k = 0;  // samples[k].t <= t < samples[k + 1].t
    for (std::size_t i = 0; i < rows; ++i) {
      const double t = out.timestamps[i];
      while (k + 1 < samples.size() && samples[k + 1].t <= t) ++k;
      double v;
      if (samples[k].t == t || k + 1 == samples.size()) {
        v = samples[k].value;
      } else {
        const auto& a = samples[k];
        const auto& b = samples[k + 1];
        const double w = (t - a.t) / (b.t - a.t);
        v = a.value + w * (b.value - a.value);
      }
      out.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = v;
    }
  }
  return out;
}

PhaseMarkers::PhaseMarkers(std::array<double, 5> boundaries,
                           std::optional<SubSegments> sub_segments)
    : boundaries_(boundaries), sub_(sub_segments) {
  for (double b : boundaries_)
    if (!std::isfinite(b)) throw Error(ErrorKind::InvalidMarkers, "non-finite marker");
  for (std::size_t i = 1; i < boundaries_.size(); ++i)
    if (!(boundaries_[i - 1] < boundaries_[i]))
      throw Error(ErrorKind::InvalidMarkers,
                  "markers must satisfy T1 < T2 < T3 < T4 < T5");
  if (sub_) {
    const double t2 = boundaries_[1], t3 = boundaries_[2];
    if (!(t2 <= sub_->anticipatory_start && sub_->anticipatory_start < sub_->task_start &&
          sub_->task_start < t3))
      throw Error(ErrorKind::InvalidMarkers, "sub-segments must satisfy T2 <= AS < M < T3");
  }
}

PhaseMarkers parse_phase_markers(std::string_view contents) {
  std::array<std::optional<double>, 5> t{};
  std::optional<double> as, m;
  for (const auto& [key, value] : text::parse_key_values(contents)) {
    const auto v = text::parse_double(value);
    if (!v) throw Error(ErrorKind::InvalidMarkers, "marker '" + key + "' is not a number", key);
    if (key.size() == 2 && key[0] == 'T' && key[1] >= '1' && key[1] <= '5')
      t[static_cast<std::size_t>(key[1] - '1')] = *v;
    else if (key == "AS")
      as = *v;
    else if (key == "M")
      m = *v;
    else
      throw Error(ErrorKind::InvalidMarkers, "unknown marker '" + key + "'", key);
  }
  std::array<double, 5> b{};
  for (std::size_t i = 0; i < 5; ++i) {
    if (!t[i])
      throw Error(ErrorKind::InvalidMarkers, "missing marker T" + std::to_string(i + 1));
    b[i] = *t[i];
  }
  if (as.has_value() != m.has_value())
    throw Error(ErrorKind::InvalidMarkers, "AS and M must be given together");
  std::optional<PhaseMarkers::SubSegments> sub;
  if (as) sub = PhaseMarkers::SubSegments{*as, *m};
  return PhaseMarkers(b, sub);
}

std::string format_phase_markers(const PhaseMarkers& markers) {
  std::string out;
  for (std::size_t i = 0; i < 5; ++i)
    out += "T" + std::to_string(i + 1) + "=" + text::format_double(markers.boundaries()[i]) + "\n";
  if (const auto& sub = markers.sub_segments()) {
    out += "AS=" + text::format_double(sub->anticipatory_start) + "\n";
    out += "M=" + text::format_double(sub->task_start) + "\n";
  }
  return out;
}

std::string_view phase_name(Phase p) noexcept {
  switch (p) {
    case Phase::PreStress: return "pre-stress";
    case Phase::Stress: return "stress";
    case Phase::Recovery: return "recovery";
  }
  return "?";
}

PhaseSegmentation segment_phases(const std::vector<double>& timestamps,
                                 const PhaseMarkers& markers) {
  if (timestamps.empty()) throw Error(ErrorKind::EmptyStream, "no aligned rows");
  const double first = timestamps.front(), last = timestamps.back();
  const double slack = 1e-9 * std::max(1.0, std::abs(last));
  std::vector<double> all(markers.boundaries().begin(), markers.boundaries().end());
  if (const auto& sub = markers.sub_segments()) {
    all.push_back(sub->anticipatory_start);
    all.push_back(sub->task_start);
  }
  for (double m : all)
    if (m < first - slack || m > last + slack)
      throw Error(ErrorKind::MarkerOutOfRange,
                  "marker " + text::format_double(m) + " s outside recording [" +
                      text::format_double(first) + ", " + text::format_double(last) + "]");

  const auto lower = [&](double t) {
    return static_cast<std::size_t>(
        std::lower_bound(timestamps.begin(), timestamps.end(), t) - timestamps.begin());
  };
  const std::size_t n = timestamps.size();
  const std::size_t stress_begin = lower(markers.at(Marker::T2));
  const std::size_t recovery_begin = lower(markers.at(Marker::T3));

  PhaseSegmentation seg;
  seg.phases[Phase::PreStress] = {0, stress_begin};
  seg.phases[Phase::Stress] = {stress_begin, recovery_begin};
  seg.phases[Phase::Recovery] = {recovery_begin, n};
  seg.row_phase.resize(n);
  for (const auto& [phase, range] : seg.phases)
    std::fill(seg.row_phase.begin() + static_cast<std::ptrdiff_t>(range.begin),
              seg.row_phase.begin() + static_cast<std::ptrdiff_t>(range.end), phase);
  if (const auto& sub = markers.sub_segments()) {
    const std::size_t as = lower(sub->anticipatory_start);
    const std::size_t m = lower(sub->task_start);
    seg.anticipatory = RowRange{as, m};
    seg.task = RowRange{m, recovery_begin};
  }
  return seg;
}

SessionManifest parse_manifest(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::MalformedRow, std::string("manifest is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorKind::InvalidConfig, "manifest must be a JSON object");
  SessionManifest m;
  for (const auto& [key, value] : j.items()) {
    if (!value.is_string())
      throw Error(ErrorKind::InvalidConfig, "manifest value for '" + key + "' must be a string",
                  key);
    const auto v = value.get<std::string>();
    if (key == "participant_id") {
      m.participant_id = v;
    } else if (key == "markers") {
      m.markers_path = v;
    } else if (key == "labels") {
      m.labels_path = v;
    } else if (const auto ch = parse_channel(key)) {
      const auto colon = v.rfind(':');
      if (colon == std::string::npos)
        m.channel_sources[*ch] = {v, key};
      else
        m.channel_sources[*ch] = {v.substr(0, colon), v.substr(colon + 1)};
    } else {
      throw Error(ErrorKind::InvalidConfig, "unknown manifest key '" + key + "'", key);
    }
  }
  if (m.participant_id.empty())
    throw Error(ErrorKind::InvalidConfig, "manifest lacks participant_id");
  if (m.markers_path.empty())
    throw Error(ErrorKind::InvalidConfig, "manifest lacks markers", m.participant_id);
  return m;
}

std::string format_manifest(const SessionManifest& manifest) {
  // ordered_json keeps the key order stable for byte-identical output.
  nlohmann::ordered_json j;
  j["participant_id"] = manifest.participant_id;
  j["markers"] = manifest.markers_path;
  if (!manifest.labels_path.empty()) j["labels"] = manifest.labels_path;
  for (const auto& [ch, src] : manifest.channel_sources) {
    const auto name = std::string(channel_name(ch));
    j[name] = src.second == name ? src.first : src.first + ":" + src.second;
  }
  return j.dump(2) + "\n";
}

SessionRecording load_session(const std::string& dir, double rate) {
  namespace fs = std::filesystem;
  const fs::path base(dir);
  const auto manifest = parse_manifest(text::read_file((base / kManifestFileName).string()));

  std::map<std::string, std::string> file_cache;
  const auto contents = [&](const std::string& rel) -> const std::string& {
    auto it = file_cache.find(rel);
    if (it == file_cache.end())
      it = file_cache.emplace(rel, text::read_file((base / rel).string())).first;
    return it->second;
  };

  std::vector<SensorStream> streams;
  for (const auto& [ch, src] : manifest.channel_sources) {
    try {
      streams.push_back(parse_sensor_csv(contents(src.first), ChannelSchema(ch, src.second)));
    } catch (const Error& e) {
      throw e.annotated(manifest.participant_id + "/" + src.first);
    }
  }
  try {
    auto markers = parse_phase_markers(contents(manifest.markers_path));
    auto aligned = align_streams(streams, rate);
    // Validates marker placement against the aligned span.
    (void)segment_phases(aligned.timestamps, markers);
    return SessionRecording{manifest.participant_id, std::move(streams), std::move(markers),
                            std::move(aligned)};
  } catch (const Error& e) {
    throw e.annotated(manifest.participant_id);
  }
}

}  // namespace physioemo
