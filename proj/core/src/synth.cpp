#include "physioemo/synth.hpp"

#include <cmath>
#include <filesystem>
#include <sstream>

#include "parallel.hpp"
#include "physioemo/error.hpp"
#include "physioemo/rng.hpp"
#include "physioemo/text.hpp"

namespace physioemo {

namespace {

// Per-channel generative parameters. Signals are built in standardized
// units s and written as mean + scale * s.
struct ChannelModel {
  double mean;
  double scale;
  double sigma;         // stationary std of the OU component, in s units
  double stress_shift;  // added to s during the stress phase
};

constexpr std::array<ChannelModel, kChannelCount> kModels = {{
    {0.0, 30.0, 1.5, 0.0},      // Yaw, degrees
    {0.0, 20.0, 1.5, 0.0},      // Pitch
    {0.0, 20.0, 1.5, 0.0},      // Roll
    {33.0, 0.5, 1.5, 0.0},      // Temperature, Celsius
    {3700.0, 20.0, 0.5, 0.0},   // InternalADCVoltage, mV
    {0.0, 1.0, 0.0, 0.0},       // GSRResistance: derived from conductance
    {75.0, 5.0, 0.6, 3.0},      // HeartRate, bpm
    {5.0, 0.8, 0.6, 2.0},       // GSRConductance, microsiemens
}};

constexpr double kTauSamples = 20.0;     // OU correlation time
constexpr double kOffsetStd = 0.25;      // per-participant shift of s
constexpr double kAdcDecayPerHour = 1.5; // s units

std::size_t ch(Channel c) { return static_cast<std::size_t>(c); }
std::size_t em(Emotion e) { return static_cast<std::size_t>(e); }

// Fixed linear link weights, indexed [emotion][channel]; drawn once from a
// constant seed so every dataset shares the same link.
const std::array<std::array<double, kChannelCount>, kEmotionCount>& linear_weights() {
  static const auto w = [] {
    std::array<std::array<double, kChannelCount>, kEmotionCount> out{};
    Rng rng(0x5eed1);
    for (auto& row : out)
      for (auto& v : row) v = 0.2 * (2.0 * rng.uniform() - 1.0);
    return out;
  }();
  return w;
}

// Nonlinear link on standardized smoothed channels s.
std::array<double, kEmotionCount> nonlinear_link(const std::array<double, kChannelCount>& s) {
  const double yaw = s[ch(Channel::Yaw)], pitch = s[ch(Channel::Pitch)],
               roll = s[ch(Channel::Roll)], temp = s[ch(Channel::Temperature)];
  const double hr = s[ch(Channel::HeartRate)], gsr = s[ch(Channel::GSRConductance)];
  std::array<double, kEmotionCount> out{};
  out[em(Emotion::Neutral)] = std::exp(-0.5 * (pitch * pitch + roll * roll));
  out[em(Emotion::Positive)] = 0.5 + 0.25 * yaw * temp;
  out[em(Emotion::Negative)] = roll * yaw > 0.0 ? 0.9 : 0.1;
  out[em(Emotion::Joy)] = 0.5 + 0.2 * std::tanh(yaw * temp);
  out[em(Emotion::Anger)] = std::abs(roll - yaw) > 1.0 ? 0.7 : 0.2;
  out[em(Emotion::Surprise)] = std::exp(-0.5 * yaw * yaw);
  out[em(Emotion::Fear)] = 0.3 + 0.1 * hr * hr;
  out[em(Emotion::Contempt)] = 0.2 * std::abs(pitch * temp);
  out[em(Emotion::Disgust)] = pitch > 0.5 ? 0.6 : 0.3;
  out[em(Emotion::Sadness)] = 0.4 + 0.2 * std::sin(temp);
  out[em(Emotion::Confusion)] = 0.5 + 0.2 * std::tanh(gsr * pitch);
  out[em(Emotion::Frustration)] = (hr > 0.0) == (temp > 0.0) ? 0.55 : 0.35;
  return out;
}

}  // namespace

std::string_view link_name(EmotionLink link) noexcept {
  return link == EmotionLink::Linear ? "linear" : "nonlinear";
}

std::optional<EmotionLink> parse_link(std::string_view name) noexcept {
  if (name == "linear") return EmotionLink::Linear;
  if (name == "nonlinear") return EmotionLink::Nonlinear;
  return std::nullopt;
}

void GeneratorSpec::validate() const {
  if (n_participants < 2) throw Error(ErrorKind::InvalidConfig, "need at least 2 participants");
  for (double m : phase_minutes)
    if (!(m > 0.0) || !std::isfinite(m))
      throw Error(ErrorKind::InvalidConfig, "phase durations must be positive");
  if (!(rate > 0.0) || !std::isfinite(rate))
    throw Error(ErrorKind::InvalidConfig, "sample rate must be positive");
  if (!(noise_std >= 0.0) || !std::isfinite(noise_std))
    throw Error(ErrorKind::InvalidConfig, "noise_std must be >= 0");
  if (window == 0) throw Error(ErrorKind::InvalidConfig, "window must be >= 1");
  double total = 0.0;
  for (double m : phase_minutes) total += m;
  if (std::floor(total * 60.0 * rate + 1e-9) + 1 < static_cast<double>(window) + 1)
    throw Error(ErrorKind::InvalidConfig, "session is shorter than the smoothing window");
}

std::string synthetic_participant_id(std::size_t index, std::size_t count) {
  const std::size_t width = std::max<std::size_t>(2, std::to_string(count).size());
  std::string n = std::to_string(index + 1);
  return "P" + std::string(width > n.size() ? width - n.size() : 0, '0') + n;
}

SyntheticParticipant generate_participant(const GeneratorSpec& spec, std::size_t index) {
  spec.validate();
  const std::string id = synthetic_participant_id(index, spec.n_participants);
  Rng rng(derive_seed(spec.seed, "synth", id));

  std::array<double, 5> bounds{};
  for (std::size_t i = 0; i < 4; ++i) bounds[i + 1] = bounds[i] + spec.phase_minutes[i] * 60.0;
  const auto n = static_cast<std::size_t>(std::floor(bounds[4] * spec.rate + 1e-9)) + 1;
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = static_cast<double>(i) / spec.rate;
  bounds[4] = std::min(bounds[4], t.back());
  const double stress_len = bounds[2] - bounds[1];
  const PhaseMarkers markers(bounds, PhaseMarkers::SubSegments{bounds[1], bounds[1] + 0.5 * stress_len});

  const double rho = std::exp(-1.0 / kTauSamples);
  const double innovation = std::sqrt(1.0 - rho * rho);
  std::array<std::vector<double>, kChannelCount> values;
  for (std::size_t c = 0; c < kChannelCount; ++c) {
    const auto& m = kModels[c];
    const double offset = kOffsetStd * rng.normal();
    double ou = m.sigma * rng.normal();
    auto& v = values[c];
    v.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (i) ou = rho * ou + innovation * m.sigma * rng.normal();
      double s = offset + ou;
      if (t[i] >= bounds[1] && t[i] < bounds[2]) s += m.stress_shift;
      if (c == ch(Channel::InternalADCVoltage)) s -= kAdcDecayPerHour * t[i] / 3600.0;
      v[i] = m.mean + m.scale * s;
    }
  }
  auto& cond = values[ch(Channel::GSRConductance)];
  auto& res = values[ch(Channel::GSRResistance)];
  for (std::size_t i = 0; i < n; ++i) {
    cond[i] = std::max(cond[i], 0.1);
    res[i] = 1000.0 / cond[i] * (1.0 + 0.01 * rng.normal());  // kilo-ohms
  }

  // Labels follow the same trailing mean the pipeline computes; the first
  // window-1 rows use the samples available so far.
  std::array<std::vector<double>, kChannelCount> smooth;
  for (std::size_t c = 0; c < kChannelCount; ++c) {
    smooth[c].resize(n);
    const std::size_t head = std::min(spec.window - 1, n);
    for (std::size_t i = 0; i < head; ++i) {
      double sum = 0.0;
      for (std::size_t j = 0; j <= i; ++j) sum += values[c][j];
      smooth[c][i] = sum / static_cast<double>(i + 1);
    }
    if (n >= spec.window) {
      const auto tail = moving_average(values[c], spec.window);
      std::copy(tail.begin(), tail.end(), smooth[c].begin() + static_cast<std::ptrdiff_t>(head));
    }
  }

  EmotionTimeSeries labels;
  labels.timestamps = t;
  labels.intensities.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(kEmotionCount));
  const auto& w = linear_weights();
  for (std::size_t i = 0; i < n; ++i) {
    std::array<double, kChannelCount> s{};
    for (std::size_t c = 0; c < kChannelCount; ++c)
      s[c] = c == ch(Channel::GSRResistance)
                 ? (smooth[c][i] - 200.0) / 50.0
                 : (smooth[c][i] - kModels[c].mean) / kModels[c].scale;
    std::array<double, kEmotionCount> y{};
    if (spec.link == EmotionLink::Linear) {
      for (std::size_t e = 0; e < kEmotionCount; ++e) {
        double acc = 0.5;
        for (std::size_t c = 0; c < kChannelCount; ++c) acc += w[e][c] * s[c];
        y[e] = acc;
      }
    } else {
      y = nonlinear_link(s);
    }
    for (std::size_t e = 0; e < kEmotionCount; ++e)
      labels.intensities(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(e)) =
          y[e] + (spec.noise_std > 0.0 ? spec.noise_std * rng.normal() : 0.0);
  }

  std::vector<SensorStream> streams;
  for (std::size_t c = 0; c < kChannelCount; ++c) {
    std::vector<Sample> samples(n);
    for (std::size_t i = 0; i < n; ++i) samples[i] = {t[i], values[c][i]};
    streams.emplace_back(kAllChannels[c], std::move(samples));
  }
  return SyntheticParticipant{id, std::move(streams), markers, std::move(labels)};
}

void write_participant(const SyntheticParticipant& p, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create '" + dir + "': " + ec.message());
  const fs::path base(dir);

  // Wrist device: heart rate; chest device: everything else in one wide file.
  std::string shimmer = "timestamp";
  std::vector<const SensorStream*> wide;
  const SensorStream* hr = nullptr;
  for (const auto& s : p.streams) {
    if (s.channel() == Channel::HeartRate) {
      hr = &s;
    } else {
      wide.push_back(&s);
      shimmer += "," + std::string(channel_name(s.channel()));
    }
  }
  shimmer += "\n";
  const std::size_t n = wide.front()->samples().size();
  for (std::size_t i = 0; i < n; ++i) {
    shimmer += text::format_double(wide.front()->samples()[i].t);
    for (const auto* s : wide) shimmer += "," + text::format_double(s->samples()[i].value);
    shimmer += "\n";
  }
  text::write_file((base / "shimmer.csv").string(), shimmer);

  std::ostringstream e4;
  write_sensor_csv(e4, *hr);
  text::write_file((base / "e4.csv").string(), e4.str());

  std::ostringstream fea;
  write_fea_export(fea, p.labels);
  text::write_file((base / "fea.csv").string(), fea.str());
  text::write_file((base / "markers.txt").string(), format_phase_markers(p.markers));

  SessionManifest m;
  m.participant_id = p.id;
  m.markers_path = "markers.txt";
  m.labels_path = "fea.csv";
  for (const auto* s : wide) m.channel_sources[s->channel()] = {"shimmer.csv", std::string(channel_name(s->channel()))};
  m.channel_sources[Channel::HeartRate] = {"e4.csv", "HeartRate"};
  text::write_file((base / kManifestFileName).string(), format_manifest(m));
}

std::vector<std::string> generate(const GeneratorSpec& spec, const std::string& out_dir,
                                  std::size_t jobs) {
  spec.validate();
  std::vector<std::string> ids(spec.n_participants);
  detail::parallel_for(spec.n_participants, jobs, [&](std::size_t i) {
    const auto p = generate_participant(spec, i);
    write_participant(p, (std::filesystem::path(out_dir) / p.id).string());
    ids[i] = p.id;
  });
  return ids;
}

}  // namespace physioemo
