#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "physioemo/ingest.hpp"
#include "physioemo/labels.hpp"
#include "physioemo/preprocess.hpp"

namespace physioemo {

/// How emotion intensities depend on the smoothed channels.
enum class EmotionLink { Linear, Nonlinear };

std::string_view link_name(EmotionLink link) noexcept;
std::optional<EmotionLink> parse_link(std::string_view name) noexcept;

/// Synthetic TSST-shaped sessions. This is not a physiological model: it only
/// produces signals with known structure so the pipeline has known answers.
struct GeneratorSpec {
  std::size_t n_participants = 39;
  /// waiting/pre-stress, stress, recovery, late recovery
  std::array<double, 4> phase_minutes{20.0, 20.0, 20.0, 20.0};
  double rate = kDefaultAlignmentRate;           ///< Hz, shared by all channels
  std::uint64_t seed = 0;
  EmotionLink link = EmotionLink::Nonlinear;
  double noise_std = 0.05;                       ///< label noise
  std::size_t window = kDefaultSmoothingWindow;  ///< smoothing the link is defined on

  /// Throws InvalidConfig.
  void validate() const;
};

struct SyntheticParticipant {
  std::string id;
  std::vector<SensorStream> streams;  ///< all eight channels
  PhaseMarkers markers;
  EmotionTimeSeries labels;
};

/// "P01", "P02", ...; zero-padded to the width of the largest index.
std::string synthetic_participant_id(std::size_t index, std::size_t count);

/// Participant `index` (0-based); depends only on the generator settings and the index.
SyntheticParticipant generate_participant(const GeneratorSpec& spec, std::size_t index);

/// Writes one directory per participant (manifest.json, shimmer.csv, e4.csv,
/// fea.csv, markers.txt) under `out_dir`.
void write_participant(const SyntheticParticipant& p, const std::string& dir);

/// Generates and writes every participant. Returns the participant ids.
std::vector<std::string> generate(const GeneratorSpec& spec, const std::string& out_dir,
                                  std::size_t jobs = 1);

}  // namespace physioemo
