#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "physioemo/ingest.hpp"
#include "physioemo/labels.hpp"
#include "physioemo/preprocess.hpp"

namespace physioemo {

struct PipelineOptions {
  double rate = kDefaultAlignmentRate;       ///< Hz
  std::size_t window = kDefaultSmoothingWindow;
  std::vector<Emotion> targets = kDefaultTargets;
};

/// One participant after alignment, smoothing and label pairing. Features are
/// smoothed but not normalized; normalization belongs to each fold.
struct PreparedParticipant {
  std::string id;
  std::vector<double> timestamps;  ///< one per row
  Eigen::MatrixXd features;        ///< rows x kChannelCount
  Eigen::MatrixXd intensities;     ///< rows x kEmotionCount
  std::size_t dropped_label_rows = 0;  ///< FEA rows with a missing cell
  std::size_t unmatched_rows = 0;      ///< smoothed rows without a label in tolerance

  FeatureMatrix feature_matrix() const;
};

/// Smooths the aligned channels (trailing window) and pairs every remaining
/// row with its nearest label within one sample period.
PreparedParticipant prepare_participant(const SessionRecording& session,
                                        const EmotionTimeSeries& labels,
                                        const PipelineOptions& options, std::size_t dropped = 0);

/// Loads `dir/manifest.json`, its sensor files, markers and labels.
PreparedParticipant load_participant(const std::string& dir, const PipelineOptions& options);

/// Subdirectories of `root` that hold a manifest, sorted by name.
std::vector<std::string> participant_directories(const std::string& root);

struct Dataset {
  std::vector<PreparedParticipant> participants;  ///< sorted by id

  std::vector<std::string> ids() const;
  const PreparedParticipant& at(const std::string& id) const;
};

/// Loads every participant under `root`. Throws TooFewParticipants when none
/// are found and InvalidConfig on duplicate participant ids.
Dataset load_dataset(const std::string& root, const PipelineOptions& options,
                     std::size_t jobs = 1);

}  // namespace physioemo
