#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace physioemo {

/// FEA emotion categories in export column order.
enum class Emotion {
  Joy,
  Anger,
  Surprise,
  Fear,
  Contempt,
  Disgust,
  Sadness,
  Neutral,
  Positive,
  Negative,
  Confusion,
  Frustration,
};

inline constexpr std::size_t kEmotionCount = 12;

std::string_view emotion_name(Emotion e) noexcept;
std::optional<Emotion> parse_emotion(std::string_view name) noexcept;
std::vector<std::string> emotion_names();

/// Default regression targets.
inline const std::vector<Emotion> kDefaultTargets = {Emotion::Neutral, Emotion::Positive,
                                                     Emotion::Negative};

/// Twelve intensity channels on a shared, strictly increasing timeline.
struct EmotionTimeSeries {
  std::vector<double> timestamps;
  Eigen::MatrixXd intensities;  ///< rows x kEmotionCount

  std::size_t size() const noexcept { return timestamps.size(); }
  Eigen::VectorXd channel(Emotion e) const {
    return intensities.col(static_cast<Eigen::Index>(e));
  }
};

struct FeaParseResult {
  EmotionTimeSeries series;
  std::size_t dropped_rows = 0;  ///< rows with at least one blank emotion cell
};

/// Parses a `timestamp,Joy,...,Frustration` export (column order free, extra
/// columns ignored). Throws MissingChannelColumn, EmptyStream, MalformedRow,
/// NonMonotonicTime.
FeaParseResult parse_fea_export(std::istream& source);
FeaParseResult parse_fea_export(std::string_view source);

void write_fea_export(std::ostream& out, const EmotionTimeSeries& series);

/// Rows of a feature timeline that received a label, with their intensities.
struct LabelAlignment {
  std::vector<std::size_t> kept_rows;  ///< indices into the feature timeline
  Eigen::MatrixXd intensities;         ///< kept_rows.size() x kEmotionCount
};

/// Nearest label sample within `tolerance` seconds (ties go to the earlier
/// sample); unmatched feature rows are dropped. Throws NoOverlap.
LabelAlignment align_labels(const EmotionTimeSeries& labels,
                            const std::vector<double>& feature_timeline, double tolerance);

struct EmotionBaseline {
  Emotion emotion;
  double baseline = 0.0;          ///< mean intensity
  double stddev = 0.0;            ///< population std
  double pct_outside_1std = 0.0;  ///< 100 * fraction with |x - mean| > std
};

using EmotionBaselineTable = std::array<EmotionBaseline, kEmotionCount>;

EmotionBaseline baseline_of(Emotion e, const Eigen::Ref<const Eigen::VectorXd>& channel);

/// Throws ChannelTooShort when fewer than two samples are present.
EmotionBaselineTable baseline_stats(const EmotionTimeSeries& labels);

/// Two side-by-side column groups (emotion, baseline, % outside 1st std), six
/// emotions each.
std::string format_baseline_table(const EmotionBaselineTable& table);

/// Per-target min-max parameters fitted on training rows.
struct TargetScaling {
  std::vector<Emotion> targets;
  std::vector<double> min;
  std::vector<double> max;

  /// Scales one value of target `k` and clips it to [0, 1].
  double apply(std::size_t k, double value) const;
  Eigen::MatrixXd apply(const Eigen::MatrixXd& raw_targets) const;

  std::string serialize() const;
};

/// Throws DegenerateRange when a target is constant over the training rows.
TargetScaling fit_target_scaling(const Eigen::MatrixXd& train_targets,
                                 const std::vector<Emotion>& targets);

/// Picks the target columns out of a rows x kEmotionCount intensity matrix.
Eigen::MatrixXd target_columns(const Eigen::MatrixXd& intensities,
                               const std::vector<Emotion>& targets);

struct TargetMatrix {
  Eigen::MatrixXd values;  ///< rows x targets.size(), in [0, 1]
  TargetScaling scaling;
};

/// Min-max scaling fitted on rows where `training_rows` is true and applied
/// (with clipping) to every row.
TargetMatrix select_targets(const Eigen::MatrixXd& aligned_intensities,
                            const std::vector<bool>& training_rows,
                            const std::vector<Emotion>& targets = kDefaultTargets);

}  // namespace physioemo
