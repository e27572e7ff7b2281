#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace physioemo {

inline constexpr std::size_t kDefaultSmoothingWindow = 60;

/// Per-sample feature rows for one participant (or a concatenation of them).
/// Construction rejects NaN/infinite entries and a column-name count that
/// differs from the column count.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(Eigen::MatrixXd values, std::vector<std::string> column_names,
                std::string participant_id = {});

  const Eigen::MatrixXd& values() const noexcept { return values_; }
  const std::vector<std::string>& column_names() const noexcept { return columns_; }
  const std::string& participant_id() const noexcept { return participant_id_; }
  Eigen::Index rows() const noexcept { return values_.rows(); }
  Eigen::Index cols() const noexcept { return values_.cols(); }

 private:
  Eigen::MatrixXd values_;
  std::vector<std::string> columns_;
  std::string participant_id_;
};

/// Trailing moving average: out[i] = mean(series[i .. i + window - 1]), so the
/// output has `series.size() - window + 1` entries and out[i] lines up with
/// input index i + window - 1. Throws SeriesTooShort.
std::vector<double> moving_average(std::span<const double> series,
                                   std::size_t window = kDefaultSmoothingWindow);

/// Column-wise moving_average of a matrix.
Eigen::MatrixXd smooth_columns(const Eigen::MatrixXd& m,
                               std::size_t window = kDefaultSmoothingWindow);

/// Z-score parameters fitted on training rows only.
struct NormStats {
  std::vector<std::string> column_names;
  std::vector<double> mean;
  std::vector<double> stddev;  ///< population std; 0 for constant columns

  bool is_degenerate(std::size_t column) const { return !(stddev[column] > 0.0); }

  /// One `name mean std` line per column.
  std::string serialize() const;
  static NormStats deserialize(std::string_view text);
};

/// Throws EmptyMatrix.
NormStats fit_zscore(const FeatureMatrix& train);

/// (x - mean) / std per column; degenerate columns map to 0. Throws
/// DimensionMismatch.
FeatureMatrix apply_zscore(const FeatureMatrix& m, const NormStats& stats);

}  // namespace physioemo
