#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "physioemo/labels.hpp"

namespace physioemo {

struct CorrelationMatrix {
  std::vector<std::string> labels;
  Eigen::MatrixXd entries;  ///< symmetric, unit diagonal
};

/// Pearson r for every pair of columns of `data` (rows = samples). Throws
/// ConstantColumn naming the first constant column and LengthMismatch.
CorrelationMatrix pearson_matrix(const Eigen::MatrixXd& data, std::vector<std::string> labels);

/// The CSV has a leading empty header cell, then one row per label.
std::string format_correlations_csv(const CorrelationMatrix& m);

struct PcaProjection {
  Eigen::RowVectorXd mean;            ///< 1 x d
  Eigen::MatrixXd components;         ///< k x d, orthonormal rows
  Eigen::VectorXd explained_variance; ///< k, non-increasing
  Eigen::MatrixXd projected;          ///< n x k
};

/// Top-k principal axes of the population covariance of `x` (n x d).
///
/// Each component is signed so its largest-magnitude loading is positive.
/// Throws DimensionMismatch unless n > d >= k >= 1, and RankDeficient if `x`
/// has no variance at all.
PcaProjection pca_project(const Eigen::MatrixXd& x, std::size_t k = 2);

/// Index of the largest intensity per row; ties go to the earlier emotion.
std::vector<Emotion> dominant_emotions(const Eigen::MatrixXd& intensities);

struct Centroid {
  Emotion emotion;
  Eigen::VectorXd center;  ///< k
  std::size_t count = 0;
};

/// Mean projected coordinate of the rows of each emotion present, in emotion
/// order.
std::vector<Centroid> pca_centroids(const Eigen::MatrixXd& projected,
                                    const std::vector<Emotion>& labels);

/// `x,y,dominant_emotion` rows for the first two components.
std::string format_projection_csv(const PcaProjection& p, const std::vector<Emotion>& labels);
/// `emotion,x,y,count` rows.
std::string format_centroids_csv(const std::vector<Centroid>& centroids);

}  // namespace physioemo
