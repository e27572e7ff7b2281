#include "physioemo/analysis.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "physioemo/error.hpp"
#include "physioemo/text.hpp"

namespace physioemo {

CorrelationMatrix pearson_matrix(const Eigen::MatrixXd& data, std::vector<std::string> labels) {
  if (static_cast<Eigen::Index>(labels.size()) != data.cols())
    throw Error(ErrorKind::LengthMismatch, "label count differs from column count");
  if (data.rows() < 2) throw Error(ErrorKind::LengthMismatch, "need at least 2 samples");
  const Eigen::MatrixXd centered = data.rowwise() - data.colwise().mean();
  Eigen::VectorXd norms(data.cols());
  for (Eigen::Index j = 0; j < data.cols(); ++j) {
    const auto col = data.col(j);
    if ((col.array() == col[0]).all())
      throw Error(ErrorKind::ConstantColumn, "column '" + labels[j] + "' is constant", labels[j]);
    norms[j] = centered.col(j).norm();
  }
  CorrelationMatrix m;
  m.entries.resize(data.cols(), data.cols());
  for (Eigen::Index i = 0; i < data.cols(); ++i) {
    m.entries(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < data.cols(); ++j) {
      const double r = std::clamp(centered.col(i).dot(centered.col(j)) / (norms[i] * norms[j]),
                                  -1.0, 1.0);
      m.entries(i, j) = m.entries(j, i) = r;
    }
  }
  m.labels = std::move(labels);
  return m;
}

std::string format_correlations_csv(const CorrelationMatrix& m) {
  std::string out;
  for (const auto& l : m.labels) out += "," + l;
  out += "\n";
  for (Eigen::Index i = 0; i < m.entries.rows(); ++i) {
    out += m.labels[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < m.entries.cols(); ++j)
      out += "," + text::format_double(m.entries(i, j));
    out += "\n";
  }
  return out;
}

PcaProjection pca_project(const Eigen::MatrixXd& x, std::size_t k) {
  const auto d = static_cast<std::size_t>(x.cols());
  if (k == 0 || k > d || static_cast<std::size_t>(x.rows()) <= d)
    throw Error(ErrorKind::DimensionMismatch, "PCA needs n > d >= k >= 1 (n=" +
                                                  std::to_string(x.rows()) + ", d=" +
                                                  std::to_string(d) + ", k=" + std::to_string(k) +
                                                  ")");
  PcaProjection p;
  p.mean = x.colwise().mean();
  const Eigen::MatrixXd centered = x.rowwise() - p.mean;
  const Eigen::MatrixXd cov =
      (centered.transpose() * centered) / static_cast<double>(x.rows());
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  // Eigen sorts ascending.
  const Eigen::VectorXd values = eig.eigenvalues().reverse();
  if (!(values[0] > 1e-12 * std::max(1.0, cov.diagonal().cwiseAbs().maxCoeff())))
    throw Error(ErrorKind::RankDeficient, "data has no variance");

  const auto ki = static_cast<Eigen::Index>(k);
  p.components.resize(ki, x.cols());
  p.explained_variance.resize(ki);
  for (Eigen::Index c = 0; c < ki; ++c) {
    Eigen::VectorXd v = eig.eigenvectors().col(x.cols() - 1 - c);
    Eigen::Index arg = 0;
    for (Eigen::Index j = 1; j < v.size(); ++j)
      if (std::abs(v[j]) > std::abs(v[arg])) arg = j;
    if (v[arg] < 0) v = -v;
    p.components.row(c) = v.transpose();
    p.explained_variance[c] = std::max(0.0, values[c]);
  }
  p.projected = centered * p.components.transpose();
  return p;
}

std::vector<Emotion> dominant_emotions(const Eigen::MatrixXd& intensities) {
  if (intensities.cols() != static_cast<Eigen::Index>(kEmotionCount))
    throw Error(ErrorKind::DimensionMismatch, "expected one column per emotion");
  std::vector<Emotion> out;
  out.reserve(static_cast<std::size_t>(intensities.rows()));
  for (Eigen::Index r = 0; r < intensities.rows(); ++r) {
    Eigen::Index best = 0;
    for (Eigen::Index j = 1; j < intensities.cols(); ++j)
      if (intensities(r, j) > intensities(r, best)) best = j;
    out.push_back(static_cast<Emotion>(best));
  }
  return out;
}

std::vector<Centroid> pca_centroids(const Eigen::MatrixXd& projected,
                                    const std::vector<Emotion>& labels) {
  if (static_cast<Eigen::Index>(labels.size()) != projected.rows())
    throw Error(ErrorKind::LengthMismatch, "one label per projected row required");
  std::vector<Centroid> all(kEmotionCount);
  for (std::size_t e = 0; e < kEmotionCount; ++e)
    all[e] = Centroid{static_cast<Emotion>(e), Eigen::VectorXd::Zero(projected.cols()), 0};
  for (std::size_t r = 0; r < labels.size(); ++r) {
    auto& c = all[static_cast<std::size_t>(labels[r])];
    c.center += projected.row(static_cast<Eigen::Index>(r)).transpose();
    ++c.count;
  }
  std::vector<Centroid> out;
  for (auto& c : all)
    if (c.count) {
      c.center /= static_cast<double>(c.count);
      out.push_back(std::move(c));
    }
  return out;
}

std::string format_projection_csv(const PcaProjection& p, const std::vector<Emotion>& labels) {
  if (p.projected.cols() < 2) throw Error(ErrorKind::DimensionMismatch, "need two components");
  std::string out = "x,y,dominant_emotion\n";
  for (Eigen::Index r = 0; r < p.projected.rows(); ++r)
    out += text::format_double(p.projected(r, 0)) + "," + text::format_double(p.projected(r, 1)) +
           "," + std::string(emotion_name(labels[static_cast<std::size_t>(r)])) + "\n";
  return out;
}

std::string format_centroids_csv(const std::vector<Centroid>& centroids) {
  std::string out = "emotion,x,y,count\n";
  for (const auto& c : centroids)
    out += std::string(emotion_name(c.emotion)) + "," + text::format_double(c.center[0]) + "," +
           text::format_double(c.center.size() > 1 ? c.center[1] : 0.0) + "," +
           std::to_string(c.count) + "\n";
  return out;
}

}  // namespace physioemo
