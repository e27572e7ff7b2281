#include "physioemo/preprocess.hpp"

#include <algorithm>
#include <cmath>

#include "physioemo/error.hpp"
#include "physioemo/text.hpp"

namespace physioemo {

FeatureMatrix::FeatureMatrix(Eigen::MatrixXd values, std::vector<std::string> column_names,
                             std::string participant_id)
    : values_(std::move(values)),
      columns_(std::move(column_names)),
      participant_id_(std::move(participant_id)) {
  if (static_cast<Eigen::Index>(columns_.size()) != values_.cols())
    throw Error(ErrorKind::DimensionMismatch, "column names do not match column count");
  if (!values_.allFinite())
    throw Error(ErrorKind::MalformedRow, "feature matrix contains NaN or infinite entries",
                participant_id_);
}

std::vector<double> moving_average(std::span<const double> series, std::size_t window) {
  if (window == 0) throw Error(ErrorKind::InvalidConfig, "window must be positive");
  if (series.size() < window)
    throw Error(ErrorKind::SeriesTooShort, "series of length " + std::to_string(series.size()) +
                                               " shorter than window " + std::to_string(window));
  const std::size_t n_out = series.size() - window + 1;
  std::vector<double> out(n_out);
  const double w = static_cast<double>(window);
  // Direct summation per output keeps every output independent of earlier rows,
  // so shifting the input shifts the output bit-for-bit.
  for (std::size_t i = 0; i < n_out; ++i) {
    double sum = 0.0, lo = series[i], hi = series[i];
    for (std::size_t k = i; k < i + window; ++k) {
      sum += series[k];
      lo = std::min(lo, series[k]);
      hi = std::max(hi, series[k]);
    }
    out[i] = std::clamp(sum / w, lo, hi);
  }
  return out;
}

Eigen::MatrixXd smooth_columns(const Eigen::MatrixXd& m, std::size_t window) {
  const auto rows = static_cast<std::size_t>(m.rows());
  if (rows < window)
    throw Error(ErrorKind::SeriesTooShort, "matrix with " + std::to_string(rows) +
                                               " rows shorter than window " + std::to_string(window));
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows - window + 1), m.cols());
  std::vector<double> column(rows);
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (std::size_t r = 0; r < rows; ++r) column[r] = m(static_cast<Eigen::Index>(r), c);
    const auto smoothed = moving_average(column, window);
    for (std::size_t r = 0; r < smoothed.size(); ++r)
      out(static_cast<Eigen::Index>(r), c) = smoothed[r];
  }
  return out;
}

std::string NormStats::serialize() const {
  std::string out;
  for (std::size_t j = 0; j < mean.size(); ++j)
    out += column_names[j] + " " + text::format_double(mean[j]) + " " +
           text::format_double(stddev[j]) + "\n";
  return out;
}

NormStats NormStats::deserialize(std::string_view contents) {
  NormStats s;
  std::size_t line_no = 0;
  for (auto line : text::split(contents, '\n')) {
    ++line_no;
    line = text::trim(line);
    if (line.empty()) continue;
    const auto parts = text::split(line, ' ');
    const auto m = parts.size() == 3 ? text::parse_double(parts[1]) : std::nullopt;
    const auto sd = parts.size() == 3 ? text::parse_double(parts[2]) : std::nullopt;
    if (!m || !sd)
      throw Error(ErrorKind::MalformedRow, "bad NormStats line " + std::to_string(line_no), {},
                  line_no);
    s.column_names.emplace_back(parts[0]);
    s.mean.push_back(*m);
    s.stddev.push_back(*sd);
  }
  return s;
}

NormStats fit_zscore(const FeatureMatrix& train) {
  const auto& x = train.values();
  if (x.rows() == 0 || x.cols() == 0)
    throw Error(ErrorKind::EmptyMatrix, "cannot fit z-score on an empty matrix");
  NormStats s;
  s.column_names = train.column_names();
  const double n = static_cast<double>(x.rows());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double mean = x.col(j).sum() / n;
    const double var = (x.col(j).array() - mean).square().sum() / n;
    s.mean.push_back(mean);
    double sd = std::sqrt(var);
    // A column whose values are all equal can still leave a rounding residue.
    if (x.col(j).maxCoeff() == x.col(j).minCoeff()) sd = 0.0;
    s.stddev.push_back(sd);
  }
  return s;
}

FeatureMatrix apply_zscore(const FeatureMatrix& m, const NormStats& stats) {
  const auto& x = m.values();
  if (static_cast<std::size_t>(x.cols()) != stats.mean.size())
    throw Error(ErrorKind::DimensionMismatch,
                "matrix has " + std::to_string(x.cols()) + " columns, stats have " +
                    std::to_string(stats.mean.size()));
  Eigen::MatrixXd out(x.rows(), x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const auto ju = static_cast<std::size_t>(j);
    if (stats.is_degenerate(ju))
      out.col(j).setZero();
    else
      out.col(j) = (x.col(j).array() - stats.mean[ju]) / stats.stddev[ju];
  }
  return FeatureMatrix(std::move(out), m.column_names(), m.participant_id());
}

}  // namespace physioemo
