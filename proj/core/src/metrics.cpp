#include "physioemo/metrics.hpp"

#include <algorithm>
#include <string>

#include "physioemo/error.hpp"

namespace physioemo {

namespace {

void check_lengths(std::span<const double> y, std::span<const double> yhat, std::size_t min_n) {
  if (y.size() != yhat.size())
    throw Error(ErrorKind::LengthMismatch, "y has " + std::to_string(y.size()) +
                                               " values but yhat has " +
                                               std::to_string(yhat.size()));
  if (y.size() < min_n)
    throw Error(ErrorKind::LengthMismatch,
                "need at least " + std::to_string(min_n) + " values, got " +
                    std::to_string(y.size()));
}

}  // namespace

double r2_score(std::span<const double> y, std::span<const double> yhat) {
  check_lengths(y, yhat, 2);
  if (std::all_of(y.begin(), y.end(), [&](double v) { return v == y[0]; }))
    throw Error(ErrorKind::ZeroVariance, "target has zero variance");
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    ss_res += (y[i] - yhat[i]) * (y[i] - yhat[i]);
    ss_tot += (y[i] - mean) * (y[i] - mean);
  }
  if (!(ss_tot > 0.0)) throw Error(ErrorKind::ZeroVariance, "target has zero variance");
  return 1.0 - ss_res / ss_tot;
}

double mse(std::span<const double> y, std::span<const double> yhat) {
  check_lengths(y, yhat, 1);
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s += (y[i] - yhat[i]) * (y[i] - yhat[i]);
  return s / static_cast<double>(y.size());
}

}  // namespace physioemo
