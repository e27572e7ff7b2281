#pragma once

// Per-family state readers used by deserialize_model().

#include <memory>

#include "model_io.hpp"
#include "physioemo/models.hpp"

namespace physioemo::detail {

std::unique_ptr<TrainedModel> read_linear(ModelFamily family, StateReader& in);
std::unique_ptr<TrainedModel> read_knn(StateReader& in);
std::unique_ptr<TrainedModel> read_tree_model(ModelFamily family, StateReader& in);
std::unique_ptr<TrainedModel> read_network(ModelFamily family, StateReader& in);

/// clamp(sum / n, min, max): a mean that never leaves the input range because
/// of rounding.
template <typename Range>
double bounded_mean(const Range& values) {
  double sum = 0.0, lo = 0.0, hi = 0.0;
  std::size_t n = 0;
  for (double v : values) {
    if (n == 0) lo = hi = v;
    sum += v;
    lo = v < lo ? v : lo;
    hi = v > hi ? v : hi;
    ++n;
  }
  if (n == 0) return 0.0;
  const double m = sum / static_cast<double>(n);
  return m < lo ? lo : (m > hi ? hi : m);
}

}  // namespace physioemo::detail
