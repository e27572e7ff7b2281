#pragma once

// Fixed inputs shared by the unit tests and the acceptance runner.

#include <vector>

namespace fixtures {

struct MetricCase {
  std::vector<double> y;
  std::vector<double> yhat;
  double r2;   // exact rational value worked out by hand
  double mse;
};

inline const std::vector<MetricCase>& metric_cases() {
  static const std::vector<MetricCase> cases = {
      {{1, 2, 3}, {1, 2, 3}, 1.0, 0.0},
      {{0, 1, 2}, {1, 1, 1}, 0.0, 2.0 / 3.0},
      {{0, 1, 2}, {0, 0, 0}, -3.0 / 2.0, 5.0 / 3.0},
      {{2, 4}, {3, 3}, 0.0, 1.0},
      {{1, 2, 3, 4}, {1.5, 1.5, 3.5, 3.5}, 4.0 / 5.0, 1.0 / 4.0},
      {{1, 2, 3}, {3, 2, 1}, -3.0, 8.0 / 3.0},
      {{0, 0, 1}, {0, 0, 0}, -1.0 / 2.0, 1.0 / 3.0},
      {{5, 7, 9, 11}, {5, 7, 9, 12}, 19.0 / 20.0, 1.0 / 4.0},
      {{-1, 1}, {1, -1}, -3.0, 4.0},
      {{-2, 0, 2}, {-1, 0, 1}, 3.0 / 4.0, 2.0 / 3.0},
      {{10, 20, 30, 40, 50}, {12, 18, 33, 39, 48}, 489.0 / 500.0, 22.0 / 5.0},
      {{0.5, 0.25, 0.75}, {0.5, 0.5, 0.5}, 0.0, 1.0 / 24.0},
      {{1, 0, 0, 0}, {0.25, 0.25, 0.25, 0.25}, 0.0, 3.0 / 16.0},
      {{3, -3, 3, -3}, {2, -2, 2, -2}, 8.0 / 9.0, 1.0},
      {{1, 2, 3, 4, 5, 6}, {2, 1, 4, 3, 6, 5}, 23.0 / 35.0, 1.0},
      {{0.1, 0.2, 0.4, 0.8}, {0.1, 0.2, 0.4, 0.8}, 1.0, 0.0},
      {{100, 101}, {101, 100}, -3.0, 1.0},
      {{1, 3}, {2, 2.5}, 3.0 / 8.0, 5.0 / 8.0},
      {{0, 1, 0, 1, 0, 1}, {0.5, 0.5, 0.5, 0.5, 0.5, 1}, 1.0 / 6.0, 5.0 / 24.0},
      {{2, 4, 6, 8}, {0, 0, 0, 0}, -5.0, 30.0},
  };
  return cases;
}

}  // namespace fixtures
