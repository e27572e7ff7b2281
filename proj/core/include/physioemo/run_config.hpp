#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "physioemo/dataset.hpp"
#include "physioemo/models.hpp"

namespace physioemo {

/// Experiment definition read from a key=value file:
///
///   data = datasets/nonlinear
///   out = results/nonlinear
///   seed = 7
///   models = all               # or a comma list of family tags
///   targets = Neutral,Positive,Negative
///   window = 60
///   rate = 4
///   jobs = 4
///   RandomForest.n_estimators = 50
struct RunConfig {
  std::string data_root;
  std::string output_dir;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  PipelineOptions pipeline;
  std::vector<ModelConfig> models;

  /// Throws InvalidConfig when the invariants (window >= 1, models nonempty,
  /// distinct paths) fail.
  void validate() const;
};

/// Throws InvalidConfig for unknown keys, unknown model families and bad
/// values; MalformedRow for lines without '='.
RunConfig parse_run_config(std::string_view contents);

/// Parses "all" or a comma list of family tags.
std::vector<ModelFamily> parse_family_list(std::string_view list);
std::vector<Emotion> parse_emotion_list(std::string_view list);

}  // namespace physioemo
