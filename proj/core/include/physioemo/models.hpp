#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "physioemo/preprocess.hpp"

namespace physioemo {

enum class ModelFamily {
  Linear,
  Ridge,
  BayesianRidge,
  KNN,
  DecisionTree,
  RandomForest,
  GradientBoosting,
  MLP,
  DNN,
};

/// Config/serialization tag, e.g. "RandomForest".
std::string_view family_tag(ModelFamily f) noexcept;
/// Report name, e.g. "Random Forest".
std::string_view family_display_name(ModelFamily f) noexcept;
std::optional<ModelFamily> parse_family(std::string_view tag) noexcept;
/// All nine families in report order.
const std::vector<ModelFamily>& all_families();
/// "Linear, Ridge, ..." for usage messages.
std::string family_list();

/// Declarative model family plus hyperparameters.
///
/// `defaults()` fills every key the family understands; `set()` rejects keys
/// the family does not know. Values are stored as text and parsed on use.
class ModelConfig {
 public:
  static ModelConfig defaults(ModelFamily family, std::uint64_t seed = 0);

  ModelFamily family() const noexcept { return family_; }
  std::uint64_t seed() const noexcept { return seed_; }
  void set_seed(std::uint64_t seed) noexcept { seed_ = seed; }
  const std::map<std::string, std::string>& params() const noexcept { return params_; }

  /// Throws InvalidConfig for unknown keys or unparsable values.
  ModelConfig& set(const std::string& key, const std::string& value);

  double get_double(const std::string& key) const;
  std::size_t get_size(const std::string& key) const;
  const std::string& get_string(const std::string& key) const;
  std::vector<std::size_t> get_sizes(const std::string& key) const;

 private:
  ModelConfig(ModelFamily family, std::uint64_t seed) : family_(family), seed_(seed) {}

  ModelFamily family_;
  std::uint64_t seed_;
  std::map<std::string, std::string> params_;
};

struct TrainingInfo {
  std::uint64_t seed = 0;
  std::size_t iterations = 0;
  double final_loss = 0.0;  ///< training MSE at the end of fit
  /// Per-iteration training loss where the family is iterative (boosting
  /// stages, network epochs, evidence updates). Not serialized.
  std::vector<double> loss_curve;
};

/// Fitted state of one regressor. Immutable after fit; predict is const and
/// safe to call concurrently.
class TrainedModel {
 public:
  virtual ~TrainedModel() = default;

  virtual ModelFamily family() const noexcept = 0;
  /// Throws DimensionMismatch if the column count differs from training.
  Eigen::VectorXd predict(const Eigen::MatrixXd& x) const;
  Eigen::VectorXd predict(const FeatureMatrix& x) const { return predict(x.values()); }

  Eigen::Index input_dim() const noexcept { return input_dim_; }
  const TrainingInfo& info() const noexcept { return info_; }
  const std::map<std::string, std::string>& params() const noexcept { return params_; }

  /// Versioned text form: family tag, hyperparameters, metadata, state.
  std::string serialize() const;

  void set_metadata(std::map<std::string, std::string> params, Eigen::Index input_dim,
                    TrainingInfo info);

 protected:
  virtual Eigen::VectorXd predict_rows(const Eigen::MatrixXd& x) const = 0;
  virtual void write_state(std::string& out) const = 0;

 private:
  std::map<std::string, std::string> params_;
  Eigen::Index input_dim_ = 0;
  TrainingInfo info_;
};

/// Fits one single-output regressor. Throws DimensionMismatch, SingularSystem,
/// NonFiniteLoss, InvalidConfig.
std::unique_ptr<TrainedModel> fit(const ModelConfig& config, const Eigen::MatrixXd& x,
                                  const Eigen::VectorXd& y);
std::unique_ptr<TrainedModel> fit(const ModelConfig& config, const FeatureMatrix& x,
                                  const Eigen::VectorXd& y);

/// Inverse of TrainedModel::serialize().
std::unique_ptr<TrainedModel> deserialize_model(std::string_view text);

}  // namespace physioemo
