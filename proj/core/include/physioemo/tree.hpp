#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "physioemo/models.hpp"

namespace physioemo {

enum class SplitCriterion { SquaredError, FriedmanMse };

std::string_view criterion_name(SplitCriterion c) noexcept;
std::optional<SplitCriterion> parse_criterion(std::string_view name) noexcept;

struct SplitCandidate {
  std::size_t feature = 0;
  double threshold = 0.0;  ///< rows with x[feature] <= threshold go left
  double gain = 0.0;       ///< >= 0
};

/// Gains within this relative distance of the best are treated as equal, and
/// the earlier (feature, threshold) wins.
inline constexpr double kSplitTieTolerance = 1e-10;

/// Best binary split of `rows` over all features and midpoints between
/// adjacent distinct sorted values.
///
/// squared_error scores parent SSE - (left SSE + right SSE); friedman_mse
/// scores n_L n_R / (n_L + n_R) * (mean_L - mean_R)^2. Returns nullopt when all
/// targets are equal or no feature has two distinct values.
std::optional<SplitCandidate> cart_best_split(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                              std::span<const std::size_t> rows,
                                              SplitCriterion criterion);
std::optional<SplitCandidate> cart_best_split(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                              SplitCriterion criterion);

struct TreeParams {
  SplitCriterion criterion = SplitCriterion::SquaredError;
  std::size_t max_depth = 0;  ///< 0 = grow until pure
  std::size_t min_samples_split = 2;
};

/// Greedy CART regression tree stored as a flat node array.
class RegressionTree {
 public:
  struct Node {
    // Leaves have left == right == 0.
    std::size_t feature = 0;
    double threshold = 0.0;
    std::size_t left = 0;
    std::size_t right = 0;
    double value = 0.0;
    bool is_leaf() const noexcept { return left == 0; }
  };

  RegressionTree() = default;

  /// Grows a tree on the given rows (duplicates allowed, as in a bootstrap).
  static RegressionTree grow(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                             std::vector<std::size_t> rows, const TreeParams& params);

  double predict_row(const Eigen::Ref<const Eigen::RowVectorXd, 0, Eigen::InnerStride<>>& row) const;
  Eigen::VectorXd predict(const Eigen::MatrixXd& x) const;

  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  std::size_t depth() const;
  std::size_t leaf_count() const;

  explicit RegressionTree(std::vector<Node> nodes) : nodes_(std::move(nodes)) {}

 private:
  std::vector<Node> nodes_;
};

class DecisionTreeModel final : public TrainedModel {
 public:
  explicit DecisionTreeModel(RegressionTree tree) : tree_(std::move(tree)) {}
  ModelFamily family() const noexcept override { return ModelFamily::DecisionTree; }
  const RegressionTree& tree() const noexcept { return tree_; }

 protected:
  Eigen::VectorXd predict_rows(const Eigen::MatrixXd& x) const override;
  void write_state(std::string& out) const override;

 private:
  RegressionTree tree_;
};

/// Bagged CART trees; prediction is the mean of the tree outputs.
class RandomForestModel final : public TrainedModel {
 public:
  explicit RandomForestModel(std::vector<RegressionTree> trees) : trees_(std::move(trees)) {}
  ModelFamily family() const noexcept override { return ModelFamily::RandomForest; }
  const std::vector<RegressionTree>& trees() const noexcept { return trees_; }

 protected:
  Eigen::VectorXd predict_rows(const Eigen::MatrixXd& x) const override;
  void write_state(std::string& out) const override;

 private:
  std::vector<RegressionTree> trees_;
};

/// Stage-wise least-squares boosting: base (training mean) plus
/// learning_rate times the sum of the stage trees.
class GradientBoostingModel final : public TrainedModel {
 public:
  GradientBoostingModel(double base, double learning_rate, std::vector<RegressionTree> stages)
      : base_(base), learning_rate_(learning_rate), stages_(std::move(stages)) {}
  ModelFamily family() const noexcept override { return ModelFamily::GradientBoosting; }
  double base() const noexcept { return base_; }
  double learning_rate() const noexcept { return learning_rate_; }
  const std::vector<RegressionTree>& stages() const noexcept { return stages_; }

  /// Predictions after the first `stage_count` stages.
  Eigen::VectorXd staged_predict(const Eigen::MatrixXd& x, std::size_t stage_count) const;

 protected:
  Eigen::VectorXd predict_rows(const Eigen::MatrixXd& x) const override;
  void write_state(std::string& out) const override;

 private:
  double base_;
  double learning_rate_;
  std::vector<RegressionTree> stages_;
};

std::unique_ptr<DecisionTreeModel> fit_decision_tree(const Eigen::MatrixXd& x,
                                                     const Eigen::VectorXd& y,
                                                     const TreeParams& params);

struct ForestParams {
  std::size_t n_estimators = 100;
  TreeParams tree;
  std::uint64_t seed = 0;
};

std::unique_ptr<RandomForestModel> fit_random_forest(const Eigen::MatrixXd& x,
                                                     const Eigen::VectorXd& y,
                                                     const ForestParams& params);

struct BoostingParams {
  std::size_t n_estimators = 100;
  double learning_rate = 0.1;
  TreeParams tree{SplitCriterion::FriedmanMse, 3, 2};
};

/// Records the training MSE before the first stage and after every stage in
/// info().loss_curve.
std::unique_ptr<GradientBoostingModel> fit_gradient_boosting(const Eigen::MatrixXd& x,
                                                             const Eigen::VectorXd& y,
                                                             const BoostingParams& params);

}  // namespace physioemo
