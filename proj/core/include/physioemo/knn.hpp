#pragma once

#include <Eigen/Core>

#include "physioemo/models.hpp"

namespace physioemo {

/// k-nearest-neighbour regressor with uniform weights under the Minkowski
/// distance. Neighbours are ranked by (distance, training index), so ties
/// resolve to the earlier training row.
class KnnModel final : public TrainedModel {
 public:
  KnnModel(Eigen::MatrixXd train_x, Eigen::VectorXd train_y, std::size_t k, double p);

  ModelFamily family() const noexcept override { return ModelFamily::KNN; }
  std::size_t k() const noexcept { return k_; }
  double p() const noexcept { return p_; }

  /// Training indices of the neighbours of `query`, nearest first.
  std::vector<std::size_t> neighbours(const Eigen::Ref<const Eigen::RowVectorXd>& query) const;

 protected:
  Eigen::VectorXd predict_rows(const Eigen::MatrixXd& x) const override;
  void write_state(std::string& out) const override;

 private:
  // Row-major copy so each training row is contiguous.
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> x_;
  Eigen::VectorXd y_;
  std::size_t k_;
  double p_;
};

}  // namespace physioemo
