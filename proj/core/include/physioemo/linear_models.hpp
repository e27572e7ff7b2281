#pragma once

#include <Eigen/Core>

#include "physioemo/models.hpp"

namespace physioemo {

/// Affine predictor y = x . coef + intercept shared by the three linear
/// families. The intercept is always fitted and never penalized.
class LinearModel final : public TrainedModel {
 public:
  LinearModel(ModelFamily family, Eigen::VectorXd coef, double intercept)
      : family_(family), coef_(std::move(coef)), intercept_(intercept) {}

  ModelFamily family() const noexcept override { return family_; }
  const Eigen::VectorXd& coef() const noexcept { return coef_; }
  double intercept() const noexcept { return intercept_; }

  /// BayesianRidge only: posterior std of each coefficient.
  const Eigen::VectorXd& posterior_std() const noexcept { return posterior_std_; }
  /// BayesianRidge only: estimated noise precision and weight precision.
  double noise_precision() const noexcept { return noise_precision_; }
  double weight_precision() const noexcept { return weight_precision_; }
  void set_posterior(Eigen::VectorXd stddev, double noise_precision, double weight_precision);

 protected:
  Eigen::VectorXd predict_rows(const Eigen::MatrixXd& x) const override;
  void write_state(std::string& out) const override;

 private:
  ModelFamily family_;
  Eigen::VectorXd coef_;
  double intercept_;
  Eigen::VectorXd posterior_std_;
  double noise_precision_ = 0.0;
  double weight_precision_ = 0.0;
};

/// Ordinary least squares. Throws SingularSystem for exactly collinear
/// features; an all-constant column is left out and gets coefficient 0.
std::unique_ptr<LinearModel> fit_linear(const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

/// Ridge via SVD of the centered design: coef = V diag(s / (s^2 + penalty)) U^T y.
std::unique_ptr<LinearModel> fit_ridge(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                       double penalty);

struct BayesianRidgeParams {
  std::size_t max_iter = 1000;
  double tol = 1e-3;
  double alpha_1 = 1e-6;
  double alpha_2 = 1e-6;
  double lambda_1 = 1e-6;
  double lambda_2 = 1e-6;
};

/// Evidence maximization over noise precision alpha and weight precision lambda,
/// iterated until the L1 change of the coefficients falls below tol.
std::unique_ptr<LinearModel> fit_bayesian_ridge(const Eigen::MatrixXd& x,
                                                const Eigen::VectorXd& y,
                                                const BayesianRidgeParams& params);

}  // namespace physioemo
