#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "physioemo/models.hpp"

namespace physioemo {

class Rng;

/// Fully connected ReLU network with a single ReLU output unit.
///
/// All weights and biases live in one flat vector, layer by layer: W_l stored
/// column-major (out x in) followed by b_l. Gradients use the same layout, so
/// the optimizer works on flat vectors.
class DenseNetwork {
 public:
  /// layer_sizes = {inputs, hidden..., 1}.
  explicit DenseNetwork(std::vector<std::size_t> layer_sizes);

  /// He-uniform hidden weights, zero hidden biases, zero output weights and
  /// the given output bias.
  static DenseNetwork initialized(std::size_t inputs, const std::vector<std::size_t>& hidden,
                                  Rng& rng, double output_bias);

  const std::vector<std::size_t>& layer_sizes() const noexcept { return sizes_; }
  std::size_t layer_count() const noexcept { return sizes_.size() - 1; }
  std::size_t parameter_count() const noexcept { return static_cast<std::size_t>(params_.size()); }

  Eigen::VectorXd& parameters() noexcept { return params_; }
  const Eigen::VectorXd& parameters() const noexcept { return params_; }

  Eigen::Map<const Eigen::MatrixXd> weights(std::size_t layer) const;
  Eigen::Map<const Eigen::VectorXd> bias(std::size_t layer) const;
  Eigen::Map<Eigen::MatrixXd> weights(std::size_t layer);
  Eigen::Map<Eigen::VectorXd> bias(std::size_t layer);

  /// Outputs for each row of x (n x inputs).
  Eigen::VectorXd forward(const Eigen::MatrixXd& x) const;

 private:
  std::vector<std::size_t> sizes_;
  std::vector<std::size_t> offsets_;  ///< start of W_l in params_
  Eigen::VectorXd params_;
};

struct NetworkGradients {
  Eigen::VectorXd gradient;  ///< same layout as DenseNetwork::parameters()
  double loss = 0.0;         ///< mean((yhat - y)^2)
};

/// Backpropagated gradient of the MSE loss over the batch. Throws
/// NonFiniteLoss.
NetworkGradients network_gradients(const DenseNetwork& net, const Eigen::MatrixXd& x,
                                   const Eigen::VectorXd& y);

struct AdamState {
  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEpsilon = 1e-8;

  Eigen::VectorXd m;
  Eigen::VectorXd v;
  std::uint64_t t = 0;  ///< steps taken so far

  explicit AdamState(std::size_t size = 0)
      : m(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(size))),
        v(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(size))) {}
};

/// One bias-corrected Adam step in place. Throws DimensionMismatch and
/// NonFiniteGradient.
void adam_update(Eigen::VectorXd& params, const Eigen::VectorXd& grads, AdamState& state,
                 double learning_rate);

struct NetworkTrainParams {
  std::vector<std::size_t> hidden;
  double learning_rate = 1e-3;
  std::size_t epochs = 500;
  std::size_t full_batch_limit = 4096;  ///< larger sets use shuffled mini-batches
  std::size_t batch_size = 1024;
  std::uint64_t seed = 0;
};

class NetworkModel final : public TrainedModel {
 public:
  NetworkModel(ModelFamily family, DenseNetwork net) : family_(family), net_(std::move(net)) {}
  ModelFamily family() const noexcept override { return family_; }
  const DenseNetwork& network() const noexcept { return net_; }

 protected:
  Eigen::VectorXd predict_rows(const Eigen::MatrixXd& x) const override;
  void write_state(std::string& out) const override;

 private:
  ModelFamily family_;
  DenseNetwork net_;
};

/// Minimizes MSE with Adam. loss_curve holds the mean batch loss per epoch.
std::unique_ptr<NetworkModel> fit_network(ModelFamily family, const Eigen::MatrixXd& x,
                                          const Eigen::VectorXd& y,
                                          const NetworkTrainParams& params);

}  // namespace physioemo
