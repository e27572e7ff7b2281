#include "physioemo/network.hpp"

#include <cmath>
#include <numeric>

#include "model_registry.hpp"
#include "physioemo/rng.hpp"

namespace physioemo {

DenseNetwork::DenseNetwork(std::vector<std::size_t> layer_sizes) : sizes_(std::move(layer_sizes)) {
  if (sizes_.size() < 2) throw Error(ErrorKind::InvalidConfig, "network needs >= 2 layers");
  for (auto s : sizes_)
    if (s == 0) throw Error(ErrorKind::InvalidConfig, "layer width must be positive");
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    offsets_.push_back(total);
    total += sizes_[l + 1] * sizes_[l] + sizes_[l + 1];
  }
  params_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(total));
}

DenseNetwork DenseNetwork::initialized(std::size_t inputs, const std::vector<std::size_t>& hidden,
                                       Rng& rng, double output_bias) {
  std::vector<std::size_t> sizes{inputs};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(1);
  DenseNetwork net(std::move(sizes));
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    const bool output = l + 1 == net.layer_count();
    if (output) {
      net.bias(l).setConstant(output_bias);
      continue;
    }
    const double limit = std::sqrt(6.0 / static_cast<double>(net.sizes_[l]));
    auto w = net.weights(l);
    for (Eigen::Index c = 0; c < w.cols(); ++c)
      for (Eigen::Index r = 0; r < w.rows(); ++r) w(r, c) = limit * (2.0 * rng.uniform() - 1.0);
    net.bias(l).setZero();
  }
  return net;
}

Eigen::Map<const Eigen::MatrixXd> DenseNetwork::weights(std::size_t l) const {
  return {params_.data() + offsets_[l], static_cast<Eigen::Index>(sizes_[l + 1]),
          static_cast<Eigen::Index>(sizes_[l])};
}

Eigen::Map<const Eigen::VectorXd> DenseNetwork::bias(std::size_t l) const {
  return {params_.data() + offsets_[l] + sizes_[l + 1] * sizes_[l],
          static_cast<Eigen::Index>(sizes_[l + 1])};
}

Eigen::Map<Eigen::MatrixXd> DenseNetwork::weights(std::size_t l) {
  return {params_.data() + offsets_[l], static_cast<Eigen::Index>(sizes_[l + 1]),
          static_cast<Eigen::Index>(sizes_[l])};
}

Eigen::Map<Eigen::VectorXd> DenseNetwork::bias(std::size_t l) {
  return {params_.data() + offsets_[l] + sizes_[l + 1] * sizes_[l],
          static_cast<Eigen::Index>(sizes_[l + 1])};
}

Eigen::VectorXd DenseNetwork::forward(const Eigen::MatrixXd& x) const {
  if (static_cast<std::size_t>(x.cols()) != sizes_.front())
    throw Error(ErrorKind::DimensionMismatch, "network input width mismatch");
  Eigen::MatrixXd a = x.transpose();
  for (std::size_t l = 0; l < layer_count(); ++l) {
    Eigen::MatrixXd z = weights(l) * a;
    z.colwise() += bias(l);
    a = z.cwiseMax(0.0);
  }
  return a.row(0).transpose();
}

NetworkGradients network_gradients(const DenseNetwork& net, const Eigen::MatrixXd& x,
                                   const Eigen::VectorXd& y) {
  if (x.rows() == 0) throw Error(ErrorKind::EmptyMatrix, "empty batch");
  if (x.rows() != y.size()) throw Error(ErrorKind::DimensionMismatch, "X/y row mismatch");
  if (static_cast<std::size_t>(x.cols()) != net.layer_sizes().front())
    throw Error(ErrorKind::DimensionMismatch, "network input width mismatch");
  const std::size_t layers = net.layer_count();
  const double n = static_cast<double>(x.rows());

  // activations[l] is the input to layer l; pre[l] its pre-activation output.
  std::vector<Eigen::MatrixXd> activations(layers + 1), pre(layers);
  activations[0] = x.transpose();
  for (std::size_t l = 0; l < layers; ++l) {
    pre[l] = net.weights(l) * activations[l];
    pre[l].colwise() += net.bias(l);
    activations[l + 1] = pre[l].cwiseMax(0.0);
  }

  const Eigen::RowVectorXd residual = activations[layers].row(0) - y.transpose();
  NetworkGradients out;
  out.loss = residual.squaredNorm() / n;
  if (!std::isfinite(out.loss)) throw Error(ErrorKind::NonFiniteLoss, "network loss is not finite");
  out.gradient = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(net.parameter_count()));

  Eigen::MatrixXd upstream = (2.0 / n) * residual;  // dL/dA for the output layer
  std::size_t offset = out.gradient.size();
  for (std::size_t l = layers; l-- > 0;) {
    const Eigen::MatrixXd delta =
        upstream.cwiseProduct((pre[l].array() > 0.0).cast<double>().matrix());
    const auto rows = static_cast<Eigen::Index>(net.layer_sizes()[l + 1]);
    const auto cols = static_cast<Eigen::Index>(net.layer_sizes()[l]);
    offset -= static_cast<std::size_t>(rows * cols + rows);
    Eigen::Map<Eigen::MatrixXd>(out.gradient.data() + offset, rows, cols) =
        delta * activations[l].transpose();
    Eigen::Map<Eigen::VectorXd>(out.gradient.data() + offset + rows * cols, rows) =
        delta.rowwise().sum();
    if (l > 0) upstream = net.weights(l).transpose() * delta;
  }
  return out;
}

void adam_update(Eigen::VectorXd& params, const Eigen::VectorXd& grads, AdamState& state,
                 double learning_rate) {
  if (params.size() != grads.size() || state.m.size() != params.size() ||
      state.v.size() != params.size())
    throw Error(ErrorKind::DimensionMismatch, "Adam shapes differ");
  if (!grads.allFinite()) throw Error(ErrorKind::NonFiniteGradient, "gradient is not finite");
  ++state.t;
  const double t = static_cast<double>(state.t);
  state.m = AdamState::kBeta1 * state.m + (1.0 - AdamState::kBeta1) * grads;
  state.v = AdamState::kBeta2 * state.v + (1.0 - AdamState::kBeta2) * grads.cwiseAbs2();
  const double c1 = 1.0 - std::pow(AdamState::kBeta1, t);
  const double c2 = 1.0 - std::pow(AdamState::kBeta2, t);
  params.array() -= learning_rate * (state.m.array() / c1) /
                    ((state.v.array() / c2).sqrt() + AdamState::kEpsilon);
}

Eigen::VectorXd NetworkModel::predict_rows(const Eigen::MatrixXd& x) const {
  return net_.forward(x);
}

void NetworkModel::write_state(std::string& out) const {
  detail::StateWriter w(out);
  Eigen::VectorXd sizes(static_cast<Eigen::Index>(net_.layer_sizes().size()));
  for (std::size_t i = 0; i < net_.layer_sizes().size(); ++i)
    sizes[static_cast<Eigen::Index>(i)] = static_cast<double>(net_.layer_sizes()[i]);
  w.vector("layers", sizes);
  w.vector("params", net_.parameters());
}

std::unique_ptr<TrainedModel> detail::read_network(ModelFamily family, StateReader& in) {
  const auto sizes_v = in.vector("layers");
  std::vector<std::size_t> sizes;
  for (Eigen::Index i = 0; i < sizes_v.size(); ++i)
    sizes.push_back(static_cast<std::size_t>(sizes_v[i]));
  DenseNetwork net(std::move(sizes));
  auto params = in.vector("params");
  if (params.size() != net.parameters().size()) StateReader::fail("parameter count mismatch");
  net.parameters() = std::move(params);
  return std::make_unique<NetworkModel>(family, std::move(net));
}

std::unique_ptr<NetworkModel> fit_network(ModelFamily family, const Eigen::MatrixXd& x,
                                          const Eigen::VectorXd& y,
                                          const NetworkTrainParams& params) {
  if (x.rows() == 0) throw Error(ErrorKind::EmptyMatrix, "no training rows");
  if (x.rows() != y.size()) throw Error(ErrorKind::DimensionMismatch, "X/y row mismatch");
  if (!(params.learning_rate > 0.0))
    throw Error(ErrorKind::InvalidConfig, "learning_rate must be positive");
  Rng rng(params.seed);
  // Zero output weights plus a positive bias: training starts from the mean
  // prediction with the final ReLU active.
  const double mean_y = y.sum() / static_cast<double>(y.size());
  auto net = DenseNetwork::initialized(static_cast<std::size_t>(x.cols()), params.hidden, rng,
                                       std::max(mean_y, 1e-2));
  AdamState adam(net.parameter_count());
  TrainingInfo info;

  const auto n = static_cast<std::size_t>(x.rows());
  const bool full_batch = n <= params.full_batch_limit;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Eigen::MatrixXd bx;
  Eigen::VectorXd by;

  for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
    if (full_batch) {
      const auto g = network_gradients(net, x, y);
      adam_update(net.parameters(), g.gradient, adam, params.learning_rate);
      info.loss_curve.push_back(g.loss);
      continue;
    }
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    double weighted = 0.0;
    for (std::size_t start = 0; start < n; start += params.batch_size) {
      const std::size_t len = std::min(params.batch_size, n - start);
      bx.resize(static_cast<Eigen::Index>(len), x.cols());
      by.resize(static_cast<Eigen::Index>(len));
      for (std::size_t k = 0; k < len; ++k) {
        bx.row(static_cast<Eigen::Index>(k)) = x.row(static_cast<Eigen::Index>(order[start + k]));
        by[static_cast<Eigen::Index>(k)] = y[static_cast<Eigen::Index>(order[start + k])];
      }
      const auto g = network_gradients(net, bx, by);
      adam_update(net.parameters(), g.gradient, adam, params.learning_rate);
      weighted += g.loss * static_cast<double>(len);
    }
    info.loss_curve.push_back(weighted / static_cast<double>(n));
  }

  auto model = std::make_unique<NetworkModel>(family, std::move(net));
  const double final_loss =
      (model->network().forward(x) - y).squaredNorm() / static_cast<double>(n);
  if (!std::isfinite(final_loss))
    throw Error(ErrorKind::NonFiniteLoss, "network diverged during training");
  info.iterations = params.epochs;
  info.final_loss = final_loss;
  model->set_metadata({}, x.cols(), std::move(info));
  return model;
}

}  // namespace physioemo
