#include <doctest.h>

#include "../support/oracles.hpp"
#include "physioemo/error.hpp"
#include "physioemo/network.hpp"
#include "physioemo/rng.hpp"

using namespace physioemo;

namespace {

double loss_at(DenseNetwork net, const Eigen::VectorXd& p, const Eigen::MatrixXd& x,
               const Eigen::VectorXd& y) {
  net.parameters() = p;
  return (net.forward(x) - y).squaredNorm() / static_cast<double>(y.size());
}

// ReLU on/off pattern over all units and rows.
std::vector<bool> activation_pattern(const DenseNetwork& net, const Eigen::MatrixXd& x) {
  std::vector<bool> out;
  Eigen::MatrixXd a = x.transpose();
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    Eigen::MatrixXd z = net.weights(l) * a;
    z.colwise() += net.bias(l);
    for (Eigen::Index i = 0; i < z.size(); ++i) out.push_back(z.data()[i] > 0.0);
    a = z.cwiseMax(0.0);
  }
  return out;
}

DenseNetwork random_network(std::size_t inputs, const std::vector<std::size_t>& hidden,
                            oracle::Lcg& rng) {
  std::vector<std::size_t> sizes{inputs};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(1);
  DenseNetwork net(sizes);
  for (Eigen::Index i = 0; i < net.parameters().size(); ++i)
    net.parameters()[i] = rng.uniform(-0.8, 0.8);
  // Keep the output unit alive for most rows.
  net.bias(net.layer_count() - 1).setConstant(1.0);
  return net;
}

void check_gradients(const std::vector<std::size_t>& hidden, std::uint64_t seed, int trials) {
  oracle::Lcg rng(seed);
  int checked = 0;
  for (int trial = 0; trial < trials; ++trial) {
    const auto net = random_network(3, hidden, rng);
    REQUIRE(net.parameter_count() <= 200);
    const auto x = oracle::random_matrix(rng, 6, 3);
    Eigen::VectorXd y(6);
    for (Eigen::Index i = 0; i < 6; ++i) y[i] = rng.uniform(0, 2);
    // Within one activation pattern the loss is quadratic in each single
    // parameter, so central differences are exact up to rounding; a
    // parameter whose +-h step flips a unit is skipped.
    const double h = 1e-3;
    const auto base = activation_pattern(net, x);
    const auto g = network_gradients(net, x, y);
    const auto fd = oracle::finite_difference(
        [&](const Eigen::VectorXd& p) { return loss_at(net, p, x, y); }, net.parameters(), h);
    for (Eigen::Index i = 0; i < fd.size(); ++i) {
      bool flips = false;
      for (double step : {h, -h}) {
        DenseNetwork moved = net;
        moved.parameters()[i] += step;
        flips = flips || activation_pattern(moved, x) != base;
      }
      if (flips) continue;
      const double a = g.gradient[i], n = fd[i];
      CHECK(std::abs(a - n) / std::max({std::abs(a), std::abs(n), 1e-7}) <= 1e-4);
      ++checked;
    }
    CHECK(g.loss == doctest::Approx(loss_at(net, net.parameters(), x, y)).epsilon(1e-14));
  }
  CHECK(checked >= trials * 10);
}

}  // namespace

TEST_SUITE("network") {
  TEST_CASE("single neuron gradient by hand") {
    DenseNetwork net({1, 1});
    net.weights(0)(0, 0) = 2.0;
    net.bias(0)[0] = 1.0;
    Eigen::MatrixXd x(1, 1);
    x << 3.0;
    Eigen::VectorXd y(1);
    y << 4.0;
    // yhat = 7, dL/dyhat = 2 (7 - 4) = 6
    const auto g = network_gradients(net, x, y);
    CHECK(g.loss == 9.0);
    CHECK(g.gradient[0] == 18.0);
    CHECK(g.gradient[1] == 6.0);
  }

  TEST_CASE("backprop matches finite differences: deep narrow network") {
    check_gradients({3, 3, 3, 3, 3, 3, 3, 3, 3, 3}, 1, 60);
  }

  TEST_CASE("backprop matches finite differences: three hidden layers") {
    check_gradients({8, 6, 4}, 2, 30);
  }

  TEST_CASE("dead ReLU passes no gradient") {
    DenseNetwork net({1, 1});
    net.weights(0)(0, 0) = -1.0;
    Eigen::MatrixXd x(2, 1);
    x << 1.0, 2.0;
    const auto g = network_gradients(net, x, Eigen::VectorXd::Ones(2));
    CHECK(g.gradient.isZero(0.0));
    CHECK(g.loss == 1.0);
  }

  TEST_CASE("zero weights output the clamped bias and never go negative") {
    DenseNetwork net({4, 5, 1});
    oracle::Lcg rng(3);
    const auto x = oracle::random_matrix(rng, 10, 4);
    CHECK(net.forward(x).isZero(0.0));
    net.bias(1)[0] = -2.0;
    CHECK(net.forward(x).isZero(0.0));
    auto r = random_network(4, {5}, rng);
    r.bias(1)[0] = -0.5;
    CHECK((r.forward(oracle::random_matrix(rng, 50, 4)).array() >= 0.0).all());
  }

  TEST_CASE("Adam: zero gradient leaves parameters unchanged") {
    Eigen::VectorXd p = Eigen::VectorXd::LinSpaced(4, -1, 1);
    const Eigen::VectorXd before = p;
    AdamState s(4);
    adam_update(p, Eigen::VectorXd::Zero(4), s, 0.1);
    CHECK(p == before);
    CHECK(s.t == 1);
  }

  TEST_CASE("Adam: first step moves each parameter by about lr against its gradient") {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(3);
    Eigen::VectorXd g(3);
    g << 5.0, -0.01, 1e3;
    AdamState s(3);
    adam_update(p, g, s, 0.01);
    CHECK(p[0] == doctest::Approx(-0.01).epsilon(1e-6));
    CHECK(p[1] == doctest::Approx(0.01).epsilon(1e-4));
    CHECK(p[2] == doctest::Approx(-0.01).epsilon(1e-6));
  }

  TEST_CASE("Adam: constant gradient gives constant step size") {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(1);
    AdamState s(1);
    for (int i = 0; i < 100; ++i) adam_update(p, Eigen::VectorXd::Constant(1, 2.0), s, 0.001);
    CHECK(p[0] == doctest::Approx(-0.1).epsilon(1e-6));
  }

  TEST_CASE("Adam rejects non-finite gradients and shape mismatches") {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(2);
    AdamState s(2);
    CHECK_THROWS_AS(adam_update(p, Eigen::VectorXd::Constant(2, NAN), s, 0.1), Error);
    CHECK_THROWS_AS(adam_update(p, Eigen::VectorXd::Zero(3), s, 0.1), Error);
  }

  TEST_CASE("training lowers the loss from the mean prediction") {
    oracle::Lcg rng(4);
    const auto x = oracle::random_matrix(rng, 200, 3);
    Eigen::VectorXd y(200);
    for (Eigen::Index i = 0; i < 200; ++i) y[i] = std::max(0.0, x(i, 0) + 0.5 * x(i, 1));
    NetworkTrainParams p;
    p.hidden = {16, 8};
    p.epochs = 300;
    p.learning_rate = 0.01;
    p.seed = 5;
    const auto model = fit_network(ModelFamily::DNN, x, y, p);
    const double mean = y.mean();
    const double base = (y.array() - mean).square().mean();
    CHECK(model->info().loss_curve.front() == doctest::Approx(base).epsilon(1e-9));
    CHECK(model->info().final_loss < 0.2 * base);
    CHECK((model->predict(x).array() >= 0.0).all());
  }

  TEST_CASE("mini-batch path is deterministic in the seed") {
    oracle::Lcg rng(6);
    const auto x = oracle::random_matrix(rng, 50, 2);
    const Eigen::VectorXd y = x.col(0).cwiseAbs();
    NetworkTrainParams p;
    p.hidden = {4};
    p.epochs = 5;
    p.full_batch_limit = 10;
    p.batch_size = 16;
    p.seed = 9;
    CHECK(fit_network(ModelFamily::MLP, x, y, p)->serialize() ==
          fit_network(ModelFamily::MLP, x, y, p)->serialize());
  }
}
