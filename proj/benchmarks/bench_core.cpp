#include <benchmark/benchmark.h>

#include "physioemo/knn.hpp"
#include "physioemo/network.hpp"
#include "physioemo/preprocess.hpp"
#include "physioemo/rng.hpp"
#include "physioemo/tree.hpp"

using namespace physioemo;

namespace {

struct Data {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
};

Data make_data(Eigen::Index n, Eigen::Index d, std::uint64_t seed) {
  Rng rng(seed);
  Data out{Eigen::MatrixXd(n, d), Eigen::VectorXd(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) out.x(i, j) = rng.normal();
    out.y[i] = out.x(i, 0) * out.x(i, 1) + 0.1 * rng.normal();
  }
  return out;
}

void BM_MovingAverage(benchmark::State& state) {
  Rng rng(1);
  std::vector<double> v(static_cast<std::size_t>(state.range(0)));
  for (auto& x : v) x = rng.normal();
  for (auto _ : state) benchmark::DoNotOptimize(moving_average(v, kDefaultSmoothingWindow));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MovingAverage)->Arg(4800)->Arg(19200);

void BM_CartBestSplit(benchmark::State& state) {
  const auto d = make_data(state.range(0), 8, 2);
  for (auto _ : state)
    benchmark::DoNotOptimize(cart_best_split(d.x, d.y, SplitCriterion::SquaredError));
}
BENCHMARK(BM_CartBestSplit)->Arg(1000)->Arg(10000);

void BM_DecisionTreeFit(benchmark::State& state) {
  const auto d = make_data(state.range(0), 8, 3);
  for (auto _ : state) benchmark::DoNotOptimize(fit_decision_tree(d.x, d.y, TreeParams{}));
}
BENCHMARK(BM_DecisionTreeFit)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);

void BM_RandomForestFit(benchmark::State& state) {
  const auto d = make_data(state.range(0), 8, 4);
  ForestParams p;
  p.n_estimators = 10;
  for (auto _ : state) benchmark::DoNotOptimize(fit_random_forest(d.x, d.y, p));
}
BENCHMARK(BM_RandomForestFit)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_KnnPredict(benchmark::State& state) {
  const auto d = make_data(state.range(0), 8, 5);
  const KnnModel model(d.x, d.y, 3, 2.0);
  const auto q = make_data(100, 8, 6);
  for (auto _ : state) benchmark::DoNotOptimize(model.predict(q.x));
  state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_KnnPredict)->Arg(5000)->Arg(20000);

void BM_NetworkGradients(benchmark::State& state) {
  const auto d = make_data(state.range(0), 8, 7);
  Rng rng(8);
  const auto net = DenseNetwork::initialized(8, {64, 32, 16}, rng, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(network_gradients(net, d.x, d.y));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_NetworkGradients)->Arg(1024)->Arg(4096);

}  // namespace

BENCHMARK_MAIN();
