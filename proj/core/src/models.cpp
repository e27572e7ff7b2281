#include "physioemo/models.hpp"

#include <array>
#include <cmath>

#include "model_registry.hpp"
#include "physioemo/knn.hpp"
#include "physioemo/linear_models.hpp"
#include "physioemo/network.hpp"
#include "physioemo/tree.hpp"

namespace physioemo {

namespace {

constexpr std::array<std::string_view, 9> kTags = {
    "Linear", "Ridge", "BayesianRidge", "KNN", "DecisionTree", "RandomForest",
    "GradientBoosting", "MLP", "DNN"};

constexpr std::array<std::string_view, 9> kDisplay = {
    "Linear Regression", "Ridge Regression",  "Bayesian Ridge Regression",
    "K-Nearest Neighbors (KNN)", "Decision Tree", "Random Forest",
    "Gradient Boosting", "Multi Layer Perceptron", "Dense Network"};

constexpr std::string_view kFormatHeader = "physioemo-model 1";

std::string repeat_width(std::size_t width, std::size_t layers) {
  std::string out;
  for (std::size_t i = 0; i < layers; ++i) {
    if (i) out += ",";
    out += std::to_string(width);
  }
  return out;
}

std::map<std::string, std::string> default_params(ModelFamily f) {
  switch (f) {
    case ModelFamily::Linear:
      return {};
    case ModelFamily::Ridge:
      return {{"lambda", "1"}, {"max_iter", "1000"}, {"tol", "0.0001"}, {"solver", "svd"}};
    case ModelFamily::BayesianRidge:
      return {{"max_iter", "1000"}, {"tol", "0.001"},     {"alpha_1", "1e-06"},
              {"alpha_2", "1e-06"}, {"lambda_1", "1e-06"}, {"lambda_2", "1e-06"}};
    case ModelFamily::KNN:
      return {{"n_neighbors", "3"}, {"weights", "uniform"}, {"metric", "minkowski"}, {"p", "2"}};
    case ModelFamily::DecisionTree:
      return {{"criterion", "squared_error"}, {"max_depth", "0"}, {"min_samples_split", "2"}};
    case ModelFamily::RandomForest:
      return {{"n_estimators", "100"}, {"criterion", "squared_error"}, {"max_depth", "0"},
              {"min_samples_split", "2"}, {"bootstrap", "true"}};
    case ModelFamily::GradientBoosting:
      return {{"n_estimators", "100"},     {"learning_rate", "0.1"},
              {"loss", "squared_error"},   {"criterion", "friedman_mse"},
              {"max_depth", "3"},          {"min_samples_split", "2"}};
    case ModelFamily::MLP:
      return {{"hidden_layers", "10"},       {"hidden", repeat_width(32, 10)},
              {"loss", "mse"},               {"output_activation", "relu"},
              {"optimizer", "adam"},         {"learning_rate", "0.001"},
              {"max_iter", "500"}};
    case ModelFamily::DNN:
      return {{"hidden_layers", "3"},   {"hidden", "64,32,16"},  {"loss", "mse"},
              {"output_activation", "relu"}, {"optimizer", "adam"}, {"epochs", "50"},
              {"learning_rate", "0.0001"}};
  }
  return {};
}

void require_value(const ModelConfig& c, const std::string& key,
                   std::initializer_list<std::string_view> allowed) {
  const auto& v = c.get_string(key);
  for (auto a : allowed)
    if (v == a) return;
  throw Error(ErrorKind::InvalidConfig, std::string(family_tag(c.family())) + ": " + key + "=" +
                                            v + " is not supported",
              key);
}

TreeParams tree_params(const ModelConfig& c) {
  TreeParams p;
  const auto crit = parse_criterion(c.get_string("criterion"));
  if (!crit)
    throw Error(ErrorKind::InvalidConfig,
                "criterion must be squared_error or friedman_mse", "criterion");
  p.criterion = *crit;
  p.max_depth = c.get_size("max_depth");
  p.min_samples_split = std::max<std::size_t>(2, c.get_size("min_samples_split"));
  return p;
}

NetworkTrainParams network_params(const ModelConfig& c, const char* iteration_key) {
  require_value(c, "loss", {"mse", "squared_error"});
  require_value(c, "output_activation", {"relu"});
  require_value(c, "optimizer", {"adam"});
  NetworkTrainParams p;
  p.hidden = c.get_sizes("hidden");
  if (p.hidden.size() != c.get_size("hidden_layers"))
    throw Error(ErrorKind::InvalidConfig, "hidden lists " + std::to_string(p.hidden.size()) +
                                              " widths but hidden_layers=" +
                                              c.get_string("hidden_layers"),
                "hidden");
  p.learning_rate = c.get_double("learning_rate");
  p.epochs = c.get_size(iteration_key);
  p.seed = c.seed();
  return p;
}

/// Parses every parameter of the family; used both by set() and fit().
void validate(const ModelConfig& c) {
  switch (c.family()) {
    case ModelFamily::Linear:
      break;
    case ModelFamily::Ridge:
      require_value(c, "solver", {"svd"});
      if (!(c.get_double("lambda") >= 0.0))
        throw Error(ErrorKind::InvalidConfig, "Ridge lambda must be >= 0", "lambda");
      (void)c.get_size("max_iter");
      (void)c.get_double("tol");
      break;
    case ModelFamily::BayesianRidge:
      (void)c.get_size("max_iter");
      for (const char* k : {"tol", "alpha_1", "alpha_2", "lambda_1", "lambda_2"})
        (void)c.get_double(k);
      break;
    case ModelFamily::KNN:
      require_value(c, "weights", {"uniform"});
      require_value(c, "metric", {"minkowski"});
      if (c.get_size("n_neighbors") == 0)
        throw Error(ErrorKind::InvalidConfig, "n_neighbors must be >= 1", "n_neighbors");
      if (!(c.get_double("p") >= 1.0))
        throw Error(ErrorKind::InvalidConfig, "Minkowski p must be >= 1", "p");
      break;
    case ModelFamily::DecisionTree:
      (void)tree_params(c);
      break;
    case ModelFamily::RandomForest:
      (void)tree_params(c);
      require_value(c, "bootstrap", {"true"});
      (void)c.get_size("n_estimators");
      break;
    case ModelFamily::GradientBoosting:
      (void)tree_params(c);
      require_value(c, "loss", {"squared_error"});
      (void)c.get_size("n_estimators");
      (void)c.get_double("learning_rate");
      break;
    case ModelFamily::MLP:
      (void)network_params(c, "max_iter");
      break;
    case ModelFamily::DNN:
      (void)network_params(c, "epochs");
      break;
  }
}

}  // namespace

std::string_view family_tag(ModelFamily f) noexcept { return kTags[static_cast<std::size_t>(f)]; }

std::string_view family_display_name(ModelFamily f) noexcept {
  return kDisplay[static_cast<std::size_t>(f)];
}

std::optional<ModelFamily> parse_family(std::string_view tag) noexcept {
  for (std::size_t i = 0; i < kTags.size(); ++i)
    if (kTags[i] == tag) return static_cast<ModelFamily>(i);
  return std::nullopt;
}

const std::vector<ModelFamily>& all_families() {
  static const std::vector<ModelFamily> order = {
      ModelFamily::RandomForest, ModelFamily::DNN,   ModelFamily::DecisionTree,
      ModelFamily::KNN,          ModelFamily::GradientBoosting, ModelFamily::MLP,
      ModelFamily::Ridge,        ModelFamily::BayesianRidge,    ModelFamily::Linear};
  return order;
}

std::string family_list() {
  std::string out;
  for (auto t : kTags) {
    if (!out.empty()) out += ", ";
    out += t;
  }
  return out;
}

ModelConfig ModelConfig::defaults(ModelFamily family, std::uint64_t seed) {
  ModelConfig c(family, seed);
  c.params_ = default_params(family);
  return c;
}

ModelConfig& ModelConfig::set(const std::string& key, const std::string& value) {
  auto it = params_.find(key);
  if (it == params_.end())
    throw Error(ErrorKind::InvalidConfig,
                std::string(family_tag(family_)) + " has no parameter '" + key + "'", key);
  if (value.empty() || value.find_first_of(" \t\n") != std::string::npos)
    throw Error(ErrorKind::InvalidConfig, "parameter '" + key + "' needs a single-token value",
                key);
  ModelConfig next = *this;
  next.params_[key] = value;
  if (key == "hidden") {
    next.params_["hidden_layers"] = std::to_string(next.get_sizes("hidden").size());
  } else if (key == "hidden_layers") {
    // Keep a uniform width when only the depth changes.
    const auto widths = get_sizes("hidden");
    const auto layers = next.get_size("hidden_layers");
    if (layers == 0) throw Error(ErrorKind::InvalidConfig, "hidden_layers must be >= 1", key);
    if (!widths.empty() &&
        std::all_of(widths.begin(), widths.end(), [&](auto w) { return w == widths[0]; }))
      next.params_["hidden"] = repeat_width(widths[0], layers);
  }
  validate(next);
  *this = std::move(next);
  return *this;
}

const std::string& ModelConfig::get_string(const std::string& key) const {
  const auto it = params_.find(key);
  if (it == params_.end())
    throw Error(ErrorKind::InvalidConfig,
                std::string(family_tag(family_)) + " has no parameter '" + key + "'", key);
  return it->second;
}

double ModelConfig::get_double(const std::string& key) const {
  const auto v = text::parse_double(get_string(key));
  if (!v || !std::isfinite(*v))
    throw Error(ErrorKind::InvalidConfig, "parameter '" + key + "' is not a number", key);
  return *v;
}

std::size_t ModelConfig::get_size(const std::string& key) const {
  const double v = get_double(key);
  if (v < 0 || v != std::floor(v))
    throw Error(ErrorKind::InvalidConfig, "parameter '" + key + "' must be a whole number", key);
  return static_cast<std::size_t>(v);
}

std::vector<std::size_t> ModelConfig::get_sizes(const std::string& key) const {
  std::vector<std::size_t> out;
  for (auto part : text::split(get_string(key), ',')) {
    const auto v = text::parse_double(part);
    if (!v || *v < 1 || *v != std::floor(*v))
      throw Error(ErrorKind::InvalidConfig, "parameter '" + key + "' must list positive widths",
                  key);
    out.push_back(static_cast<std::size_t>(*v));
  }
  return out;
}

Eigen::VectorXd TrainedModel::predict(const Eigen::MatrixXd& x) const {
  if (x.cols() != input_dim_)
    throw Error(ErrorKind::DimensionMismatch, "model expects " + std::to_string(input_dim_) +
                                                  " columns, got " + std::to_string(x.cols()));
  return predict_rows(x);
}

void TrainedModel::set_metadata(std::map<std::string, std::string> params, Eigen::Index input_dim,
                                TrainingInfo info) {
  params_ = std::move(params);
  input_dim_ = input_dim;
  info_ = std::move(info);
}

std::string TrainedModel::serialize() const {
  std::string out(kFormatHeader);
  out += "\n";
  detail::StateWriter w(out);
  w.word("family", family_tag(family()));
  w.count("params", params_.size());
  for (const auto& [k, v] : params_) out += k + " " + v + "\n";
  w.count("input_dim", static_cast<std::size_t>(input_dim_));
  w.count("seed", info_.seed);
  w.count("iterations", info_.iterations);
  w.scalar("final_loss", info_.final_loss);
  out += "state\n";
  write_state(out);
  out += "end\n";
  return out;
}

std::unique_ptr<TrainedModel> deserialize_model(std::string_view contents) {
  detail::StateReader in(contents);
  in.expect("physioemo-model");
  if (in.token() != "1") detail::StateReader::fail("unsupported format version");
  const auto tag = in.word("family");
  const auto family = parse_family(tag);
  if (!family) detail::StateReader::fail("unknown family '" + tag + "'");
  std::map<std::string, std::string> params;
  const auto n_params = in.count("params");
  for (std::size_t i = 0; i < n_params; ++i) {
    std::string k(in.token());
    params[k] = std::string(in.token());
  }
  const auto input_dim = in.count("input_dim");
  TrainingInfo info;
  info.seed = in.count("seed");
  info.iterations = in.count("iterations");
  info.final_loss = in.scalar("final_loss");
  in.expect("state");
  std::unique_ptr<TrainedModel> model;
  switch (*family) {
    case ModelFamily::Linear:
    case ModelFamily::Ridge:
    case ModelFamily::BayesianRidge:
      model = detail::read_linear(*family, in);
      break;
    case ModelFamily::KNN:
      model = detail::read_knn(in);
      break;
    case ModelFamily::DecisionTree:
    case ModelFamily::RandomForest:
    case ModelFamily::GradientBoosting:
      model = detail::read_tree_model(*family, in);
      break;
    case ModelFamily::MLP:
    case ModelFamily::DNN:
      model = detail::read_network(*family, in);
      break;
  }
  in.expect("end");
  model->set_metadata(std::move(params), static_cast<Eigen::Index>(input_dim), std::move(info));
  return model;
}

std::unique_ptr<TrainedModel> fit(const ModelConfig& config, const Eigen::MatrixXd& x,
                                  const Eigen::VectorXd& y) {
  if (x.rows() == 0) throw Error(ErrorKind::EmptyMatrix, "no training rows");
  if (x.rows() != y.size())
    throw Error(ErrorKind::DimensionMismatch, "X has " + std::to_string(x.rows()) +
                                                  " rows but y has " + std::to_string(y.size()));
  if (!x.allFinite() || !y.allFinite())
    throw Error(ErrorKind::MalformedRow, "training data contains NaN or infinite values");
  validate(config);

  std::unique_ptr<TrainedModel> model;
  switch (config.family()) {
    case ModelFamily::Linear:
      model = fit_linear(x, y);
      break;
    case ModelFamily::Ridge:
      model = fit_ridge(x, y, config.get_double("lambda"));
      break;
    case ModelFamily::BayesianRidge: {
      BayesianRidgeParams p;
      p.max_iter = config.get_size("max_iter");
      p.tol = config.get_double("tol");
      p.alpha_1 = config.get_double("alpha_1");
      p.alpha_2 = config.get_double("alpha_2");
      p.lambda_1 = config.get_double("lambda_1");
      p.lambda_2 = config.get_double("lambda_2");
      model = fit_bayesian_ridge(x, y, p);
      break;
    }
    case ModelFamily::KNN:
      model = std::make_unique<KnnModel>(x, y, config.get_size("n_neighbors"),
                                         config.get_double("p"));
      break;
    case ModelFamily::DecisionTree:
      model = fit_decision_tree(x, y, tree_params(config));
      break;
    case ModelFamily::RandomForest: {
      ForestParams p;
      p.n_estimators = config.get_size("n_estimators");
      p.tree = tree_params(config);
      p.seed = config.seed();
      model = fit_random_forest(x, y, p);
      break;
    }
    case ModelFamily::GradientBoosting: {
      BoostingParams p;
      p.n_estimators = config.get_size("n_estimators");
      p.learning_rate = config.get_double("learning_rate");
      p.tree = tree_params(config);
      model = fit_gradient_boosting(x, y, p);
      break;
    }
    case ModelFamily::MLP:
      model = fit_network(ModelFamily::MLP, x, y, network_params(config, "max_iter"));
      break;
    case ModelFamily::DNN:
      model = fit_network(ModelFamily::DNN, x, y, network_params(config, "epochs"));
      break;
  }

  TrainingInfo info = model->info();
  info.seed = config.seed();
  if (info.loss_curve.empty()) {
    model->set_metadata(config.params(), x.cols(), info);
    info.final_loss = (model->predict(x) - y).squaredNorm() / static_cast<double>(y.size());
  }
  model->set_metadata(config.params(), x.cols(), std::move(info));
  return model;
}

std::unique_ptr<TrainedModel> fit(const ModelConfig& config, const FeatureMatrix& x,
                                  const Eigen::VectorXd& y) {
  return fit(config, x.values(), y);
}

}  // namespace physioemo
