#include "physioemo/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "model_registry.hpp"
#include "physioemo/rng.hpp"

namespace physioemo {

namespace {

double midpoint(double a, double b) {
  const double mid = (a + b) / 2.0;
  // Adjacent doubles can round the midpoint up to b, which would send b left.
  return mid < b ? mid : a;
}

void write_tree(detail::StateWriter& w, std::string& out, const RegressionTree& tree) {
  w.count("tree", tree.nodes().size());
  for (const auto& n : tree.nodes()) {
    out.append(std::to_string(n.feature)).append(" ")
        .append(text::format_double(n.threshold)).append(" ")
        .append(std::to_string(n.left)).append(" ")
        .append(std::to_string(n.right)).append(" ")
        .append(text::format_double(n.value)).append("\n");
  }
}

RegressionTree read_tree(detail::StateReader& in) {
  const auto count = in.count("tree");
  std::vector<RegressionTree::Node> nodes(count);
  for (auto& n : nodes) {
    n.feature = in.count();
    n.threshold = in.number();
    n.left = in.count();
    n.right = in.count();
    n.value = in.number();
    if (n.left >= count || n.right >= count) detail::StateReader::fail("bad tree child index");
  }
  if (nodes.empty()) detail::StateReader::fail("empty tree");
  return RegressionTree(std::move(nodes));
}

double mse_of(const Eigen::VectorXd& y, const Eigen::VectorXd& f) {
  return (y - f).squaredNorm() / static_cast<double>(y.size());
}

}  // namespace

std::string_view criterion_name(SplitCriterion c) noexcept {
  return c == SplitCriterion::SquaredError ? "squared_error" : "friedman_mse";
}

std::optional<SplitCriterion> parse_criterion(std::string_view name) noexcept {
  if (name == "squared_error") return SplitCriterion::SquaredError;
  if (name == "friedman_mse") return SplitCriterion::FriedmanMse;
  return std::nullopt;
}

std::optional<SplitCandidate> cart_best_split(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                              std::span<const std::size_t> rows,
                                              SplitCriterion criterion) {
  const std::size_t n = rows.size();
  if (n < 2) return std::nullopt;
  const auto yr = [&](std::size_t r) { return y[static_cast<Eigen::Index>(r)]; };

  const double first = yr(rows[0]);
  if (std::all_of(rows.begin(), rows.end(), [&](std::size_t r) { return yr(r) == first; }))
    return std::nullopt;

  // Targets are shifted by the parent mean before accumulating sums of squares.
  double shift = 0.0;
  for (auto r : rows) shift += yr(r);
  shift /= static_cast<double>(n);
  double total = 0.0, total_sq = 0.0;
  for (auto r : rows) {
    const double v = yr(r) - shift;
    total += v;
    total_sq += v * v;
  }
  const double dn = static_cast<double>(n);
  const double parent_sse = total_sq - total * total / dn;
  const double tie = kSplitTieTolerance * std::max(parent_sse, 1e-300);

  std::optional<SplitCandidate> best;
  std::vector<std::pair<double, std::size_t>> order(n);
  for (Eigen::Index f = 0; f < x.cols(); ++f) {
    for (std::size_t i = 0; i < n; ++i)
      order[i] = {x(static_cast<Eigen::Index>(rows[i]), f), rows[i]};
    std::sort(order.begin(), order.end());
    double left = 0.0, left_sq = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double v = yr(order[i].second) - shift;
      left += v;
      left_sq += v * v;
      const double a = order[i].first, b = order[i + 1].first;
      if (!(a < b)) continue;
      const double nl = static_cast<double>(i + 1), nr = dn - nl;
      const double right = total - left;
      double gain;
      if (criterion == SplitCriterion::SquaredError) {
        const double sse_l = left_sq - left * left / nl;
        const double sse_r = (total_sq - left_sq) - right * right / nr;
        gain = std::max(0.0, parent_sse - sse_l - sse_r);
      } else {
        const double diff = left / nl - right / nr;
        gain = nl * nr / dn * diff * diff;
      }
      if (!best || gain > best->gain + tie)
        best = SplitCandidate{static_cast<std::size_t>(f), midpoint(a, b), gain};
    }
  }
  return best;
}

std::optional<SplitCandidate> cart_best_split(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                              SplitCriterion criterion) {
  std::vector<std::size_t> rows(static_cast<std::size_t>(x.rows()));
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return cart_best_split(x, y, rows, criterion);
}

RegressionTree RegressionTree::grow(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                    std::vector<std::size_t> rows, const TreeParams& params) {
  if (rows.empty()) throw Error(ErrorKind::EmptyMatrix, "cannot grow a tree on zero rows");
  struct Pending {
    std::size_t node, begin, end, depth;
  };
  std::vector<Node> nodes(1);
  std::vector<Pending> stack{{0, 0, rows.size(), 0}};
  std::vector<double> leaf_targets;
  while (!stack.empty()) {
    const auto job = stack.back();
    stack.pop_back();
    const std::span<const std::size_t> span(rows.data() + job.begin, job.end - job.begin);

    leaf_targets.clear();
    for (auto r : span) leaf_targets.push_back(y[static_cast<Eigen::Index>(r)]);
    nodes[job.node].value = detail::bounded_mean(leaf_targets);

    if (span.size() < params.min_samples_split) continue;
    if (params.max_depth != 0 && job.depth >= params.max_depth) continue;
    const auto split = cart_best_split(x, y, span, params.criterion);
    if (!split) continue;

    const auto f = static_cast<Eigen::Index>(split->feature);
    const auto mid_it = std::stable_partition(
        rows.begin() + static_cast<std::ptrdiff_t>(job.begin),
        rows.begin() + static_cast<std::ptrdiff_t>(job.end),
        [&](std::size_t r) { return x(static_cast<Eigen::Index>(r), f) <= split->threshold; });
    const auto mid = static_cast<std::size_t>(mid_it - rows.begin());
    if (mid == job.begin || mid == job.end) continue;

    const std::size_t left = nodes.size();
    nodes.emplace_back();
    nodes.emplace_back();
    nodes[job.node].feature = split->feature;
    nodes[job.node].threshold = split->threshold;
    nodes[job.node].left = left;
    nodes[job.node].right = left + 1;
    stack.push_back({left + 1, mid, job.end, job.depth + 1});
    stack.push_back({left, job.begin, mid, job.depth + 1});
  }
  return RegressionTree(std::move(nodes));
}

double RegressionTree::predict_row(const Eigen::Ref<const Eigen::RowVectorXd, 0, Eigen::InnerStride<>>& row) const {
  std::size_t i = 0;
  while (!nodes_[i].is_leaf())
    i = row[static_cast<Eigen::Index>(nodes_[i].feature)] <= nodes_[i].threshold ? nodes_[i].left
                                                                                 : nodes_[i].right;
  return nodes_[i].value;
}

Eigen::VectorXd RegressionTree::predict(const Eigen::MatrixXd& x) const {
  Eigen::VectorXd out(x.rows());
  for (Eigen::Index r = 0; r < x.rows(); ++r) out[r] = predict_row(x.row(r));
  return out;
}

std::size_t RegressionTree::depth() const {
  std::vector<std::size_t> d(nodes_.size(), 0);
  std::size_t deepest = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    deepest = std::max(deepest, d[i]);
    if (!nodes_[i].is_leaf()) d[nodes_[i].left] = d[nodes_[i].right] = d[i] + 1;
  }
  return deepest;
}

std::size_t RegressionTree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.is_leaf(); }));
}

Eigen::VectorXd DecisionTreeModel::predict_rows(const Eigen::MatrixXd& x) const {
  return tree_.predict(x);
}

void DecisionTreeModel::write_state(std::string& out) const {
  detail::StateWriter w(out);
  write_tree(w, out, tree_);
}

Eigen::VectorXd RandomForestModel::predict_rows(const Eigen::MatrixXd& x) const {
  Eigen::VectorXd out(x.rows());
  std::vector<double> votes(trees_.size());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    for (std::size_t t = 0; t < trees_.size(); ++t) votes[t] = trees_[t].predict_row(x.row(r));
    out[r] = detail::bounded_mean(votes);
  }
  return out;
}

void RandomForestModel::write_state(std::string& out) const {
  detail::StateWriter w(out);
  w.count("trees", trees_.size());
  for (const auto& t : trees_) write_tree(w, out, t);
}

Eigen::VectorXd GradientBoostingModel::staged_predict(const Eigen::MatrixXd& x,
                                                      std::size_t stage_count) const {
  Eigen::VectorXd f = Eigen::VectorXd::Constant(x.rows(), base_);
  const std::size_t m = std::min(stage_count, stages_.size());
  for (std::size_t s = 0; s < m; ++s) f += learning_rate_ * stages_[s].predict(x);
  return f;
}

Eigen::VectorXd GradientBoostingModel::predict_rows(const Eigen::MatrixXd& x) const {
  return staged_predict(x, stages_.size());
}

void GradientBoostingModel::write_state(std::string& out) const {
  detail::StateWriter w(out);
  w.scalar("base", base_);
  w.scalar("learning_rate", learning_rate_);
  w.count("stages", stages_.size());
  for (const auto& t : stages_) write_tree(w, out, t);
}

std::unique_ptr<TrainedModel> detail::read_tree_model(ModelFamily family, StateReader& in) {
  switch (family) {
    case ModelFamily::DecisionTree:
      return std::make_unique<DecisionTreeModel>(read_tree(in));
    case ModelFamily::RandomForest: {
      std::vector<RegressionTree> trees(in.count("trees"));
      for (auto& t : trees) t = read_tree(in);
      return std::make_unique<RandomForestModel>(std::move(trees));
    }
    case ModelFamily::GradientBoosting: {
      const double base = in.scalar("base");
      const double lr = in.scalar("learning_rate");
      std::vector<RegressionTree> stages(in.count("stages"));
      for (auto& t : stages) t = read_tree(in);
      return std::make_unique<GradientBoostingModel>(base, lr, std::move(stages));
    }
    default:
      StateReader::fail("not a tree family");
  }
}

namespace {

void check_xy(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  if (x.rows() == 0) throw Error(ErrorKind::EmptyMatrix, "no training rows");
  if (x.rows() != y.size()) throw Error(ErrorKind::DimensionMismatch, "X/y row mismatch");
}

std::vector<std::size_t> all_rows(Eigen::Index n) {
  std::vector<std::size_t> rows(static_cast<std::size_t>(n));
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return rows;
}

}  // namespace

std::unique_ptr<DecisionTreeModel> fit_decision_tree(const Eigen::MatrixXd& x,
                                                     const Eigen::VectorXd& y,
                                                     const TreeParams& params) {
  check_xy(x, y);
  auto model =
      std::make_unique<DecisionTreeModel>(RegressionTree::grow(x, y, all_rows(x.rows()), params));
  model->set_metadata({}, x.cols(), {});
  return model;
}

std::unique_ptr<RandomForestModel> fit_random_forest(const Eigen::MatrixXd& x,
                                                     const Eigen::VectorXd& y,
                                                     const ForestParams& params) {
  check_xy(x, y);
  if (params.n_estimators == 0) throw Error(ErrorKind::InvalidConfig, "n_estimators must be >= 1");
  const auto n = static_cast<std::uint64_t>(x.rows());
  std::vector<RegressionTree> trees;
  trees.reserve(params.n_estimators);
  std::vector<std::size_t> rows(static_cast<std::size_t>(n));
  for (std::size_t t = 0; t < params.n_estimators; ++t) {
    Rng rng(derive_seed(params.seed, "bootstrap:" + std::to_string(t)));
    for (auto& r : rows) r = static_cast<std::size_t>(rng.below(n));
    std::sort(rows.begin(), rows.end());
    trees.push_back(RegressionTree::grow(x, y, rows, params.tree));
  }
  auto model = std::make_unique<RandomForestModel>(std::move(trees));
  model->set_metadata({}, x.cols(), {});
  return model;
}

std::unique_ptr<GradientBoostingModel> fit_gradient_boosting(const Eigen::MatrixXd& x,
                                                             const Eigen::VectorXd& y,
                                                             const BoostingParams& params) {
  check_xy(x, y);
  if (!(params.learning_rate > 0.0))
    throw Error(ErrorKind::InvalidConfig, "learning_rate must be positive");
  const double base = y.sum() / static_cast<double>(y.size());
  Eigen::VectorXd f = Eigen::VectorXd::Constant(y.size(), base);
  TrainingInfo info;
  info.loss_curve.push_back(mse_of(y, f));
  std::vector<RegressionTree> stages;
  stages.reserve(params.n_estimators);
  const auto rows = all_rows(x.rows());
  for (std::size_t s = 0; s < params.n_estimators; ++s) {
    const Eigen::VectorXd residual = y - f;
    stages.push_back(RegressionTree::grow(x, residual, rows, params.tree));
    f += params.learning_rate * stages.back().predict(x);
    info.loss_curve.push_back(mse_of(y, f));
  }
  auto model = std::make_unique<GradientBoostingModel>(base, params.learning_rate, std::move(stages));
  info.iterations = params.n_estimators;
  info.final_loss = info.loss_curve.back();
  model->set_metadata({}, x.cols(), std::move(info));
  return model;
}

}  // namespace physioemo
