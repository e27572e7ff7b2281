#include "physioemo/knn.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <utility>

#include "model_registry.hpp"

namespace physioemo {

KnnModel::KnnModel(Eigen::MatrixXd train_x, Eigen::VectorXd train_y, std::size_t k, double p)
    : x_(std::move(train_x)), y_(std::move(train_y)), k_(k), p_(p) {
  if (k_ == 0) throw Error(ErrorKind::InvalidConfig, "KNN needs k >= 1");
  if (!(p_ >= 1.0)) throw Error(ErrorKind::InvalidConfig, "Minkowski p must be >= 1");
  if (x_.rows() == 0) throw Error(ErrorKind::EmptyMatrix, "KNN needs training rows");
  if (x_.rows() != y_.size()) throw Error(ErrorKind::DimensionMismatch, "X/y row mismatch");
  set_metadata({}, x_.cols(), {});
}

std::vector<std::size_t> KnnModel::neighbours(
    const Eigen::Ref<const Eigen::RowVectorXd>& query) const {
  const auto n = static_cast<std::size_t>(x_.rows());
  const auto d = x_.cols();
  const std::size_t k = std::min(k_, n);
  // Max-heap of the k best (distance, index) pairs seen so far. For p = 2 the
  // squared distance ranks identically and skips the root.
  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry> best;
  const bool euclid = p_ == 2.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = x_.data() + static_cast<Eigen::Index>(i) * d;
    double dist = 0.0;
    if (euclid) {
      for (Eigen::Index j = 0; j < d; ++j) {
        const double diff = query[j] - row[j];
        dist += diff * diff;
      }
    } else {
      for (Eigen::Index j = 0; j < d; ++j) dist += std::pow(std::abs(query[j] - row[j]), p_);
    }
    const Entry e{dist, i};
    if (best.size() < k) {
      best.push(e);
    } else if (e < best.top()) {
      best.pop();
      best.push(e);
    }
  }
  std::vector<std::size_t> out(best.size());
  for (std::size_t r = out.size(); r-- > 0;) {
    out[r] = best.top().second;
    best.pop();
  }
  return out;
}

Eigen::VectorXd KnnModel::predict_rows(const Eigen::MatrixXd& x) const {
  Eigen::VectorXd out(x.rows());
  std::vector<double> targets;
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    targets.clear();
    for (auto i : neighbours(x.row(r))) targets.push_back(y_[static_cast<Eigen::Index>(i)]);
    out[r] = detail::bounded_mean(targets);
  }
  return out;
}

void KnnModel::write_state(std::string& out) const {
  detail::StateWriter w(out);
  w.count("k", k_);
  w.scalar("p", p_);
  w.matrix("train_x", x_);
  w.vector("train_y", y_);
}

std::unique_ptr<TrainedModel> detail::read_knn(StateReader& in) {
  const auto k = in.count("k");
  const double p = in.scalar("p");
  auto x = in.matrix("train_x");
  auto y = in.vector("train_y");
  return std::make_unique<KnnModel>(std::move(x), std::move(y), k, p);
}

}  // namespace physioemo
