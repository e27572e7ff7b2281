#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <stdexcept>

namespace oracle {

namespace {

long double mean_of(const Eigen::VectorXd& y, const std::vector<std::size_t>& rows) {
  long double s = 0;
  for (auto r : rows) s += y[static_cast<Eigen::Index>(r)];
  return s / static_cast<long double>(rows.size());
}

long double sse_of(const Eigen::VectorXd& y, const std::vector<std::size_t>& rows) {
  if (rows.empty()) return 0;
  const long double m = mean_of(y, rows);
  long double s = 0;
  for (auto r : rows) {
    const long double d = y[static_cast<Eigen::Index>(r)] - m;
    s += d * d;
  }
  return s;
}

// Leaf value: mean in ascending row order, kept inside [min, max].
double leaf_mean(const Eigen::VectorXd& y, std::vector<std::size_t> rows) {
  std::sort(rows.begin(), rows.end());
  double s = 0.0, lo = INFINITY, hi = -INFINITY;
  for (auto r : rows) {
    const double v = y[static_cast<Eigen::Index>(r)];
    s += v;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return std::clamp(s / static_cast<double>(rows.size()), lo, hi);
}

struct Node {
  bool leaf = true;
  std::size_t feature = 0;
  double threshold = 0.0;
  double value = 0.0;
  std::unique_ptr<Node> left, right;
};

std::unique_ptr<Node> grow(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                           const std::vector<std::size_t>& rows, bool friedman,
                           std::size_t depth, std::size_t max_depth) {
  auto node = std::make_unique<Node>();
  node->value = leaf_mean(y, rows);
  if (rows.size() < 2 || (max_depth && depth >= max_depth)) return node;
  const auto split = best_split(x, y, rows, friedman);
  if (!split) return node;
  std::vector<std::size_t> l, r;
  for (auto i : rows)
    (x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(split->feature)) <= split->threshold
         ? l
         : r)
        .push_back(i);
  node->leaf = false;
  node->feature = split->feature;
  node->threshold = split->threshold;
  node->left = grow(x, y, l, friedman, depth + 1, max_depth);
  node->right = grow(x, y, r, friedman, depth + 1, max_depth);
  return node;
}

}  // namespace

std::optional<Split> best_split(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                const std::vector<std::size_t>& rows, bool friedman) {
  if (rows.size() < 2) return std::nullopt;
  const double y0 = y[static_cast<Eigen::Index>(rows[0])];
  if (std::all_of(rows.begin(), rows.end(),
                  [&](auto r) { return y[static_cast<Eigen::Index>(r)] == y0; }))
    return std::nullopt;
  const long double parent = sse_of(y, rows);
  // Gains this close are ties; the first candidate in (feature, threshold)
  // order wins.
  const long double tol = 1e-10L * std::max(parent, 1e-300L);
  std::optional<Split> best;
  long double best_gain = 0;
  for (Eigen::Index f = 0; f < x.cols(); ++f) {
    std::vector<double> values;
    for (auto r : rows) values.push_back(x(static_cast<Eigen::Index>(r), f));
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
      double t = (values[i] + values[i + 1]) / 2.0;
      if (!(t < values[i + 1])) t = values[i];
      std::vector<std::size_t> l, r;
      for (auto row : rows) (x(static_cast<Eigen::Index>(row), f) <= t ? l : r).push_back(row);
      long double gain;
      if (friedman) {
        const long double d = mean_of(y, l) - mean_of(y, r);
        gain = static_cast<long double>(l.size()) * r.size() / rows.size() * d * d;
      } else {
        gain = std::max<long double>(0, parent - sse_of(y, l) - sse_of(y, r));
      }
      if (!best || gain > best_gain + tol) {
        best = Split{static_cast<std::size_t>(f), t, static_cast<double>(gain)};
        best_gain = gain;
      }
    }
  }
  return best;
}

Eigen::VectorXd cart_predict(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                             const Eigen::MatrixXd& q, bool friedman, std::size_t max_depth) {
  std::vector<std::size_t> rows(static_cast<std::size_t>(x.rows()));
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  const auto root = grow(x, y, rows, friedman, 0, max_depth);
  Eigen::VectorXd out(q.rows());
  for (Eigen::Index i = 0; i < q.rows(); ++i) {
    const Node* n = root.get();
    while (!n->leaf)
      n = q(i, static_cast<Eigen::Index>(n->feature)) <= n->threshold ? n->left.get()
                                                                      : n->right.get();
    out[i] = n->value;
  }
  return out;
}

std::vector<std::size_t> knn_indices(const Eigen::MatrixXd& x, const Eigen::RowVectorXd& query,
                                     std::size_t k) {
  std::vector<std::pair<double, std::size_t>> d;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < x.cols(); ++j) s += (x(i, j) - query[j]) * (x(i, j) - query[j]);
    d.emplace_back(s, static_cast<std::size_t>(i));
  }
  std::sort(d.begin(), d.end());
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < std::min(k, d.size()); ++i) out.push_back(d[i].second);
  return out;
}

double knn_predict(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                   const Eigen::RowVectorXd& query, std::size_t k) {
  const auto idx = knn_indices(x, query, k);
  double s = 0.0, lo = INFINITY, hi = -INFINITY;
  for (auto i : idx) {
    const double v = y[static_cast<Eigen::Index>(i)];
    s += v;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return std::clamp(s / static_cast<double>(idx.size()), lo, hi);
}

Eigen::VectorXd normal_equations(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                 double ridge) {
  const auto n = static_cast<std::size_t>(x.rows());
  const auto d = static_cast<std::size_t>(x.cols());
  // Centering gives an unpenalized intercept.
  std::vector<long double> xm(d, 0), a(d * (d + 1), 0);
  long double ym = 0;
  for (std::size_t i = 0; i < n; ++i) {
    ym += y[static_cast<Eigen::Index>(i)];
    for (std::size_t j = 0; j < d; ++j) xm[j] += x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  ym /= n;
  for (auto& v : xm) v /= n;
  for (std::size_t i = 0; i < n; ++i) {
    const long double yc = y[static_cast<Eigen::Index>(i)] - ym;
    for (std::size_t j = 0; j < d; ++j) {
      const long double xj = x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) - xm[j];
      for (std::size_t k = 0; k < d; ++k)
        a[j * (d + 1) + k] += xj * (x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) - xm[k]);
      a[j * (d + 1) + d] += xj * yc;
    }
  }
  for (std::size_t j = 0; j < d; ++j) a[j * (d + 1) + j] += ridge;
  for (std::size_t c = 0; c < d; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < d; ++r)
      if (std::fabs(a[r * (d + 1) + c]) > std::fabs(a[piv * (d + 1) + c])) piv = r;
    if (a[piv * (d + 1) + c] == 0) throw std::runtime_error("singular normal equations");
    for (std::size_t k = 0; k <= d; ++k) std::swap(a[c * (d + 1) + k], a[piv * (d + 1) + k]);
    for (std::size_t r = 0; r < d; ++r) {
      if (r == c) continue;
      const long double f = a[r * (d + 1) + c] / a[c * (d + 1) + c];
      for (std::size_t k = c; k <= d; ++k) a[r * (d + 1) + k] -= f * a[c * (d + 1) + k];
    }
  }
  Eigen::VectorXd out(static_cast<Eigen::Index>(d + 1));
  long double intercept = ym;
  for (std::size_t j = 0; j < d; ++j) {
    const long double w = a[j * (d + 1) + d] / a[j * (d + 1) + j];
    out[static_cast<Eigen::Index>(j)] = static_cast<double>(w);
    intercept -= w * xm[j];
  }
  out[static_cast<Eigen::Index>(d)] = static_cast<double>(intercept);
  return out;
}

Eigen::VectorXd finite_difference(const std::function<double(const Eigen::VectorXd&)>& f,
                                  const Eigen::VectorXd& p, double h) {
  Eigen::VectorXd g(p.size());
  Eigen::VectorXd q = p;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    q[i] = p[i] + h;
    const double up = f(q);
    q[i] = p[i] - h;
    const double down = f(q);
    q[i] = p[i];
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

double r2(const std::vector<double>& y, const std::vector<double>& yhat) {
  long double m = 0;
  for (double v : y) m += v;
  m /= y.size();
  long double res = 0, tot = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    res += (static_cast<long double>(y[i]) - yhat[i]) * (static_cast<long double>(y[i]) - yhat[i]);
    tot += (y[i] - m) * (y[i] - m);
  }
  return static_cast<double>(1 - res / tot);
}

double mse(const std::vector<double>& y, const std::vector<double>& yhat) {
  long double s = 0;
  for (std::size_t i = 0; i < y.size(); ++i)
    s += (static_cast<long double>(y[i]) - yhat[i]) * (static_cast<long double>(y[i]) - yhat[i]);
  return static_cast<double>(s / y.size());
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  long double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= a.size();
  mb /= b.size();
  long double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return static_cast<double>(sab / std::sqrt(saa * sbb));
}

double Lcg::normal() {
  // Irwin-Hall approximation is plenty for test data.
  double s = 0.0;
  for (int i = 0; i < 12; ++i) s += uniform();
  return s - 6.0;
}

Eigen::MatrixXd random_matrix(Lcg& rng, Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

}  // namespace oracle
