#pragma once

// Independent reference implementations used by the unit and acceptance
// tests. They favour obviously-correct brute force over speed and share no
// code with the library beyond its public types.

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Core>

namespace oracle {

/// Exhaustive split search: every feature, every midpoint between adjacent
/// distinct values, child SSEs recomputed from scratch.
struct Split {
  std::size_t feature = 0;
  double threshold = 0.0;
  double gain = 0.0;
};
std::optional<Split> best_split(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                const std::vector<std::size_t>& rows, bool friedman);

/// Recursive exhaustive CART grown to purity; returns predictions for q.
Eigen::VectorXd cart_predict(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                             const Eigen::MatrixXd& q, bool friedman = false,
                             std::size_t max_depth = 0);

/// Mean target of the k nearest rows (full sort; distance ties by index).
double knn_predict(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                   const Eigen::RowVectorXd& query, std::size_t k);
std::vector<std::size_t> knn_indices(const Eigen::MatrixXd& x, const Eigen::RowVectorXd& query,
                                     std::size_t k);

/// OLS with intercept via the normal equations and Gaussian elimination with
/// partial pivoting, in long double. Returns (coef..., intercept).
Eigen::VectorXd normal_equations(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                 double ridge = 0.0);

/// Central differences of f around p, step h.
Eigen::VectorXd finite_difference(const std::function<double(const Eigen::VectorXd&)>& f,
                                  const Eigen::VectorXd& p, double h = 1e-5);

/// Two-pass long-double formulas.
double r2(const std::vector<double>& y, const std::vector<double>& yhat);
double mse(const std::vector<double>& y, const std::vector<double>& yhat);
double pearson(const std::vector<double>& a, const std::vector<double>& b);

/// Tiny deterministic LCG so oracle data does not depend on the library RNG.
class Lcg {
 public:
  explicit Lcg(std::uint64_t seed) : state_(seed * 2862933555777941757ULL + 3037000493ULL) {}
  std::uint64_t next() {
    state_ = state_ * 6364136223846793005ULL + 1442695040888963407ULL;
    return state_ >> 11;
  }
  double uniform() { return static_cast<double>(next()) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(next() % n); }
  double normal();

 private:
  std::uint64_t state_;
};

Eigen::MatrixXd random_matrix(Lcg& rng, Eigen::Index rows, Eigen::Index cols);

}  // namespace oracle
