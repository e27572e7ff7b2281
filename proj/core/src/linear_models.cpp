#include "physioemo/linear_models.hpp"

#include <cmath>
#include <limits>

#include <Eigen/SVD>

#include "model_registry.hpp"

namespace physioemo {

namespace {

/// Centered design restricted to non-constant columns.
struct CenteredDesign {
  Eigen::RowVectorXd x_mean;
  double y_mean = 0.0;
  std::vector<Eigen::Index> active;
  Eigen::MatrixXd xc;  ///< n x active.size()
  Eigen::VectorXd yc;
};

CenteredDesign center(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  if (x.rows() == 0) throw Error(ErrorKind::EmptyMatrix, "no training rows");
  if (x.rows() != y.size())
    throw Error(ErrorKind::DimensionMismatch, "X has " + std::to_string(x.rows()) +
                                                  " rows but y has " + std::to_string(y.size()));
  CenteredDesign d;
  const double n = static_cast<double>(x.rows());
  d.x_mean = x.colwise().sum() / n;
  d.y_mean = y.sum() / n;
  for (Eigen::Index j = 0; j < x.cols(); ++j)
    if (x.col(j).maxCoeff() != x.col(j).minCoeff()) d.active.push_back(j);
  d.xc.resize(x.rows(), static_cast<Eigen::Index>(d.active.size()));
  for (std::size_t k = 0; k < d.active.size(); ++k)
    d.xc.col(static_cast<Eigen::Index>(k)) = x.col(d.active[k]).array() - d.x_mean[d.active[k]];
  d.yc = y.array() - d.y_mean;
  return d;
}

std::unique_ptr<LinearModel> assemble(ModelFamily family, const CenteredDesign& d,
                                      Eigen::Index dims, const Eigen::VectorXd& active_coef) {
  Eigen::VectorXd coef = Eigen::VectorXd::Zero(dims);
  for (std::size_t k = 0; k < d.active.size(); ++k)
    coef[d.active[k]] = active_coef[static_cast<Eigen::Index>(k)];
  const double intercept = d.y_mean - d.x_mean.dot(coef);
  auto model = std::make_unique<LinearModel>(family, std::move(coef), intercept);
  model->set_metadata({}, dims, {});
  return model;
}

Eigen::BDCSVD<Eigen::MatrixXd> thin_svd(const Eigen::MatrixXd& a) {
  return Eigen::BDCSVD<Eigen::MatrixXd>(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
}

}  // namespace

void LinearModel::set_posterior(Eigen::VectorXd stddev, double noise_precision,
                                double weight_precision) {
  posterior_std_ = std::move(stddev);
  noise_precision_ = noise_precision;
  weight_precision_ = weight_precision;
}

Eigen::VectorXd LinearModel::predict_rows(const Eigen::MatrixXd& x) const {
  return (x * coef_).array() + intercept_;
}

void LinearModel::write_state(std::string& out) const {
  detail::StateWriter w(out);
  w.vector("coef", coef_);
  w.scalar("intercept", intercept_);
  if (family_ == ModelFamily::BayesianRidge) {
    w.vector("posterior_std", posterior_std_);
    w.scalar("noise_precision", noise_precision_);
    w.scalar("weight_precision", weight_precision_);
  }
}

std::unique_ptr<TrainedModel> detail::read_linear(ModelFamily family, StateReader& in) {
  auto coef = in.vector("coef");
  const double intercept = in.scalar("intercept");
  auto model = std::make_unique<LinearModel>(family, std::move(coef), intercept);
  if (family == ModelFamily::BayesianRidge) {
    auto sd = in.vector("posterior_std");
    const double a = in.scalar("noise_precision");
    const double l = in.scalar("weight_precision");
    model->set_posterior(std::move(sd), a, l);
  }
  return model;
}

std::unique_ptr<LinearModel> fit_linear(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  const auto d = center(x, y);
  const auto p = d.xc.cols();
  if (p == 0) return assemble(ModelFamily::Linear, d, x.cols(), Eigen::VectorXd());
  if (d.xc.rows() < p)
    throw Error(ErrorKind::SingularSystem, "fewer rows than active features");
  const auto svd = thin_svd(d.xc);
  const Eigen::VectorXd& s = svd.singularValues();
  const double cutoff = static_cast<double>(std::max(d.xc.rows(), p)) *
                        std::numeric_limits<double>::epsilon() * s[0];
  if (s.size() < p || !(s[p - 1] > cutoff))
    throw Error(ErrorKind::SingularSystem, "features are collinear");
  const Eigen::VectorXd uty = svd.matrixU().transpose() * d.yc;
  const Eigen::VectorXd w = svd.matrixV() * (uty.array() / s.array()).matrix();
  return assemble(ModelFamily::Linear, d, x.cols(), w);
}

std::unique_ptr<LinearModel> fit_ridge(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                       double penalty) {
  if (!(penalty >= 0.0)) throw Error(ErrorKind::InvalidConfig, "ridge penalty must be >= 0");
  const auto d = center(x, y);
  if (d.xc.cols() == 0) return assemble(ModelFamily::Ridge, d, x.cols(), Eigen::VectorXd());
  const auto svd = thin_svd(d.xc);
  const Eigen::VectorXd& s = svd.singularValues();
  const Eigen::VectorXd uty = svd.matrixU().transpose() * d.yc;
  Eigen::VectorXd shrunk(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    const double denom = s[i] * s[i] + penalty;
    shrunk[i] = denom > 0.0 ? s[i] * uty[i] / denom : 0.0;
  }
  return assemble(ModelFamily::Ridge, d, x.cols(), svd.matrixV() * shrunk);
}

std::unique_ptr<LinearModel> fit_bayesian_ridge(const Eigen::MatrixXd& x,
                                                const Eigen::VectorXd& y,
                                                const BayesianRidgeParams& prm) {
  const auto d = center(x, y);
  const double n = static_cast<double>(x.rows());
  const auto p = d.xc.cols();

  double alpha = 1.0 / (d.yc.squaredNorm() / n + std::numeric_limits<double>::epsilon());
  double lambda = 1.0;

  Eigen::VectorXd s, uty;
  Eigen::MatrixXd v;
  if (p > 0) {
    const auto svd = thin_svd(d.xc);
    s = svd.singularValues();
    uty = svd.matrixU().transpose() * d.yc;
    v = svd.matrixV();
  }
  const Eigen::ArrayXd eig = s.array().square();

  const auto solve = [&](double a, double l) -> Eigen::VectorXd {
    if (p == 0) return {};
    return v * (s.array() * uty.array() / (eig + l / a)).matrix();
  };

  TrainingInfo info;
  Eigen::VectorXd coef = solve(alpha, lambda);
  Eigen::VectorXd coef_old;
  std::size_t iter = 0;
  for (; iter < prm.max_iter; ++iter) {
    coef = solve(alpha, lambda);
    const double rss = p > 0 ? (d.yc - d.xc * coef).squaredNorm() : d.yc.squaredNorm();
    info.loss_curve.push_back(rss / n);
    const double gamma = (alpha * eig / (lambda + alpha * eig)).sum();
    lambda = (gamma + 2.0 * prm.lambda_1) / (coef.squaredNorm() + 2.0 * prm.lambda_2);
    alpha = (n - gamma + 2.0 * prm.alpha_1) / (rss + 2.0 * prm.alpha_2);
    if (!std::isfinite(alpha) || !std::isfinite(lambda))
      throw Error(ErrorKind::NonFiniteLoss, "evidence update diverged");
    if (iter != 0 && (coef_old - coef).cwiseAbs().sum() < prm.tol) {
      ++iter;
      break;
    }
    coef_old = coef;
  }
  coef = solve(alpha, lambda);

  auto model = assemble(ModelFamily::BayesianRidge, d, x.cols(), coef);
  // Posterior covariance (1/alpha) V diag(1 / (s^2 + lambda/alpha)) V^T.
  Eigen::VectorXd sd = Eigen::VectorXd::Constant(x.cols(), std::sqrt(1.0 / lambda));
  for (std::size_t k = 0; k < d.active.size(); ++k) {
    const Eigen::ArrayXd loading = v.row(static_cast<Eigen::Index>(k)).transpose().array();
    sd[d.active[k]] = std::sqrt((loading.square() / (alpha * eig + lambda)).sum());
  }
  model->set_posterior(std::move(sd), alpha, lambda);
  info.iterations = iter;
  info.final_loss = info.loss_curve.empty() ? 0.0 : info.loss_curve.back();
  model->set_metadata({}, x.cols(), std::move(info));
  return model;
}

}  // namespace physioemo
