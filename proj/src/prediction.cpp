#include "infillgp/prediction.hpp"

#include <cmath>
#include <sstream>

namespace infillgp {

PredictiveSolver::PredictiveSolver(const CovarianceModel& model, double tau,
                                   const Dataset& data, double a0)
    : model_(model), data_(data) {
  model.validate(data.design.d);
  Eigen::MatrixXd Sigma = covariance_matrix(model, data.design.points, tau);
  llt_.compute(Sigma);
  if (llt_.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "PredictiveSolver: Cholesky failed (n = " << Sigma.rows()
        << ", theta = " << model.theta << ", tau = " << tau << ")";
    throw numerical_error(msg.str());
  }
  W_ = llt_.matrixL().solve(data.F);
  z_ = llt_.matrixL().solve(data.Y);
  const auto p = data.F.cols();
  Eigen::MatrixXd prec = W_.transpose() * W_ +
                         Eigen::MatrixXd::Identity(p, p) / a0;
  lltP_.compute(prec);
  beta_post_ = lltP_.solve(W_.transpose() * z_);
  k0_ = kernel_value_r(model, 0.0);
}

double PredictiveSolver::blup(const Eigen::VectorXd& beta,
                              const Eigen::VectorXd& s) const {
  Eigen::VectorXd k = cross_covariance(model_, data_.design.points, s);
  Eigen::VectorXd v = llt_.matrixL().solve(k);
  Eigen::VectorXd f = feature_vector(data_.feature_spec, s);
  // k'Sigma^-1 (Y - F beta) = v'(z - W beta)
  return beta.dot(f) + v.dot(z_ - W_ * beta);
}

PredictionResult PredictiveSolver::predictive(const Eigen::VectorXd& s) const {
  Eigen::VectorXd k = cross_covariance(model_, data_.design.points, s);
  Eigen::VectorXd v = llt_.matrixL().solve(k);
  Eigen::VectorXd f = feature_vector(data_.feature_spec, s);
  Eigen::VectorXd b = f - W_.transpose() * v;  // f(s*) - F'Sigma^-1 k
  PredictionResult out;
  out.location = s;
  out.mean = v.dot(z_) + b.dot(beta_post_);
  double gp_var = k0_ - v.squaredNorm();
  out.variance = gp_var + b.dot(lltP_.solve(b));
  if (out.variance < 0.0) {
    if (out.variance < -1e-10 * k0_) out.variance_clamped = true;
    out.variance = 0.0;
  }
  return out;
}

double blup(const CovarianceModel& model, double tau, const Eigen::VectorXd& beta,
            const Dataset& data, const Eigen::VectorXd& s) {
  return PredictiveSolver(model, tau, data, 1.0).blup(beta, s);
}

PredictionResult predictive(const CovarianceModel& model, double tau,
                            const Dataset& data, double a0, const Eigen::VectorXd& s) {
  return PredictiveSolver(model, tau, data, a0).predictive(s);
}

double mse_post(const CovarianceModel& model, double tau, const Dataset& data,
                double a0, const Eigen::VectorXd& s, double x_star) {
  if (!data.beta_true)
    throw std::invalid_argument("mse_post: dataset carries no true beta");
  PredictiveSolver solver(model, tau, data, a0);
  PredictionResult pred = solver.predictive(s);
  Eigen::VectorXd f = feature_vector(data.feature_spec, s);
  double err = pred.mean - data.beta_true->dot(f) - x_star;
  return err * err + pred.variance;
}

MseRatioResult mse_ratio(const Dataset& data, const Eigen::MatrixXd& draws,
                         const Eigen::MatrixXd& test_points,
                         const Eigen::VectorXd& x_test, double a0) {
  if (!data.beta_true || !data.model_true || !data.tau_true)
    throw std::invalid_argument("mse_ratio: dataset carries no simulation truth");
  const auto N = test_points.rows();
  const auto S = draws.rows();
  const Eigen::VectorXd& beta0 = *data.beta_true;

  Eigen::MatrixXd mpost = Eigen::MatrixXd::Zero(N, 1);
  for (Eigen::Index si = 0; si < S; ++si) {
    CovarianceModel m = *data.model_true;
    m.theta = draws(si, 0);
    m.alpha = draws(si, 1);
    PredictiveSolver solver(m, draws(si, 2), data, a0);
    for (Eigen::Index i = 0; i < N; ++i) {
      Eigen::VectorXd s = test_points.row(i).transpose();
      PredictionResult pred = solver.predictive(s);
      Eigen::VectorXd f = feature_vector(data.feature_spec, s);
      double err = pred.mean - beta0.dot(f) - x_test(i);
      mpost(i, 0) += (err * err + pred.variance) / S;
    }
  }

  PredictiveSolver oracle(*data.model_true, *data.tau_true, data, a0);
  MseRatioResult out;
  for (Eigen::Index i = 0; i < N; ++i) {
    Eigen::VectorXd s = test_points.row(i).transpose();
    PredictionResult pred = oracle.predictive(s);
    Eigen::VectorXd f = feature_vector(data.feature_spec, s);
    double err = pred.mean - beta0.dot(f) - x_test(i);
    double m0 = err * err + pred.variance;
    out.mean_post += mpost(i, 0) / N;
    out.mean_oracle += m0 / N;
    out.mean_ratio += (mpost(i, 0) / m0) / N;
  }
  return out;
}

}  // namespace infillgp
