#ifndef INFILLGP_PREDICTION_HPP
#define INFILLGP_PREDICTION_HPP

#include <Eigen/Dense>

#include "infillgp/covariance.hpp"
#include "infillgp/gp_sim.hpp"

namespace infillgp {

struct PredictionResult {
  double mean = 0.0;
  double variance = 0.0;
  bool variance_clamped = false;
  Eigen::VectorXd location;
};

/* Shared factorization of Sigma = theta K + tau I for one parameter draw,
 * reused read-only across test points. */
class PredictiveSolver {
 public:
  PredictiveSolver(const CovarianceModel& model, double tau, const Dataset& data,
                   double a0);

  /* beta'f(s*) + k' Sigma^-1 (Y - F beta), k = theta K(S_n, s*). */
  double blup(const Eigen::VectorXd& beta, const Eigen::VectorXd& s) const;

  /* Posterior-predictive mean/variance with beta integrated out against
   * N(0, a0 I_p): the GP conditional plus the b(s*) quadratic form with
   * prior precision a0^{-1}. */
  PredictionResult predictive(const Eigen::VectorXd& s) const;

 private:
  CovarianceModel model_;
  const Dataset& data_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::MatrixXd W_;          // L^-1 F
  Eigen::VectorXd z_;          // L^-1 Y
  Eigen::LLT<Eigen::MatrixXd> lltP_;  // F'Sigma^-1 F + a0^-1 I
  Eigen::VectorXd beta_post_;  // posterior mean of beta
  double k0_ = 0.0;            // theta K(0)
};

double blup(const CovarianceModel& model, double tau, const Eigen::VectorXd& beta,
            const Dataset& data, const Eigen::VectorXd& s);

PredictionResult predictive(const CovarianceModel& model, double tau,
                            const Dataset& data, double a0, const Eigen::VectorXd& s);

/* (Y_dag(s*) - beta0'f(s*) - X(s*))^2 + v_n(s*) at the supplied parameters;
 * at the truth this is the oracle M_0. */
double mse_post(const CovarianceModel& model, double tau, const Dataset& data,
                double a0, const Eigen::VectorXd& s, double x_star);

struct MseRatioResult {
  double mean_post = 0.0;    // M_post averaged over draws and test points
  double mean_oracle = 0.0;  // M_0 averaged over test points
  double mean_ratio = 0.0;   // per-point ratio averaged over test points
};

/* Averages M_post over the supplied posterior draws (rows: theta, alpha, tau)
 * and M_0 at the truth stored in the dataset, over the given test points with
 * latent truth x_test. */
MseRatioResult mse_ratio(const Dataset& data, const Eigen::MatrixXd& draws,
                         const Eigen::MatrixXd& test_points,
                         const Eigen::VectorXd& x_test, double a0);

}  // namespace infillgp

#endif
