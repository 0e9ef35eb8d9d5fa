#ifndef INFILLGP_GP_SIM_HPP
#define INFILLGP_GP_SIM_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>

#include "infillgp/covariance.hpp"
#include "infillgp/design.hpp"

namespace infillgp {

/* Observations Y(s) = f(s)^T beta + X(s) + eps(s) on a design, with the
 * latent truth retained when simulated. */
struct Dataset {
  Design design;
  Eigen::MatrixXd F;  // n x p
  Eigen::VectorXd Y;
  std::optional<Eigen::VectorXd> beta_true;
  std::optional<Eigen::VectorXd> X_true;
  std::optional<CovarianceModel> model_true;
  std::optional<double> tau_true;
  FeatureSpec feature_spec;
  double jitter_used = 0.0;
};

struct numerical_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/* Cholesky with escalating jitter: none, then 1e-12*tr(K)/n up to
 * 1e-6*tr(K)/n in factors of 10.  Returns the factor; reports the jitter. */
Eigen::LLT<Eigen::MatrixXd> cholesky_with_jitter(const Eigen::MatrixXd& K,
                                                 double& jitter_used);

/* Simulate on the design; theta = 0 is allowed here (Y = F beta + eps).
 * Deterministic per (seed, replicate) and independent of thread count. */
Dataset simulate(const CovarianceModel& model, double tau, const Eigen::VectorXd& beta,
                 const Design& design, const FeatureSpec& fspec, std::uint64_t seed,
                 std::uint64_t replicate = 0);

/* As simulate(), but jointly draws the latent field at extra test locations
 * (rows of test_points) so predictive MSE can be scored against the truth. */
Dataset simulate_with_test(const CovarianceModel& model, double tau,
                           const Eigen::VectorXd& beta, const Design& design,
                           const FeatureSpec& fspec, const Eigen::MatrixXd& test_points,
                           std::uint64_t seed, std::uint64_t replicate,
                           Eigen::VectorXd& x_test_out);

void save_dataset(const Dataset& data, const std::string& csv_path,
                  const std::string& json_path);
Dataset load_dataset(const std::string& csv_path, const std::string& json_path);

}  // namespace infillgp

#endif
