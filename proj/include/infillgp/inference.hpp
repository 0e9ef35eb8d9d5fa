#ifndef INFILLGP_INFERENCE_HPP
#define INFILLGP_INFERENCE_HPP

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "infillgp/covariance.hpp"
#include "infillgp/gp_sim.hpp"

namespace infillgp {

struct PriorSpec {
  double a0 = 1e6;  // beta ~ N(0, a0 I_p)
  double a1 = 0.1, b1 = 0.1;  // theta ~ IG(a1, b1)
  double a2 = 0.1, b2 = 0.1;  // tau ~ IG(a2, b2)
  double mu_ig = 1.0, lambda_ig = 1.0;  // alpha ~ IGauss(mu, lambda)
};

struct McmcConfig {
  int n_samples = 2000;
  int n_burnin = 1000;
  std::array<double, 3> step = {0.3, 0.3, 0.3};  // (log theta, log alpha, log tau)
  bool adapt = true;
  double target_accept = 0.3;
  std::uint64_t seed = 0;
  std::uint64_t replicate = 0;
  bool prior_only = false;               // disable the likelihood term (testing)
  std::optional<double> fixed_alpha;     // restrict the walk to (theta, tau)
};

struct PosteriorChain {
  Eigen::MatrixXd draws;  // n_samples x 4: theta, alpha, tau, log posterior
  std::vector<std::uint8_t> accepted;
  double acceptance_rate = 0.0;
  McmcConfig config;
};

struct mixing_failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/* Precomputed quantities shared across likelihood evaluations at different
 * (theta, alpha, tau): pairwise distances and the fixed (F, Y). */
struct LikelihoodContext {
  Eigen::MatrixXd dist;
  Eigen::MatrixXd F;
  Eigen::VectorXd Y;
  int d = 1;
  explicit LikelihoodContext(const Dataset& data);
};

/* Log-likelihood -1/2 r' Sigma^-1 r - 1/2 log det Sigma, Sigma = theta K + tau I
 * (the n/2 log 2pi constant is omitted, as is the marginal's below). */
double log_likelihood(const CovarianceModel& model, double tau,
                      const Eigen::VectorXd& beta, const Dataset& data);
double log_likelihood(const CovarianceModel& model, double tau,
                      const Eigen::VectorXd& beta, const LikelihoodContext& ctx);

/* Beta integrated out against N(0, a0 I_p):
 * -1/2 Y'(Sigma + a0 F F')^{-1} Y - 1/2 log det(Sigma + a0 F F'),
 * evaluated by a Woodbury update of the Sigma factorization. */
double marginal_log_likelihood(const CovarianceModel& model, double tau,
                               const Dataset& data, double a0);
double marginal_log_likelihood(const CovarianceModel& model, double tau,
                               const LikelihoodContext& ctx, double a0);

/* N(mean, cov) with cov = [F' Sigma^-1 F + a0^{-1} I_p]^{-1}. */
void beta_conditional_posterior(const CovarianceModel& model, double tau,
                                const Dataset& data, double a0, Eigen::VectorXd& mean,
                                Eigen::MatrixXd& cov);

double log_prior(double theta, double alpha, double tau, const PriorSpec& priors);

/* Random-walk Metropolis on (log theta, log alpha, log tau) targeting
 * marginal likelihood + priors with the log-space Jacobian; joint proposal
 * of independent Gaussian steps, one matrix factorization per iteration.
 * Step sizes share a Robbins-Monro-adapted scale during burn-in. */
PosteriorChain run_mcmc(const Dataset& data, const CovarianceModel& base_model,
                        const PriorSpec& priors, const McmcConfig& config);

void save_chain_csv(const PosteriorChain& chain, const std::string& path);

}  // namespace infillgp

#endif
