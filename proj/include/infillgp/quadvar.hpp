#ifndef INFILLGP_QUADVAR_HPP
#define INFILLGP_QUADVAR_HPP

#include <Eigen/Dense>
#include <vector>

#include "infillgp/covariance.hpp"
#include "infillgp/design.hpp"
#include "infillgp/gp_sim.hpp"

namespace infillgp {

struct singular_design_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/* Differencing configuration: order ell = ceil(nu + d/2) by default, cell
 * exponents gamma in (max{1 - d/(4 nu), 0}, 1), omega = even floor(m^gamma). */
struct QvConfig {
  int ell = 1;
  double gamma_theta = 0.0;
  double gamma_tau = 0.0;
  int omega_theta = 2;
  int omega_tau = 2;
};

/* Rate-balancing defaults: gamma_theta = 4nu/(4nu+d); gamma_tau just above
 * the admissible lower bound; omegas clamped so m - 2*ell*omega >= 2. */
QvConfig default_qv_config(double nu, int d, int m);

int even_omega(int m, double gamma, int ell);

/* Minimum-norm solution c over k in {0..ell}^d (k_1 fastest) of
 *   sum_k c * prod_j s_j(i + k omega)^{l_j} = 0   for admissible l, and
 *   sum_k c * s_d(i + k omega)^ell = ell! (omega/m)^ell. */
Eigen::VectorXd solve_constants(const Design& design, const std::vector<int>& i,
                                int ell, int omega);

/* m-independent limits: same system in the integer offsets k. */
Eigen::VectorXd limit_constants(int d, int ell);

double xi_star(double nu);
double H_constant(int d, int ell, double nu);
double g_normalizer(double nu, int d, int m, int ell, int omega);  // (w/m)^{2nu}|Xi_1|xi*H

/* V_{u,d,ell} per Eq. (3.1); omega taken from config by u (tau: u = 0). */
double quadratic_variation(const Dataset& data, int u, const QvConfig& config);
double quadratic_variation_serial(const Dataset& data, int u, const QvConfig& config);

struct QvEstimate {
  double theta_hat = 0.0;
  double tau_hat = 0.0;
  double V0 = 0.0, V1 = 0.0;
  double C_V0 = 0.0, g = 0.0, H = 0.0, xi_star = 0.0;
  bool theta_negative = false;
  bool tau_negative = false;
  QvConfig config;
};

QvEstimate estimate(const Dataset& data, double nu, const QvConfig& config);

/* Exact finite-n expectation of V_{u,d,ell}: sums c*c*[mean(s)mean(s') +
 * tau 1{s = s'} + theta K(s - s')] over the index ranges; no Monte Carlo. */
double expected_V(const CovarianceModel& model, double tau, const Eigen::VectorXd& beta,
                  const FeatureSpec& fspec, const Design& design, int u,
                  const QvConfig& config);

/* Sieve membership diagnostics (E_n) with exponents at half their upper bounds. */
struct SieveSpec {
  double rho1 = 0.0, rho21 = 0.0, rho22 = 0.0, rho31 = 1.0, rho32 = 0.0;
};
SieveSpec default_sieve(double nu, int d);
bool sieve_contains(const SieveSpec& spec, Eigen::Index n, double theta, double alpha,
                    double tau, const Eigen::VectorXd& beta);

/* Contraction exponents of the explicit-rate theorem: b1 = 1/(2(4nu/d+1)),
 * b2 = 1/2 (theta and tau respectively). */
void theoretical_rates(double nu, int d, double& b1, double& b2);

/* Full minimum-form exponents with explicit (gamma, rho, varsigma). */
double rate_exponent_theta(double nu, int d, double gamma, const SieveSpec& rho,
                           double varsigma);
double rate_exponent_tau(double nu, int d, double gamma, const SieveSpec& rho,
                         double varsigma);

}  // namespace infillgp

#endif
