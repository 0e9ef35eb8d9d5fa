#ifndef INFILLGP_COVARIANCE_HPP
#define INFILLGP_COVARIANCE_HPP

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "infillgp/specialfn.hpp"

namespace infillgp {

enum class Family { Matern, TaperedMatern, GeneralizedWendland, ConfluentHypergeometric };

std::string family_name(Family f);
Family family_from_name(const std::string& name);

struct TaperDescriptor {
  enum class Kind { Spherical };
  Kind kind = Kind::Spherical;
  double range = 1.0;  // support radius R > 0
};

/* Stationary covariance theta*K_{alpha,nu}(h).  theta is the microergodic
 * parameter; for Matern theta = sigma^2 alpha^{2 nu}. */
struct CovarianceModel {
  Family family = Family::Matern;
  double theta = 1.0;
  double alpha = 1.0;
  double nu = 0.5;
  double mu = 0.0;  // GW: mu > nu + d with nu >= 1/2; CH: mu > 0
  std::optional<TaperDescriptor> taper;

  void validate(int d = 1) const;  // throws std::invalid_argument
  double sigma2() const { return theta * std::pow(alpha, -2.0 * nu); }
};

/* Spherical (Wendland-type) taper, 1 - 1.5 x + 0.5 x^3 on x = r/R in [0,1]. */
double taper_value(const TaperDescriptor& taper, double r);

/* theta*K at radial lag r >= 0. */
double kernel_value_r(const CovarianceModel& model, double r);

double kernel_value(const CovarianceModel& model, const Eigen::VectorXd& h);

/* Spectral density at frequency w (dimension taken from w.size()).
 * Matern closed form; TaperedMatern d = 1 by numeric convolution. */
double spectral_density(const CovarianceModel& model, const Eigen::VectorXd& w);

/* n x n matrix theta*K(s_i - s_j) + tau 1{i=j}; OpenMP over rows. */
Eigen::MatrixXd covariance_matrix(const CovarianceModel& model,
                                  const Eigen::MatrixXd& points, double tau);
/* Serial reference used by tests and the benchmark. */
Eigen::MatrixXd covariance_matrix_serial(const CovarianceModel& model,
                                         const Eigen::MatrixXd& points, double tau);

/* Assemble from a precomputed pairwise-distance matrix (fast path used by
 * the likelihood; vectorized closed forms for half-integer Matern). */
Eigen::MatrixXd covariance_matrix_from_distances(const CovarianceModel& model,
                                                 const Eigen::MatrixXd& dist,
                                                 double tau);

Eigen::MatrixXd pairwise_distances(const Eigen::MatrixXd& points);

/* theta*K(s_i - s) for each design row s_i. */
Eigen::VectorXd cross_covariance(const CovarianceModel& model,
                                 const Eigen::MatrixXd& points,
                                 const Eigen::VectorXd& s);

/* Series expansion theta*K(r) = sum_j zeta_j r^{2j} + zeta*_{nu+j} G_{nu+j}(r),
 * G_s(t) = t^{2s} log t for integer s, t^{2s} otherwise, G_s(0) = 0. */
struct TaylorCoefficients {
  std::vector<double> zeta;       // j = 0..J
  std::vector<double> zeta_star;  // j = 0..J (coefficient of G_{nu+j})
  double nu = 0.0;
  bool nu_integer = false;
};

TaylorCoefficients taylor_coefficients(const CovarianceModel& model, int J);

/* Evaluate the truncated series at lag r. */
double taylor_series_value(const TaylorCoefficients& coef, double r);

bool is_integer_order(double nu);

}  // namespace infillgp

#endif
