#ifndef INFILLGP_ANALYSIS_HPP
#define INFILLGP_ANALYSIS_HPP

#include <vector>

namespace infillgp {

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
  std::vector<std::pair<double, double>> points;  // (log n, log error)
};

/* OLS of log(error) on log(n); the slope estimates -b. */
RateFit rate_regression(const std::vector<double>& ns, const std::vector<double>& errors);

/* 1-d Wasserstein-2 barycenter: average of empirical quantile functions on a
 * common probability grid. */
std::vector<double> w2_barycenter(const std::vector<std::vector<double>>& sample_sets,
                                  int n_quantiles = 512);

/* Empirical quantiles at p_j = (j + 1/2)/q, linear interpolation of order
 * statistics. */
std::vector<double> empirical_quantiles(std::vector<double> samples, int q);

}  // namespace infillgp

#endif
