#include "infillgp/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace infillgp {

RateFit rate_regression(const std::vector<double>& ns,
                        const std::vector<double>& errors) {
  if (ns.size() != errors.size())
    throw std::invalid_argument("rate_regression: length mismatch");
  if (ns.size() < 3) throw std::invalid_argument("rate_regression: need >= 3 points");
  RateFit fit;
  double sx = 0, sy = 0;
  for (size_t i = 0; i < ns.size(); ++i) {
    if (!(errors[i] > 0.0) || !(ns[i] > 0.0))
      throw std::invalid_argument("rate_regression: nonpositive input");
    fit.points.emplace_back(std::log(ns[i]), std::log(errors[i]));
    sx += fit.points.back().first;
    sy += fit.points.back().second;
  }
  double k = static_cast<double>(ns.size());
  double xbar = sx / k, ybar = sy / k;
  double sxx = 0, sxy = 0;
  for (auto& [x, y] : fit.points) {
    sxx += (x - xbar) * (x - xbar);
    sxy += (x - xbar) * (y - ybar);
  }
  fit.slope = sxy / sxx;
  fit.intercept = ybar - fit.slope * xbar;
  double rss = 0;
  for (auto& [x, y] : fit.points) {
    double r = y - fit.intercept - fit.slope * x;
    rss += r * r;
  }
  fit.stderr_slope = (k > 2) ? std::sqrt(rss / ((k - 2) * sxx)) : 0.0;
  return fit;
}

std::vector<double> empirical_quantiles(std::vector<double> samples, int q) {
  if (samples.empty()) throw std::invalid_argument("empirical_quantiles: empty sample");
  std::sort(samples.begin(), samples.end());
  std::vector<double> out(q);
  const double n = static_cast<double>(samples.size());
  for (int j = 0; j < q; ++j) {
    double p = (j + 0.5) / q;
    double pos = p * n - 0.5;
    if (pos <= 0.0) {
      out[j] = samples.front();
    } else if (pos >= n - 1.0) {
      out[j] = samples.back();
    } else {
      auto lo = static_cast<size_t>(std::floor(pos));
      double frac = pos - lo;
      out[j] = (1.0 - frac) * samples[lo] + frac * samples[lo + 1];
    }
  }
  return out;
}

std::vector<double> w2_barycenter(const std::vector<std::vector<double>>& sample_sets,
                                  int n_quantiles) {
  if (sample_sets.empty()) throw std::invalid_argument("w2_barycenter: no sample sets");
  std::vector<double> bary(n_quantiles, 0.0);
  for (const auto& set : sample_sets) {
    auto quant = empirical_quantiles(set, n_quantiles);
    for (int j = 0; j < n_quantiles; ++j) bary[j] += quant[j];
  }
  for (double& b : bary) b /= sample_sets.size();
  return bary;
}

}  // namespace infillgp
