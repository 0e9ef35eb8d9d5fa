#ifndef INFILLGP_SPECIALFN_HPP
#define INFILLGP_SPECIALFN_HPP

#include <functional>
#include <stdexcept>
#include <string>

namespace infillgp {

/* Thrown by integrate() when the requested tolerance cannot be met within
 * the subdivision budget.  Carries the best estimate and its error bound. */
struct accuracy_error : std::runtime_error {
  double estimate;
  double error_bound;
  accuracy_error(const std::string& msg, double est, double err)
      : std::runtime_error(msg), estimate(est), error_bound(err) {}
};

/* log Gamma(x) for x > 0 (Lanczos). Throws std::domain_error otherwise. */
double log_gamma(double x);

/* digamma(x) = d/dx log Gamma(x) for x > 0. */
double digamma(double x);

/* Modified Bessel function of the second kind, real order nu >= 0, x > 0.
 * Temme series for x <= 2, Steed's continued fraction for x > 2, with
 * upward recurrence in the order. */
double bessel_k(double nu, double x);

struct QuadratureSpec {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  int max_subdivisions = 4000;
};

/* Adaptive 15-point Gauss-Kronrod quadrature of f on (a, b); b may be
 * +infinity (mapped to a finite interval).  Endpoints are never evaluated.
 * Throws accuracy_error if the tolerance is not reached. */
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureSpec& spec = {});

}  // namespace infillgp

#endif
