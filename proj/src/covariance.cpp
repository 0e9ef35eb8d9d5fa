#include "infillgp/covariance.hpp"

#include <cmath>
#include <stdexcept>

namespace infillgp {

std::string family_name(Family f) {
  switch (f) {
    case Family::Matern: return "matern";
    case Family::TaperedMatern: return "tapered_matern";
    case Family::GeneralizedWendland: return "generalized_wendland";
    case Family::ConfluentHypergeometric: return "confluent_hypergeometric";
  }
  throw std::logic_error("family_name: unreachable");
}

Family family_from_name(const std::string& name) {
  if (name == "matern") return Family::Matern;
  if (name == "tapered_matern") return Family::TaperedMatern;
  if (name == "generalized_wendland") return Family::GeneralizedWendland;
  if (name == "confluent_hypergeometric") return Family::ConfluentHypergeometric;
  throw std::invalid_argument("unknown covariance family: " + name);
}

bool is_integer_order(double nu) {
  return std::fabs(nu - std::round(nu)) < 1e-12 && nu >= 0.5;
}

void CovarianceModel::validate(int d) const {
  if (!(theta > 0.0) || !std::isfinite(theta))
    throw std::invalid_argument("CovarianceModel: theta must be > 0");
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw std::invalid_argument("CovarianceModel: alpha must be > 0");
  if (!(nu > 0.0) || !std::isfinite(nu))
    throw std::invalid_argument("CovarianceModel: nu must be > 0");
  if (family == Family::GeneralizedWendland) {
    if (nu < 0.5) throw std::invalid_argument("GW requires nu >= 1/2");
    if (!(mu > nu + d)) throw std::invalid_argument("GW requires mu > nu + d");
  }
  if (family == Family::ConfluentHypergeometric && !(mu > 0.0))
    throw std::invalid_argument("CH requires mu > 0");
  if (family == Family::TaperedMatern) {
    if (!taper.has_value()) throw std::invalid_argument("TaperedMatern requires a taper");
    if (!(taper->range > 0.0)) throw std::invalid_argument("taper range must be > 0");
  }
}

double taper_value(const TaperDescriptor& taper, double r) {
  double x = r / taper.range;
  if (x >= 1.0) return 0.0;
  // (1-x)^2 (1+x/2) = 1 - 1.5 x + 0.5 x^3, the classical spherical taper
  return (1.0 - x) * (1.0 - x) * (1.0 + 0.5 * x);
}

namespace {

double matern_r(double sigma2, double alpha, double nu, double r) {
  if (r == 0.0) return sigma2;
  double z = alpha * r;
  // half-integer closed forms (also the fast path for matrix assembly)
  if (std::fabs(nu - 0.5) < 1e-14) return sigma2 * std::exp(-z);
  if (std::fabs(nu - 1.5) < 1e-14) return sigma2 * (1.0 + z) * std::exp(-z);
  if (std::fabs(nu - 2.5) < 1e-14)
    return sigma2 * (1.0 + z + z * z / 3.0) * std::exp(-z);
  double lg = std::lgamma(nu);
  double val = sigma2 * std::exp((1.0 - nu) * std::log(2.0) - lg + nu * std::log(z)) *
               bessel_k(nu, z);
  return val;
}

double gw_r(const CovarianceModel& m, double r) {
  double a = m.alpha * r;
  if (a >= 1.0) return 0.0;
  double nu = m.nu, mu = m.mu;
  // t = a + (1-a) u maps to u in (0,1); t^2 - a^2 = (1-a) u (2a + (1-a) u)
  auto f = [a, nu, mu](double u) {
    double w = 1.0 - a;
    double t = a + w * u;
    double q = w * u * (2.0 * a + w * u);
    return std::pow(q, nu - 0.5) * std::pow(1.0 - t, mu - 1.0) * w;
  };
  double integral = integrate(f, 0.0, 1.0);
  double log_beta = log_gamma(2.0 * nu) + log_gamma(mu) - log_gamma(2.0 * nu + mu);
  return m.theta * integral / std::exp(log_beta + 2.0 * nu * std::log(m.alpha));
}

double ch_r(const CovarianceModel& m, double r) {
  double nu = m.nu, mu = m.mu, a2 = m.alpha * m.alpha, r2 = r * r;
  // (0,1]: t = v^{1/nu} absorbs t^{nu-1}; [1,inf): t = 1/u then u = w^{1/mu}
  auto f1 = [nu, mu, a2, r2](double v) {
    double t = std::pow(v, 1.0 / nu);
    double e = -nu * r2 / t;
    return std::pow(a2 * t + 1.0, -(nu + mu)) * (e < -700.0 ? 0.0 : std::exp(e)) / nu;
  };
  auto f2 = [nu, mu, a2, r2](double w) {
    double u = std::pow(w, 1.0 / mu);
    return std::pow(a2 + u, -(nu + mu)) * std::exp(-nu * r2 * u) / mu;
  };
  double integral = integrate(f1, 0.0, 1.0) + integrate(f2, 0.0, 1.0);
  return m.theta * integral / std::exp(log_gamma(nu));
}

}  // namespace

double kernel_value_r(const CovarianceModel& model, double r) {
  switch (model.family) {
    case Family::Matern:
      return matern_r(model.sigma2(), model.alpha, model.nu, r);
    case Family::TaperedMatern:
      return matern_r(model.sigma2(), model.alpha, model.nu, r) *
             taper_value(*model.taper, r);
    case Family::GeneralizedWendland:
      return gw_r(model, r);
    case Family::ConfluentHypergeometric:
      return ch_r(model, r);
  }
  throw std::logic_error("kernel_value_r: unreachable");
}

double kernel_value(const CovarianceModel& model, const Eigen::VectorXd& h) {
  model.validate(static_cast<int>(h.size()));
  return kernel_value_r(model, h.norm());
}

namespace {

double matern_spectral(double theta, double alpha, double nu, int d, double wnorm2) {
  double lg = log_gamma(nu + 0.5 * d) - log_gamma(nu) - 0.5 * d * std::log(M_PI);
  return std::exp(lg) * theta * std::pow(alpha * alpha + wnorm2, -(nu + 0.5 * d));
}

/* 1-d spectral density of the spherical taper: (1/pi) int_0^R cos(wx) K_tap dx.
 * K_tap is the cubic 1 - 1.5 x/R + 0.5 (x/R)^3, so the integral is elementary;
 * small wR falls back to quadrature to dodge cancellation in the antiderivative. */
double taper_spectral_1d(const TaperDescriptor& taper, double w) {
  const double R = taper.range;
  w = std::fabs(w);
  if (w * R < 0.5) {
    auto f = [&taper, w](double x) { return std::cos(w * x) * taper_value(taper, x); };
    QuadratureSpec spec;
    spec.abs_tol = 1e-12;
    spec.rel_tol = 1e-9;
    return integrate(f, 0.0, R, spec) / M_PI;
  }
  const double a1 = -1.5 / R, a3 = 0.5 / (R * R * R);
  const double s = std::sin(w * R), c = std::cos(w * R);
  const double w2 = w * w, w3 = w2 * w, w4 = w2 * w2;
  double I = s / w;                                     // int cos
  I += a1 * ((c - 1.0) / w2 + R * s / w);               // int x cos
  I += a3 * ((3.0 * R * R / w2 - 6.0 / w4) * c + 6.0 / w4 +
             (R * R * R / w - 6.0 * R / w3) * s);       // int x^3 cos
  return I / M_PI;
}

}  // namespace

double spectral_density(const CovarianceModel& model, const Eigen::VectorXd& w) {
  int d = static_cast<int>(w.size());
  model.validate(d);
  if (model.family == Family::Matern)
    return matern_spectral(model.theta, model.alpha, model.nu, d, w.squaredNorm());
  if (model.family == Family::TaperedMatern) {
    if (d != 1)
      throw std::invalid_argument("spectral_density: tapered Matern supported for d = 1 only");
    double wv = w(0);
    // convolution of the Matern density with the taper density over v in R
    auto g = [&](double v) {
      double fm = matern_spectral(model.theta, model.alpha, model.nu, 1,
                                  (wv - v) * (wv - v));
      return fm * taper_spectral_1d(*model.taper, v);
    };
    QuadratureSpec spec;
    spec.abs_tol = 1e-10;
    spec.rel_tol = 1e-6;
    spec.max_subdivisions = 4000;
    // finite cutoff: the taper density decays like v^-2, the Matern factor is
    // bounded, so the absolute tail beyond V is O(1/V)
    double V = std::fabs(wv) + std::max(2000.0, 400.0 / model.taper->range);
    auto gneg = [&g](double v) { return g(-v); };
    return integrate(g, 0.0, V, spec) + integrate(gneg, 0.0, V, spec);
  }
  throw std::invalid_argument("spectral_density: unsupported family");
}

Eigen::MatrixXd pairwise_distances(const Eigen::MatrixXd& points) {
  const auto n = points.rows();
  Eigen::MatrixXd dist(n, n);
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < n; ++i) {
    dist(i, i) = 0.0;
    for (Eigen::Index j = 0; j < i; ++j) {
      double r = (points.row(i) - points.row(j)).norm();
      dist(i, j) = r;
      dist(j, i) = r;
    }
  }
  return dist;
}

Eigen::MatrixXd covariance_matrix_from_distances(const CovarianceModel& model,
                                                 const Eigen::MatrixXd& dist,
                                                 double tau) {
  const auto n = dist.rows();
  Eigen::MatrixXd K(n, n);
  double s2 = model.sigma2();
  double a = model.alpha;
  // vectorized closed forms for the common half-integer Matern orders
  if (model.family == Family::Matern && std::fabs(model.nu - 0.5) < 1e-14) {
    K = s2 * (-a * dist.array()).exp();
  } else if (model.family == Family::Matern && std::fabs(model.nu - 1.5) < 1e-14) {
    K = s2 * (1.0 + a * dist.array()) * (-a * dist.array()).exp();
  } else if (model.family == Family::Matern && std::fabs(model.nu - 2.5) < 1e-14) {
    auto z = a * dist.array();
    K = s2 * (1.0 + z + z.square() / 3.0) * (-z).exp();
  } else {
#pragma omp parallel for schedule(dynamic, 8)
    for (Eigen::Index i = 0; i < n; ++i) {
      K(i, i) = kernel_value_r(model, 0.0);
      for (Eigen::Index j = 0; j < i; ++j) {
        double v = kernel_value_r(model, dist(i, j));
        K(i, j) = v;
        K(j, i) = v;
      }
    }
  }
  K.diagonal().array() += tau;
  return K;
}

Eigen::MatrixXd covariance_matrix(const CovarianceModel& model,
                                  const Eigen::MatrixXd& points, double tau) {
  model.validate(static_cast<int>(points.cols()));
  if (tau < 0.0) throw std::invalid_argument("covariance_matrix: tau must be >= 0");
  Eigen::MatrixXd dist = pairwise_distances(points);
  const auto n = points.rows();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < i; ++j)
      if (dist(i, j) == 0.0)
        throw std::invalid_argument("covariance_matrix: duplicate design points");
  return covariance_matrix_from_distances(model, dist, tau);
}

Eigen::MatrixXd covariance_matrix_serial(const CovarianceModel& model,
                                         const Eigen::MatrixXd& points, double tau) {
  model.validate(static_cast<int>(points.cols()));
  const auto n = points.rows();
  Eigen::MatrixXd K(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    K(i, i) = kernel_value_r(model, 0.0) + tau;
    for (Eigen::Index j = 0; j < i; ++j) {
      double r = (points.row(i) - points.row(j)).norm();
      if (r == 0.0)
        throw std::invalid_argument("covariance_matrix: duplicate design points");
      double v = kernel_value_r(model, r);
      K(i, j) = v;
      K(j, i) = v;
    }
  }
  return K;
}

Eigen::VectorXd cross_covariance(const CovarianceModel& model,
                                 const Eigen::MatrixXd& points,
                                 const Eigen::VectorXd& s) {
  const auto n = points.rows();
  Eigen::VectorXd k(n);
  for (Eigen::Index i = 0; i < n; ++i)
    k(i) = kernel_value_r(model, (points.row(i).transpose() - s).norm());
  return k;
}

TaylorCoefficients taylor_coefficients(const CovarianceModel& model, int J) {
  if (model.family != Family::Matern)
    throw std::invalid_argument("taylor_coefficients: Matern only");
  model.validate();
  double nu = model.nu, theta = model.theta, alpha = model.alpha;
  TaylorCoefficients out;
  out.nu = nu;
  out.nu_integer = is_integer_order(nu);
  out.zeta.resize(J + 1);
  out.zeta_star.resize(J + 1);
  if (!out.nu_integer) {
    double sin_nu_pi = std::sin(nu * M_PI);
    for (int j = 0; j <= J; ++j) {
      double prod = 1.0;
      for (int i = 1; i <= j; ++i) prod *= (i - nu);
      double xi = 1.0 / (std::pow(2.0, 2 * j) * std::tgamma(j + 1.0) * prod);
      out.zeta[j] = theta * std::pow(alpha, 2.0 * j - 2.0 * nu) * xi;
      double xi_star = -M_PI / (std::pow(2.0, 2 * j + 2 * nu) * std::tgamma(j + 1.0) *
                                std::exp(log_gamma(j + 1.0 + nu) + log_gamma(nu)) *
                                sin_nu_pi);
      out.zeta_star[j] = theta * std::pow(alpha, 2.0 * j) * xi_star;
    }
  } else {
    int nui = static_cast<int>(std::round(nu));
    double log_alpha = std::log(alpha);
    auto fact = [](int k) { return std::tgamma(k + 1.0); };
    for (int j = 0; j <= J; ++j) {
      if (j < nui) {
        out.zeta[j] = theta * std::pow(alpha, 2.0 * j - 2.0 * nu) *
                      ((j % 2 == 0) ? 1.0 : -1.0) * fact(nui - j - 1) /
                      (std::pow(2.0, 2 * j) * fact(nui - 1) * fact(j));
      } else {
        double denom = std::pow(2.0, 2 * j) * fact(j - nui) * fact(j) * fact(nui - 1);
        double sgn = (nui % 2 == 0) ? 1.0 : -1.0;
        double xi1 = sgn * (digamma(j - nui + 1.0) + digamma(j + 1.0) + 2.0 * std::log(2.0)) /
                     denom;
        double xi2 = -sgn * 2.0 / denom;
        out.zeta[j] = theta * std::pow(alpha, 2.0 * j - 2.0 * nu) *
                      (xi1 + xi2 * log_alpha);
      }
      double xs_denom = std::pow(2.0, 2 * nui + 2 * j - 1) * fact(nui - 1) * fact(j) *
                        fact(nui + j);
      out.zeta_star[j] = theta * std::pow(alpha, 2.0 * j) *
                         ((nui % 2 == 0) ? -1.0 : 1.0) / xs_denom;
    }
  }
  return out;
}

double taylor_series_value(const TaylorCoefficients& coef, double r) {
  double acc = 0.0;
  int J = static_cast<int>(coef.zeta.size()) - 1;
  for (int j = 0; j <= J; ++j) {
    acc += coef.zeta[j] * std::pow(r, 2.0 * j);
    double s = coef.nu + j;
    if (r > 0.0) {
      double g = coef.nu_integer ? std::pow(r, 2.0 * s) * std::log(r)
                                 : std::pow(r, 2.0 * s);
      acc += coef.zeta_star[j] * g;
    }
  }
  return acc;
}

}  // namespace infillgp
