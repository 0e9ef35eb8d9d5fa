#include <doctest.h>

#include <cmath>
#include <random>

#include "infillgp/covariance.hpp"
#include "infillgp/specialfn.hpp"

using namespace infillgp;

namespace {

CovarianceModel matern(double theta, double alpha, double nu) {
  CovarianceModel m;
  m.family = Family::Matern;
  m.theta = theta;
  m.alpha = alpha;
  m.nu = nu;
  return m;
}

// Direct Matern evaluation through the Bessel function, independent of the
// closed-form dispatch inside kernel_value_r.
double matern_via_bessel(double theta, double alpha, double nu, double r) {
  double s2 = theta * std::pow(alpha, -2.0 * nu);
  if (r == 0.0) return s2;
  double z = alpha * r;
  return s2 * std::exp((1.0 - nu) * std::log(2.0) - log_gamma(nu) + nu * std::log(z)) *
         bessel_k(nu, z);
}

}  // namespace

TEST_CASE("matern closed forms match the bessel formula") {
  std::mt19937 gen(42);
  std::uniform_real_distribution<double> ua(0.2, 8.0), ur(1e-3, 3.0);
  for (int t = 0; t < 200; ++t) {
    double a = ua(gen), r = ur(gen);
    for (double nu : {0.5, 1.5, 2.5}) {
      double got = kernel_value_r(matern(2.0, a, nu), r);
      CHECK(got == doctest::Approx(matern_via_bessel(2.0, a, nu, r)).epsilon(1e-12));
    }
  }
}

TEST_CASE("matern half-integer explicit references") {
  // sigma^2 = theta alpha^{-2nu}; nu = 1/2: sigma^2 exp(-alpha r)
  CHECK(kernel_value_r(matern(3.0, 2.0, 0.5), 0.7) ==
        doctest::Approx(1.5 * std::exp(-1.4)).epsilon(1e-14));
  // nu = 3/2: sigma^2 (1 + z) e^{-z}, sigma^2 = 3 * 2^{-3}
  double z = 2.0 * 0.7;
  CHECK(kernel_value_r(matern(3.0, 2.0, 1.5), 0.7) ==
        doctest::Approx(3.0 / 8.0 * (1.0 + z) * std::exp(-z)).epsilon(1e-14));
  // nu = 5/2: sigma^2 (1 + z + z^2/3) e^{-z}, sigma^2 = 3 * 2^{-5}
  CHECK(kernel_value_r(matern(3.0, 2.0, 2.5), 0.7) ==
        doctest::Approx(3.0 / 32.0 * (1.0 + z + z * z / 3.0) * std::exp(-z))
            .epsilon(1e-14));
}

TEST_CASE("kernel value at zero is sigma^2 and decreases") {
  for (double nu : {0.5, 0.75, 1.0, 1.5, 2.2}) {
    CovarianceModel m = matern(4.0, 3.0, nu);
    CHECK(kernel_value_r(m, 0.0) == doctest::Approx(m.sigma2()).epsilon(1e-12));
    double prev = kernel_value_r(m, 0.0);
    for (double r = 0.05; r < 2.0; r += 0.05) {
      double cur = kernel_value_r(m, r);
      CHECK(cur < prev);
      CHECK(cur > 0.0);
      prev = cur;
    }
  }
}

TEST_CASE("matern scale consistency in (alpha, r)") {
  // K depends on (alpha, r) only through alpha*r once sigma^2 is fixed
  double nu = 1.2, c = 3.5;
  CovarianceModel m1 = matern(1.0, 2.0, nu);
  CovarianceModel m2 = matern(std::pow(2.0 * c, 2.0 * nu) / std::pow(2.0, 2.0 * nu),
                              2.0 * c, nu);  // same sigma^2
  CHECK(m1.sigma2() == doctest::Approx(m2.sigma2()).epsilon(1e-13));
  for (double r : {0.1, 0.4, 1.3})
    CHECK(kernel_value_r(m1, r) == doctest::Approx(kernel_value_r(m2, r / c)).epsilon(1e-12));
}

TEST_CASE("tapered matern is the plain product with the taper") {
  CovarianceModel m = matern(2.0, 4.0, 1.5);
  CovarianceModel mt = m;
  mt.family = Family::TaperedMatern;
  TaperDescriptor tp;
  tp.range = 0.6;
  mt.taper = tp;
  for (double r : {0.0, 0.1, 0.3, 0.59, 0.61, 1.5}) {
    double expect = kernel_value_r(m, r) * taper_value(tp, r);
    CHECK(kernel_value_r(mt, r) == doctest::Approx(expect).epsilon(1e-13));
  }
  CHECK(kernel_value_r(mt, 0.6) == 0.0);
  CHECK(kernel_value_r(mt, 2.0) == 0.0);
}

TEST_CASE("spherical taper endpoints and shape") {
  TaperDescriptor tp;
  tp.range = 2.0;
  CHECK(taper_value(tp, 0.0) == doctest::Approx(1.0));
  CHECK(taper_value(tp, 2.0) == doctest::Approx(0.0));
  CHECK(taper_value(tp, 1.0) == doctest::Approx(1.0 - 1.5 * 0.5 + 0.5 * 0.125));
}

TEST_CASE("generalized wendland nu = 1/2 closed form") {
  // nu = 1/2: theta K = theta (1 - alpha r)_+^mu / alpha
  CovarianceModel m;
  m.family = Family::GeneralizedWendland;
  m.theta = 2.0;
  m.alpha = 1.5;
  m.nu = 0.5;
  m.mu = 3.0;  // > nu + d for d = 1, 2
  for (double r : {0.0, 0.1, 0.35, 0.6}) {
    double expect = 2.0 / 1.5 * std::pow(std::max(0.0, 1.0 - 1.5 * r), 3.0);
    CHECK(kernel_value_r(m, r) == doctest::Approx(expect).epsilon(1e-9));
  }
  CHECK(kernel_value_r(m, 1.0) == 0.0);  // alpha r > 1
}

TEST_CASE("generalized wendland general parameters sanity") {
  CovarianceModel m;
  m.family = Family::GeneralizedWendland;
  m.theta = 1.0;
  m.alpha = 2.0;
  m.nu = 1.0;
  m.mu = 4.0;
  CHECK(kernel_value_r(m, 0.0) == doctest::Approx(m.sigma2()).epsilon(1e-9));
  CHECK(kernel_value_r(m, 0.51) == 0.0);  // support radius 1/alpha
  double prev = kernel_value_r(m, 0.0);
  for (double r = 0.05; r < 0.5; r += 0.05) {
    double cur = kernel_value_r(m, r);
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("confluent hypergeometric matches frozen high-precision references") {
  // arbitrary-precision quadrature of
  //   theta / Gamma(nu) int_0^inf t^{nu-1} (alpha^2 t + 1)^{-(nu+mu)} e^{-nu r^2/t} dt
  // at theta = 1.3, alpha = 1.1, nu = 0.8, mu = 1.5 (30 significant digits)
  CovarianceModel m;
  m.family = Family::ConfluentHypergeometric;
  m.theta = 1.3;
  m.alpha = 1.1;
  m.nu = 0.8;
  m.mu = 1.5;
  CHECK(kernel_value_r(m, 0.0) ==
        doctest::Approx(0.847805768662178637276371002519).epsilon(1e-9));
  CHECK(kernel_value_r(m, 0.05) ==
        doctest::Approx(0.818679589489889320930930655775).epsilon(1e-9));
  CHECK(kernel_value_r(m, 0.3) ==
        doctest::Approx(0.582030695504518792974054705213).epsilon(1e-9));
  CHECK(kernel_value_r(m, 1.0) ==
        doctest::Approx(0.205308809575146006518731794916).epsilon(1e-9));
}

TEST_CASE("confluent hypergeometric variance identity") {
  // K(0) = theta alpha^{-2nu} Gamma(mu) / Gamma(nu + mu)
  for (double nu : {0.6, 1.0, 1.8})
    for (double mu : {0.9, 2.2}) {
      CovarianceModel m;
      m.family = Family::ConfluentHypergeometric;
      m.theta = 1.7;
      m.alpha = 1.3;
      m.nu = nu;
      m.mu = mu;
      double expect = 1.7 * std::pow(1.3, -2.0 * nu) *
                      std::exp(log_gamma(mu) - log_gamma(nu + mu));
      CHECK(kernel_value_r(m, 0.0) == doctest::Approx(expect).epsilon(1e-9));
    }
}

TEST_CASE("matern spectral density closed form and inversion, d = 1") {
  std::mt19937 gen(7);
  std::uniform_real_distribution<double> ut(0.5, 4.0), ua(0.5, 4.0), un(0.4, 2.6);
  for (int t = 0; t < 5; ++t) {
    CovarianceModel m = matern(ut(gen), ua(gen), un(gen));
    // f(w) = c theta (alpha^2 + w^2)^{-(nu + 1/2)}
    Eigen::VectorXd w(1);
    w << 0.7;
    double c = std::exp(log_gamma(m.nu + 0.5) - log_gamma(m.nu)) / std::sqrt(M_PI);
    double expect = c * m.theta * std::pow(m.alpha * m.alpha + 0.49, -(m.nu + 0.5));
    CHECK(spectral_density(m, w) == doctest::Approx(expect).epsilon(1e-12));

    auto f = [&](double ww) {
      Eigen::VectorXd wv(1);
      wv << ww;
      return spectral_density(m, wv);
    };
    // total mass: 2 int_0^inf f dw = theta K(0)
    QuadratureSpec spec;
    spec.abs_tol = 1e-11;
    spec.rel_tol = 1e-8;
    double mass = 2.0 * integrate(f, 0.0, std::numeric_limits<double>::infinity(), spec);
    CHECK(mass == doctest::Approx(kernel_value_r(m, 0.0)).epsilon(1e-6));

    // inversion at r > 0: oscillatory tail summed in half-period blocks so the
    // adaptive rule never sees more than one sign change per call
    double r = 0.4;
    double inv = 0.0;
    int blocks = 1200;
    for (int b = 0; b < blocks; ++b) {
      double lo = b * M_PI / r, hi = (b + 1) * M_PI / r;
      QuadratureSpec bs;
      bs.abs_tol = 1e-12;
      bs.rel_tol = 1e-8;
      inv += 2.0 * integrate([&](double ww) { return f(ww) * std::cos(ww * r); }, lo,
                             hi, bs);
    }
    CHECK(inv == doctest::Approx(kernel_value_r(m, r)).epsilon(1e-4));
  }
}

TEST_CASE("matern spectral density d = 2 integrates to the variance") {
  CovarianceModel m = matern(2.0, 3.0, 1.0);
  // int_{R^2} f dw = theta K(0); radially: int_0^inf f(w) 2 pi w dw
  double total = 2.0 * M_PI *
                 integrate(
                     [&](double w) {
                       Eigen::VectorXd wv(2);
                       wv << w, 0.0;
                       return w * spectral_density(m, wv);
                     },
                     0.0, std::numeric_limits<double>::infinity());
  CHECK(total == doctest::Approx(kernel_value_r(m, 0.0)).epsilon(1e-8));
}

TEST_CASE("tapered matern spectral density, d = 1") {
  CovarianceModel m = matern(1.0, 2.0, 0.5);
  m.family = Family::TaperedMatern;
  TaperDescriptor tp;
  tp.range = 0.5;
  m.taper = tp;
  Eigen::VectorXd w(1);
  for (double ww : {0.0, 0.5, 2.0, 8.0, 25.0}) {
    w << ww;
    // nonnegative on a frequency sweep
    CHECK(spectral_density(m, w) >= -1e-12);
    // the tapered kernel has compact support, so its density is also the
    // plain finite cosine transform -- an independent check of the convolution
    QuadratureSpec spec;
    spec.abs_tol = 1e-12;
    spec.rel_tol = 1e-10;
    double direct = integrate(
                        [&](double x) { return kernel_value_r(m, x) * std::cos(ww * x); },
                        0.0, tp.range, spec) /
                    M_PI;
    CHECK(spectral_density(m, w) == doctest::Approx(direct).epsilon(2e-4));
  }
}

TEST_CASE("spectral ratio bound on an interior alpha range") {
  // |f_alpha/f_alpha0 - 1| <= (4 (2 nu + d) / 3) |alpha/alpha0 - 1| holds on
  // a two-sided neighborhood and on the whole upper side alpha >= alpha0
  for (double nu : {0.5, 1.0, 1.7})
    for (int d : {1, 2}) {
      double L = 4.0 * (2.0 * nu + d) / 3.0;
      CovarianceModel m0 = matern(1.0, 2.0, nu);
      Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
      for (double delta : {-0.05, -0.02, 0.02, 0.05, 0.1, 0.2, 0.25}) {
        if (delta < 0 && delta < -0.05) continue;
        CovarianceModel m = m0;
        m.alpha = m0.alpha * (1.0 + delta);
        for (double ww : {0.0, 1.0, 4.0, 20.0}) {
          w(0) = ww;
          double ratio = spectral_density(m, w) / spectral_density(m0, w);
          CHECK(std::fabs(ratio - 1.0) <= L * std::fabs(delta) + 1e-12);
        }
      }
    }
}

TEST_CASE("covariance_matrix parallel equals serial and is SPD") {
  std::mt19937 gen(3);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  Eigen::MatrixXd pts(40, 2);
  for (int i = 0; i < 40; ++i) {
    pts(i, 0) = u01(gen);
    pts(i, 1) = u01(gen);
  }
  for (double nu : {0.5, 0.9, 1.5}) {
    CovarianceModel m = matern(1.5, 4.0, nu);
    Eigen::MatrixXd K = covariance_matrix(m, pts, 0.3);
    Eigen::MatrixXd Ks = covariance_matrix_serial(m, pts, 0.3);
    CHECK((K - Ks).cwiseAbs().maxCoeff() == doctest::Approx(0.0).scale(1).epsilon(1e-13));
    CHECK((K - K.transpose()).cwiseAbs().maxCoeff() ==
          doctest::Approx(0.0).scale(1).epsilon(1e-13));
    Eigen::LLT<Eigen::MatrixXd> llt(K);
    CHECK(llt.info() == Eigen::Success);
  }
}

TEST_CASE("covariance_matrix matches from_distances fast path") {
  std::mt19937 gen(5);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  Eigen::MatrixXd pts(25, 1);
  for (int i = 0; i < 25; ++i) pts(i, 0) = u01(gen);
  CovarianceModel m = matern(2.0, 5.0, 1.5);
  Eigen::MatrixXd K1 = covariance_matrix(m, pts, 0.2);
  Eigen::MatrixXd K2 = covariance_matrix_from_distances(m, pairwise_distances(pts), 0.2);
  CHECK((K1 - K2).cwiseAbs().maxCoeff() == doctest::Approx(0.0).scale(1).epsilon(1e-13));
}

TEST_CASE("duplicate points are rejected") {
  Eigen::MatrixXd pts(3, 1);
  pts << 0.1, 0.5, 0.1;
  CHECK_THROWS_AS(covariance_matrix(matern(1, 1, 0.5), pts, 0.0), std::invalid_argument);
}

TEST_CASE("cross_covariance agrees with elementwise kernel evaluation") {
  Eigen::MatrixXd pts(4, 2);
  pts << 0.1, 0.2, 0.7, 0.9, 0.5, 0.5, 0.0, 1.0;
  Eigen::VectorXd s(2);
  s << 0.3, 0.4;
  CovarianceModel m = matern(1.0, 3.0, 2.5);
  Eigen::VectorXd k = cross_covariance(m, pts, s);
  for (int i = 0; i < 4; ++i) {
    Eigen::VectorXd h = pts.row(i).transpose() - s;
    CHECK(k(i) == doctest::Approx(kernel_value(m, h)).epsilon(1e-13));
  }
}

TEST_CASE("taylor series leading coefficient is the variance") {
  for (double nu : {0.6, 1.0, 1.4, 2.0, 3.0}) {
    CovarianceModel m = matern(2.5, 1.7, nu);
    TaylorCoefficients c = taylor_coefficients(m, 4);
    CHECK(c.zeta[0] == doctest::Approx(m.sigma2()).epsilon(1e-11));
    CHECK(taylor_series_value(c, 0.0) == doctest::Approx(m.sigma2()).epsilon(1e-11));
  }
}

TEST_CASE("taylor series matches the kernel at small lags") {
  for (double nu : {0.5, 0.75, 1.0, 1.3, 2.0}) {
    CovarianceModel m = matern(1.0, 1.0, nu);
    TaylorCoefficients c = taylor_coefficients(m, 8);
    for (double r : {1e-3, 5e-3, 0.02, 0.05}) {
      double exact = kernel_value_r(m, r);
      CHECK(taylor_series_value(c, r) == doctest::Approx(exact).epsilon(1e-9));
    }
  }
}

TEST_CASE("family name round trip and validation") {
  for (Family f : {Family::Matern, Family::TaperedMatern, Family::GeneralizedWendland,
                   Family::ConfluentHypergeometric})
    CHECK(family_from_name(family_name(f)) == f);
  CHECK_THROWS_AS(family_from_name("nope"), std::invalid_argument);

  CovarianceModel bad = matern(1.0, 1.0, 0.5);
  bad.theta = -1.0;
  CHECK_THROWS_AS(bad.validate(1), std::invalid_argument);
  CovarianceModel gw;
  gw.family = Family::GeneralizedWendland;
  gw.nu = 0.3;  // < 1/2
  gw.mu = 5.0;
  CHECK_THROWS_AS(gw.validate(1), std::invalid_argument);
  gw.nu = 1.0;
  gw.mu = 1.5;  // <= nu + d
  CHECK_THROWS_AS(gw.validate(2), std::invalid_argument);
}
