#include "infillgp/specialfn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

namespace infillgp {

double log_gamma(double x) {
  if (!std::isfinite(x) || x <= 0.0)
    throw std::domain_error("log_gamma: x must be finite and > 0");
  // Lanczos, g = 7, 9 coefficients.
  static const double c[9] = {
      0.99999999999980993,      676.5203681218851,     -1259.1392167224028,
      771.32342877765313,       -176.61502916214059,   12.507343278686905,
      -0.13857109526572012,     9.9843695780195716e-6, 1.5056327351493116e-7};
  if (x < 0.5) {
    // reflection keeps accuracy for small x
    return std::log(M_PI / std::sin(M_PI * x)) - log_gamma(1.0 - x);
  }
  double z = x - 1.0;
  double a = c[0];
  for (int i = 1; i < 9; ++i) a += c[i] / (z + i);
  double t = z + 7.5;
  return 0.5 * std::log(2.0 * M_PI) + (z + 0.5) * std::log(t) - t + std::log(a);
}

double digamma(double x) {
  if (!std::isfinite(x) || x <= 0.0)
    throw std::domain_error("digamma: x must be finite and > 0");
  double r = 0.0;
  while (x < 6.0) {  // recurrence up to the asymptotic region
    r -= 1.0 / x;
    x += 1.0;
  }
  double f = 1.0 / (x * x);
  // asymptotic expansion with Bernoulli numbers
  double s = std::log(x) - 0.5 / x -
             f * (1.0 / 12.0 - f * (1.0 / 120.0 - f * (1.0 / 252.0 -
                  f * (1.0 / 240.0 - f * (1.0 / 132.0 - f * 691.0 / 32760.0)))));
  return r + s;
}

namespace {

/* gam1 = [1/Gamma(1-mu) - 1/Gamma(1+mu)] / (2 mu),
 * gam2 = [1/Gamma(1-mu) + 1/Gamma(1+mu)] / 2, |mu| <= 1/2. */
void temme_gammas(double mu, double& gam1, double& gam2, double& one_over_gamma_1p,
                  double& one_over_gamma_1m) {
  one_over_gamma_1p = 1.0 / std::tgamma(1.0 + mu);
  one_over_gamma_1m = 1.0 / std::tgamma(1.0 - mu);
  if (std::fabs(mu) < 1e-4) {
    // series for 1/Gamma(1+x) = 1 + a1 x + a2 x^2 + a3 x^3 + ...
    const double a1 = 0.57721566490153286061;   // Euler gamma
    const double a3 = -0.04200263503409523553;
    const double a2 = -0.65587807152025388108;
    gam1 = -(a1 + a3 * mu * mu);
    gam2 = 1.0 + a2 * mu * mu;
  } else {
    gam1 = (one_over_gamma_1m - one_over_gamma_1p) / (2.0 * mu);
    gam2 = (one_over_gamma_1m + one_over_gamma_1p) / 2.0;
  }
}

/* K_mu(x) and K_{mu+1}(x) for |mu| <= 1/2, 0 < x <= 2 (Temme's series). */
void bessel_k_temme(double mu, double x, double& kmu, double& kmu1) {
  const double eps = std::numeric_limits<double>::epsilon();
  const int maxit = 10000;
  double x2 = 0.5 * x;
  double pimu = M_PI * mu;
  double fact = (std::fabs(pimu) < eps) ? 1.0 : pimu / std::sin(pimu);
  double d = -std::log(x2);
  double e = mu * d;
  double fact2 = (std::fabs(e) < eps) ? 1.0 : std::sinh(e) / e;
  double gam1, gam2, gampl, gammi;
  temme_gammas(mu, gam1, gam2, gampl, gammi);
  double ff = fact * (gam1 * std::cosh(e) + gam2 * fact2 * d);
  double sum = ff;
  double ex = std::exp(e);
  double p = 0.5 * ex / gampl;
  double q = 0.5 / (ex * gammi);
  double c = 1.0;
  double dd = x2 * x2;
  double sum1 = p;
  double mu2 = mu * mu;
  for (int i = 1; i <= maxit; ++i) {
    ff = (i * ff + p + q) / (i * i - mu2);
    c *= dd / i;
    p /= (i - mu);
    q /= (i + mu);
    double del = c * ff;
    sum += del;
    double del1 = c * (p - i * ff);
    sum1 += del1;
    if (std::fabs(del) < std::fabs(sum) * eps) break;
  }
  kmu = sum;
  kmu1 = sum1 * (2.0 / x);
}

/* K_mu(x) and K_{mu+1}(x) for |mu| <= 1/2, x > 2 (Steed's CF2). */
void bessel_k_cf2(double mu, double x, double& kmu, double& kmu1) {
  const double eps = std::numeric_limits<double>::epsilon();
  const int maxit = 10000;
  double mu2 = mu * mu;
  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double h = d, delh = d;
  double q1 = 0.0, q2 = 1.0;
  double a1 = 0.25 - mu2;
  double q = a1, c = a1;
  double a = -a1;
  double s = 1.0 + q * delh;
  for (int i = 2; i <= maxit; ++i) {
    a -= 2 * (i - 1);
    c = -a * c / i;
    double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    double dels = q * delh;
    s += dels;
    if (std::fabs(dels / s) <= eps) break;
  }
  h = a1 * h;
  kmu = std::sqrt(M_PI / (2.0 * x)) * std::exp(-x) / s;
  kmu1 = kmu * (mu + x + 0.5 - h) / x;
}

}  // namespace

double bessel_k(double nu, double x) {
  if (!std::isfinite(nu) || !std::isfinite(x) || nu < 0.0 || x <= 0.0)
    throw std::domain_error("bessel_k: requires nu >= 0 and x > 0");
  int nl = static_cast<int>(nu + 0.5);
  double mu = nu - nl;  // mu in [-1/2, 1/2]
  double kmu, kmu1;
  if (x <= 2.0)
    bessel_k_temme(mu, x, kmu, kmu1);
  else
    bessel_k_cf2(mu, x, kmu, kmu1);
  for (int i = 1; i <= nl; ++i) {  // upward recurrence, stable for K
    double knext = (mu + i) * (2.0 / x) * kmu1 + kmu;
    kmu = kmu1;
    kmu1 = knext;
  }
  return kmu;
}

namespace {

// QUADPACK dqk15 nodes/weights on [-1,1]
const double gk_nodes[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
const double gk_wk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
const double gk_wg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, integral, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

Segment gk15(const std::function<double(double)>& f, double a, double b) {
  double hl = 0.5 * (b - a);
  double mid = 0.5 * (a + b);
  double fc = f(mid);
  double resk = gk_wk[7] * fc;
  double resg = gk_wg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    double dx = hl * gk_nodes[j];
    double fsum = f(mid - dx) + f(mid + dx);
    resk += gk_wk[j] * fsum;
    if (j % 2 == 1) resg += gk_wg[j / 2] * fsum;
  }
  Segment s;
  s.a = a;
  s.b = b;
  s.integral = resk * hl;
  s.error = std::fabs((resk - resg) * hl);
  return s;
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureSpec& spec) {
  if (!std::isfinite(a)) throw std::domain_error("integrate: lower limit must be finite");
  std::function<double(double)> g = f;
  double lo = a, hi = b;
  if (std::isinf(b)) {  // t = a + u/(1-u), dt = du/(1-u)^2
    g = [&f, a](double u) {
      double w = 1.0 - u;
      return f(a + u / w) / (w * w);
    };
    lo = 0.0;
    hi = 1.0;
  } else if (b <= a) {
    if (b == a) return 0.0;
    throw std::domain_error("integrate: requires b > a");
  }

  std::priority_queue<Segment> heap;
  // a short initial split helps integrands with boundary layers
  const int n0 = 8;
  double total = 0.0, toterr = 0.0;
  for (int i = 0; i < n0; ++i) {
    Segment s = gk15(g, lo + (hi - lo) * i / n0, lo + (hi - lo) * (i + 1) / n0);
    total += s.integral;
    toterr += s.error;
    heap.push(s);
  }
  int splits = n0;
  while (toterr > std::max(spec.abs_tol, spec.rel_tol * std::fabs(total)) &&
         splits < spec.max_subdivisions) {
    Segment worst = heap.top();
    heap.pop();
    total -= worst.integral;
    toterr -= worst.error;
    double m = 0.5 * (worst.a + worst.b);
    for (Segment s : {gk15(g, worst.a, m), gk15(g, m, worst.b)}) {
      total += s.integral;
      toterr += s.error;
      heap.push(s);
    }
    ++splits;
  }
  if (toterr > std::max(spec.abs_tol, spec.rel_tol * std::fabs(total)))
    throw accuracy_error("integrate: tolerance not reached", total, toterr);
  return total;
}

}  // namespace infillgp
