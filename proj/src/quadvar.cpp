#include "infillgp/quadvar.hpp"

#include <cmath>
#include <numeric>

namespace infillgp {

int even_omega(int m, double gamma, int ell) {
  int w = static_cast<int>(std::floor(std::pow(static_cast<double>(m), gamma)));
  w -= w % 2;
  if (w < 2) w = 2;
  while (w > 2 && m - 2 * ell * w < 2) w -= 2;  // keep both index sets usable
  return w;
}

QvConfig default_qv_config(double nu, int d, int m) {
  QvConfig cfg;
  cfg.ell = static_cast<int>(std::ceil(nu + 0.5 * d));
  cfg.gamma_theta = 4.0 * nu / (4.0 * nu + d);
  cfg.gamma_tau = std::max(0.0, 1.0 - d / (4.0 * nu)) + 0.02;
  cfg.omega_theta = even_omega(m, cfg.gamma_theta, cfg.ell);
  cfg.omega_tau = even_omega(m, cfg.gamma_tau, cfg.ell);
  return cfg;
}

namespace {

/* Multi-degrees l with 0 <= l_1..l_{d-1} <= ell, 0 <= l_d <= ell-1, sum <= ell. */
std::vector<std::vector<int>> annihilation_degrees(int d, int ell) {
  std::vector<std::vector<int>> out;
  std::vector<int> l(d, 0);
  while (true) {
    int total = std::accumulate(l.begin(), l.end(), 0);
    if (total <= ell) out.push_back(l);
    int k = 0;
    while (k < d) {
      int cap = (k == d - 1) ? ell - 1 : ell;
      if (++l[k] <= cap) break;
      l[k] = 0;
      ++k;
    }
    if (k == d) break;
  }
  return out;
}

std::vector<std::vector<int>> offset_grid(int d, int ell) {  // k in {0..ell}^d, k_1 fastest
  std::vector<std::vector<int>> out;
  std::vector<int> k(d, 0);
  while (true) {
    out.push_back(k);
    int j = 0;
    while (j < d) {
      if (++k[j] <= ell) break;
      k[j] = 0;
      ++j;
    }
    if (j == d) break;
  }
  return out;
}

Eigen::VectorXd min_norm_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                               double rhs_scale) {
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(A);
  Eigen::VectorXd c = cod.solve(b);
  double residual = (A * c - b).norm();
  if (!(residual <= 1e-9 * rhs_scale))
    throw singular_design_error("solve_constants: moment system residual " +
                                std::to_string(residual) + " exceeds tolerance");
  return c;
}

Eigen::VectorXd solve_from_block(const Eigen::MatrixXd& block, int d, int ell,
                                 double rhs_value) {
  auto degrees = annihilation_degrees(d, ell);
  const auto K = block.rows();
  Eigen::MatrixXd A(degrees.size() + 1, K);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(degrees.size() + 1);
  for (size_t r = 0; r < degrees.size(); ++r)
    for (Eigen::Index k = 0; k < K; ++k) {
      double v = 1.0;
      for (int j = 0; j < d; ++j)
        for (int e = 0; e < degrees[r][j]; ++e) v *= block(k, j);
      A(r, k) = v;
    }
  for (Eigen::Index k = 0; k < K; ++k) {
    double v = 1.0;
    for (int e = 0; e < ell; ++e) v *= block(k, d - 1);
    A(degrees.size(), k) = v;
  }
  b(degrees.size()) = rhs_value;
  return min_norm_solve(A, b, rhs_value);
}

bool is_grid(const Design& design) {
  for (int k = 0; k < design.d; ++k)
    if ((design.delta.col(k).array() != design.delta(0, k)).any()) return false;
  return true;
}

}  // namespace

Eigen::VectorXd solve_constants(const Design& design, const std::vector<int>& i,
                                int ell, int omega) {
  const int d = design.d;
  auto offsets = offset_grid(d, ell);
  Eigen::MatrixXd block(offsets.size(), d);
  std::vector<int> mi(d);
  for (size_t k = 0; k < offsets.size(); ++k) {
    for (int j = 0; j < d; ++j) mi[j] = i[j] + offsets[k][j] * omega;
    Eigen::Index flat = design.flat_index(mi);  // throws if outside the design
    block.row(k) = design.points.row(flat);
  }
  // center on the k = 0 point: the moment system is translation-closed, and
  // centering keeps the rows well-conditioned
  Eigen::RowVectorXd origin = block.row(0);
  block.rowwise() -= origin;
  double rhs = std::tgamma(ell + 1.0) *
               std::pow(static_cast<double>(omega) / design.m, ell);
  return solve_from_block(block, d, ell, rhs);
}

Eigen::VectorXd limit_constants(int d, int ell) {
  auto offsets = offset_grid(d, ell);
  Eigen::MatrixXd block(offsets.size(), d);
  for (size_t k = 0; k < offsets.size(); ++k)
    for (int j = 0; j < d; ++j) block(k, j) = offsets[k][j];
  return solve_from_block(block, d, ell, std::tgamma(ell + 1.0));
}

double xi_star(double nu) {
  if (is_integer_order(nu)) {
    int nui = static_cast<int>(std::round(nu));
    double sgn = (nui % 2 == 0) ? -1.0 : 1.0;  // (-1)^{nu+1}
    return sgn / (std::pow(2.0, 2 * nui - 1) * std::tgamma(nui + 1.0) * std::tgamma(nui));
  }
  return -M_PI / (std::pow(2.0, 2.0 * nu) * std::tgamma(nu + 1.0) * std::tgamma(nu) *
                  std::sin(nu * M_PI));
}

double H_constant(int d, int ell, double nu) {
  Eigen::VectorXd c = limit_constants(d, ell);
  auto offsets = offset_grid(d, ell);
  bool integer_nu = is_integer_order(nu);
  double H = 0.0;
  for (size_t a = 0; a < offsets.size(); ++a)
    for (size_t b = 0; b < offsets.size(); ++b) {
      double r2 = 0.0;
      for (int j = 0; j < d; ++j) {
        double diff = offsets[a][j] - offsets[b][j];
        r2 += diff * diff;
      }
      if (r2 == 0.0) continue;  // G_nu(0) := 0 in both branches
      double t = std::sqrt(r2);
      double G = integer_nu ? std::pow(t, 2.0 * nu) * std::log(t) : std::pow(t, 2.0 * nu);
      H += c(a) * c(b) * G;
    }
  return H;
}

double g_normalizer(double nu, int d, int m, int ell, int omega) {
  auto xi1 = index_set(1, m, d, ell, omega);
  double card = static_cast<double>(xi1.members.size());
  return std::pow(static_cast<double>(omega) / m, 2.0 * nu) * card * xi_star(nu) *
         H_constant(d, ell, nu);
}

namespace {

struct ConstantsCache {
  const Design& design;
  int ell, omega;
  bool grid;
  Eigen::VectorXd shared;  // valid when grid

  ConstantsCache(const Design& dsg, int ell_, int omega_)
      : design(dsg), ell(ell_), omega(omega_), grid(is_grid(dsg)) {
    if (grid) shared = solve_constants(design, std::vector<int>(design.d, 1), ell, omega);
  }
  Eigen::VectorXd get(const std::vector<int>& i) const {
    return grid ? shared : solve_constants(design, i, ell, omega);
  }
};

double qv_impl(const Dataset& data, int u, const QvConfig& config, bool parallel) {
  const Design& design = data.design;
  int omega = (u == 1) ? config.omega_theta : config.omega_tau;
  auto xi = index_set(u, design.m, design.d, config.ell, omega);
  ConstantsCache cache(design, config.ell, omega);
  auto offsets = offset_grid(design.d, config.ell);
  const auto nmem = static_cast<Eigen::Index>(xi.members.size());
  std::vector<double> contrib(nmem);

  auto body = [&](Eigen::Index idx) {
    const auto& i = xi.members[idx];
    std::vector<int> i2 = i;
    i2[0] += u;
    Eigen::VectorXd c1 = cache.get(i);
    Eigen::VectorXd c2 = (u == 0) ? c1 : cache.get(i2);
    double d1 = 0.0, d2 = 0.0;
    std::vector<int> mi(design.d);
    for (size_t k = 0; k < offsets.size(); ++k) {
      for (int j = 0; j < design.d; ++j) mi[j] = i[j] + offsets[k][j] * omega;
      d1 += c1(k) * data.Y(design.flat_index(mi));
      mi[0] += u;
      d2 += c2(k) * data.Y(design.flat_index(mi));
    }
    contrib[idx] = d1 * d2;
  };

  if (parallel) {
#pragma omp parallel for schedule(static)
    for (Eigen::Index idx = 0; idx < nmem; ++idx) body(idx);
  } else {
    for (Eigen::Index idx = 0; idx < nmem; ++idx) body(idx);
  }
  double V = 0.0;
  for (Eigen::Index idx = 0; idx < nmem; ++idx) V += contrib[idx];  // fixed order
  return V;
}

}  // namespace

double quadratic_variation(const Dataset& data, int u, const QvConfig& config) {
  return qv_impl(data, u, config, true);
}

double quadratic_variation_serial(const Dataset& data, int u, const QvConfig& config) {
  return qv_impl(data, u, config, false);
}

QvEstimate estimate(const Dataset& data, double nu, const QvConfig& config) {
  const Design& design = data.design;
  QvEstimate est;
  est.config = config;
  est.V0 = quadratic_variation(data, 0, config);
  est.V1 = quadratic_variation(data, 1, config);

  auto xi0 = index_set(0, design.m, design.d, config.ell, config.omega_tau);
  ConstantsCache cache(design, config.ell, config.omega_tau);
  double cv0 = 0.0;
  for (const auto& i : xi0.members) cv0 += cache.get(i).squaredNorm();
  est.C_V0 = cv0;

  est.xi_star = xi_star(nu);
  est.H = H_constant(design.d, config.ell, nu);
  est.g = g_normalizer(nu, design.d, design.m, config.ell, config.omega_theta);

  est.tau_hat = est.V0 / est.C_V0;
  est.theta_hat = est.V1 / est.g;
  est.tau_negative = est.tau_hat < 0.0;
  est.theta_negative = est.theta_hat < 0.0;
  return est;
}

double expected_V(const CovarianceModel& model, double tau, const Eigen::VectorXd& beta,
                  const FeatureSpec& fspec, const Design& design, int u,
                  const QvConfig& config) {
  int omega = (u == 1) ? config.omega_theta : config.omega_tau;
  auto xi = index_set(u, design.m, design.d, config.ell, omega);
  ConstantsCache cache(design, config.ell, omega);
  auto offsets = offset_grid(design.d, config.ell);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(design.n());
  if (beta.size() > 0 && beta.cwiseAbs().maxCoeff() > 0.0)
    mean = features(fspec, design) * beta;

  const auto nmem = static_cast<Eigen::Index>(xi.members.size());
  std::vector<double> contrib(nmem);
#pragma omp parallel for schedule(static)
  for (Eigen::Index idx = 0; idx < nmem; ++idx) {
    const auto& i = xi.members[idx];
    std::vector<int> i2 = i;
    i2[0] += u;
    Eigen::VectorXd c1 = cache.get(i);
    Eigen::VectorXd c2 = (u == 0) ? c1 : cache.get(i2);
    std::vector<int> mi(design.d);
    std::vector<Eigen::Index> flat1(offsets.size()), flat2(offsets.size());
    for (size_t k = 0; k < offsets.size(); ++k) {
      for (int j = 0; j < design.d; ++j) mi[j] = i[j] + offsets[k][j] * omega;
      flat1[k] = design.flat_index(mi);
      mi[0] += u;
      flat2[k] = design.flat_index(mi);
    }
    double acc = 0.0;
    for (size_t k1 = 0; k1 < offsets.size(); ++k1)
      for (size_t k2 = 0; k2 < offsets.size(); ++k2) {
        Eigen::Index f1 = flat1[k1], f2 = flat2[k2];
        double term = mean(f1) * mean(f2);
        if (f1 == f2) term += tau;
        if (model.theta > 0.0) {
          double r = (design.points.row(f1) - design.points.row(f2)).norm();
          term += kernel_value_r(model, r);
        }
        acc += c1(k1) * c2(k2) * term;
      }
    contrib[idx] = acc;
  }
  double EV = 0.0;
  for (Eigen::Index idx = 0; idx < nmem; ++idx) EV += contrib[idx];
  return EV;
}

SieveSpec default_sieve(double nu, int d) {
  SieveSpec s;
  double D = 4.0 * nu + d;
  s.rho1 = 0.5 * d / D;
  s.rho21 = 0.5 * std::min(2.0 * nu / D, d / (8.0 * nu));
  s.rho22 = 0.25 * d / D;
  s.rho31 = 1.0;
  s.rho32 = 0.5 / D;
  return s;
}

bool sieve_contains(const SieveSpec& spec, Eigen::Index n, double theta, double alpha,
                    double tau, const Eigen::VectorXd& beta) {
  double nn = static_cast<double>(n);
  if (!(beta.squaredNorm() / theta <= std::pow(nn, spec.rho1))) return false;
  double ratio = tau / theta;
  if (!(ratio >= std::pow(nn, -spec.rho21) && ratio <= std::pow(nn, spec.rho22)))
    return false;
  return alpha >= std::pow(nn, -spec.rho31) && alpha <= std::pow(nn, spec.rho32);
}

void theoretical_rates(double nu, int d, double& b1, double& b2) {
  b1 = 1.0 / (2.0 * (4.0 * nu / d + 1.0));
  b2 = 0.5;
}

double rate_exponent_theta(double nu, int d, double gamma, const SieveSpec& rho,
                           double varsigma) {
  double ell = std::ceil(nu + 0.5 * d);
  double og = 1.0 - gamma;
  return std::min({0.5 - 2.0 * og * nu / d - rho.rho22, 0.5 * og - varsigma,
                   0.25 + og * (ell - 2.0 * nu) / d - 0.5 * (rho.rho1 + rho.rho22),
                   0.25 * og + og * (ell - nu) / d - 0.5 * rho.rho1 - varsigma});
}

double rate_exponent_tau(double nu, int d, double gamma, const SieveSpec& rho,
                         double varsigma) {
  double ell = std::ceil(nu + 0.5 * d);
  double og = 1.0 - gamma;
  return std::min({0.5, og * (4.0 * nu + d) / (2.0 * d) - rho.rho21 - varsigma,
                   0.25 + og * ell / d - 0.5 * (rho.rho1 + rho.rho21),
                   og * (4.0 * nu + d + 4.0 * ell) / (4.0 * d) -
                       0.5 * (rho.rho1 + 2.0 * rho.rho21) - varsigma});
}

}  // namespace infillgp
