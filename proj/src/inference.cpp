#include "infillgp/inference.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "infillgp/quadvar.hpp"
#include "infillgp/rng.hpp"

namespace infillgp {

LikelihoodContext::LikelihoodContext(const Dataset& data)
    : dist(pairwise_distances(data.design.points)),
      F(data.F),
      Y(data.Y),
      d(data.design.d) {}

namespace {

Eigen::LLT<Eigen::MatrixXd> factor_sigma(const CovarianceModel& model, double tau,
                                         const Eigen::MatrixXd& dist) {
  Eigen::MatrixXd Sigma = covariance_matrix_from_distances(model, dist, tau);
  Eigen::LLT<Eigen::MatrixXd> llt(Sigma);
  if (llt.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "likelihood: Cholesky failed at theta = " << model.theta
        << ", alpha = " << model.alpha << ", tau = " << tau
        << " (n = " << dist.rows() << ", trace/n = " << Sigma.trace() / dist.rows() << ")";
    throw numerical_error(msg.str());
  }
  return llt;
}

double half_log_det(const Eigen::LLT<Eigen::MatrixXd>& llt) {
  return llt.matrixLLT().diagonal().array().log().sum();
}

}  // namespace

double log_likelihood(const CovarianceModel& model, double tau,
                      const Eigen::VectorXd& beta, const LikelihoodContext& ctx) {
  model.validate(ctx.d);
  auto llt = factor_sigma(model, tau, ctx.dist);
  Eigen::VectorXd r = ctx.Y - ctx.F * beta;
  Eigen::VectorXd v = llt.matrixL().solve(r);
  return -0.5 * v.squaredNorm() - half_log_det(llt);
}

double log_likelihood(const CovarianceModel& model, double tau,
                      const Eigen::VectorXd& beta, const Dataset& data) {
  return log_likelihood(model, tau, beta, LikelihoodContext(data));
}

double marginal_log_likelihood(const CovarianceModel& model, double tau,
                               const LikelihoodContext& ctx, double a0) {
  model.validate(ctx.d);
  auto llt = factor_sigma(model, tau, ctx.dist);
  Eigen::MatrixXd W = llt.matrixL().solve(ctx.F);       // L^-1 F
  Eigen::VectorXd z = llt.matrixL().solve(ctx.Y);       // L^-1 Y
  const auto p = ctx.F.cols();
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(p, p) + a0 * W.transpose() * W;
  Eigen::LLT<Eigen::MatrixXd> lltA(A);
  Eigen::VectorXd w = W.transpose() * z;
  double quad = z.squaredNorm() - a0 * w.dot(lltA.solve(w));
  double logdet = 2.0 * half_log_det(llt) + 2.0 * half_log_det(lltA);
  return -0.5 * quad - 0.5 * logdet;
}

double marginal_log_likelihood(const CovarianceModel& model, double tau,
                               const Dataset& data, double a0) {
  return marginal_log_likelihood(model, tau, LikelihoodContext(data), a0);
}

void beta_conditional_posterior(const CovarianceModel& model, double tau,
                                const Dataset& data, double a0, Eigen::VectorXd& mean,
                                Eigen::MatrixXd& cov) {
  LikelihoodContext ctx(data);
  model.validate(ctx.d);
  auto llt = factor_sigma(model, tau, ctx.dist);
  Eigen::MatrixXd W = llt.matrixL().solve(ctx.F);
  Eigen::VectorXd z = llt.matrixL().solve(ctx.Y);
  const auto p = ctx.F.cols();
  Eigen::MatrixXd prec =
      W.transpose() * W + Eigen::MatrixXd::Identity(p, p) / a0;
  Eigen::LLT<Eigen::MatrixXd> lltP(prec);
  mean = lltP.solve(W.transpose() * z);
  cov = lltP.solve(Eigen::MatrixXd::Identity(p, p));
}

namespace {

double log_inverse_gamma(double x, double a, double b) {
  return a * std::log(b) - std::lgamma(a) - (a + 1.0) * std::log(x) - b / x;
}

double log_inverse_gaussian(double x, double mu, double lambda) {
  return 0.5 * std::log(lambda / (2.0 * M_PI * x * x * x)) -
         lambda * (x - mu) * (x - mu) / (2.0 * mu * mu * x);
}

}  // namespace

double log_prior(double theta, double alpha, double tau, const PriorSpec& priors) {
  return log_inverse_gamma(theta, priors.a1, priors.b1) +
         log_inverse_gamma(tau, priors.a2, priors.b2) +
         log_inverse_gaussian(alpha, priors.mu_ig, priors.lambda_ig);
}

PosteriorChain run_mcmc(const Dataset& data, const CovarianceModel& base_model,
                        const PriorSpec& priors, const McmcConfig& config) {
  LikelihoodContext ctx(data);
  const int d = data.design.d;
  const double nu = base_model.nu;

  // warm start at the quadratic-variation estimates (fall back to crude
  // moments when a raw estimate comes out nonpositive)
  double theta0 = 1.0, tau0 = 1.0;
  {
    double var_y = (ctx.Y.array() - ctx.Y.mean()).square().sum() /
                   std::max<double>(1, ctx.Y.size() - 1);
    try {
      QvConfig qv = default_qv_config(nu, d, data.design.m);
      QvEstimate est = estimate(data, nu, qv);
      theta0 = (est.theta_hat > 0 && std::isfinite(est.theta_hat)) ? est.theta_hat
                                                                   : 0.5 * var_y;
      tau0 = (est.tau_hat > 0 && std::isfinite(est.tau_hat)) ? est.tau_hat
                                                             : 0.5 * var_y;
    } catch (const estimation_infeasible&) {
      theta0 = 0.5 * var_y;
      tau0 = 0.5 * var_y;
    }
    if (!(theta0 > 0) || !std::isfinite(theta0)) theta0 = 1.0;
    if (!(tau0 > 0) || !std::isfinite(tau0)) tau0 = 1.0;
  }
  double alpha0 = config.fixed_alpha.value_or(priors.mu_ig);

  auto log_target = [&](double theta, double alpha, double tau) {
    double lp = log_prior(theta, alpha, tau, priors);
    if (!std::isfinite(lp)) return -std::numeric_limits<double>::infinity();
    double ll = 0.0;
    if (!config.prior_only) {
      CovarianceModel m = base_model;
      m.theta = theta;
      m.alpha = alpha;
      ll = marginal_log_likelihood(m, tau, ctx, priors.a0);
    }
    // Jacobian of the log-coordinate walk
    return ll + lp + std::log(theta) + std::log(alpha) + std::log(tau);
  };

  Eigen::Vector3d x(std::log(theta0), std::log(alpha0), std::log(tau0));
  double cur = log_target(std::exp(x(0)), std::exp(x(1)), std::exp(x(2)));
  if (!std::isfinite(cur))
    throw numerical_error("run_mcmc: target not finite at the initial point");

  CounterRng rng(config.seed, config.replicate, /*stream=*/2);
  PosteriorChain chain;
  chain.config = config;
  chain.draws.resize(config.n_samples, 4);
  chain.accepted.resize(config.n_samples);

  std::array<double, 3> step = config.step;
  double log_scale = 0.0;
  int total_accept = 0, burnin_accept = 0;
  const int total_iters = config.n_burnin + config.n_samples;
  const bool move_alpha = !config.fixed_alpha.has_value();

  for (int t = 0; t < total_iters; ++t) {
    Eigen::Vector3d prop = x;
    double scale = std::exp(log_scale);
    prop(0) += scale * step[0] * rng.next_gaussian();
    if (move_alpha) prop(1) += scale * step[1] * rng.next_gaussian();
    prop(2) += scale * step[2] * rng.next_gaussian();
    double cand;
    try {
      cand = log_target(std::exp(prop(0)), std::exp(prop(1)), std::exp(prop(2)));
    } catch (const numerical_error&) {
      cand = -std::numeric_limits<double>::infinity();  // reject unfactorizable
    }
    bool accept = std::log(1.0 - rng.next_uniform() + 1e-300) < cand - cur;
    if (accept) {
      x = prop;
      cur = cand;
    }
    bool burnin = t < config.n_burnin;
    if (burnin) {
      if (accept) ++burnin_accept;
      if (config.adapt)  // Robbins-Monro on the shared log-scale
        log_scale += ((accept ? 1.0 : 0.0) - config.target_accept) /
                     std::pow(t + 1.0, 0.6);
    } else {
      int s = t - config.n_burnin;
      if (accept) ++total_accept;
      chain.draws(s, 0) = std::exp(x(0));
      chain.draws(s, 1) = std::exp(x(1));
      chain.draws(s, 2) = std::exp(x(2));
      chain.draws(s, 3) = cur;
      chain.accepted[s] = accept ? 1 : 0;
    }
  }
  if (config.n_burnin >= 50 && burnin_accept == 0) {
    std::ostringstream msg;
    msg << "run_mcmc: zero acceptances over " << config.n_burnin
        << " burn-in iterations (initial point (" << theta0 << ", " << alpha0 << ", "
        << tau0 << "), final scale " << std::exp(log_scale) << ")";
    throw mixing_failure(msg.str());
  }
  chain.acceptance_rate = static_cast<double>(total_accept) / config.n_samples;
  return chain;
}

void save_chain_csv(const PosteriorChain& chain, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out.precision(17);
  out << "iteration,theta,alpha,tau,log_post,accepted\n";
  for (Eigen::Index i = 0; i < chain.draws.rows(); ++i)
    out << i << "," << chain.draws(i, 0) << "," << chain.draws(i, 1) << ","
        << chain.draws(i, 2) << "," << chain.draws(i, 3) << ","
        << static_cast<int>(chain.accepted[i]) << "\n";
}

}  // namespace infillgp
