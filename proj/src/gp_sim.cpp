#include "infillgp/gp_sim.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "infillgp/rng.hpp"

namespace infillgp {

Eigen::LLT<Eigen::MatrixXd> cholesky_with_jitter(const Eigen::MatrixXd& K,
                                                 double& jitter_used) {
  const double base = K.trace() / static_cast<double>(K.rows());
  jitter_used = 0.0;
  Eigen::LLT<Eigen::MatrixXd> llt(K);
  if (llt.info() == Eigen::Success) return llt;
  for (double scale = 1e-12; scale <= 1e-6 * 1.0000001; scale *= 10.0) {
    double jitter = scale * base;
    Eigen::MatrixXd Kj = K;
    Kj.diagonal().array() += jitter;
    llt.compute(Kj);
    if (llt.info() == Eigen::Success) {
      jitter_used = jitter;
      return llt;
    }
  }
  std::ostringstream msg;
  msg << "cholesky_with_jitter: factorization failed (n = " << K.rows()
      << ", trace/n = " << base << ", max jitter tried = " << 1e-6 * base << ")";
  throw numerical_error(msg.str());
}

namespace {

Dataset simulate_impl(const CovarianceModel& model, double tau, const Eigen::VectorXd& beta,
                      const Design& design, const FeatureSpec& fspec, std::uint64_t seed,
                      std::uint64_t replicate, const Eigen::MatrixXd* test_points,
                      Eigen::VectorXd* x_test_out) {
  if (tau < 0.0) throw std::invalid_argument("simulate: tau must be >= 0");
  const Eigen::Index n = design.n();
  const Eigen::Index nt = test_points ? test_points->rows() : 0;

  Dataset data;
  data.design = design;
  data.feature_spec = fspec;
  data.F = features(fspec, design);
  if (data.F.cols() != beta.size())
    throw std::invalid_argument("simulate: beta length does not match feature count");

  Eigen::VectorXd x_all = Eigen::VectorXd::Zero(n + nt);
  if (model.theta > 0.0) {
    model.validate(design.d);
    Eigen::MatrixXd all_points(n + nt, design.d);
    all_points.topRows(n) = design.points;
    if (nt > 0) all_points.bottomRows(nt) = *test_points;
    Eigen::MatrixXd K = covariance_matrix(model, all_points, 0.0);
    Eigen::LLT<Eigen::MatrixXd> llt = cholesky_with_jitter(K, data.jitter_used);
    CounterRng rng(seed, replicate, /*stream=*/0);
    Eigen::VectorXd z(n + nt);
    for (Eigen::Index i = 0; i < n + nt; ++i) z(i) = rng.next_gaussian();
    x_all = llt.matrixL() * z;
  }

  CounterRng eps_rng(seed, replicate, /*stream=*/1);
  Eigen::VectorXd eps(n);
  for (Eigen::Index i = 0; i < n; ++i)
    eps(i) = (tau > 0.0) ? std::sqrt(tau) * eps_rng.next_gaussian() : 0.0;

  data.Y = data.F * beta + x_all.head(n) + eps;
  data.beta_true = beta;
  data.X_true = x_all.head(n);
  data.model_true = model;
  data.tau_true = tau;
  if (x_test_out) *x_test_out = x_all.tail(nt);
  return data;
}

}  // namespace

Dataset simulate(const CovarianceModel& model, double tau, const Eigen::VectorXd& beta,
                 const Design& design, const FeatureSpec& fspec, std::uint64_t seed,
                 std::uint64_t replicate) {
  return simulate_impl(model, tau, beta, design, fspec, seed, replicate, nullptr, nullptr);
}

Dataset simulate_with_test(const CovarianceModel& model, double tau,
                           const Eigen::VectorXd& beta, const Design& design,
                           const FeatureSpec& fspec, const Eigen::MatrixXd& test_points,
                           std::uint64_t seed, std::uint64_t replicate,
                           Eigen::VectorXd& x_test_out) {
  return simulate_impl(model, tau, beta, design, fspec, seed, replicate, &test_points,
                       &x_test_out);
}

void save_dataset(const Dataset& data, const std::string& csv_path,
                  const std::string& json_path) {
  std::ofstream csv(csv_path);
  if (!csv) throw std::runtime_error("cannot open " + csv_path);
  csv.precision(17);
  const int d = data.design.d;
  const Eigen::Index p = data.F.cols();
  for (int k = 0; k < d; ++k) csv << "i" << (k + 1) << ",";
  for (int k = 0; k < d; ++k) csv << "s" << (k + 1) << ",";
  for (Eigen::Index j = 0; j < p; ++j) csv << "f" << (j + 1) << ",";
  csv << "y";
  if (data.X_true) csv << ",x_true";
  csv << "\n";
  for (Eigen::Index i = 0; i < data.design.n(); ++i) {
    auto mi = data.design.multi_index(i);
    for (int k = 0; k < d; ++k) csv << mi[k] << ",";
    for (int k = 0; k < d; ++k) csv << data.design.points(i, k) << ",";
    for (Eigen::Index j = 0; j < p; ++j) csv << data.F(i, j) << ",";
    csv << data.Y(i);
    if (data.X_true) csv << "," << (*data.X_true)(i);
    csv << "\n";
  }

  nlohmann::json meta;
  meta["m"] = data.design.m;
  meta["d"] = d;
  meta["feature_degree"] = data.feature_spec.degree;
  meta["jitter_used"] = data.jitter_used;
  if (data.model_true) {
    const auto& mo = *data.model_true;
    meta["model"] = {{"family", family_name(mo.family)}, {"theta", mo.theta},
                     {"alpha", mo.alpha},                {"nu", mo.nu},
                     {"mu", mo.mu}};
    if (mo.taper)
      meta["model"]["taper"] = {{"kind", "spherical"}, {"range", mo.taper->range}};
  }
  if (data.tau_true) meta["tau"] = *data.tau_true;
  if (data.beta_true) {
    std::vector<double> b((*data.beta_true).data(),
                          (*data.beta_true).data() + data.beta_true->size());
    meta["beta"] = b;
  }
  std::ofstream js(json_path);
  if (!js) throw std::runtime_error("cannot open " + json_path);
  js << meta.dump(2) << "\n";
}

Dataset load_dataset(const std::string& csv_path, const std::string& json_path) {
  std::ifstream js(json_path);
  if (!js) throw std::runtime_error("cannot open " + json_path);
  nlohmann::json meta = nlohmann::json::parse(js);
  int m = meta.at("m").get<int>();
  int d = meta.at("d").get<int>();

  Dataset data;
  data.design.m = m;
  data.design.d = d;
  data.feature_spec.degree = meta.at("feature_degree").get<int>();
  data.jitter_used = meta.value("jitter_used", 0.0);
  if (meta.contains("model")) {
    CovarianceModel mo;
    const auto& jm = meta["model"];
    mo.family = family_from_name(jm.at("family").get<std::string>());
    mo.theta = jm.at("theta").get<double>();
    mo.alpha = jm.at("alpha").get<double>();
    mo.nu = jm.at("nu").get<double>();
    mo.mu = jm.value("mu", 0.0);
    if (jm.contains("taper")) {
      TaperDescriptor tp;
      tp.range = jm["taper"].at("range").get<double>();
      mo.taper = tp;
    }
    data.model_true = mo;
  }
  if (meta.contains("tau")) data.tau_true = meta["tau"].get<double>();
  if (meta.contains("beta")) {
    auto b = meta["beta"].get<std::vector<double>>();
    data.beta_true = Eigen::Map<Eigen::VectorXd>(b.data(), b.size());
  }

  std::ifstream csv(csv_path);
  if (!csv) throw std::runtime_error("cannot open " + csv_path);
  std::string header;
  std::getline(csv, header);
  bool has_x = header.find("x_true") != std::string::npos;
  Eigen::Index n = 1;
  for (int k = 0; k < d; ++k) n *= m;
  int p = data.feature_spec.feature_count(d);
  data.design.points.resize(n, d);
  data.design.delta.resize(n, d);
  data.F.resize(n, p);
  data.Y.resize(n);
  Eigen::VectorXd x(n);
  std::string line;
  Eigen::Index row = 0;
  while (std::getline(csv, line)) {
    if (line.empty()) continue;
    if (row >= n) throw std::runtime_error("dataset CSV has more rows than m^d");
    std::stringstream ss(line);
    std::string tok;
    std::vector<double> vals;
    while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
    size_t expected = d + d + p + 1 + (has_x ? 1 : 0);
    if (vals.size() != expected)
      throw std::runtime_error("dataset CSV column count mismatch");
    std::vector<int> mi(d);
    for (int k = 0; k < d; ++k) mi[k] = static_cast<int>(vals[k]);
    Eigen::Index flat = data.design.flat_index(mi);
    for (int k = 0; k < d; ++k) {
      data.design.points(flat, k) = vals[d + k];
      data.design.delta(flat, k) = vals[d + k] * m - (mi[k] - 1);
    }
    for (int j = 0; j < p; ++j) data.F(flat, j) = vals[2 * d + j];
    data.Y(flat) = vals[2 * d + p];
    if (has_x) x(flat) = vals[2 * d + p + 1];
    ++row;
  }
  if (row != n) throw std::runtime_error("dataset CSV has fewer rows than m^d");
  if (has_x) data.X_true = x;
  return data;
}

}  // namespace infillgp
