#include "infillgp/experiment.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "infillgp/prediction.hpp"
#include "infillgp/rng.hpp"

namespace fs = std::filesystem;

namespace infillgp {

namespace {

std::uint64_t replicate_id(int m, int r) {
  return static_cast<std::uint64_t>(r) * 100000ull + static_cast<std::uint64_t>(m);
}

std::string tag(int m, int r) {
  return "m" + std::to_string(m) + "_r" + std::to_string(r);
}

}  // namespace

ExperimentConfig parse_config(const nlohmann::json& j) {
  try {
    if (j.value("schema", 0) != 1)
      throw config_error("config: expected \"schema\": 1");
    ExperimentConfig cfg;
    const auto& t = j.at("truth");
    cfg.model.family = family_from_name(t.value("family", std::string("matern")));
    cfg.model.theta = t.at("theta").get<double>();
    cfg.model.alpha = t.at("alpha").get<double>();
    cfg.model.nu = t.at("nu").get<double>();
    cfg.model.mu = t.value("mu", 0.0);
    if (t.contains("taper")) {
      TaperDescriptor tp;
      tp.range = t["taper"].at("range").get<double>();
      cfg.model.taper = tp;
    }
    cfg.tau = t.at("tau").get<double>();
    auto b = t.at("beta").get<std::vector<double>>();
    cfg.beta = Eigen::Map<Eigen::VectorXd>(b.data(), b.size());
    cfg.feature_degree = t.at("feature_degree").get<int>();

    const auto& ds = j.at("design");
    cfg.design_kind = ds.value("kind", std::string("grid"));
    if (cfg.design_kind != "grid" && cfg.design_kind != "stratified")
      throw config_error("config: design.kind must be grid or stratified");
    cfg.d = ds.at("d").get<int>();
    cfg.offset = ds.value("offset", 0.5);
    cfg.schedule = ds.at("schedule").get<std::vector<int>>();
    if (cfg.schedule.empty()) throw config_error("config: empty design.schedule");

    cfg.replicates = j.value("replicates", 1);
    if (cfg.replicates < 1) throw config_error("config: replicates >= 1 required");
    cfg.seed = j.value("seed", 0ull);
    cfg.n_test = j.value("n_test", 0);

    if (j.contains("priors")) {
      const auto& p = j["priors"];
      cfg.priors.a0 = p.value("a0", 1e6);
      cfg.priors.a1 = p.value("a1", 0.1);
      cfg.priors.b1 = p.value("b1", 0.1);
      cfg.priors.a2 = p.value("a2", 0.1);
      cfg.priors.b2 = p.value("b2", 0.1);
      cfg.priors.mu_ig = p.value("mu", 1.0);
      cfg.priors.lambda_ig = p.value("lambda", 1.0);
    }
    if (j.contains("mcmc")) {
      const auto& mc = j["mcmc"];
      cfg.mcmc.n_samples = mc.value("n_samples", 2000);
      cfg.mcmc.n_burnin = mc.value("n_burnin", 1000);
      if (mc.contains("step")) {
        auto st = mc["step"].get<std::vector<double>>();
        if (st.size() != 3) throw config_error("config: mcmc.step needs 3 entries");
        cfg.mcmc.step = {st[0], st[1], st[2]};
      }
      cfg.mcmc.adapt = mc.value("adapt", true);
      cfg.mcmc.target_accept = mc.value("target_accept", 0.3);
    }
    if (j.contains("qv")) {
      const auto& q = j["qv"];
      if (q.contains("ell") && !q["ell"].is_null()) cfg.qv_ell = q["ell"].get<int>();
      if (q.contains("gamma_theta") && !q["gamma_theta"].is_null())
        cfg.qv_gamma_theta = q["gamma_theta"].get<double>();
      if (q.contains("gamma_tau") && !q["gamma_tau"].is_null())
        cfg.qv_gamma_tau = q["gamma_tau"].get<double>();
    }
    cfg.out_dir = j.value("out", std::string("out"));
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("config: ") + e.what());
  }
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["schema"] = 1;
  j["truth"] = {{"family", family_name(cfg.model.family)},
                {"theta", cfg.model.theta},
                {"alpha", cfg.model.alpha},
                {"nu", cfg.model.nu},
                {"mu", cfg.model.mu},
                {"tau", cfg.tau},
                {"beta", std::vector<double>(cfg.beta.data(), cfg.beta.data() + cfg.beta.size())},
                {"feature_degree", cfg.feature_degree}};
  if (cfg.model.taper)
    j["truth"]["taper"] = {{"kind", "spherical"}, {"range", cfg.model.taper->range}};
  j["design"] = {{"kind", cfg.design_kind}, {"d", cfg.d}, {"offset", cfg.offset},
                 {"schedule", cfg.schedule}};
  j["replicates"] = cfg.replicates;
  j["seed"] = cfg.seed;
  j["n_test"] = cfg.n_test;
  j["priors"] = {{"a0", cfg.priors.a0}, {"a1", cfg.priors.a1}, {"b1", cfg.priors.b1},
                 {"a2", cfg.priors.a2}, {"b2", cfg.priors.b2},
                 {"mu", cfg.priors.mu_ig}, {"lambda", cfg.priors.lambda_ig}};
  j["mcmc"] = {{"n_samples", cfg.mcmc.n_samples}, {"n_burnin", cfg.mcmc.n_burnin},
               {"step", std::vector<double>(cfg.mcmc.step.begin(), cfg.mcmc.step.end())},
               {"adapt", cfg.mcmc.adapt}, {"target_accept", cfg.mcmc.target_accept}};
  nlohmann::json q;
  if (cfg.qv_ell) q["ell"] = *cfg.qv_ell;
  if (cfg.qv_gamma_theta) q["gamma_theta"] = *cfg.qv_gamma_theta;
  if (cfg.qv_gamma_tau) q["gamma_tau"] = *cfg.qv_gamma_tau;
  if (!q.is_null()) j["qv"] = q;
  j["out"] = cfg.out_dir;
  return j;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("config: cannot open " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("config: parse failure: ") + e.what());
  }
  return parse_config(j);
}

QvConfig qv_config_for(const ExperimentConfig& cfg, int m) {
  QvConfig qv = default_qv_config(cfg.model.nu, cfg.d, m);
  if (cfg.qv_ell) qv.ell = *cfg.qv_ell;
  if (cfg.qv_gamma_theta) qv.gamma_theta = *cfg.qv_gamma_theta;
  if (cfg.qv_gamma_tau) qv.gamma_tau = *cfg.qv_gamma_tau;
  if (cfg.qv_ell || cfg.qv_gamma_theta)
    qv.omega_theta = even_omega(m, qv.gamma_theta, qv.ell);
  if (cfg.qv_ell || cfg.qv_gamma_tau)
    qv.omega_tau = even_omega(m, qv.gamma_tau, qv.ell);
  return qv;
}

Design make_design(const ExperimentConfig& cfg, int m, int replicate) {
  if (cfg.design_kind == "grid") return grid_design(m, cfg.d, cfg.offset);
  return stratified_design(m, cfg.d, cfg.seed ^ replicate_id(m, replicate));
}

namespace {

Eigen::MatrixXd test_locations(const ExperimentConfig& cfg, int m, int r) {
  CounterRng rng(cfg.seed, replicate_id(m, r), /*stream=*/3);
  Eigen::MatrixXd pts(cfg.n_test, cfg.d);
  for (int i = 0; i < cfg.n_test; ++i)
    for (int k = 0; k < cfg.d; ++k) pts(i, k) = rng.next_uniform();
  return pts;
}

void save_test_truth(const std::string& path, const Eigen::MatrixXd& pts,
                     const Eigen::VectorXd& x) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out.precision(17);
  for (int k = 0; k < pts.cols(); ++k) out << "s" << (k + 1) << ",";
  out << "x_true\n";
  for (Eigen::Index i = 0; i < pts.rows(); ++i) {
    for (int k = 0; k < pts.cols(); ++k) out << pts(i, k) << ",";
    out << x(i) << "\n";
  }
}

void load_test_truth(const std::string& path, int d, Eigen::MatrixXd& pts,
                     Eigen::VectorXd& x) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  std::getline(in, line);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    std::vector<double> vals;
    while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
    rows.push_back(vals);
  }
  pts.resize(rows.size(), d);
  x.resize(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    for (int k = 0; k < d; ++k) pts(i, k) = rows[i][k];
    x(i) = rows[i][d];
  }
}

}  // namespace

void run_simulate(const ExperimentConfig& cfg) {
  fs::create_directories(fs::path(cfg.out_dir) / "data");
  FeatureSpec fspec{cfg.feature_degree};
  for (int m : cfg.schedule) {
    for (int r = 0; r < cfg.replicates; ++r) {
      Design design = make_design(cfg, m, r);
      Dataset data;
      std::string base = (fs::path(cfg.out_dir) / "data" / tag(m, r)).string();
      if (cfg.n_test > 0) {
        Eigen::MatrixXd pts = test_locations(cfg, m, r);
        Eigen::VectorXd x_test;
        data = simulate_with_test(cfg.model, cfg.tau, cfg.beta, design, fspec, pts,
                                  cfg.seed, replicate_id(m, r), x_test);
        save_test_truth(base + "_test.csv", pts, x_test);
      } else {
        data = simulate(cfg.model, cfg.tau, cfg.beta, design, fspec, cfg.seed,
                        replicate_id(m, r));
      }
      save_dataset(data, base + ".csv", base + ".json");
    }
  }
}

void run_estimate(const ExperimentConfig& cfg) {
  fs::create_directories(fs::path(cfg.out_dir) / "qv");
  for (int m : cfg.schedule) {
    QvConfig qv = qv_config_for(cfg, m);
    for (int r = 0; r < cfg.replicates; ++r) {
      std::string base = (fs::path(cfg.out_dir) / "data" / tag(m, r)).string();
      Dataset data = load_dataset(base + ".csv", base + ".json");
      QvEstimate est = estimate(data, cfg.model.nu, qv);
      nlohmann::json j = {{"m", m},
                          {"replicate", r},
                          {"theta_hat", est.theta_hat},
                          {"tau_hat", est.tau_hat},
                          {"V0", est.V0},
                          {"V1", est.V1},
                          {"C_V0", est.C_V0},
                          {"g", est.g},
                          {"H", est.H},
                          {"xi_star", est.xi_star},
                          {"theta_negative", est.theta_negative},
                          {"tau_negative", est.tau_negative},
                          {"ell", qv.ell},
                          {"omega_theta", qv.omega_theta},
                          {"omega_tau", qv.omega_tau}};
      std::ofstream out((fs::path(cfg.out_dir) / "qv" / (tag(m, r) + ".json")).string());
      out << j.dump(2) << "\n";
    }
  }
}

void run_mcmc_stage(const ExperimentConfig& cfg) {
  fs::create_directories(fs::path(cfg.out_dir) / "chains");
  for (int m : cfg.schedule) {
    for (int r = 0; r < cfg.replicates; ++r) {
      std::string base = (fs::path(cfg.out_dir) / "data" / tag(m, r)).string();
      Dataset data = load_dataset(base + ".csv", base + ".json");
      McmcConfig mc = cfg.mcmc;
      mc.seed = cfg.seed;
      mc.replicate = replicate_id(m, r);
      PosteriorChain chain = run_mcmc(data, cfg.model, cfg.priors, mc);
      save_chain_csv(chain,
                     (fs::path(cfg.out_dir) / "chains" / (tag(m, r) + ".csv")).string());
    }
  }
}

namespace {

Eigen::MatrixXd load_chain_draws(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  std::getline(in, line);
  std::vector<std::array<double, 3>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    std::vector<double> vals;
    while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
    rows.push_back({vals[1], vals[2], vals[3]});
  }
  Eigen::MatrixXd draws(rows.size(), 3);
  for (size_t i = 0; i < rows.size(); ++i)
    for (int k = 0; k < 3; ++k) draws(i, k) = rows[i][k];
  return draws;
}

Eigen::MatrixXd thin_draws(const Eigen::MatrixXd& draws, int max_draws) {
  if (draws.rows() <= max_draws) return draws;
  Eigen::MatrixXd out(max_draws, draws.cols());
  for (int i = 0; i < max_draws; ++i) {
    Eigen::Index idx = static_cast<Eigen::Index>(
        (static_cast<double>(i) + 0.5) / max_draws * draws.rows());
    out.row(i) = draws.row(idx);
  }
  return out;
}

}  // namespace

void run_predict(const ExperimentConfig& cfg) {
  if (cfg.n_test <= 0) throw config_error("predict: config needs n_test > 0");
  fs::create_directories(fs::path(cfg.out_dir) / "predict");
  std::ofstream summary((fs::path(cfg.out_dir) / "predict" / "summary.csv").string());
  summary.precision(17);
  summary << "m,n,replicate,mean_post,mean_oracle,mean_ratio\n";
  for (int m : cfg.schedule) {
    for (int r = 0; r < cfg.replicates; ++r) {
      std::string base = (fs::path(cfg.out_dir) / "data" / tag(m, r)).string();
      Dataset data = load_dataset(base + ".csv", base + ".json");
      Eigen::MatrixXd pts;
      Eigen::VectorXd x_test;
      load_test_truth(base + "_test.csv", cfg.d, pts, x_test);
      Eigen::MatrixXd draws = thin_draws(
          load_chain_draws(
              (fs::path(cfg.out_dir) / "chains" / (tag(m, r) + ".csv")).string()),
          200);
      MseRatioResult res = mse_ratio(data, draws, pts, x_test, cfg.priors.a0);
      summary << m << "," << data.design.n() << "," << r << "," << res.mean_post << ","
              << res.mean_oracle << "," << res.mean_ratio << "\n";
    }
  }
}

void run_rates(const ExperimentConfig& cfg) {
  fs::create_directories(fs::path(cfg.out_dir) / "rates");
  std::ofstream errs((fs::path(cfg.out_dir) / "rates" / "errors.csv").string());
  errs.precision(17);
  errs << "m,n,abs_err_theta,abs_err_tau,rel_err_theta,rel_err_tau\n";
  std::vector<double> ns, e_theta, e_tau;
  std::ofstream bary_t((fs::path(cfg.out_dir) / "rates" / "barycenter_theta.csv").string());
  std::ofstream bary_n((fs::path(cfg.out_dir) / "rates" / "barycenter_tau.csv").string());
  bary_t.precision(17);
  bary_n.precision(17);
  bary_t << "m,quantile_index,theta\n";
  bary_n << "m,quantile_index,tau\n";

  for (int m : cfg.schedule) {
    double sum_rel_t = 0.0, sum_rel_n = 0.0, sum_abs_t = 0.0, sum_abs_n = 0.0;
    double n_pts = 0.0;
    std::vector<std::vector<double>> theta_sets, tau_sets;
    for (int r = 0; r < cfg.replicates; ++r) {
      Eigen::MatrixXd draws = load_chain_draws(
          (fs::path(cfg.out_dir) / "chains" / (tag(m, r) + ".csv")).string());
      double rt = 0, rn = 0, at = 0, an = 0;
      for (Eigen::Index i = 0; i < draws.rows(); ++i) {
        at += std::fabs(draws(i, 0) - cfg.model.theta);
        an += std::fabs(draws(i, 2) - cfg.tau);
        rt += std::fabs(draws(i, 0) / cfg.model.theta - 1.0);
        rn += std::fabs(draws(i, 2) / cfg.tau - 1.0);
      }
      sum_abs_t += at / draws.rows();
      sum_abs_n += an / draws.rows();
      sum_rel_t += rt / draws.rows();
      sum_rel_n += rn / draws.rows();
      n_pts = std::pow(static_cast<double>(m), cfg.d);
      theta_sets.emplace_back(draws.col(0).data(), draws.col(0).data() + draws.rows());
      tau_sets.emplace_back(draws.col(2).data(), draws.col(2).data() + draws.rows());
    }
    double mt = sum_rel_t / cfg.replicates, mn = sum_rel_n / cfg.replicates;
    errs << m << "," << n_pts << "," << sum_abs_t / cfg.replicates << ","
         << sum_abs_n / cfg.replicates << "," << mt << "," << mn << "\n";
    ns.push_back(n_pts);
    e_theta.push_back(mt);
    e_tau.push_back(mn);
    auto bt = w2_barycenter(theta_sets);
    auto bn = w2_barycenter(tau_sets);
    for (size_t q = 0; q < bt.size(); ++q) bary_t << m << "," << q << "," << bt[q] << "\n";
    for (size_t q = 0; q < bn.size(); ++q) bary_n << m << "," << q << "," << bn[q] << "\n";
  }

  std::ofstream fit((fs::path(cfg.out_dir) / "rates" / "fit.csv").string());
  fit.precision(17);
  fit << "parameter,slope,stderr_slope,intercept,theory_slope\n";
  double b1, b2;
  theoretical_rates(cfg.model.nu, cfg.d, b1, b2);
  if (ns.size() >= 3) {
    RateFit ft = rate_regression(ns, e_theta);
    RateFit fn = rate_regression(ns, e_tau);
    fit << "theta," << ft.slope << "," << ft.stderr_slope << "," << ft.intercept << ","
        << -b1 << "\n";
    fit << "tau," << fn.slope << "," << fn.stderr_slope << "," << fn.intercept << ","
        << -b2 << "\n";
  }
}

Dataset ingest_grid_csv(const IngestSpec& spec) {
  std::ifstream in(spec.csv_path);
  if (!in) throw ingestion_error("ingest: cannot open " + spec.csv_path);
  std::string line;
  if (!std::getline(in, line)) throw ingestion_error("ingest: empty CSV");
  std::vector<std::string> cols;
  {
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) cols.push_back(tok);
  }
  auto col_of = [&](const std::string& name) {
    for (size_t i = 0; i < cols.size(); ++i)
      if (cols[i] == name) return static_cast<int>(i);
    throw ingestion_error("ingest: missing column " + name);
  };
  int c1 = col_of(spec.col_s1), c2 = col_of(spec.col_s2), cv = col_of(spec.col_value);

  std::map<std::pair<double, double>, double> cells;
  std::set<double> axis1, axis2;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    std::vector<std::string> vals;
    while (std::getline(ss, tok, ',')) vals.push_back(tok);
    double s1 = std::stod(vals[c1]), s2 = std::stod(vals[c2]);
    axis1.insert(s1);
    axis2.insert(s2);
    cells[{s1, s2}] = std::stod(vals[cv]);
  }
  std::vector<double> a1(axis1.begin(), axis1.end()), a2(axis2.begin(), axis2.end());
  // stride subsampling along each axis
  std::vector<double> g1, g2;
  for (size_t i = 0; i < a1.size(); i += spec.stride) g1.push_back(a1[i]);
  for (size_t i = 0; i < a2.size(); i += spec.stride) g2.push_back(a2[i]);
  if (g1.size() != g2.size())
    throw ingestion_error("ingest: grid is not square (" + std::to_string(g1.size()) +
                          " x " + std::to_string(g2.size()) + " after stride)");
  int m = static_cast<int>(g1.size());
  if (m < 2) throw ingestion_error("ingest: grid too small after stride");

  Design design;
  design.d = 2;
  design.m = m;
  design.points.resize(static_cast<Eigen::Index>(m) * m, 2);
  design.delta.setZero(static_cast<Eigen::Index>(m) * m, 2);
  Eigen::VectorXd Y(static_cast<Eigen::Index>(m) * m);
  // axis ranks -> cell midpoints (i + 1/2)/m, the grid-design convention
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) {
      auto it = cells.find({g1[i], g2[j]});
      if (it == cells.end()) {
        std::ostringstream msg;
        msg << "ingest: missing grid cell (" << spec.col_s1 << " = " << g1[i] << ", "
            << spec.col_s2 << " = " << g2[j] << ")";
        throw ingestion_error(msg.str());
      }
      Eigen::Index flat = design.flat_index({i + 1, j + 1});
      design.points(flat, 0) = (i + 0.5) / m;
      design.points(flat, 1) = (j + 0.5) / m;
      design.delta(flat, 0) = 0.5;
      design.delta(flat, 1) = 0.5;
      Y(flat) = it->second;
    }

  Dataset data;
  data.design = design;
  data.feature_spec = FeatureSpec{1};  // (1, s1, s2)
  data.F = features(data.feature_spec, design);
  data.Y = Y;
  return data;
}

IngestSpec load_ingest_spec(const std::string& path, std::string& out_dir) {
  std::ifstream in(path);
  if (!in) throw config_error("config: cannot open " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("config: parse failure: ") + e.what());
  }
  try {
    if (j.value("schema", 0) != 1) throw config_error("config: expected \"schema\": 1");
    IngestSpec spec;
    spec.csv_path = j.at("csv").get<std::string>();
    spec.col_s1 = j.value("col_s1", std::string("s1"));
    spec.col_s2 = j.value("col_s2", std::string("s2"));
    spec.col_value = j.value("col_value", std::string("y"));
    spec.stride = j.value("stride", 1);
    if (spec.stride < 1) throw config_error("config: stride >= 1 required");
    out_dir = j.value("out", std::string("out"));
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("config: ") + e.what());
  }
}

void run_ingest(const IngestSpec& spec, const std::string& out_dir) {
  Dataset data = ingest_grid_csv(spec);
  fs::create_directories(fs::path(out_dir) / "data");
  std::string base = (fs::path(out_dir) / "data" / "ingested").string();
  save_dataset(data, base + ".csv", base + ".json");
}

}  // namespace infillgp
