#ifndef INFILLGP_EXPERIMENT_HPP
#define INFILLGP_EXPERIMENT_HPP

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "infillgp/analysis.hpp"
#include "infillgp/inference.hpp"
#include "infillgp/quadvar.hpp"

namespace infillgp {

struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/* One simulation-study configuration (JSON schema 1). */
struct ExperimentConfig {
  CovarianceModel model;  // truth; theta = 0 allowed for pure-noise studies
  double tau = 0.5;
  Eigen::VectorXd beta;
  int feature_degree = 0;

  std::string design_kind = "grid";  // grid | stratified
  int d = 1;
  double offset = 0.5;
  std::vector<int> schedule;  // m per experiment size

  int replicates = 1;
  std::uint64_t seed = 0;
  int n_test = 0;

  PriorSpec priors;
  McmcConfig mcmc;

  // optional quadratic-variation overrides (defaults derived from nu, d, m)
  std::optional<int> qv_ell;
  std::optional<double> qv_gamma_theta, qv_gamma_tau;

  std::string out_dir = "out";
};

ExperimentConfig parse_config(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig load_config(const std::string& path);

QvConfig qv_config_for(const ExperimentConfig& cfg, int m);
Design make_design(const ExperimentConfig& cfg, int m, int replicate);

/* Pipeline stages; each writes CSV/JSON files under cfg.out_dir. */
void run_simulate(const ExperimentConfig& cfg);
void run_estimate(const ExperimentConfig& cfg);
void run_mcmc_stage(const ExperimentConfig& cfg);
void run_predict(const ExperimentConfig& cfg);
void run_rates(const ExperimentConfig& cfg);

struct IngestSpec {
  std::string csv_path;
  std::string col_s1 = "s1", col_s2 = "s2", col_value = "y";
  int stride = 1;
};
struct ingestion_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/* Gridded-CSV ingestion: rows must form a complete rectangular grid after
 * stride subsampling; coordinates mapped affinely to [0,1]^2, features
 * (1, s1, s2).  Writes Dataset files under out_dir. */
Dataset ingest_grid_csv(const IngestSpec& spec);
IngestSpec load_ingest_spec(const std::string& path, std::string& out_dir);
void run_ingest(const IngestSpec& spec, const std::string& out_dir);

}  // namespace infillgp

#endif
