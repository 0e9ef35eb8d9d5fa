#include <CLI11.hpp>
#include <omp.h>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "infillgp/experiment.hpp"
#include "infillgp/gp_sim.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitNumerical = 4;

struct CommonOpts {
  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

void add_common(CLI::App* sub, CommonOpts& opts) {
  sub->add_option("--config", opts.config_path, "experiment config (JSON)")->required();
  sub->add_option("--out", opts.out_dir, "output directory (overrides config)");
  sub->add_option("--seed", opts.seed, "RNG seed (overrides config)");
  sub->add_option("--threads", opts.threads, "OpenMP thread count");
}

infillgp::ExperimentConfig load(const CommonOpts& opts) {
  if (opts.threads) omp_set_num_threads(*opts.threads);
  infillgp::ExperimentConfig cfg = infillgp::load_config(opts.config_path);
  if (opts.out_dir) cfg.out_dir = *opts.out_dir;
  if (opts.seed) cfg.seed = *opts.seed;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian-process simulation, estimation, and prediction on [0,1]^d"};
  app.require_subcommand(1);

  CommonOpts sim_o, est_o, mcmc_o, pred_o, rates_o;
  CLI::App* sim = app.add_subcommand("simulate", "draw datasets for each design size");
  add_common(sim, sim_o);
  CLI::App* est = app.add_subcommand("estimate", "quadratic-variation estimates");
  add_common(est, est_o);
  CLI::App* mcmc = app.add_subcommand("mcmc", "posterior sampling per dataset");
  add_common(mcmc, mcmc_o);
  CLI::App* pred = app.add_subcommand("predict", "posterior-averaged predictive MSE");
  add_common(pred, pred_o);
  CLI::App* rates = app.add_subcommand("rates", "error-rate regression and barycenters");
  add_common(rates, rates_o);

  std::string ingest_config;
  std::optional<std::string> ingest_out;
  std::optional<int> ingest_threads;
  CLI::App* ingest = app.add_subcommand("ingest", "load a gridded CSV as a dataset");
  ingest->add_option("--config", ingest_config, "ingestion config (JSON)")->required();
  ingest->add_option("--out", ingest_out, "output directory (overrides config)");
  ingest->add_option("--threads", ingest_threads, "OpenMP thread count");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) infillgp::run_simulate(load(sim_o));
    if (est->parsed()) infillgp::run_estimate(load(est_o));
    if (mcmc->parsed()) infillgp::run_mcmc_stage(load(mcmc_o));
    if (pred->parsed()) infillgp::run_predict(load(pred_o));
    if (rates->parsed()) infillgp::run_rates(load(rates_o));
    if (ingest->parsed()) {
      if (ingest_threads) omp_set_num_threads(*ingest_threads);
      std::string out_dir;
      infillgp::IngestSpec spec = infillgp::load_ingest_spec(ingest_config, out_dir);
      if (ingest_out) out_dir = *ingest_out;
      infillgp::run_ingest(spec, out_dir);
    }
  } catch (const infillgp::config_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const infillgp::ingestion_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const infillgp::estimation_infeasible& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const infillgp::singular_design_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const infillgp::numerical_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const infillgp::mixing_failure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
