#include <omp.h>

#include <cstdio>
#include <cstdlib>

#include "infillgp/covariance.hpp"
#include "infillgp/gp_sim.hpp"
#include "infillgp/quadvar.hpp"

using namespace infillgp;

namespace {

double checksum_abs(const Eigen::MatrixXd& M) { return M.array().abs().sum(); }

}  // namespace

int main(int argc, char** argv) {
  int m = (argc > 1) ? std::atoi(argv[1]) : 40;  // d = 2 -> n = m^2
  int reps = (argc > 2) ? std::atoi(argv[2]) : 3;

  CovarianceModel model;
  model.family = Family::Matern;
  model.theta = 1.0;
  model.alpha = 5.0;
  model.nu = 1.5;

  Design design = grid_design(m, 2, 0.5);
  std::printf("n = %ld points, %d repetitions, max threads %d\n",
              static_cast<long>(design.n()), reps, omp_get_max_threads());

  double t0 = omp_get_wtime(), cs = 0.0;
  for (int r = 0; r < reps; ++r)
    cs += checksum_abs(covariance_matrix(model, design.points, 0.1));
  double t_par = (omp_get_wtime() - t0) / reps;

  t0 = omp_get_wtime();
  double cs_ser = 0.0;
  for (int r = 0; r < reps; ++r)
    cs_ser += checksum_abs(covariance_matrix_serial(model, design.points, 0.1));
  double t_ser = (omp_get_wtime() - t0) / reps;

  std::printf("covariance_matrix   parallel %8.3f ms   serial %8.3f ms   speedup %.2fx"
              "   checksum drift %.3e\n",
              1e3 * t_par, 1e3 * t_ser, t_ser / t_par, std::abs(cs - cs_ser));

  Dataset data = simulate(model, 0.1, Eigen::VectorXd::Ones(1), design, FeatureSpec{0},
                          /*seed=*/7);
  QvConfig qv = default_qv_config(model.nu, 2, m);

  t0 = omp_get_wtime();
  double v_par = 0.0;
  for (int r = 0; r < reps; ++r) v_par = quadratic_variation(data, 1, qv);
  t_par = (omp_get_wtime() - t0) / reps;

  t0 = omp_get_wtime();
  double v_ser = 0.0;
  for (int r = 0; r < reps; ++r) v_ser = quadratic_variation_serial(data, 1, qv);
  t_ser = (omp_get_wtime() - t0) / reps;

  std::printf("quadratic_variation parallel %8.3f ms   serial %8.3f ms   speedup %.2fx"
              "   value drift %.3e\n",
              1e3 * t_par, 1e3 * t_ser, t_ser / t_par, std::abs(v_par - v_ser));
  return 0;
}
