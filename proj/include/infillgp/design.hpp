#ifndef INFILLGP_DESIGN_HPP
#define INFILLGP_DESIGN_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace infillgp {

/* Estimation is impossible for this (m, ell, omega) combination. */
struct estimation_infeasible : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/* Stratified design on [0,1]^d: s_k(i) = (i_k - 1)/m + delta_{i;k}/m with
 * multi-index 1 <= i_k <= m.  Flat storage order: i_1 fastest. */
struct Design {
  int d = 1;
  int m = 2;
  Eigen::MatrixXd points;  // n x d, n = m^d
  Eigen::MatrixXd delta;   // n x d, entries in [0,1)

  Eigen::Index n() const { return points.rows(); }
  Eigen::Index flat_index(const std::vector<int>& mi) const;
  std::vector<int> multi_index(Eigen::Index flat) const;
};

Design grid_design(int m, int d, double offset);
Design stratified_design(int m, int d, std::uint64_t seed);

/* Polynomial features of total degree <= q in graded lexicographic order:
 * degree ascending, within a degree the exponent of s_1 descending
 * (d = 2, q = 2 gives 1, s1, s2, s1^2, s1 s2, s2^2). */
struct FeatureSpec {
  int degree = 0;
  int feature_count(int d) const;
  std::vector<std::vector<int>> exponents(int d) const;
};

Eigen::VectorXd feature_vector(const FeatureSpec& spec, const Eigen::VectorXd& s);
Eigen::MatrixXd features(const FeatureSpec& spec, const Design& design);

/* Xi_{u,m} = {i : 1 <= i_1 + u, i_1, ..., i_d <= m - 2 ell omega}. */
struct IndexSet {
  int u = 0;
  std::vector<std::vector<int>> members;
};

IndexSet index_set(int u, int m, int d, int ell, int omega);

void save_design_csv(const Design& design, const std::string& path);

}  // namespace infillgp

#endif
