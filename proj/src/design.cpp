#include "infillgp/design.hpp"

#include <fstream>
#include <functional>

#include "infillgp/rng.hpp"

namespace infillgp {

Eigen::Index Design::flat_index(const std::vector<int>& mi) const {
  Eigen::Index flat = 0, stride = 1;
  for (int k = 0; k < d; ++k) {
    if (mi[k] < 1 || mi[k] > m) throw std::out_of_range("multi-index out of range");
    flat += (mi[k] - 1) * stride;
    stride *= m;
  }
  return flat;
}

std::vector<int> Design::multi_index(Eigen::Index flat) const {
  std::vector<int> mi(d);
  for (int k = 0; k < d; ++k) {
    mi[k] = static_cast<int>(flat % m) + 1;
    flat /= m;
  }
  return mi;
}

namespace {

Design build_design(int m, int d, const std::function<double(Eigen::Index, int)>& delta_fn) {
  if (m < 2) throw std::invalid_argument("design: m >= 2 required");
  if (d < 1) throw std::invalid_argument("design: d >= 1 required");
  Design design;
  design.d = d;
  design.m = m;
  Eigen::Index n = 1;
  for (int k = 0; k < d; ++k) n *= m;
  design.points.resize(n, d);
  design.delta.resize(n, d);
  for (Eigen::Index flat = 0; flat < n; ++flat) {
    auto mi = design.multi_index(flat);
    for (int k = 0; k < d; ++k) {
      double del = delta_fn(flat, k);
      design.delta(flat, k) = del;
      design.points(flat, k) = (mi[k] - 1 + del) / m;
    }
  }
  return design;
}

}  // namespace

Design grid_design(int m, int d, double offset) {
  if (offset < 0.0 || offset >= 1.0)
    throw std::invalid_argument("grid_design: offset must be in [0,1)");
  return build_design(m, d, [offset](Eigen::Index, int) { return offset; });
}

Design stratified_design(int m, int d, std::uint64_t seed) {
  CounterRng rng(seed, 0, /*stream=*/100);
  Eigen::Index n = 1;
  for (int k = 0; k < d; ++k) n *= m;
  Eigen::MatrixXd del(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (int k = 0; k < d; ++k) del(i, k) = rng.next_uniform();
  return build_design(m, d, [&del](Eigen::Index i, int k) { return del(i, k); });
}

std::vector<std::vector<int>> FeatureSpec::exponents(int d) const {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(d, 0);
  // within a total degree, enumerate with the first coordinate's exponent descending
  std::function<void(int, int)> rec = [&](int pos, int remaining) {
    if (pos == d - 1) {
      cur[pos] = remaining;
      out.push_back(cur);
      return;
    }
    for (int e = remaining; e >= 0; --e) {
      cur[pos] = e;
      rec(pos + 1, remaining - e);
    }
  };
  for (int q = 0; q <= degree; ++q) rec(0, q);
  return out;
}

int FeatureSpec::feature_count(int d) const {
  return static_cast<int>(exponents(d).size());
}

Eigen::VectorXd feature_vector(const FeatureSpec& spec, const Eigen::VectorXd& s) {
  auto exps = spec.exponents(static_cast<int>(s.size()));
  Eigen::VectorXd f(exps.size());
  for (size_t j = 0; j < exps.size(); ++j) {
    double v = 1.0;
    for (int k = 0; k < s.size(); ++k)
      for (int e = 0; e < exps[j][k]; ++e) v *= s(k);
    f(j) = v;
  }
  return f;
}

Eigen::MatrixXd features(const FeatureSpec& spec, const Design& design) {
  auto exps = spec.exponents(design.d);
  Eigen::MatrixXd F(design.n(), exps.size());
  for (Eigen::Index i = 0; i < design.n(); ++i)
    F.row(i) = feature_vector(spec, design.points.row(i).transpose()).transpose();
  return F;
}

IndexSet index_set(int u, int m, int d, int ell, int omega) {
  if (u != 0 && u != 1) throw std::invalid_argument("index_set: u must be 0 or 1");
  if (omega < 2 || omega % 2 != 0)
    throw std::invalid_argument("index_set: omega must be even and >= 2");
  if (ell < 1) throw std::invalid_argument("index_set: ell >= 1 required");
  int hi = m - 2 * ell * omega;  // all of i_1+u, i_1, ..., i_d must lie in [1, hi]
  int hi1 = hi - u;
  if (hi < 1 || hi1 < 1)
    throw estimation_infeasible("index_set: empty (m too small for ell*omega)");
  IndexSet set;
  set.u = u;
  std::vector<int> mi(d, 1);
  while (true) {
    if (mi[0] <= hi1) set.members.push_back(mi);
    int k = 0;
    while (k < d) {
      if (++mi[k] <= hi) break;
      mi[k] = 1;
      ++k;
    }
    if (k == d) break;
  }
  return set;
}

void save_design_csv(const Design& design, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  for (int k = 0; k < design.d; ++k) out << "i" << (k + 1) << ",";
  for (int k = 0; k < design.d; ++k) out << "s" << (k + 1) << (k + 1 < design.d ? "," : "\n");
  out.precision(17);
  for (Eigen::Index i = 0; i < design.n(); ++i) {
    auto mi = design.multi_index(i);
    for (int k = 0; k < design.d; ++k) out << mi[k] << ",";
    for (int k = 0; k < design.d; ++k)
      out << design.points(i, k) << (k + 1 < design.d ? "," : "\n");
  }
}

}  // namespace infillgp
