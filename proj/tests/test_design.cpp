#include <doctest.h>

#include <set>

#include "infillgp/design.hpp"

using namespace infillgp;

TEST_CASE("grid design point formula") {
  Design g = grid_design(5, 1, 0.5);
  CHECK(g.n() == 5);
  for (int i = 0; i < 5; ++i) CHECK(g.points(i, 0) == doctest::Approx((i + 0.5) / 5.0));
  CHECK(g.delta.minCoeff() == doctest::Approx(0.5));
  CHECK(g.delta.maxCoeff() == doctest::Approx(0.5));

  Design g2 = grid_design(4, 2, 0.25);
  CHECK(g2.n() == 16);
  // flat order: i_1 fastest
  CHECK(g2.points(0, 0) == doctest::Approx(0.25 / 4.0));
  CHECK(g2.points(1, 0) == doctest::Approx(1.25 / 4.0));
  CHECK(g2.points(1, 1) == doctest::Approx(0.25 / 4.0));
  CHECK(g2.points(4, 1) == doctest::Approx(1.25 / 4.0));
}

TEST_CASE("multi-index addressing round trips") {
  Design g = grid_design(6, 3, 0.5);
  for (Eigen::Index flat = 0; flat < g.n(); ++flat) {
    auto mi = g.multi_index(flat);
    CHECK(mi.size() == 3);
    for (int k = 0; k < 3; ++k) {
      CHECK(mi[k] >= 1);
      CHECK(mi[k] <= 6);
    }
    CHECK(g.flat_index(mi) == flat);
  }
}

TEST_CASE("stratified design stays in its cells and is seeded") {
  Design s1 = stratified_design(8, 2, 99);
  Design s2 = stratified_design(8, 2, 99);
  Design s3 = stratified_design(8, 2, 100);
  CHECK((s1.points - s2.points).cwiseAbs().maxCoeff() == 0.0);
  CHECK((s1.points - s3.points).cwiseAbs().maxCoeff() > 0.0);
  for (Eigen::Index i = 0; i < s1.n(); ++i) {
    auto mi = s1.multi_index(i);
    for (int k = 0; k < 2; ++k) {
      double lo = (mi[k] - 1) / 8.0, hi = mi[k] / 8.0;
      CHECK(s1.points(i, k) >= lo);
      CHECK(s1.points(i, k) < hi);
      CHECK(s1.delta(i, k) >= 0.0);
      CHECK(s1.delta(i, k) < 1.0);
    }
  }
}

TEST_CASE("design density improves when m doubles") {
  // max over a probe lattice of the min distance to the design shrinks
  for (int d : {1, 2}) {
    double prev = 1e9;
    for (int m : {5, 10, 20}) {
      Design g = stratified_design(m, d, 7);
      int probes = (d == 1) ? 100 : 100;  // 100^d lattice capped for d = 2
      double worst = 0.0;
      std::vector<int> idx(d, 0);
      int total = 1;
      for (int k = 0; k < d; ++k) total *= probes;
      for (int t = 0; t < total; ++t) {
        int rem = t;
        Eigen::VectorXd p(d);
        for (int k = 0; k < d; ++k) {
          p(k) = (rem % probes + 0.5) / probes;
          rem /= probes;
        }
        double best = 1e9;
        for (Eigen::Index i = 0; i < g.n(); ++i)
          best = std::min(best, (g.points.row(i).transpose() - p).norm());
        worst = std::max(worst, best);
      }
      CHECK(worst < prev);
      prev = worst;
    }
  }
}

TEST_CASE("polynomial feature ordering, d = 2, degree 2") {
  FeatureSpec spec{2};
  CHECK(spec.feature_count(2) == 6);
  auto e = spec.exponents(2);
  // 1, s1, s2, s1^2, s1 s2, s2^2
  std::vector<std::vector<int>> expect = {{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}};
  CHECK(e == expect);

  Eigen::VectorXd s(2);
  s << 2.0, 3.0;
  Eigen::VectorXd f = feature_vector(spec, s);
  CHECK(f(0) == 1.0);
  CHECK(f(1) == 2.0);
  CHECK(f(2) == 3.0);
  CHECK(f(3) == 4.0);
  CHECK(f(4) == 6.0);
  CHECK(f(5) == 9.0);
}

TEST_CASE("feature counts follow the binomial formula") {
  for (int d : {1, 2, 3})
    for (int q : {0, 1, 2, 3}) {
      FeatureSpec spec{q};
      int expect = 1;  // C(d + q, q)
      for (int i = 1; i <= q; ++i) expect = expect * (d + i) / i;
      CHECK(spec.feature_count(d) == expect);
      CHECK(static_cast<int>(spec.exponents(d).size()) == expect);
    }
}

TEST_CASE("features matrix rows are per-point feature vectors") {
  Design g = grid_design(3, 2, 0.5);
  FeatureSpec spec{1};
  Eigen::MatrixXd F = features(spec, g);
  CHECK(F.rows() == 9);
  CHECK(F.cols() == 3);
  for (Eigen::Index i = 0; i < 9; ++i) {
    CHECK(F(i, 0) == 1.0);
    CHECK(F(i, 1) == doctest::Approx(g.points(i, 0)));
    CHECK(F(i, 2) == doctest::Approx(g.points(i, 1)));
  }
}

TEST_CASE("index set sizes and membership") {
  // Xi_{u,m} = {i : 1 <= i_1 + u, i_1..i_d <= m - 2 ell omega}
  int m = 20, ell = 1, omega = 4;
  int hi = m - 2 * ell * omega;  // 12
  IndexSet xi0 = index_set(0, m, 1, ell, omega);
  IndexSet xi1 = index_set(1, m, 1, ell, omega);
  CHECK(static_cast<int>(xi0.members.size()) == hi);
  CHECK(static_cast<int>(xi1.members.size()) == hi - 1);
  for (const auto& mi : xi1.members) CHECK(mi[0] + 1 <= hi);

  IndexSet xi2 = index_set(1, 20, 2, 1, 4);
  CHECK(static_cast<int>(xi2.members.size()) == hi * (hi - 1));
}

TEST_CASE("index set coverage fraction grows toward one") {
  double prev = 0.0;
  for (int m : {50, 100, 200, 400}) {
    int omega = std::max(2, static_cast<int>(std::pow(m, 0.5)) & ~1);
    IndexSet xi = index_set(1, m, 1, 1, omega);
    double frac = static_cast<double>(xi.members.size()) / m;
    CHECK(frac > prev);
    prev = frac;
  }
  CHECK(prev > 0.8);
}

TEST_CASE("infeasible differencing window throws") {
  CHECK_THROWS_AS(index_set(1, 6, 1, 2, 2), estimation_infeasible);  // m - 2*2*2 < 1
}
