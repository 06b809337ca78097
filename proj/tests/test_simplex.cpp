#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <limits>
#include <optional>
#include <random>

#include "probinc/simplex.hpp"

using namespace probinc;

namespace {

// Minimum of c.x over all basic feasible solutions of A x = b, x >= 0,
// found by trying every column basis. Assumes A has full row rank.
std::optional<double> vertex_minimum(const Eigen::MatrixXd& A,
                                     const Eigen::VectorXd& b,
                                     const Eigen::VectorXd& c) {
  const int m = static_cast<int>(A.rows());
  const int n = static_cast<int>(A.cols());
  std::optional<double> best;
  std::vector<int> pick(static_cast<std::size_t>(m));
  auto visit = [&](auto&& self, int pos, int from) -> void {
    if (pos == m) {
      Eigen::MatrixXd B(m, m);
      for (int k = 0; k < m; ++k) B.col(k) = A.col(pick[static_cast<std::size_t>(k)]);
      Eigen::FullPivLU<Eigen::MatrixXd> lu(B);
      if (lu.rank() < m) return;
      const Eigen::VectorXd xb = lu.solve(b);
      if (xb.minCoeff() < -1e-12) return;
      double v = 0.0;
      for (int k = 0; k < m; ++k) v += c[pick[static_cast<std::size_t>(k)]] * xb[k];
      if (!best || v < *best) best = v;
      return;
    }
    for (int j = from; j < n; ++j) {
      pick[static_cast<std::size_t>(pos)] = j;
      self(self, pos + 1, j + 1);
    }
  };
  visit(visit, 0, 0);
  return best;
}

}  // namespace

TEST_CASE("small textbook program") {
  // min -x1 - 2 x2  s.t.  x1 + x2 + s1 = 4,  x2 + s2 = 3.
  LinearProgram<double> lp;
  lp.A.resize(2, 4);
  lp.A << 1, 1, 1, 0, 0, 1, 0, 1;
  lp.b = Eigen::Vector2d(4, 3);
  lp.c = Eigen::Vector4d(-1, -2, 0, 0);
  const auto s = solve_lp(lp);
  REQUIRE(s.status == LpStatus::kOptimal);
  CHECK(s.objective == doctest::Approx(-7.0));
  CHECK(s.x[0] == doctest::Approx(1.0));
  CHECK(s.x[1] == doctest::Approx(3.0));
}

TEST_CASE("infeasible and unbounded programs") {
  LinearProgram<double> lp;
  lp.A.resize(2, 2);
  lp.A << 1, 1, 1, 1;
  lp.b = Eigen::Vector2d(1, 2);
  CHECK(solve_lp(lp).status == LpStatus::kInfeasible);
  CHECK(solve_lp(lp).infeasibility > 1e-3);

  LinearProgram<double> open;
  open.A.resize(1, 2);
  open.A << 1, -1;
  open.b = Eigen::VectorXd::Constant(1, 1.0);
  open.c = Eigen::Vector2d(-1, 0);
  CHECK(solve_lp(open).status == LpStatus::kUnbounded);
}

TEST_CASE("redundant equality rows") {
  LinearProgram<double> lp;
  lp.A.resize(3, 3);
  lp.A << 1, 1, 1, 2, 2, 2, 1, 0, 0;
  lp.b = Eigen::Vector3d(1, 2, 0.25);
  lp.c = Eigen::Vector3d(0, 1, 0);
  const auto s = solve_lp(lp);
  REQUIRE(s.status == LpStatus::kOptimal);
  CHECK(s.objective == doctest::Approx(0.0));
  CHECK((lp.A * s.x - lp.b).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("random programs match vertex enumeration") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> pos(0.0, 1.0);
  int optimal = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int m = 1 + trial % 3;
    const int n = m + 2 + trial % 4;
    LinearProgram<double> lp;
    lp.A = Eigen::MatrixXd::NullaryExpr(m, n, [&] { return u(rng); });
    // Feasible by construction, bounded via a sum row.
    Eigen::VectorXd x0 = Eigen::VectorXd::NullaryExpr(n, [&] { return pos(rng); });
    lp.A.row(0).setOnes();
    x0 /= x0.sum();
    lp.b = lp.A * x0;
    lp.c = Eigen::VectorXd::NullaryExpr(n, [&] { return u(rng); });
    const auto s = solve_lp(lp);
    const auto oracle = vertex_minimum(lp.A, lp.b, lp.c);
    REQUIRE(oracle.has_value());
    REQUIRE(s.status == LpStatus::kOptimal);
    CHECK(s.objective == doctest::Approx(*oracle).epsilon(1e-9));
    CHECK(s.x.minCoeff() >= -1e-12);
    CHECK((lp.A * s.x - lp.b).cwiseAbs().maxCoeff() < 1e-9);
    ++optimal;
  }
  CHECK(optimal == 200);
}

TEST_CASE("long double instantiation agrees with double") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    LinearProgram<double> lp;
    lp.A = Eigen::MatrixXd::NullaryExpr(2, 6, [&] { return u(rng); });
    lp.A.row(0).setOnes();
    Eigen::VectorXd x0 = Eigen::VectorXd::Constant(6, 1.0 / 6.0);
    lp.b = lp.A * x0;
    lp.c = Eigen::VectorXd::NullaryExpr(6, [&] { return u(rng); });
    LinearProgram<long double> wide{lp.A.cast<long double>(),
                                    lp.b.cast<long double>(),
                                    lp.c.cast<long double>()};
    const auto a = solve_lp(lp);
    const auto b = solve_lp(wide);
    REQUIRE(a.status == LpStatus::kOptimal);
    REQUIRE(b.status == LpStatus::kOptimal);
    CHECK(a.objective == doctest::Approx(static_cast<double>(b.objective)).epsilon(1e-10));
  }
}
