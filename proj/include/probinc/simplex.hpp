#pragma once

// Dense two-phase primal simplex for  min c'x  s.t.  A x = b,  x >= 0.
//
// Pivoting is deterministic: Dantzig's rule (most negative reduced cost,
// lowest index on ties), switching to Bland's rule after a run of degenerate
// pivots so the method cannot cycle. Ratio-test ties go to the lowest basic
// variable index.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include <Eigen/Dense>

namespace probinc {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
struct LinearProgram {
  MatrixX<Scalar> A;
  VectorX<Scalar> b;
  /// Empty cost vector means "feasibility only" (phase one).
  VectorX<Scalar> c;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

template <typename Scalar>
struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  VectorX<Scalar> x;
  Scalar objective = 0;
  /// Phase-one optimum: sum of artificial variables.
  Scalar infeasibility = 0;
  int pivots = 0;
};

template <typename Scalar>
struct SimplexOptions {
  Scalar pivot_tolerance = Scalar(1e-11);
  Scalar cost_tolerance = Scalar(1e-11);
  /// Phase one declares feasibility when the artificial sum is at most this.
  Scalar feasibility_tolerance = Scalar(1e-8);
  int max_pivots = 0;  // 0: 50 * (rows + cols) + 1000
  int degenerate_streak = 50;
};

template <typename Scalar>
class SimplexSolver {
 public:
  explicit SimplexSolver(SimplexOptions<Scalar> options = {})
      : options_(options) {}

  LpSolution<Scalar> solve(const LinearProgram<Scalar>& lp) {
    const Eigen::Index m = lp.A.rows();
    const Eigen::Index n = lp.A.cols();
    rows_ = m;
    cols_ = n;
    LpSolution<Scalar> out;
    max_pivots_ = options_.max_pivots > 0
                      ? options_.max_pivots
                      : static_cast<int>(50 * (m + n) + 1000);
    pivots_ = 0;

    // [ A | I | b ] with one objective row at the bottom.
    tableau_ = MatrixX<Scalar>::Zero(m + 1, n + m + 1);
    tableau_.topLeftCorner(m, n) = lp.A;
    tableau_.block(0, n, m, m).setIdentity();
    tableau_.col(n + m).head(m) = lp.b;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (tableau_(i, n + m) < 0) {
        tableau_.row(i).head(n) *= Scalar(-1);
        tableau_(i, n + m) = -tableau_(i, n + m);
      }
    }
    basis_.resize(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) {
      basis_[static_cast<std::size_t>(i)] = n + i;
    }
    active_.assign(static_cast<std::size_t>(m), true);

    // Phase one: minimise the artificial sum.
    tableau_.row(m).setZero();
    for (Eigen::Index i = 0; i < m; ++i) {
      tableau_.row(m).head(n) -= tableau_.row(i).head(n);
      tableau_(m, n + m) -= tableau_(i, n + m);
    }
    const LpStatus p1 = iterate(n + m, Scalar(1));
    out.infeasibility = -tableau_(m, n + m);
    out.pivots = pivots_;
    if (p1 == LpStatus::kIterationLimit) {
      out.status = p1;
      out.x = extract(n);
      return out;
    }
    if (out.infeasibility > options_.feasibility_tolerance) {
      out.status = LpStatus::kInfeasible;
      out.x = extract(n);
      return out;
    }
    drive_out_artificials(n);

    if (lp.c.size() == 0) {
      out.status = LpStatus::kOptimal;
      out.x = extract(n);
      out.pivots = pivots_;
      return out;
    }

    // Phase two over the structural columns only.
    const Scalar scale = std::max(Scalar(1), lp.c.cwiseAbs().maxCoeff());
    tableau_.row(m).setZero();
    tableau_.row(m).head(n) = lp.c.transpose();
    for (Eigen::Index i = 0; i < m; ++i) {
      if (!active_[static_cast<std::size_t>(i)]) continue;
      const Eigen::Index bv = basis_[static_cast<std::size_t>(i)];
      if (bv < n && lp.c[bv] != Scalar(0)) {
        tableau_.row(m) -= lp.c[bv] * tableau_.row(i);
      }
    }
    const LpStatus p2 = iterate(n, scale);
    out.status = p2;
    out.x = extract(n);
    out.objective = lp.c.dot(out.x);
    out.pivots = pivots_;
    return out;
  }

 private:
  LpStatus iterate(Eigen::Index entering_limit, Scalar cost_scale) {
    const Eigen::Index m = rows_;
    const Eigen::Index rhs = tableau_.cols() - 1;
    const Scalar cost_tol = options_.cost_tolerance * cost_scale;
    int degenerate = 0;
    while (true) {
      if (pivots_ >= max_pivots_) return LpStatus::kIterationLimit;
      const bool bland = degenerate >= options_.degenerate_streak;
      Eigen::Index enter = -1;
      Scalar best = -cost_tol;
      for (Eigen::Index j = 0; j < entering_limit; ++j) {
        const Scalar r = tableau_(m, j);
        if (r < best) {
          enter = j;
          if (bland) break;
          best = r;
        }
      }
      if (enter < 0) return LpStatus::kOptimal;

      Eigen::Index leave = -1;
      Scalar ratio = std::numeric_limits<Scalar>::infinity();
      for (Eigen::Index i = 0; i < m; ++i) {
        if (!active_[static_cast<std::size_t>(i)]) continue;
        const Scalar a = tableau_(i, enter);
        if (a <= options_.pivot_tolerance) continue;
        const Scalar t = tableau_(i, rhs) / a;
        if (t < ratio ||
            (t == ratio && basis_[static_cast<std::size_t>(i)] <
                               basis_[static_cast<std::size_t>(leave)])) {
          ratio = t;
          leave = i;
        }
      }
      if (leave < 0) return LpStatus::kUnbounded;
      degenerate = ratio <= Scalar(0) ? degenerate + 1 : 0;
      pivot(leave, enter);
    }
  }

  void pivot(Eigen::Index row, Eigen::Index col) {
    ++pivots_;
    tableau_.row(row) /= tableau_(row, col);
    VectorX<Scalar> factors = tableau_.col(col);
    factors[row] = Scalar(0);
    const Eigen::Matrix<Scalar, 1, Eigen::Dynamic> pivot_row =
        tableau_.row(row);
    tableau_.noalias() -= factors * pivot_row;
    tableau_.col(col).setZero();
    tableau_(row, col) = Scalar(1);
    // Clean round-off on the right-hand side.
    const Eigen::Index rhs = tableau_.cols() - 1;
    for (Eigen::Index i = 0; i < rows_; ++i) {
      if (tableau_(i, rhs) < Scalar(0) &&
          tableau_(i, rhs) > -options_.pivot_tolerance) {
        tableau_(i, rhs) = Scalar(0);
      }
    }
    basis_[static_cast<std::size_t>(row)] = col;
  }

  // Artificials left in the basis at level zero are pivoted out; rows where
  // that is impossible are linearly dependent and get deactivated.
  void drive_out_artificials(Eigen::Index n) {
    for (Eigen::Index i = 0; i < rows_; ++i) {
      if (basis_[static_cast<std::size_t>(i)] < n) continue;
      Eigen::Index col = -1;
      Scalar best = options_.pivot_tolerance;
      for (Eigen::Index j = 0; j < n; ++j) {
        const Scalar a = std::abs(tableau_(i, j));
        if (a > best) {
          best = a;
          col = j;
        }
      }
      if (col >= 0) {
        pivot(i, col);
      } else {
        active_[static_cast<std::size_t>(i)] = false;
      }
    }
  }

  VectorX<Scalar> extract(Eigen::Index n) const {
    VectorX<Scalar> x = VectorX<Scalar>::Zero(n);
    const Eigen::Index rhs = tableau_.cols() - 1;
    for (Eigen::Index i = 0; i < rows_; ++i) {
      const Eigen::Index bv = basis_[static_cast<std::size_t>(i)];
      if (bv < n && active_[static_cast<std::size_t>(i)]) {
        x[bv] = tableau_(i, rhs);
      }
    }
    return x;
  }

  SimplexOptions<Scalar> options_;
  MatrixX<Scalar> tableau_;
  std::vector<Eigen::Index> basis_;
  std::vector<bool> active_;
  Eigen::Index rows_ = 0;
  Eigen::Index cols_ = 0;
  int pivots_ = 0;
  int max_pivots_ = 0;
};

/// Convenience wrapper around SimplexSolver.
template <typename Scalar>
LpSolution<Scalar> solve_lp(const LinearProgram<Scalar>& lp,
                            const SimplexOptions<Scalar>& options = {}) {
  return SimplexSolver<Scalar>(options).solve(lp);
}

}  // namespace probinc
