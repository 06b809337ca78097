#include "probinc/inc_measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "probinc/error.hpp"
#include "probinc/simplex.hpp"

namespace probinc {

void SolverConfig::validate() const {
  if (starts <= 0) throw Error("starts must be positive");
  if (max_iterations <= 0) throw Error("max_iterations must be positive");
  if (!(tolerance > 0.0 && tolerance < 1e-3)) {
    throw Error("tolerance must lie in (0, 1e-3)");
  }
  if (!(vacuity_threshold > 0.0)) {
    throw Error("vacuity threshold must be positive");
  }
  if (max_worlds == 0) throw Error("max_worlds must be positive");
}

double conditional_deviation(const Distribution& p,
                             const ProbabilisticConstraint& c,
                             const Signature& sig, double vacuity_threshold) {
  const WorldSet mb = models(c.antecedent, sig);
  const WorldSet mab = models(c.consequent, sig) & mb;
  const double pb = p.probability(mb);
  if (pb <= vacuity_threshold) return 0.0;
  return p.probability(mab) / pb - c.probability;
}

double conditional_deviation(const Distribution& p, const CompiledKB& kb,
                             std::size_t i, double vacuity_threshold) {
  const auto r = static_cast<Eigen::Index>(i);
  const double pb = kb.b().row(r).dot(p.alpha());
  if (pb <= vacuity_threshold) return 0.0;
  return kb.ab().row(r).dot(p.alpha()) / pb - kb.probabilities()[r];
}

double total_deviation(const Distribution& p, const CompiledKB& kb,
                       double vacuity_threshold) {
  double sum = 0.0;
  for (std::size_t i = 0; i < kb.size(); ++i) {
    sum += std::abs(conditional_deviation(p, kb, i, vacuity_threshold));
  }
  return sum;
}

namespace {

using RowMatrix = CompiledKB::RowMatrix;

// The objective restricted to world classes: mass[c] is the probability of
// class c.
class ClassObjective {
 public:
  ClassObjective(const CompiledKB& kb, double vacuity)
      : ab_(kb.reduced_ab()), b_(kb.reduced_b()), d_(kb.probabilities()),
        vacuity_(vacuity) {}

  Eigen::VectorXd signed_deviation(const Eigen::VectorXd& mass) const {
    const Eigen::VectorXd pab = ab_ * mass;
    const Eigen::VectorXd pb = b_ * mass;
    Eigen::VectorXd eps(pab.size());
    for (Eigen::Index i = 0; i < pab.size(); ++i) {
      eps[i] = pb[i] <= vacuity_ ? 0.0 : pab[i] / pb[i] - d_[i];
    }
    return eps;
  }

  double operator()(const Eigen::VectorXd& mass) const {
    return signed_deviation(mass).cwiseAbs().sum();
  }

  const RowMatrix& ab() const { return ab_; }
  const RowMatrix& b() const { return b_; }
  const Eigen::VectorXd& d() const { return d_; }
  double vacuity() const { return vacuity_; }

 private:
  const RowMatrix& ab_;
  const RowMatrix& b_;
  const Eigen::VectorXd& d_;
  double vacuity_;
};

// Weighted least-deviation LP over the simplex:
//   min sum_i w_i (u_i + v_i)
//   s.t. (ab_i - d_i b_i) . mass - u_i + v_i = 0,  sum mass = 1,  all >= 0.
class ReweightedLp {
 public:
  explicit ReweightedLp(const ClassObjective& f) {
    const Eigen::Index m = f.ab().rows();
    const Eigen::Index k = f.ab().cols();
    classes_ = k;
    lp_.A = Eigen::MatrixXd::Zero(m + 1, k + 2 * m);
    lp_.A.topLeftCorner(m, k) = f.ab() - f.d().asDiagonal() * f.b();
    for (Eigen::Index i = 0; i < m; ++i) {
      lp_.A(i, k + i) = -1.0;
      lp_.A(i, k + m + i) = 1.0;
    }
    lp_.A.row(m).head(k).setOnes();
    lp_.b = Eigen::VectorXd::Zero(m + 1);
    lp_.b[m] = 1.0;
    lp_.c = Eigen::VectorXd::Zero(k + 2 * m);
  }

  // Returns false if the LP did not reach optimality.
  bool solve(const Eigen::VectorXd& weights, Eigen::VectorXd& mass) {
    const Eigen::Index m = weights.size();
    lp_.c.segment(classes_, m) = weights;
    lp_.c.segment(classes_ + m, m) = weights;
    const LpSolution<double> sol = solve_lp(lp_);
    if (sol.status != LpStatus::kOptimal) return false;
    mass = sol.x.head(classes_).cwiseMax(0.0);
    const double s = mass.sum();
    if (!(s > 0.0)) return false;
    mass /= s;
    return true;
  }

 private:
  LinearProgram<double> lp_;
  Eigen::Index classes_ = 0;
};

struct StartOutcome {
  Eigen::VectorXd mass;
  double value = 0.0;
  int iterations = 0;
  int lp_solves = 0;
  bool converged = false;
};

StartOutcome descend(const ClassObjective& f, ReweightedLp& lp,
                     Eigen::VectorXd mass, const SolverConfig& cfg) {
  StartOutcome out;
  double value = f(mass);
  Eigen::VectorXd next;
  for (int it = 0; it < cfg.max_iterations; ++it) {
    if (value == 0.0) {
      out.converged = true;
      break;
    }
    ++out.iterations;
    const Eigen::VectorXd q = (f.b() * mass).cwiseMax(cfg.vacuity_threshold);
    const Eigen::VectorXd w = q.cwiseInverse();
    ++out.lp_solves;
    if (!lp.solve(w, next)) break;

    // Largest step along the segment with the lowest true objective.
    double best = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_mass;
    for (double t = 1.0; t >= 1.0 / 64.0; t *= 0.5) {
      Eigen::VectorXd z = (1.0 - t) * mass + t * next;
      const double gz = f(z);
      if (gz < best) {
        best = gz;
        best_mass = std::move(z);
      }
    }
    if (best < value) {
      const double gain = value - best;
      mass = std::move(best_mass);
      value = best;
      if (gain < cfg.tolerance) {
        out.converged = true;
        break;
      }
    } else {
      out.converged = true;
      break;
    }
  }
  out.mass = std::move(mass);
  out.value = value;
  return out;
}

// Trust-region sequential LP on the exact first-order model of every
// conditional: around P0 with c0_i = P0(A_i | B_i),
//   c_i(P0 + delta) ~ c0_i + (ab_i - c0_i b_i) . delta / P0(B_i).
// Minimizes sum_i |c0_i - d_i + model_i(delta)| over sum delta = 0,
// P0 + delta >= 0, |delta|_inf <= radius. Vacuous antecedents keep their
// (zero) mass.
class TrustRegionLp {
 public:
  explicit TrustRegionLp(const ClassObjective& f) : f_(f) {}

  // Returns the model optimum, or NaN if the LP failed.
  double solve(const Eigen::VectorXd& mass, double radius, Eigen::VectorXd& next) {
    const Eigen::Index m = f_.ab().rows();
    const Eigen::Index k = f_.ab().cols();
    // Columns: p+ (k), p- (k), s+ (k), s- (k), u (m), v (m).
    const Eigen::Index cols = 4 * k + 2 * m;
    const Eigen::Index rows = m + 1 + 2 * k;
    LinearProgram<double> lp;
    lp.A = Eigen::MatrixXd::Zero(rows, cols);
    lp.b = Eigen::VectorXd::Zero(rows);
    lp.c = Eigen::VectorXd::Zero(cols);
    lp.c.tail(2 * m).setOnes();

    const Eigen::VectorXd pab = f_.ab() * mass;
    const Eigen::VectorXd pb = f_.b() * mass;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (pb[i] <= f_.vacuity()) {
        lp.A.row(i).head(k) = f_.b().row(i);
        lp.A.row(i).segment(k, k) = -f_.b().row(i);
        lp.c[4 * k + i] = 0.0;
        lp.c[4 * k + m + i] = 0.0;
        continue;
      }
      const double c0 = pab[i] / pb[i];
      const Eigen::RowVectorXd slope = (f_.ab().row(i) - c0 * f_.b().row(i)) / pb[i];
      lp.A.row(i).head(k) = slope;
      lp.A.row(i).segment(k, k) = -slope;
      lp.A(i, 4 * k + i) = -1.0;
      lp.A(i, 4 * k + m + i) = 1.0;
      lp.b[i] = f_.d()[i] - c0;
    }
    lp.A.row(m).head(k).setOnes();
    lp.A.row(m).segment(k, k).setConstant(-1.0);
    for (Eigen::Index c = 0; c < k; ++c) {
      lp.A(m + 1 + c, c) = 1.0;
      lp.A(m + 1 + c, 2 * k + c) = 1.0;
      lp.b[m + 1 + c] = radius;
      lp.A(m + 1 + k + c, k + c) = 1.0;
      lp.A(m + 1 + k + c, 3 * k + c) = 1.0;
      lp.b[m + 1 + k + c] = std::min(radius, mass[c]);
    }
    const LpSolution<double> sol = solve_lp(lp);
    if (sol.status != LpStatus::kOptimal) {
      return std::numeric_limits<double>::quiet_NaN();
    }
    next = (mass + sol.x.head(k) - sol.x.segment(k, k)).cwiseMax(0.0);
    next /= next.sum();
    return sol.objective;
  }

 private:
  const ClassObjective& f_;
};

void refine(const ClassObjective& f, StartOutcome& out, const SolverConfig& cfg) {
  TrustRegionLp model(f);
  double radius = 0.25;
  Eigen::VectorXd next;
  for (int it = 0; it < cfg.max_iterations && out.value > 0.0; ++it) {
    ++out.iterations;
    ++out.lp_solves;
    const double predicted = model.solve(out.mass, radius, next);
    if (std::isnan(predicted)) break;
    const double expected_gain = out.value - predicted;
    if (expected_gain <= 1e-12) break;
    const double actual = f(next);
    const double ratio = (out.value - actual) / expected_gain;
    if (ratio > 0.01) {
      out.mass = next;
      out.value = actual;
      if (ratio > 0.5) radius = std::min(1.0, 2.0 * radius);
    } else {
      radius *= 0.25;
      if (radius < 1e-10) break;
    }
  }
}

// Dirichlet(1) from raw 64-bit draws, so the sequence only depends on
// std::mt19937_64 (fully specified) and not on library distributions.
Eigen::VectorXd dirichlet(std::mt19937_64& rng, Eigen::Index k) {
  Eigen::VectorXd v(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    v[i] = -std::log1p(-u);
  }
  return v / v.sum();
}

std::vector<Eigen::VectorXd> start_points(const CompiledKB& kb,
                                          const SolverConfig& cfg) {
  const auto k = static_cast<Eigen::Index>(kb.classes().size());
  const auto want = static_cast<std::size_t>(cfg.starts);
  std::vector<Eigen::VectorXd> starts;
  Eigen::VectorXd uniform(k);
  for (Eigen::Index c = 0; c < k; ++c) {
    uniform[c] = static_cast<double>(kb.classes()[static_cast<std::size_t>(c)].size()) /
                 static_cast<double>(kb.world_count());
  }
  starts.push_back(std::move(uniform));
  for (Eigen::Index c = 0; c < std::min<Eigen::Index>(k, 32) && starts.size() < want;
       ++c) {
    starts.push_back(Eigen::VectorXd::Unit(k, c));
  }
  std::mt19937_64 rng(cfg.seed);
  while (starts.size() < want) starts.push_back(dirichlet(rng, k));
  starts.resize(std::min(starts.size(), want));
  return starts;
}

}  // namespace

MeasureResult inc_star(const CompiledKB& kb, const SolverConfig& cfg) {
  cfg.validate();
  const KnowledgeBase& base = kb.kb();
  const std::size_t m = kb.size();
  MeasureResult result;

  if (m == 0) {
    result.deviations.eta = Eigen::VectorXd::Zero(0);
    result.deviations.tau = Eigen::VectorXd::Zero(0);
    result.witness = Distribution::uniform(kb.world_count());
    result.repaired = base;
    result.diagnostics.best_start = 0;
    return result;
  }

  const ClassObjective f(kb, cfg.vacuity_threshold);
  ReweightedLp lp(f);
  Eigen::VectorXd best_mass;
  double best = std::numeric_limits<double>::infinity();
  auto& diag = result.diagnostics;
  const auto starts = start_points(kb, cfg);
  for (std::size_t s = 0; s < starts.size(); ++s) {
    StartOutcome o = descend(f, lp, starts[s], cfg);
    refine(f, o, cfg);
    ++diag.starts_used;
    diag.iterations += o.iterations;
    diag.lp_solves += o.lp_solves;
    if (o.converged) ++diag.converged_starts;
    if (o.value < best) {
      best = o.value;
      best_mass = std::move(o.mass);
      diag.best_start = static_cast<int>(s);
    }
    if (best == 0.0) break;
  }

  // Rounding noise from the conditional quotients is not a deviation.
  const Eigen::VectorXd eps = f.signed_deviation(best_mass).unaryExpr(
      [](double e) { return std::abs(e) < 1e-12 ? 0.0 : e; });
  result.deviations.eta = eps.cwiseMax(0.0);
  result.deviations.tau = (-eps).cwiseMax(0.0);
  result.value = eps.cwiseAbs().sum();
  result.witness = Distribution(kb.expand(best_mass));

  std::vector<double> adjusted(m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    adjusted[i] = std::clamp(kb.probabilities()[r] + eps[r], 0.0, 1.0);
  }
  result.repaired = characteristic(base, adjusted);

  const Eigen::VectorXd pab = f.ab() * best_mass;
  const Eigen::VectorXd pb = f.b() * best_mass;
  for (std::size_t i = 0; i < m; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    diag.max_residual =
        std::max(diag.max_residual, std::abs(pab[r] - adjusted[i] * pb[r]));
  }
  return result;
}

MeasureResult inc_star(const KnowledgeBase& kb, const SolverConfig& cfg) {
  return inc_star(CompiledKB(kb, cfg.max_worlds), cfg);
}

double inc_star_normalized(const KnowledgeBase& kb, const SolverConfig& cfg) {
  if (kb.empty()) return 0.0;
  return inc_star(kb, cfg).value / static_cast<double>(kb.size());
}

double characteristic_inconsistency(const KnowledgeBase& kb,
                                    std::span<const double> x,
                                    const SolverConfig& cfg) {
  return inc_star(characteristic(kb, x), cfg).value;
}

KnowledgeBase repair(const KnowledgeBase& kb, const MeasureResult& result) {
  const KnowledgeBase& fixed = result.repaired;
  bool same_skeleton = fixed.size() == kb.size() &&
                       fixed.signature() == kb.signature();
  for (std::size_t i = 0; same_skeleton && i < kb.size(); ++i) {
    same_skeleton = fixed[i].consequent == kb[i].consequent &&
                    fixed[i].antecedent == kb[i].antecedent;
  }
  if (!same_skeleton) {
    throw Error("repair: result was not computed for this knowledge base");
  }
  if (!is_consistent(fixed).consistent) {
    throw Error("repair: adjusted knowledge base failed the consistency check");
  }
  return fixed;
}

}  // namespace probinc
