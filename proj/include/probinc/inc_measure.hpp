#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "probinc/feasibility.hpp"
#include "probinc/knowledge_base.hpp"

namespace probinc {

struct SolverConfig {
  /// Multi-start count: uniform, single-world vertices (at most 32), then
  /// Dirichlet(1) draws, truncated to this many.
  int starts = 16;
  int max_iterations = 200;
  /// A start has converged once one reweighting step improves the
  /// objective by less than this.
  double tolerance = 1e-6;
  /// Antecedents with probability at or below this are vacuously satisfied.
  double vacuity_threshold = 1e-9;
  std::uint64_t seed = 0;
  std::size_t max_worlds = kDefaultWorldCap;

  /// Throws probinc::Error unless every field is positive and
  /// tolerance < 1e-3.
  void validate() const;
};

/// Positive (eta) and negative (tau) probability adjustments per constraint;
/// at most one of eta_i, tau_i is nonzero.
struct DeviationVector {
  Eigen::VectorXd eta;
  Eigen::VectorXd tau;

  /// eta - tau.
  Eigen::VectorXd signed_deviation() const { return eta - tau; }
  double total() const { return eta.sum() + tau.sum(); }
};

struct SolverDiagnostics {
  int starts_used = 0;
  int converged_starts = 0;
  int iterations = 0;
  int lp_solves = 0;
  /// Start (0-based, in start order) that produced the reported optimum.
  int best_start = -1;
  /// Largest |P(A_i B_i) - d'_i P(B_i)| of the witness against the repair.
  double max_residual = 0.0;
  bool converged() const { return converged_starts > 0; }
};

struct MeasureResult {
  double value = 0.0;
  DeviationVector deviations;
  Distribution witness;
  KnowledgeBase repaired;
  SolverDiagnostics diagnostics;
};

/// P(AB)/P(B) - d, or 0 when P(B) is at or below the vacuity threshold.
double conditional_deviation(const Distribution& p,
                             const ProbabilisticConstraint& c,
                             const Signature& sig,
                             double vacuity_threshold = 1e-9);

/// Same, with the model sets taken from the compiled cache.
double conditional_deviation(const Distribution& p, const CompiledKB& kb,
                             std::size_t i, double vacuity_threshold = 1e-9);

/// Sum of |conditional_deviation| over all constraints.
double total_deviation(const Distribution& p, const CompiledKB& kb,
                       double vacuity_threshold = 1e-9);

/// Inc*: the least total adjustment of constraint probabilities that admits
/// a model, found by multi-start iteratively reweighted linear programming.
/// Each start is then refined by a trust-region LP on the first-order model
/// of every conditional, since reweighting fixed points need not be
/// stationary.
/// The value is the best local optimum over all starts (an upper bound on
/// the global minimum).
MeasureResult inc_star(const KnowledgeBase& kb, const SolverConfig& cfg = {});
MeasureResult inc_star(const CompiledKB& kb, const SolverConfig& cfg = {});

/// Inc* divided by |kb|; 0 for the empty knowledge base.
double inc_star_normalized(const KnowledgeBase& kb,
                           const SolverConfig& cfg = {});

/// theta(x) = Inc*(characteristic(kb, x)).
double characteristic_inconsistency(const KnowledgeBase& kb,
                                    std::span<const double> x,
                                    const SolverConfig& cfg = {});

/// The repaired knowledge base of `result`, after verifying it is
/// consistent. Throws probinc::Error if verification fails.
KnowledgeBase repair(const KnowledgeBase& kb, const MeasureResult& result);

struct GridOracleOptions {
  /// Largest number of lattice points to enumerate.
  double max_points = 5e7;
  std::size_t max_worlds = 64;
  double vacuity_threshold = 1e-9;
};

/// Number of distributions whose entries are all multiples of 1/m.
double lattice_size(std::size_t worlds, std::size_t resolution);

/// Brute-force upper bound on Inc*: the best lattice distribution with
/// resolution m, polished by pairwise mass-transfer descent. Shares no code
/// with inc_star beyond formula evaluation.
double grid_oracle(const KnowledgeBase& kb, std::size_t resolution,
                   const GridOracleOptions& options = {});

}  // namespace probinc
