#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "probinc/knowledge_base.hpp"

namespace probinc {

/// Probability assignment over the worlds, indexed by world index.
class Distribution {
 public:
  Distribution() = default;
  explicit Distribution(Eigen::VectorXd alpha) : alpha_(std::move(alpha)) {}

  static Distribution uniform(std::size_t worlds);
  static Distribution vertex(std::size_t worlds, std::size_t world);

  const Eigen::VectorXd& alpha() const { return alpha_; }
  std::size_t size() const { return static_cast<std::size_t>(alpha_.size()); }
  double operator[](std::size_t i) const {
    return alpha_[static_cast<Eigen::Index>(i)];
  }

  double probability(const WorldSet& s) const;

  /// Nonnegative entries summing to one within `tolerance`.
  bool valid(double tolerance = 1e-9) const;

 private:
  Eigen::VectorXd alpha_;
};

/// Eq. rows  sum_{Mod(AB)} a - d * sum_{Mod(B)} a = 0,  plus sum a = 1, a >= 0.
struct LinearSystem {
  /// One row per constraint, columns indexed by world.
  Eigen::MatrixXd rows;
  Eigen::VectorXd rhs;

  std::size_t world_count() const { return static_cast<std::size_t>(rows.cols()); }

  /// Largest |row . alpha - rhs| over the constraint rows.
  double max_residual(const Distribution& p) const;
  /// Row residuals plus the simplex conditions.
  bool satisfied_by(const Distribution& p, double tolerance = 1e-9) const;
};

LinearSystem build_cs(const CompiledKB& kb);
LinearSystem build_cs(const Signature& sig,
                      std::span<const ProbabilisticConstraint> constraints,
                      std::size_t max_worlds = kDefaultWorldCap);

struct ConsistencyResult {
  bool consistent = false;
  std::optional<Distribution> witness;
  /// Phase-one optimum (sum of artificial slacks).
  double infeasibility = 0.0;
};

inline constexpr double kFeasibilityThreshold = 1e-8;
inline constexpr double kWitnessTolerance = 1e-9;

/// Phase-one simplex on the linear system.
ConsistencyResult solve_feasibility(const LinearSystem& system);

ConsistencyResult is_consistent(const KnowledgeBase& kb,
                                std::size_t max_worlds = kDefaultWorldCap);
ConsistencyResult is_consistent(const CompiledKB& kb);

inline constexpr std::size_t kDefaultSubsetCap = 20;

struct MisOptions {
  std::size_t subset_cap = kDefaultSubsetCap;
  std::size_t max_worlds = kDefaultWorldCap;
  /// Worker threads for evaluating candidate subsets; result is identical
  /// for every value.
  unsigned parallelism = 1;
};

struct MisReport {
  /// Bitmasks over constraint positions, ordered by size then value.
  std::vector<std::uint64_t> subsets;
  std::vector<bool> free;
  std::size_t subsets_tested = 0;

  /// Positions of one subset in ascending order.
  static std::vector<std::size_t> positions(std::uint64_t mask);
};

MisReport minimal_inconsistent_subsets(const KnowledgeBase& kb,
                                       const MisOptions& options = {});

bool is_free(const KnowledgeBase& kb, std::size_t index,
             const MisOptions& options = {});

}  // namespace probinc
