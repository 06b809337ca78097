#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "probinc/logic.hpp"

namespace probinc {

/// Conditional (A|B)[d]: "if B then A with probability d", read as
/// P(AB) = d * P(B).
struct ProbabilisticConstraint {
  Formula consequent;
  Formula antecedent;  // Formula::top() for (A)[d]
  double probability = 0.0;
  std::string label;   // optional

  bool operator==(const ProbabilisticConstraint&) const = default;
};

std::string to_string(const ProbabilisticConstraint& c, const Signature& sig);

/// True iff the constraint alone has a model with positive antecedent
/// probability, i.e. {(A|B)[d], (B)[1]} is consistent.
bool check_self_consistency(const ProbabilisticConstraint& c,
                            const Signature& sig,
                            std::size_t max_worlds = kDefaultWorldCap);

/// Ordered collection of self-consistent constraints over one signature.
/// Constraint identity is positional.
class KnowledgeBase {
 public:
  KnowledgeBase() = default;
  explicit KnowledgeBase(Signature sig) : sig_(std::move(sig)) {}

  /// Validates well-formedness, probability range, label uniqueness and
  /// self-consistency of every constraint.
  KnowledgeBase(Signature sig, std::vector<ProbabilisticConstraint> constraints,
                std::size_t max_worlds = kDefaultWorldCap);

  const Signature& signature() const { return sig_; }
  const std::vector<ProbabilisticConstraint>& constraints() const {
    return constraints_;
  }
  std::size_t size() const { return constraints_.size(); }
  bool empty() const { return constraints_.empty(); }
  const ProbabilisticConstraint& operator[](std::size_t i) const {
    return constraints_[i];
  }

  /// Constraints whose bit is set in `mask`, in original order.
  KnowledgeBase subset(std::uint64_t mask) const;
  /// Constraints at the given positions, in the given order.
  KnowledgeBase subset(std::span<const std::size_t> indices) const;

  /// Copy with one more constraint appended (validated).
  KnowledgeBase with(ProbabilisticConstraint c) const;

  /// Label if present, otherwise "r<i+1>".
  std::string display_label(std::size_t i) const;

  bool operator==(const KnowledgeBase&) const = default;

 private:
  struct Unchecked {};
  KnowledgeBase(Unchecked, Signature sig,
                std::vector<ProbabilisticConstraint> constraints)
      : sig_(std::move(sig)), constraints_(std::move(constraints)) {}

  Signature sig_;
  std::vector<ProbabilisticConstraint> constraints_;
};

/// Lambda_R(x): the same conditionals with probabilities replaced by x.
/// Throws SelfConsistencyError if some substituted constraint has no model
/// with positive antecedent probability.
KnowledgeBase characteristic(const KnowledgeBase& kb,
                             std::span<const double> x);

/// Knowledge base with per-constraint model sets Mod(A_i B_i) and Mod(B_i)
/// cached as rows of 0/1 matrices over the worlds.
class CompiledKB {
 public:
  using RowMatrix =
      Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  explicit CompiledKB(KnowledgeBase kb,
                      std::size_t max_worlds = kDefaultWorldCap);

  const KnowledgeBase& kb() const { return kb_; }
  std::size_t size() const { return kb_.size(); }
  std::size_t world_count() const { return world_count_; }

  const WorldSet& mod_ab(std::size_t i) const { return mod_ab_[i]; }
  const WorldSet& mod_b(std::size_t i) const { return mod_b_[i]; }

  /// Row i is the indicator of Mod(A_i B_i).
  const RowMatrix& ab() const { return ab_; }
  /// Row i is the indicator of Mod(B_i).
  const RowMatrix& b() const { return b_; }
  /// d_i per constraint.
  const Eigen::VectorXd& probabilities() const { return d_; }

  /// Worlds grouped by their membership pattern across all cached model
  /// sets, ordered by smallest member. Every constraint probability depends
  /// on a distribution only through the mass of each class.
  const std::vector<std::vector<std::size_t>>& classes() const {
    return classes_;
  }
  /// ab() and b() restricted to one representative column per class.
  const RowMatrix& reduced_ab() const { return reduced_ab_; }
  const RowMatrix& reduced_b() const { return reduced_b_; }

  /// Spreads each class mass uniformly over its worlds.
  Eigen::VectorXd expand(const Eigen::VectorXd& class_mass) const;
  /// Sums world probabilities per class.
  Eigen::VectorXd reduce(const Eigen::VectorXd& alpha) const;

 private:
  KnowledgeBase kb_;
  std::size_t world_count_ = 1;
  std::vector<WorldSet> mod_ab_;
  std::vector<WorldSet> mod_b_;
  RowMatrix ab_;
  RowMatrix b_;
  Eigen::VectorXd d_;
  std::vector<std::vector<std::size_t>> classes_;
  RowMatrix reduced_ab_;
  RowMatrix reduced_b_;
};

struct ParseOptions {
  /// Declare unknown names appearing in formulas as binary variables.
  bool auto_declare = false;
  std::size_t max_worlds = kDefaultWorldCap;
};

/// Parses the line-oriented KB text format. Throws ParseError.
KnowledgeBase parse_kb(std::string_view text, const ParseOptions& options = {});

/// Inverse of parse_kb: parse_kb(serialize_kb(kb)) == kb.
std::string serialize_kb(const KnowledgeBase& kb);

/// Shortest decimal that reads back to the same double.
std::string format_probability(double d);

}  // namespace probinc
