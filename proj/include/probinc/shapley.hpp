#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "probinc/inc_measure.hpp"
#include "probinc/knowledge_base.hpp"

namespace probinc {

/// Exact rational with 64-bit parts, always in lowest terms, den > 0.
class Rational {
 public:
  Rational() = default;
  Rational(std::int64_t num, std::int64_t den = 1);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double to_double() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  Rational operator+(const Rational& o) const;
  Rational operator-(const Rational& o) const;
  Rational operator*(const Rational& o) const;
  Rational operator/(const Rational& o) const;
  Rational& operator+=(const Rational& o) { return *this = *this + o; }

  bool operator==(const Rational&) const = default;

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

std::string to_string(const Rational& r);

/// C(n, k) by multiplicative recurrence; exact for n <= 62.
std::int64_t binomial(int n, int k);

/// Weight of a coalition of size k containing the player, among n players:
/// (k-1)!(n-k)!/n! = 1 / (n * C(n-1, k-1)).
Rational shapley_coefficient(int n, int k);

/// (N, v) with players 0..n-1; coalitions are bitmasks.
struct CoalitionGame {
  int players = 0;
  std::function<double(std::uint64_t)> value;
};

struct ShapleyReport {
  std::vector<double> values;
  /// v(N).
  double total = 0.0;
  std::size_t subsets_evaluated = 0;
  /// Disjoint pairs with v(S u T) < v(S) + v(T) - 1e-4.
  std::size_t superadditivity_violations = 0;
  double worst_superadditivity_gap = 0.0;
};

/// Tolerance below which super-additivity shortfalls are not reported.
inline constexpr double kSuperadditivitySlack = 1e-4;

/// Shapley value of every player. Each coalition value is requested exactly
/// once. Throws CapExceededError above `subset_cap` players.
ShapleyReport shapley_generic(const CoalitionGame& game,
                              std::size_t subset_cap = kDefaultSubsetCap);

/// Shapley values from a full table of coalition values (size 2^n).
ShapleyReport shapley_from_table(const std::vector<double>& table, int players);

struct ShapleyOptions {
  std::size_t subset_cap = kDefaultSubsetCap;
  /// Threads evaluating subset measures; the result does not depend on it.
  unsigned parallelism = 1;
};

/// Shapley inconsistency values: the game whose coalition value is Inc* of
/// the corresponding sub-knowledge-base. Values follow constraint order.
ShapleyReport shapley_inconsistency(const KnowledgeBase& kb,
                                    const SolverConfig& cfg = {},
                                    const ShapleyOptions& options = {});

}  // namespace probinc
