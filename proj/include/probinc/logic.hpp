#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace probinc {

inline constexpr std::size_t kDefaultWorldCap = std::size_t{1} << 20;

struct Variable {
  std::string name;
  std::vector<std::string> domain;

  bool operator==(const Variable&) const = default;
};

/// Ordered set of finite-domain variables. Variables declared without a
/// domain are binary over {true, false}.
class Signature {
 public:
  Signature() = default;
  explicit Signature(std::vector<Variable> variables);

  /// Appends a variable; throws probinc::Error on duplicate names or values,
  /// or on a domain with fewer than two values.
  void add(Variable variable);
  void add_binary(const std::string& name);

  std::size_t size() const { return variables_.size(); }
  bool empty() const { return variables_.empty(); }
  const Variable& operator[](std::size_t i) const { return variables_[i]; }
  const std::vector<Variable>& variables() const { return variables_; }

  std::optional<std::size_t> find(std::string_view name) const;
  std::optional<std::size_t> find_value(std::size_t var,
                                        std::string_view value) const;

  /// True for domains equal to {true, false} in either order.
  bool is_binary(std::size_t var) const;

  /// Product of the domain sizes, saturating at SIZE_MAX. 1 when empty.
  std::size_t world_count() const;

  /// Mixed-radix stride of a variable; the last variable varies fastest.
  std::size_t stride(std::size_t var) const;

  bool operator==(const Signature&) const = default;

 private:
  std::vector<Variable> variables_;
};

/// Immutable propositional formula over literals V=v.
class Formula {
 public:
  enum class Kind { kTop, kLiteral, kNot, kAnd, kOr };

  /// Default-constructs the tautology.
  Formula();

  static Formula top();
  static Formula literal(std::size_t var, std::size_t value);
  static Formula negation(Formula f);
  static Formula conjunction(Formula lhs, Formula rhs);
  static Formula disjunction(Formula lhs, Formula rhs);

  Kind kind() const { return node_->kind; }
  std::size_t var() const { return node_->var; }
  std::size_t value() const { return node_->value; }
  const Formula& operand() const { return *node_->lhs; }
  const Formula& lhs() const { return *node_->lhs; }
  const Formula& rhs() const { return *node_->rhs; }

  /// Every literal names an existing variable and domain value.
  bool well_formed(const Signature& sig) const;

  /// Structural equality.
  bool operator==(const Formula& other) const;

 private:
  struct Node {
    Kind kind = Kind::kTop;
    std::size_t var = 0;
    std::size_t value = 0;
    std::shared_ptr<const Formula> lhs;
    std::shared_ptr<const Formula> rhs;
  };
  explicit Formula(std::shared_ptr<const Node> node)
      : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

inline Formula operator!(const Formula& f) { return Formula::negation(f); }
inline Formula operator&&(const Formula& a, const Formula& b) {
  return Formula::conjunction(a, b);
}
inline Formula operator||(const Formula& a, const Formula& b) {
  return Formula::disjunction(a, b);
}

/// Literal by name; for binary variables `value` defaults to "true".
/// Throws probinc::Error if the variable or value is unknown.
Formula literal(const Signature& sig, std::string_view var,
                std::string_view value = "true");

/// Prints with the binary shorthand: `A` for A=true, `!A` for A=false.
std::string to_string(const Formula& f, const Signature& sig);

struct World {
  std::size_t index = 0;
  /// Value index per variable, in signature order.
  std::vector<std::size_t> assignment;

  bool operator==(const World&) const = default;
};

World world_from_index(const Signature& sig, std::size_t index);
std::size_t index_of(const Signature& sig,
                     const std::vector<std::size_t>& assignment);

/// Throws CapExceededError when the signature has more than `cap` worlds.
void check_world_cap(const Signature& sig, std::size_t cap);

std::vector<World> enumerate_worlds(const Signature& sig,
                                    std::size_t cap = kDefaultWorldCap);

bool satisfies(const World& w, const Formula& f);

/// Set of world indices, stored as a bitset over [0, universe).
class WorldSet {
 public:
  WorldSet() = default;
  explicit WorldSet(std::size_t universe, bool filled = false);

  std::size_t universe() const { return universe_; }
  bool contains(std::size_t index) const {
    return (words_[index >> 6] >> (index & 63)) & 1u;
  }
  void insert(std::size_t index) {
    words_[index >> 6] |= std::uint64_t{1} << (index & 63);
  }
  std::size_t count() const;
  bool empty() const { return count() == 0; }

  /// Member indices in ascending order.
  std::vector<std::size_t> indices() const;
  /// 0/1 vector of length universe().
  Eigen::VectorXd indicator() const;

  WorldSet operator&(const WorldSet& o) const;
  WorldSet operator|(const WorldSet& o) const;
  /// Complement relative to the universe.
  WorldSet operator~() const;

  bool operator==(const WorldSet&) const = default;

 private:
  void trim();

  std::size_t universe_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Mod(f): every world satisfying f.
WorldSet models(const Formula& f, const Signature& sig,
                std::size_t cap = kDefaultWorldCap);

}  // namespace probinc
