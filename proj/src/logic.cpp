#include "probinc/logic.hpp"

#include <algorithm>
#include <bit>
#include <limits>

#include "probinc/error.hpp"

namespace probinc {

Signature::Signature(std::vector<Variable> variables) {
  for (auto& v : variables) add(std::move(v));
}

void Signature::add(Variable variable) {
  if (find(variable.name)) {
    throw Error("duplicate variable '" + variable.name + "'");
  }
  if (variable.domain.size() < 2) {
    throw Error("variable '" + variable.name +
                "' needs at least two domain values");
  }
  for (std::size_t i = 0; i < variable.domain.size(); ++i) {
    for (std::size_t j = i + 1; j < variable.domain.size(); ++j) {
      if (variable.domain[i] == variable.domain[j]) {
        throw Error("duplicate value '" + variable.domain[i] +
                    "' in domain of '" + variable.name + "'");
      }
    }
  }
  variables_.push_back(std::move(variable));
}

void Signature::add_binary(const std::string& name) {
  add(Variable{name, {"true", "false"}});
}

std::optional<std::size_t> Signature::find(std::string_view name) const {
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    if (variables_[i].name == name) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> Signature::find_value(std::size_t var,
                                                 std::string_view value) const {
  const auto& dom = variables_[var].domain;
  for (std::size_t i = 0; i < dom.size(); ++i) {
    if (dom[i] == value) return i;
  }
  return std::nullopt;
}

bool Signature::is_binary(std::size_t var) const {
  const auto& dom = variables_[var].domain;
  if (dom.size() != 2) return false;
  return (dom[0] == "true" && dom[1] == "false") ||
         (dom[0] == "false" && dom[1] == "true");
}

std::size_t Signature::world_count() const {
  std::size_t n = 1;
  for (const auto& v : variables_) {
    const std::size_t d = v.domain.size();
    if (n > std::numeric_limits<std::size_t>::max() / d) {
      return std::numeric_limits<std::size_t>::max();
    }
    n *= d;
  }
  return n;
}

std::size_t Signature::stride(std::size_t var) const {
  std::size_t s = 1;
  for (std::size_t i = var + 1; i < variables_.size(); ++i) {
    s *= variables_[i].domain.size();
  }
  return s;
}

// --- Formula ---------------------------------------------------------------

Formula::Formula() : node_(std::make_shared<const Node>()) {}

Formula Formula::top() { return Formula(); }

Formula Formula::literal(std::size_t var, std::size_t value) {
  Node n;
  n.kind = Kind::kLiteral;
  n.var = var;
  n.value = value;
  return Formula(std::make_shared<const Node>(std::move(n)));
}

Formula Formula::negation(Formula f) {
  Node n;
  n.kind = Kind::kNot;
  n.lhs = std::make_shared<const Formula>(std::move(f));
  return Formula(std::make_shared<const Node>(std::move(n)));
}

Formula Formula::conjunction(Formula lhs, Formula rhs) {
  Node n;
  n.kind = Kind::kAnd;
  n.lhs = std::make_shared<const Formula>(std::move(lhs));
  n.rhs = std::make_shared<const Formula>(std::move(rhs));
  return Formula(std::make_shared<const Node>(std::move(n)));
}

Formula Formula::disjunction(Formula lhs, Formula rhs) {
  Node n;
  n.kind = Kind::kOr;
  n.lhs = std::make_shared<const Formula>(std::move(lhs));
  n.rhs = std::make_shared<const Formula>(std::move(rhs));
  return Formula(std::make_shared<const Node>(std::move(n)));
}

bool Formula::well_formed(const Signature& sig) const {
  switch (kind()) {
    case Kind::kTop:
      return true;
    case Kind::kLiteral:
      return var() < sig.size() && value() < sig[var()].domain.size();
    case Kind::kNot:
      return operand().well_formed(sig);
    case Kind::kAnd:
    case Kind::kOr:
      return lhs().well_formed(sig) && rhs().well_formed(sig);
  }
  return false;
}

bool Formula::operator==(const Formula& other) const {
  if (node_ == other.node_) return true;
  if (kind() != other.kind()) return false;
  switch (kind()) {
    case Kind::kTop:
      return true;
    case Kind::kLiteral:
      return var() == other.var() && value() == other.value();
    case Kind::kNot:
      return operand() == other.operand();
    case Kind::kAnd:
    case Kind::kOr:
      return lhs() == other.lhs() && rhs() == other.rhs();
  }
  return false;
}

Formula literal(const Signature& sig, std::string_view var,
                std::string_view value) {
  const auto v = sig.find(var);
  if (!v) throw Error("unknown variable '" + std::string(var) + "'");
  const auto x = sig.find_value(*v, value);
  if (!x) {
    throw Error("unknown value '" + std::string(value) + "' for variable '" +
                std::string(var) + "'");
  }
  return Formula::literal(*v, *x);
}

namespace {

int precedence(Formula::Kind k) {
  switch (k) {
    case Formula::Kind::kOr:
      return 1;
    case Formula::Kind::kAnd:
      return 2;
    default:
      return 3;
  }
}

void print(const Formula& f, const Signature& sig, std::string& out);

// Binary operators parse left-associatively, so a right operand of equal
// precedence needs parentheses to keep the same tree.
void print_operand(const Formula& child, int parent_prec, bool right,
                   const Signature& sig, std::string& out) {
  const int p = precedence(child.kind());
  const bool paren = p < parent_prec || (right && p == parent_prec);
  if (paren) out += '(';
  print(child, sig, out);
  if (paren) out += ')';
}

void print(const Formula& f, const Signature& sig, std::string& out) {
  switch (f.kind()) {
    case Formula::Kind::kTop:
      out += "top";
      return;
    case Formula::Kind::kLiteral: {
      const auto& v = sig[f.var()];
      const std::string& val = v.domain[f.value()];
      if (sig.is_binary(f.var())) {
        if (val == "false") out += '!';
        out += v.name;
      } else {
        out += v.name + "=" + val;
      }
      return;
    }
    case Formula::Kind::kNot: {
      out += '!';
      const Formula& x = f.operand();
      // A bare binary atom after '!' reads as the false literal, so the
      // negation of a true literal is written with parentheses.
      const bool paren = x.kind() == Formula::Kind::kAnd ||
                         x.kind() == Formula::Kind::kOr ||
                         (x.kind() == Formula::Kind::kLiteral &&
                          sig.is_binary(x.var()) &&
                          sig[x.var()].domain[x.value()] == "true");
      if (paren) out += '(';
      print(x, sig, out);
      if (paren) out += ')';
      return;
    }
    case Formula::Kind::kAnd:
    case Formula::Kind::kOr: {
      const int p = precedence(f.kind());
      print_operand(f.lhs(), p, false, sig, out);
      out += f.kind() == Formula::Kind::kAnd ? " && " : " || ";
      print_operand(f.rhs(), p, true, sig, out);
      return;
    }
  }
}

}  // namespace

std::string to_string(const Formula& f, const Signature& sig) {
  std::string out;
  print(f, sig, out);
  return out;
}

// --- Worlds ----------------------------------------------------------------

World world_from_index(const Signature& sig, std::size_t index) {
  World w;
  w.index = index;
  w.assignment.resize(sig.size());
  std::size_t rest = index;
  for (std::size_t i = sig.size(); i-- > 0;) {
    const std::size_t d = sig[i].domain.size();
    w.assignment[i] = rest % d;
    rest /= d;
  }
  return w;
}

std::size_t index_of(const Signature& sig,
                     const std::vector<std::size_t>& assignment) {
  std::size_t index = 0;
  for (std::size_t i = 0; i < sig.size(); ++i) {
    index = index * sig[i].domain.size() + assignment[i];
  }
  return index;
}

void check_world_cap(const Signature& sig, std::size_t cap) {
  const std::size_t n = sig.world_count();
  if (n > cap) {
    throw CapExceededError("world", static_cast<double>(n),
                           static_cast<double>(cap));
  }
}

std::vector<World> enumerate_worlds(const Signature& sig, std::size_t cap) {
  check_world_cap(sig, cap);
  const std::size_t n = sig.world_count();
  std::vector<World> worlds;
  worlds.reserve(n);
  for (std::size_t i = 0; i < n; ++i) worlds.push_back(world_from_index(sig, i));
  return worlds;
}

bool satisfies(const World& w, const Formula& f) {
  switch (f.kind()) {
    case Formula::Kind::kTop:
      return true;
    case Formula::Kind::kLiteral:
      return w.assignment[f.var()] == f.value();
    case Formula::Kind::kNot:
      return !satisfies(w, f.operand());
    case Formula::Kind::kAnd:
      return satisfies(w, f.lhs()) && satisfies(w, f.rhs());
    case Formula::Kind::kOr:
      return satisfies(w, f.lhs()) || satisfies(w, f.rhs());
  }
  return false;
}

// --- WorldSet --------------------------------------------------------------

WorldSet::WorldSet(std::size_t universe, bool filled)
    : universe_(universe),
      words_((universe + 63) / 64, filled ? ~std::uint64_t{0} : 0) {
  trim();
}

void WorldSet::trim() {
  if (universe_ % 64 != 0 && !words_.empty()) {
    words_.back() &= (std::uint64_t{1} << (universe_ % 64)) - 1;
  }
}

std::size_t WorldSet::count() const {
  std::size_t c = 0;
  for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

std::vector<std::size_t> WorldSet::indices() const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < words_.size(); ++k) {
    std::uint64_t w = words_[k];
    while (w) {
      out.push_back(k * 64 + static_cast<std::size_t>(std::countr_zero(w)));
      w &= w - 1;
    }
  }
  return out;
}

Eigen::VectorXd WorldSet::indicator() const {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(universe_));
  for (auto i : indices()) v[static_cast<Eigen::Index>(i)] = 1.0;
  return v;
}

WorldSet WorldSet::operator&(const WorldSet& o) const {
  WorldSet r(*this);
  for (std::size_t k = 0; k < words_.size(); ++k) r.words_[k] &= o.words_[k];
  return r;
}

WorldSet WorldSet::operator|(const WorldSet& o) const {
  WorldSet r(*this);
  for (std::size_t k = 0; k < words_.size(); ++k) r.words_[k] |= o.words_[k];
  return r;
}

WorldSet WorldSet::operator~() const {
  WorldSet r(*this);
  for (auto& w : r.words_) w = ~w;
  r.trim();
  return r;
}

namespace {

WorldSet literal_models(const Signature& sig, std::size_t var,
                        std::size_t value) {
  const std::size_t n = sig.world_count();
  const std::size_t stride = sig.stride(var);
  const std::size_t block = stride * sig[var].domain.size();
  WorldSet s(n);
  for (std::size_t base = value * stride; base < n; base += block) {
    for (std::size_t k = 0; k < stride; ++k) s.insert(base + k);
  }
  return s;
}

WorldSet models_rec(const Formula& f, const Signature& sig) {
  switch (f.kind()) {
    case Formula::Kind::kTop:
      return WorldSet(sig.world_count(), true);
    case Formula::Kind::kLiteral:
      return literal_models(sig, f.var(), f.value());
    case Formula::Kind::kNot:
      return ~models_rec(f.operand(), sig);
    case Formula::Kind::kAnd:
      return models_rec(f.lhs(), sig) & models_rec(f.rhs(), sig);
    case Formula::Kind::kOr:
      return models_rec(f.lhs(), sig) | models_rec(f.rhs(), sig);
  }
  return WorldSet(sig.world_count());
}

}  // namespace

WorldSet models(const Formula& f, const Signature& sig, std::size_t cap) {
  check_world_cap(sig, cap);
  return models_rec(f, sig);
}

}  // namespace probinc
