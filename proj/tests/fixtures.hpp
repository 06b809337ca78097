#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "probinc/knowledge_base.hpp"
#include "probinc/shapley.hpp"

namespace fixtures {

inline const char* const kR1 =
    "var A\nvar B\n"
    "r1: (A | !B)[0.8]\nr2: (A | B)[0.6]\nr3: (B)[0.5]\nr4: (A)[0.2]\n";
inline const char* const kR2 =
    "var A\nvar B\nr1: (A | B)[1]\nr2: (B)[1]\nr3: (A)[0]\n";
inline const char* const kR3 =
    "var A\nvar B\nvar C\n"
    "r1: (A | C)[0.7]\nr2: (B | !C)[0.8]\nr3: (A)[0.2]\nr4: (B)[0.3]\n"
    "r5: (C)[0.5]\n";
inline const char* const kTriple =
    "var A\nvar B\n(A | B)[0.5]\n(B)[0.5]\n(A)[0.1]\n";

inline probinc::KnowledgeBase kb(const char* text) {
  return probinc::parse_kb(text);
}

/// Formulas over two binary variables that are neither tautologies nor
/// contradictions, plus top for the antecedent.
inline const std::vector<std::string>& formula_pool() {
  static const std::vector<std::string> pool = {
      "A", "!A", "B", "!B", "A && B", "A && !B", "!A && B", "!A && !B",
      "A || B", "A || !B", "!A || B", "!A || !B"};
  return pool;
}

/// Random KB with at most two binary variables, at most `max_size`
/// constraints and probabilities on a 0.05 grid. Constraints that are not
/// self-consistent are redrawn.
inline probinc::KnowledgeBase random_kb(std::mt19937_64& rng,
                                        std::size_t max_size = 4) {
  const auto& pool = formula_pool();
  std::uniform_int_distribution<std::size_t> size_dist(1, max_size);
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  std::uniform_int_distribution<int> grid(0, 20);
  std::bernoulli_distribution conditional(0.5);
  const std::size_t n = size_dist(rng);
  probinc::Signature sig;
  sig.add_binary("A");
  sig.add_binary("B");
  std::vector<std::string> lines;
  while (lines.size() < n) {
    std::string c = "(" + pool[pick(rng)];
    if (conditional(rng)) c += " | " + pool[pick(rng)];
    c += ")[" + probinc::format_probability(grid(rng) / 20.0) + "]";
    try {
      probinc::parse_kb("var A\nvar B\n" + c + "\n");
      lines.push_back(c);
    } catch (const std::exception&) {
    }
  }
  std::string text = "var A\nvar B\n";
  for (const auto& l : lines) text += l + "\n";
  return probinc::parse_kb(text);
}

/// Average marginal contribution over every player ordering, in exact
/// rationals. Coalition values are integers indexed by bitmask.
inline std::vector<probinc::Rational> permutation_shapley(
    int n, const std::vector<std::int64_t>& v) {
  using probinc::Rational;
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::vector<Rational> sum(static_cast<std::size_t>(n));
  std::int64_t orderings = 0;
  do {
    std::uint64_t c = 0;
    for (int p : order) {
      const std::uint64_t next = c | (std::uint64_t{1} << p);
      sum[static_cast<std::size_t>(p)] += Rational(v[next] - v[c]);
      c = next;
    }
    ++orderings;
  } while (std::next_permutation(order.begin(), order.end()));
  for (auto& s : sum) s = s / Rational(orderings);
  return sum;
}

}  // namespace fixtures
