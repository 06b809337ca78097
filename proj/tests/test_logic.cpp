#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "probinc/error.hpp"
#include "probinc/logic.hpp"

using namespace probinc;

namespace {

Signature ab() {
  Signature sig;
  sig.add_binary("A");
  sig.add_binary("B");
  return sig;
}

Formula random_formula(std::mt19937_64& rng, const Signature& sig, int depth) {
  std::uniform_int_distribution<int> kind(0, depth > 0 ? 4 : 1);
  switch (kind(rng)) {
    case 0: return Formula::top();
    case 1: {
      std::uniform_int_distribution<std::size_t> var(0, sig.size() - 1);
      const std::size_t v = var(rng);
      std::uniform_int_distribution<std::size_t> val(0, sig[v].domain.size() - 1);
      return Formula::literal(v, val(rng));
    }
    case 2: return !random_formula(rng, sig, depth - 1);
    case 3:
      return random_formula(rng, sig, depth - 1) &&
             random_formula(rng, sig, depth - 1);
    default:
      return random_formula(rng, sig, depth - 1) ||
             random_formula(rng, sig, depth - 1);
  }
}

}  // namespace

TEST_CASE("binary worlds are ordered with the first variable most significant") {
  const Signature sig = ab();
  const auto worlds = enumerate_worlds(sig, kDefaultWorldCap);
  REQUIRE(worlds.size() == 4);
  const Formula a = literal(sig, "A");
  const Formula b = literal(sig, "B");
  CHECK(satisfies(worlds[0], a && b));
  CHECK(satisfies(worlds[1], a && !b));
  CHECK(satisfies(worlds[2], !a && b));
  CHECK(satisfies(worlds[3], !a && !b));
}

TEST_CASE("world index round trip over a mixed domain") {
  Signature sig;
  sig.add_binary("A");
  sig.add({"Color", {"red", "green", "blue"}});
  sig.add({"Size", {"s", "m", "l", "xl"}});
  REQUIRE(sig.world_count() == 24);
  for (std::size_t i = 0; i < sig.world_count(); ++i) {
    const World w = world_from_index(sig, i);
    CHECK(w.index == i);
    CHECK(index_of(sig, w.assignment) == i);
  }
}

TEST_CASE("signature rejects malformed declarations") {
  Signature sig = ab();
  CHECK_THROWS_AS(sig.add_binary("A"), Error);
  CHECK_THROWS_AS(sig.add({"C", {"x"}}), Error);
  CHECK_THROWS_AS(sig.add({"C", {"x", "x"}}), Error);
  CHECK(sig.is_binary(0));
}

TEST_CASE("world cap is enforced") {
  Signature sig;
  for (int i = 0; i < 21; ++i) sig.add_binary("X" + std::to_string(i));
  CHECK_THROWS_AS(check_world_cap(sig, kDefaultWorldCap), CapExceededError);
  CHECK_NOTHROW(check_world_cap(sig, std::size_t{1} << 21));
}

TEST_CASE("models agree with per-world satisfaction") {
  Signature sig = ab();
  sig.add({"C", {"u", "v", "w"}});
  std::mt19937_64 rng(7);
  const auto worlds = enumerate_worlds(sig, kDefaultWorldCap);
  for (int trial = 0; trial < 300; ++trial) {
    const Formula f = random_formula(rng, sig, 4);
    const WorldSet m = models(f, sig, kDefaultWorldCap);
    for (const auto& w : worlds) {
      CHECK(m.contains(w.index) == satisfies(w, f));
    }
    CHECK((~m).count() == worlds.size() - m.count());
    const Formula g = random_formula(rng, sig, 3);
    CHECK((models(f && g, sig, kDefaultWorldCap) ==
           (m & models(g, sig, kDefaultWorldCap))));
  }
}

TEST_CASE("formula printing") {
  Signature sig = ab();
  sig.add({"C", {"u", "v"}});
  const Formula a = literal(sig, "A");
  const Formula b = literal(sig, "B");
  CHECK(to_string(a && literal(sig, "B", "false"), sig) == "A && !B");
  // Negation of a literal keeps its parentheses so it parses back unchanged.
  CHECK(to_string(a && !b, sig) == "A && !(B)");
  CHECK(to_string((a || b) && a, sig) == "(A || B) && A");
  CHECK(to_string(a || (b || a), sig) == "A || (B || A)");
  CHECK(to_string(literal(sig, "C", "v"), sig) == "C=v");
  CHECK(to_string(Formula::top(), sig) == "top");
}

TEST_CASE("world set algebra") {
  WorldSet s(70);
  s.insert(0);
  s.insert(65);
  CHECK(s.count() == 2);
  CHECK(s.indices() == std::vector<std::size_t>{0, 65});
  CHECK((~s).count() == 68);
  CHECK(s.indicator().sum() == doctest::Approx(2.0));
}
