#include "probinc/shapley.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <thread>

#include "probinc/error.hpp"

namespace probinc {

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw Error("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
  num_ = g ? num / g : 0;
  den_ = g ? den / g : 1;
}

namespace {

std::int64_t narrow(__int128 v) {
  if (v > INT64_MAX || v < INT64_MIN) throw Error("rational overflow");
  return static_cast<std::int64_t>(v);
}

Rational make(__int128 num, __int128 den) {
  if (den < 0) {
    num = -num;
    den = -den;
  }
  __int128 a = num < 0 ? -num : num;
  __int128 b = den;
  while (b != 0) {
    const __int128 r = a % b;
    a = b;
    b = r;
  }
  if (a > 1) {
    num /= a;
    den /= a;
  }
  return Rational(narrow(num), narrow(den));
}

}  // namespace

Rational Rational::operator+(const Rational& o) const {
  return make(static_cast<__int128>(num_) * o.den_ +
                  static_cast<__int128>(o.num_) * den_,
              static_cast<__int128>(den_) * o.den_);
}

Rational Rational::operator-(const Rational& o) const {
  return make(static_cast<__int128>(num_) * o.den_ -
                  static_cast<__int128>(o.num_) * den_,
              static_cast<__int128>(den_) * o.den_);
}

Rational Rational::operator*(const Rational& o) const {
  return make(static_cast<__int128>(num_) * o.num_,
              static_cast<__int128>(den_) * o.den_);
}

Rational Rational::operator/(const Rational& o) const {
  if (o.num_ == 0) throw Error("rational division by zero");
  return make(static_cast<__int128>(num_) * o.den_,
              static_cast<__int128>(den_) * o.num_);
}

std::string to_string(const Rational& r) {
  if (r.den() == 1) return std::to_string(r.num());
  return std::to_string(r.num()) + "/" + std::to_string(r.den());
}

std::int64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::int64_t c = 1;
  for (int i = 1; i <= k; ++i) {
    // c * (n - k + i) is divisible by i at every step.
    c = narrow(static_cast<__int128>(c) * (n - k + i) / i);
  }
  return c;
}

Rational shapley_coefficient(int n, int k) {
  return Rational(1, static_cast<std::int64_t>(n) * binomial(n - 1, k - 1));
}

ShapleyReport shapley_from_table(const std::vector<double>& table,
                                 int players) {
  const std::uint64_t full = (std::uint64_t{1} << players) - 1;
  if (table.size() != full + 1) {
    throw Error("coalition table must have 2^n entries");
  }
  if (std::abs(table[0]) > 1e-12) throw Error("v(empty coalition) must be 0");

  std::vector<double> weight(static_cast<std::size_t>(players) + 1, 0.0);
  for (int k = 1; k <= players; ++k) {
    weight[static_cast<std::size_t>(k)] = shapley_coefficient(players, k).to_double();
  }

  ShapleyReport report;
  report.values.assign(static_cast<std::size_t>(players), 0.0);
  report.total = table[full];
  report.subsets_evaluated = table.size();
  // Only coalitions containing the player contribute; v(C) - v(C \ {i}) is
  // zero otherwise.
  for (int i = 0; i < players; ++i) {
    const std::uint64_t bit = std::uint64_t{1} << i;
    double s = 0.0;
    for (std::uint64_t c = bit; c <= full; c = (c + 1) | bit) {
      const auto k = static_cast<std::size_t>(std::popcount(c));
      s += weight[k] * (table[c] - table[c ^ bit]);
    }
    report.values[static_cast<std::size_t>(i)] = s;
  }

  // Super-additivity on evaluated coalitions: every disjoint pair for small
  // games, singleton splits otherwise.
  auto check = [&](std::uint64_t s, std::uint64_t t) {
    const double gap = table[s] + table[t] - table[s | t];
    if (gap > kSuperadditivitySlack) {
      ++report.superadditivity_violations;
      report.worst_superadditivity_gap =
          std::max(report.worst_superadditivity_gap, gap);
    }
  };
  if (players <= 12) {
    for (std::uint64_t u = 1; u <= full; ++u) {
      // Unordered splits of u into nonempty s, t.
      for (std::uint64_t s = (u - 1) & u; s > 0; s = (s - 1) & u) {
        const std::uint64_t t = u ^ s;
        if (s < t) check(s, t);
      }
    }
  } else {
    for (std::uint64_t u = 1; u <= full; ++u) {
      if (std::popcount(u) < 2) continue;
      for (std::uint64_t rest = u; rest; rest &= rest - 1) {
        const std::uint64_t bit = rest & -rest;
        check(bit, u ^ bit);
      }
    }
  }
  return report;
}

ShapleyReport shapley_generic(const CoalitionGame& game,
                              std::size_t subset_cap) {
  if (game.players < 0 ||
      static_cast<std::size_t>(game.players) > std::min<std::size_t>(subset_cap, 62)) {
    throw CapExceededError("player", game.players,
                           static_cast<double>(std::min<std::size_t>(subset_cap, 62)));
  }
  const std::uint64_t count = std::uint64_t{1} << game.players;
  std::vector<double> table(count);
  for (std::uint64_t c = 0; c < count; ++c) table[c] = game.value(c);
  return shapley_from_table(table, game.players);
}

ShapleyReport shapley_inconsistency(const KnowledgeBase& kb,
                                    const SolverConfig& cfg,
                                    const ShapleyOptions& options) {
  const std::size_t n = kb.size();
  if (n > std::min<std::size_t>(options.subset_cap, 62)) {
    throw CapExceededError("constraint subset", static_cast<double>(n),
                           static_cast<double>(std::min<std::size_t>(options.subset_cap, 62)));
  }
  cfg.validate();
  check_world_cap(kb.signature(), cfg.max_worlds);

  // Each slot is written by exactly one worker, and inc_star is
  // deterministic per subset, so the table is independent of scheduling.
  const std::uint64_t count = std::uint64_t{1} << n;
  std::vector<double> table(count, 0.0);
  auto work = [&](std::uint64_t first, std::uint64_t stride) {
    for (std::uint64_t c = first; c < count; c += stride) {
      table[c] = c == 0 ? 0.0 : inc_star(kb.subset(c), cfg).value;
    }
  };
  const unsigned workers = std::max(
      1u, std::min<unsigned>(options.parallelism, static_cast<unsigned>(count)));
  if (workers == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (unsigned t = 0; t < workers; ++t) {
      pool.emplace_back([&, t] {
        try {
          work(t, workers);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  CoalitionGame game{static_cast<int>(n),
                     [&](std::uint64_t c) { return table[c]; }};
  return shapley_generic(game, options.subset_cap);
}

}  // namespace probinc
