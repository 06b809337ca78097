#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "probinc/error.hpp"
#include "probinc/inc_measure.hpp"

namespace probinc {

double lattice_size(std::size_t worlds, std::size_t resolution) {
  // C(m + n - 1, n - 1) in floating point; exact well past any budget.
  const std::size_t k = worlds == 0 ? 0 : worlds - 1;
  double v = 1.0;
  for (std::size_t i = 1; i <= k; ++i) {
    v = v * static_cast<double>(resolution + i) / static_cast<double>(i);
  }
  return std::round(v);
}

namespace {

// Membership tables built straight from world-by-world satisfaction.
struct OracleTables {
  std::size_t worlds = 0;
  std::size_t constraints = 0;
  std::vector<std::uint8_t> in_ab;  // [world * constraints + i]
  std::vector<std::uint8_t> in_b;
  std::vector<double> d;
};

OracleTables tabulate(const KnowledgeBase& kb) {
  OracleTables t;
  const auto worlds = enumerate_worlds(kb.signature());
  t.worlds = worlds.size();
  t.constraints = kb.size();
  t.in_ab.resize(t.worlds * t.constraints);
  t.in_b.resize(t.worlds * t.constraints);
  for (std::size_t w = 0; w < t.worlds; ++w) {
    for (std::size_t i = 0; i < t.constraints; ++i) {
      const bool b = satisfies(worlds[w], kb[i].antecedent);
      const bool a = satisfies(worlds[w], kb[i].consequent);
      t.in_b[w * t.constraints + i] = b;
      t.in_ab[w * t.constraints + i] = a && b;
    }
  }
  for (const auto& c : kb.constraints()) t.d.push_back(c.probability);
  return t;
}

double deviation_sum(const OracleTables& t, const std::vector<double>& alpha,
                     double vacuity) {
  double total = 0.0;
  for (std::size_t i = 0; i < t.constraints; ++i) {
    double pab = 0.0;
    double pb = 0.0;
    for (std::size_t w = 0; w < t.worlds; ++w) {
      if (t.in_b[w * t.constraints + i]) pb += alpha[w];
      if (t.in_ab[w * t.constraints + i]) pab += alpha[w];
    }
    if (pb > vacuity) total += std::abs(pab / pb - t.d[i]);
  }
  return total;
}

class LatticeSearch {
 public:
  LatticeSearch(const OracleTables& t, std::size_t m)
      : t_(t), m_(m), counts_(t.worlds, 0), ab_(t.constraints, 0),
        b_(t.constraints, 0), best_counts_(t.worlds, 0) {}

  void run() { visit(0, m_); }

  double best() const { return best_; }
  const std::vector<std::int64_t>& best_counts() const { return best_counts_; }

 private:
  void add(std::size_t w, std::int64_t c) {
    for (std::size_t i = 0; i < t_.constraints; ++i) {
      if (t_.in_b[w * t_.constraints + i]) b_[i] += c;
      if (t_.in_ab[w * t_.constraints + i]) ab_[i] += c;
    }
  }

  void visit(std::size_t w, std::size_t remaining) {
    if (w + 1 == t_.worlds) {
      const auto r = static_cast<std::int64_t>(remaining);
      counts_[w] = r;
      add(w, r);
      evaluate();
      add(w, -r);
      return;
    }
    if (w + 2 == t_.worlds) {
      last_two(w, remaining);
      return;
    }
    for (std::size_t c = 0; c <= remaining; ++c) {
      const auto cc = static_cast<std::int64_t>(c);
      counts_[w] = cc;
      add(w, cc);
      visit(w + 1, remaining - c);
      add(w, -cc);
    }
  }

  // Walks the split of `remaining` between worlds w and w + 1, moving one
  // unit per step.
  void last_two(std::size_t w, std::size_t remaining) {
    const auto r = static_cast<std::int64_t>(remaining);
    const std::size_t n = t_.constraints;
    std::vector<std::int64_t> dab(n);
    std::vector<std::int64_t> db(n);
    for (std::size_t i = 0; i < n; ++i) {
      dab[i] = t_.in_ab[w * n + i] - t_.in_ab[(w + 1) * n + i];
      db[i] = t_.in_b[w * n + i] - t_.in_b[(w + 1) * n + i];
    }
    add(w + 1, r);
    counts_[w] = 0;
    counts_[w + 1] = r;
    for (std::int64_t c = 0;; ++c) {
      evaluate();
      if (c == r) break;
      for (std::size_t i = 0; i < n; ++i) {
        ab_[i] += dab[i];
        b_[i] += db[i];
      }
      ++counts_[w];
      --counts_[w + 1];
    }
    // Undo: world w now holds r units, world w + 1 none.
    add(w, -r);
    counts_[w] = 0;
  }

  void evaluate() {
    double total = 0.0;
    for (std::size_t i = 0; i < t_.constraints; ++i) {
      if (b_[i] > 0) {
        total += std::abs(static_cast<double>(ab_[i]) /
                              static_cast<double>(b_[i]) -
                          t_.d[i]);
      }
      if (total >= best_) return;
    }
    best_ = total;
    best_counts_ = counts_;
  }

  const OracleTables& t_;
  std::size_t m_;
  std::vector<std::int64_t> counts_;
  std::vector<std::int64_t> ab_;
  std::vector<std::int64_t> b_;
  double best_ = std::numeric_limits<double>::infinity();
  std::vector<std::int64_t> best_counts_;
};

// Moves mass between pairs of worlds while that lowers the objective,
// halving the step when no move helps.
double polish(const OracleTables& t, std::vector<double>& alpha, double step,
              double vacuity) {
  double value = deviation_sum(t, alpha, vacuity);
  int sweeps = 0;
  while (step > 1e-10 && sweeps < 100000 && value > 0.0) {
    ++sweeps;
    bool improved = false;
    for (std::size_t from = 0; from < t.worlds; ++from) {
      for (std::size_t to = 0; to < t.worlds; ++to) {
        if (from == to || alpha[from] <= 0.0) continue;
        const double delta = std::min(step, alpha[from]);
        alpha[from] -= delta;
        alpha[to] += delta;
        const double v = deviation_sum(t, alpha, vacuity);
        if (v < value) {
          value = v;
          improved = true;
        } else {
          alpha[from] += delta;
          alpha[to] -= delta;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return value;
}

}  // namespace

double grid_oracle(const KnowledgeBase& kb, std::size_t resolution,
                   const GridOracleOptions& options) {
  if (resolution == 0) throw Error("grid oracle resolution must be positive");
  check_world_cap(kb.signature(), options.max_worlds);
  const std::size_t worlds = kb.signature().world_count();
  const double points = lattice_size(worlds, resolution);
  if (points > options.max_points) {
    throw CapExceededError("lattice point", points, options.max_points);
  }
  if (kb.empty()) return 0.0;

  const OracleTables t = tabulate(kb);
  LatticeSearch search(t, resolution);
  search.run();
  std::vector<double> alpha(worlds);
  for (std::size_t w = 0; w < worlds; ++w) {
    alpha[w] = static_cast<double>(search.best_counts()[w]) /
               static_cast<double>(resolution);
  }
  const double polished =
      polish(t, alpha, 1.0 / static_cast<double>(resolution),
             options.vacuity_threshold);
  return std::min(search.best(), polished);
}

}  // namespace probinc
