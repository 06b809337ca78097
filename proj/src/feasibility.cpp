#include "probinc/feasibility.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <string>
#include <thread>
#include <unordered_map>

#include "probinc/error.hpp"
#include "probinc/simplex.hpp"

namespace probinc {

Distribution Distribution::uniform(std::size_t worlds) {
  const auto n = static_cast<Eigen::Index>(worlds);
  return Distribution(Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(worlds)));
}

Distribution Distribution::vertex(std::size_t worlds, std::size_t world) {
  Eigen::VectorXd a = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(worlds));
  a[static_cast<Eigen::Index>(world)] = 1.0;
  return Distribution(std::move(a));
}

double Distribution::probability(const WorldSet& s) const {
  double p = 0.0;
  for (auto i : s.indices()) p += alpha_[static_cast<Eigen::Index>(i)];
  return p;
}

bool Distribution::valid(double tolerance) const {
  if (alpha_.size() == 0) return false;
  if ((alpha_.array() < 0.0).any()) return false;
  return std::abs(alpha_.sum() - 1.0) <= tolerance;
}

double LinearSystem::max_residual(const Distribution& p) const {
  if (rows.rows() == 0) return 0.0;
  return (rows * p.alpha() - rhs).cwiseAbs().maxCoeff();
}

bool LinearSystem::satisfied_by(const Distribution& p, double tolerance) const {
  return p.size() == world_count() && p.valid(tolerance) &&
         max_residual(p) <= tolerance;
}

LinearSystem build_cs(const CompiledKB& kb) {
  LinearSystem s;
  s.rows = (kb.ab() - kb.probabilities().asDiagonal() * kb.b());
  s.rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(kb.size()));
  return s;
}

LinearSystem build_cs(const Signature& sig,
                      std::span<const ProbabilisticConstraint> constraints,
                      std::size_t max_worlds) {
  check_world_cap(sig, max_worlds);
  const auto n = static_cast<Eigen::Index>(sig.world_count());
  const auto m = static_cast<Eigen::Index>(constraints.size());
  LinearSystem s;
  s.rows = Eigen::MatrixXd::Zero(m, n);
  s.rhs = Eigen::VectorXd::Zero(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& c = constraints[static_cast<std::size_t>(i)];
    const WorldSet mb = models(c.antecedent, sig, max_worlds);
    const WorldSet mab = models(c.consequent, sig, max_worlds) & mb;
    s.rows.row(i) = (mab.indicator() - c.probability * mb.indicator()).transpose();
  }
  return s;
}

namespace {

// Identical columns of the row matrix are interchangeable; the phase-one LP
// runs over one representative per distinct column.
struct ColumnClasses {
  std::vector<std::vector<Eigen::Index>> members;
  Eigen::MatrixXd reduced;
};

ColumnClasses group_columns(const Eigen::MatrixXd& rows) {
  ColumnClasses out;
  std::unordered_map<std::string, std::size_t> ids;
  const Eigen::Index m = rows.rows();
  std::string key(static_cast<std::size_t>(m) * sizeof(double), '\0');
  for (Eigen::Index j = 0; j < rows.cols(); ++j) {
    for (Eigen::Index i = 0; i < m; ++i) {
      const double v = rows(i, j) + 0.0;  // folds -0.0
      std::memcpy(key.data() + i * static_cast<Eigen::Index>(sizeof(double)), &v,
                  sizeof(double));
    }
    auto [it, inserted] = ids.emplace(key, out.members.size());
    if (inserted) out.members.emplace_back();
    out.members[it->second].push_back(j);
  }
  out.reduced.resize(m, static_cast<Eigen::Index>(out.members.size()));
  for (std::size_t c = 0; c < out.members.size(); ++c) {
    out.reduced.col(static_cast<Eigen::Index>(c)) = rows.col(out.members[c][0]);
  }
  return out;
}

}  // namespace

ConsistencyResult solve_feasibility(const LinearSystem& system) {
  const Eigen::Index m = system.rows.rows();
  const Eigen::Index n = system.rows.cols();
  const ColumnClasses classes = group_columns(system.rows);
  const auto k = static_cast<Eigen::Index>(classes.members.size());

  LinearProgram<double> lp;
  lp.A.resize(m + 1, k);
  lp.A.topRows(m) = classes.reduced;
  lp.A.row(m).setOnes();
  lp.b.resize(m + 1);
  lp.b.head(m) = system.rhs;
  lp.b[m] = 1.0;

  SimplexOptions<double> opts;
  opts.feasibility_tolerance = kFeasibilityThreshold;
  const LpSolution<double> sol = solve_lp(lp, opts);

  ConsistencyResult out;
  out.infeasibility = sol.infeasibility;
  out.consistent = sol.status == LpStatus::kOptimal;
  if (!out.consistent) return out;

  Eigen::VectorXd mass = sol.x.cwiseMax(0.0);
  mass /= mass.sum();
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
  for (Eigen::Index c = 0; c < k; ++c) {
    const auto& ws = classes.members[static_cast<std::size_t>(c)];
    const double share = mass[c] / static_cast<double>(ws.size());
    for (auto w : ws) alpha[w] = share;
  }
  out.witness = Distribution(std::move(alpha));
  return out;
}

ConsistencyResult is_consistent(const CompiledKB& kb) {
  return solve_feasibility(build_cs(kb));
}

ConsistencyResult is_consistent(const KnowledgeBase& kb,
                                std::size_t max_worlds) {
  return solve_feasibility(
      build_cs(kb.signature(), kb.constraints(), max_worlds));
}

std::vector<std::size_t> MisReport::positions(std::uint64_t mask) {
  std::vector<std::size_t> out;
  while (mask) {
    out.push_back(static_cast<std::size_t>(std::countr_zero(mask)));
    mask &= mask - 1;
  }
  return out;
}

MisReport minimal_inconsistent_subsets(const KnowledgeBase& kb,
                                       const MisOptions& options) {
  const std::size_t n = kb.size();
  if (n > options.subset_cap || n > 63) {
    throw CapExceededError("constraint subset", static_cast<double>(n),
                           static_cast<double>(std::min<std::size_t>(
                               options.subset_cap, 63)));
  }
  check_world_cap(kb.signature(), options.max_worlds);

  // Rows of the full system; a subset's system is a row selection.
  const LinearSystem full =
      build_cs(kb.signature(), kb.constraints(), options.max_worlds);
  auto consistent = [&](std::uint64_t mask) {
    const auto pos = MisReport::positions(mask);
    LinearSystem s;
    s.rows.resize(static_cast<Eigen::Index>(pos.size()), full.rows.cols());
    for (std::size_t r = 0; r < pos.size(); ++r) {
      s.rows.row(static_cast<Eigen::Index>(r)) =
          full.rows.row(static_cast<Eigen::Index>(pos[r]));
    }
    s.rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(pos.size()));
    return solve_feasibility(s).consistent;
  };

  MisReport report;
  report.free.assign(n, true);
  // By increasing size: a candidate containing a known MIS is not minimal;
  // any other inconsistent candidate is minimal because all of its proper
  // subsets were tested (or contain a MIS, which it would then contain too).
  for (std::size_t size = 1; size <= n; ++size) {
    std::vector<std::uint64_t> candidates;
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
      if (static_cast<std::size_t>(std::popcount(mask)) != size) continue;
      bool dominated = false;
      for (auto s : report.subsets) {
        if ((s & mask) == s) {
          dominated = true;
          break;
        }
      }
      if (!dominated) candidates.push_back(mask);
    }
    std::vector<char> inconsistent(candidates.size(), 0);
    const unsigned workers =
        std::max(1u, std::min<unsigned>(options.parallelism,
                                        static_cast<unsigned>(candidates.size())));
    if (workers <= 1) {
      for (std::size_t c = 0; c < candidates.size(); ++c) {
        inconsistent[c] = !consistent(candidates[c]);
      }
    } else {
      std::vector<std::thread> pool;
      for (unsigned t = 0; t < workers; ++t) {
        pool.emplace_back([&, t] {
          for (std::size_t c = t; c < candidates.size(); c += workers) {
            inconsistent[c] = !consistent(candidates[c]);
          }
        });
      }
      for (auto& th : pool) th.join();
    }
    report.subsets_tested += candidates.size();
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      if (inconsistent[c]) report.subsets.push_back(candidates[c]);
    }
  }
  for (auto s : report.subsets) {
    for (auto i : MisReport::positions(s)) report.free[i] = false;
  }
  return report;
}

bool is_free(const KnowledgeBase& kb, std::size_t index,
             const MisOptions& options) {
  if (index >= kb.size()) {
    throw Error("constraint index " + std::to_string(index) + " out of range");
  }
  return minimal_inconsistent_subsets(kb, options).free[index];
}

}  // namespace probinc
