// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. Usage: acceptance [path-to-probinc-binary]

#include <cmath>
#include <cstdio>
#include <iostream>
#include <memory>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "probinc/cli.hpp"
#include "probinc/error.hpp"
#include "probinc/feasibility.hpp"
#include "probinc/inc_measure.hpp"
#include "probinc/shapley.hpp"

using namespace probinc;

namespace {

constexpr std::size_t kRandomKbs = 250;
constexpr std::size_t kOracleResolution = 200;
constexpr double kSolverTolerance = 1e-6;
// Solver tolerance plus one oracle lattice step.
constexpr double kSlack = kSolverTolerance + 1.0 / kOracleResolution;

int failures = 0;

void report(int id, bool ok, const std::string& name, const std::string& detail) {
  if (!ok) ++failures;
  std::cout << (ok ? "PASS" : "FAIL") << "  " << id << ". " << name;
  if (!detail.empty()) std::cout << "  [" << detail << "]";
  std::cout << "\n";
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

std::string one_line(const KnowledgeBase& kb) {
  std::string s = "{";
  for (std::size_t i = 0; i < kb.size(); ++i) {
    s += (i ? ", " : "") + to_string(kb[i], kb.signature());
  }
  return s + "}";
}

void criterion_1(const std::string& data_dir) {
  const ConsistencyResult r = is_consistent(fixtures::kb(fixtures::kTriple));
  std::ostringstream out, err;
  const int code = cli::run({"probinc", "check", data_dir + "/triple.pkb"}, out, err);
  report(1, !r.consistent && code == cli::kExitInconsistent,
         "inconsistent triple detected by check",
         "exit " + std::to_string(code) + ", infeasibility " + fmt(r.infeasibility));
}

void criterion_2() {
  const KnowledgeBase kb = fixtures::kb(fixtures::kR1);
  const MeasureResult r = inc_star(kb);
  const KnowledgeBase fixed = repair(kb, r);
  bool only_r4 = near(fixed[3].probability, 0.7, 1e-3);
  for (std::size_t i = 0; i < 3; ++i) {
    only_r4 = only_r4 && near(fixed[i].probability, kb[i].probability, 1e-3);
  }
  report(2, near(r.value, 0.5, 1e-3) && only_r4, "R1: Inc* = 0.5, (A)[0.2] -> (A)[0.7]",
         "Inc* " + fmt(r.value) + ", repaired " + one_line(fixed));
}

void criterion_3() {
  const KnowledgeBase kb = fixtures::kb(fixtures::kR2);
  const MeasureResult r = inc_star(kb);
  const MisReport mis = minimal_inconsistent_subsets(kb);
  const bool unique = mis.subsets.size() == 1 && mis.subsets[0] == 0b111;
  report(3, near(r.value, 1.0, 1e-3) && unique, "R2: Inc* = 1, unique MIS is the full set",
         "Inc* " + fmt(r.value) + ", " + std::to_string(mis.subsets.size()) + " MIS");
}

void criterion_4() {
  const MeasureResult r = inc_star(fixtures::kb(fixtures::kR3));
  const double e3 = r.deviations.eta[2];
  const double e4 = r.deviations.eta[3];
  report(4, near(r.value, 0.25, 1e-3) && near(e3, 0.15, 5e-3) && near(e4, 0.1, 5e-3),
         "R3: Inc* = 0.25, eta = 0.15 on (A)[0.2], 0.1 on (B)[0.3]",
         "Inc* " + fmt(r.value) + ", eta " + fmt(e3) + ", " + fmt(e4));
}

void criterion_5() {
  const std::vector<std::int64_t> v = {0, 1, 0, 10, 1, 4, 11, 12};
  const ShapleyReport r = shapley_generic(
      {3, [&](std::uint64_t c) { return static_cast<double>(v[c]); }});
  const auto exact = fixtures::permutation_shapley(3, v);
  const Rational expected[] = {Rational(17, 6), Rational(35, 6), Rational(10, 3)};
  bool ok = true;
  std::string detail;
  for (std::size_t i = 0; i < 3; ++i) {
    ok = ok && near(r.values[i], expected[i].to_double(), 5e-3) &&
         exact[i] == expected[i] &&
         near(r.values[i], exact[i].to_double(), 1e-12);
    detail += (i ? ", " : "") + fmt(r.values[i]) + " vs " + to_string(exact[i]);
  }
  report(5, ok, "generic three-player game", detail);
}

void shapley_criterion(int id, const char* text, const std::vector<double>& expected,
                       double tol, double total, const std::string& name) {
  const KnowledgeBase kb = fixtures::kb(text);
  const ShapleyReport r = shapley_inconsistency(kb);
  bool ok = true;
  std::string detail;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    ok = ok && near(r.values[i], expected[i], tol);
    detail += (i ? ", " : "") + fmt(r.values[i]);
  }
  const double sum = std::accumulate(r.values.begin(), r.values.end(), 0.0);
  ok = ok && near(sum, total, 1e-4);
  if (id == 7) {
    for (std::size_t i = 0; i < r.values.size(); ++i) {
      for (std::size_t j = i + 1; j < r.values.size(); ++j) {
        ok = ok && std::abs(r.values[i] - r.values[j]) <= 1e-6;
      }
    }
  }
  report(id, ok, name, detail + "; sum " + fmt(sum));
}

struct Property {
  std::string name;
  std::size_t checked = 0;
  std::size_t violated = 0;
  std::string example;

  void check(bool ok, const std::string& what) {
    ++checked;
    if (!ok && violated++ == 0) example = what;
  }
};

// Random constraint over A, B (same pool as the random KBs).
ProbabilisticConstraint random_constraint(std::mt19937_64& rng) {
  return fixtures::random_kb(rng, 1)[0];
}

void criteria_9_and_10() {
  std::mt19937_64 rng(20240601);
  Property consistency{"Consistency"};
  Property inconsistency{"Inconsistency"};
  Property superadditivity{"Super-Additivity"};
  Property weak_independence{"Weak Independence"};
  Property independence{"Independence"};
  Property penalty{"Penalty"};
  Property lipschitz{"1-Lipschitz"};
  Property complementarity{"eta*tau = 0"};
  Property bounds{"0 <= Inc* <= sum max(d,1-d) <= |R|"};
  Property oracle{"oracle agreement"};
  double worst_gap = 0.0;

  Signature abc;
  abc.add_binary("A");
  abc.add_binary("B");
  abc.add_binary("C");
  const Formula c_lit = literal(abc, "C");
  std::uniform_int_distribution<int> grid(0, 20);
  std::uniform_int_distribution<int> step(-4, 4);

  for (std::size_t n = 0; n < kRandomKbs; ++n) {
    const KnowledgeBase kb = fixtures::random_kb(rng);
    const std::string name = one_line(kb);
    const MeasureResult r = inc_star(kb);
    const bool consistent = is_consistent(kb).consistent;
    const double grid_value = grid_oracle(kb, kOracleResolution);

    if (consistent) {
      consistency.check(r.value <= 1e-6, name + ": Inc* " + fmt(r.value));
    } else {
      inconsistency.check(grid_value > 1e-4 && r.value > 1e-4,
                          name + ": Inc* " + fmt(r.value) + ", oracle " + fmt(grid_value));
    }

    const double gap = std::abs(r.value - grid_value);
    worst_gap = std::max(worst_gap, gap);
    oracle.check(gap <= 2e-2, name + ": Inc* " + fmt(r.value) + ", oracle " + fmt(grid_value));

    double bound = 0.0;
    bool split = true;
    for (std::size_t i = 0; i < kb.size(); ++i) {
      const auto k = static_cast<Eigen::Index>(i);
      split = split && r.deviations.eta[k] * r.deviations.tau[k] == 0.0;
      bound += std::max(kb[i].probability, 1.0 - kb[i].probability);
    }
    complementarity.check(split, name);
    bounds.check(0.0 <= r.value && r.value <= bound &&
                     bound <= static_cast<double>(kb.size()),
                 name + ": Inc* " + fmt(r.value) + ", bound " + fmt(bound));

    // Disjoint union with a second random KB.
    const KnowledgeBase other = fixtures::random_kb(rng);
    bool disjoint = true;
    for (const auto& c : other.constraints()) {
      for (const auto& d : kb.constraints()) disjoint = disjoint && !(c == d);
    }
    if (disjoint) {
      std::vector<ProbabilisticConstraint> all = kb.constraints();
      all.insert(all.end(), other.constraints().begin(), other.constraints().end());
      const KnowledgeBase joined(kb.signature(), all);
      const double u = inc_star(joined).value;
      const double parts = r.value + inc_star(other).value;
      superadditivity.check(u >= parts - kSlack,
                            name + " + " + one_line(other) + ": " + fmt(u) + " < " + fmt(parts));
    }

    // A constraint over a fresh variable.
    {
      std::vector<ProbabilisticConstraint> cs = kb.constraints();
      const Formula f = std::bernoulli_distribution(0.5)(rng) ? c_lit : !c_lit;
      cs.push_back({f, Formula::top(), grid(rng) / 20.0, {}});
      const double widened = inc_star(KnowledgeBase(abc, cs)).value;
      weak_independence.check(near(widened, r.value, kSlack),
                              name + " + " + to_string(cs.back(), abc) + ": " +
                                  fmt(r.value) + " -> " + fmt(widened));
    }

    // One more constraint over A, B: free or not.
    {
      const ProbabilisticConstraint extra = random_constraint(rng);
      const KnowledgeBase grown = kb.with(extra);
      const double after = inc_star(grown).value;
      const std::string what = name + " + " + to_string(extra, kb.signature()) +
                               ": " + fmt(r.value) + " -> " + fmt(after);
      if (is_free(grown, grown.size() - 1)) {
        independence.check(near(after, r.value, kSlack), what);
      } else {
        penalty.check(after > r.value + kSlack, what);
      }
    }

    // Lipschitz continuity of the characteristic inconsistency.
    {
      std::vector<double> x(kb.size());
      double dist = 0.0;
      for (std::size_t i = 0; i < kb.size(); ++i) {
        x[i] = std::clamp(kb[i].probability + step(rng) / 20.0, 0.0, 1.0);
        dist += std::abs(x[i] - kb[i].probability);
      }
      try {
        const double moved = characteristic_inconsistency(kb, x);
        lipschitz.check(std::abs(moved - r.value) <= dist + kSlack,
                        one_line(characteristic(kb, x)) + " vs " + name + ": |" +
                            fmt(moved) + " - " + fmt(r.value) + "| > " + fmt(dist));
      } catch (const SelfConsistencyError&) {
        // Substituted probabilities outside the constraint's range.
      }
    }
  }

  const std::vector<const Property*> props = {
      &consistency, &inconsistency, &superadditivity, &weak_independence,
      &independence, &penalty, &lipschitz, &complementarity, &bounds};
  bool all = true;
  for (const auto* p : props) all = all && p->checked > 0 && p->violated == 0;
  report(9, all, "property suite on " + std::to_string(kRandomKbs) + " random KBs",
         "slack " + fmt(kSlack));
  for (const auto* p : props) {
    std::cout << "        " << (p->violated == 0 ? "ok  " : "FAIL") << " " << p->name
              << ": " << p->checked - p->violated << "/" << p->checked;
    if (p->violated) std::cout << "  first counterexample " << p->example;
    std::cout << "\n";
  }
  report(10, oracle.checked == kRandomKbs && oracle.violated == 0,
         "Inc* within 2e-2 of the m=200 lattice oracle",
         std::to_string(oracle.checked - oracle.violated) + "/" +
             std::to_string(oracle.checked) + ", worst gap " + fmt(worst_gap));
}

std::string capture(const std::string& command) {
  std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(command.c_str(), "r"), pclose);
  if (!pipe) return {};
  std::string out;
  char buf[4096];
  std::size_t got;
  while ((got = std::fread(buf, 1, sizeof(buf), pipe.get())) > 0) out.append(buf, got);
  return out;
}

std::string in_process(std::vector<std::string> args) {
  args.insert(args.begin(), "probinc");
  std::ostringstream out, err;
  cli::run(args, out, err);
  return out.str();
}

void criterion_11(const std::string& binary, const std::string& data_dir) {
  const std::vector<std::vector<std::string>> commands = {
      {"--json", "--seed", "5", "measure", data_dir + "/r3.pkb"},
      {"--json", "blame", data_dir + "/r1.pkb"},
      {"--json", "blame", data_dir + "/r3.pkb", "--parallel", "4"},
      {"--json", "mis", data_dir + "/r3.pkb", "--parallel", "4"},
      {"--json", "check", data_dir + "/triple.pkb"}};
  bool ok = true;
  std::size_t compared = 0;
  for (const auto& args : commands) {
    std::string first;
    std::string second;
    if (!binary.empty()) {
      std::string cmd = binary;
      for (const auto& a : args) cmd += " '" + a + "'";
      first = capture(cmd);
      second = capture(cmd);
    } else {
      first = in_process(args);
      second = in_process(args);
    }
    ok = ok && !first.empty() && first == second;
    ++compared;
  }
  // Thread count must not change the report.
  ok = ok && in_process({"--json", "blame", data_dir + "/r3.pkb"}) ==
                 in_process({"--json", "blame", data_dir + "/r3.pkb", "--parallel", "4"});
  report(11, ok, "byte-identical JSON across runs and thread counts",
         std::to_string(compared) + " commands" +
             (binary.empty() ? ", in process" : ", via " + binary));
}

}  // namespace

int main(int argc, char** argv) {
  const std::string binary = argc > 1 ? argv[1] : "";
  const std::string data_dir = argc > 2 ? argv[2] : PROBINC_DATA_DIR;
  try {
    criterion_1(data_dir);
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    shapley_criterion(6, fixtures::kR1, {0.15, 0.117, 0.05, 0.183}, 5e-3, 0.5,
                      "R1 blame (0.15, 0.117, 0.05, 0.183), sum = Inc*");
    shapley_criterion(7, fixtures::kR2, {1.0 / 3, 1.0 / 3, 1.0 / 3}, 1e-3, 1.0,
                      "R2 blame equal thirds");
    shapley_criterion(8, fixtures::kR3, {0.062, 0.045, 0.062, 0.045, 0.036}, 5e-3, 0.25,
                      "R3 blame (0.062, 0.045, 0.062, 0.045, 0.036), sum 0.25");
    criteria_9_and_10();
    criterion_11(binary, data_dir);
  } catch (const std::exception& e) {
    std::cout << "FAIL  aborted: " << e.what() << "\n";
    return 1;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed")
            << "\n";
  return failures == 0 ? 0 : 1;
}
