#include "probinc/cli.hpp"

#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include "CLI11.hpp"

#include "probinc/error.hpp"
#include "probinc/feasibility.hpp"
#include "probinc/inc_measure.hpp"
#include "probinc/report.hpp"
#include "probinc/shapley.hpp"

namespace probinc::cli {
namespace {

struct Options {
  bool json = false;
  double tol = SolverConfig{}.tolerance;
  int starts = SolverConfig{}.starts;
  std::uint64_t seed = SolverConfig{}.seed;
  std::size_t max_worlds = kDefaultWorldCap;
  bool auto_declare = false;

  std::string file;
  bool normalized = false;
  bool oracle = false;
  std::size_t resolution = 100;
  unsigned parallel = 1;
  std::string output;
};

std::string read_input(const std::string& path) {
  if (path == "-") {
    return std::string(std::istreambuf_iterator<char>(std::cin), {});
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  return std::string(std::istreambuf_iterator<char>(in), {});
}

SolverConfig solver_config(const Options& o) {
  SolverConfig cfg;
  cfg.tolerance = o.tol;
  cfg.starts = o.starts;
  cfg.seed = o.seed;
  cfg.max_worlds = o.max_worlds;
  cfg.validate();
  return cfg;
}

void emit(const AnalysisReport& report, const Options& o, std::ostream& out) {
  if (o.json) {
    out << to_json(report).dump(2) << "\n";
  } else {
    out << to_text(report);
  }
}

int execute(const std::string& command, const Options& o, std::ostream& out,
            std::ostream& err) {
  ParseOptions popts;
  popts.auto_declare = o.auto_declare;
  popts.max_worlds = o.max_worlds;
  const KnowledgeBase kb = parse_kb(read_input(o.file), popts);
  AnalysisReport report = make_report(command, kb);

  if (command == "check") {
    const ConsistencyResult r = is_consistent(kb, o.max_worlds);
    report.consistent = r.consistent;
    if (r.witness) {
      report.witness = std::vector<double>(r.witness->alpha().begin(),
                                           r.witness->alpha().end());
    }
    report.diagnostics["infeasibility"] = report_round(r.infeasibility);
    emit(report, o, out);
    return r.consistent ? kExitOk : kExitInconsistent;
  }

  if (command == "mis") {
    MisOptions mopts;
    mopts.max_worlds = o.max_worlds;
    mopts.parallelism = o.parallel;
    const MisReport mis = minimal_inconsistent_subsets(kb, mopts);
    report.consistent = mis.subsets.empty();
    add_mis(report, mis);
    emit(report, o, out);
    return kExitOk;
  }

  const SolverConfig cfg = solver_config(o);
  report.consistent = is_consistent(kb, o.max_worlds).consistent;
  const MeasureResult result = inc_star(kb, cfg);
  add_measure(report, result, kb);

  if (command == "measure") {
    if (o.oracle) {
      report.oracle = grid_oracle(kb, o.resolution);
      report.diagnostics["oracleResolution"] = o.resolution;
    }
    if (o.normalized && !o.json) {
      out << "Inc*0 = " << report_round(*report.inc_star_normalized) << "\n";
      return kExitOk;
    }
    emit(report, o, out);
    return kExitOk;
  }

  if (command == "blame") {
    ShapleyOptions sopts;
    sopts.parallelism = o.parallel;
    add_shapley(report, shapley_inconsistency(kb, cfg, sopts));
    emit(report, o, out);
    return kExitOk;
  }

  if (command == "repair") {
    const KnowledgeBase fixed = repair(kb, result);
    const std::string text = serialize_kb(fixed);
    if (o.output.empty()) {
      out << text;
      return kExitOk;
    }
    std::ofstream file(o.output, std::ios::binary);
    if (!file || !(file << text)) {
      throw Error("cannot write '" + o.output + "'");
    }
    report.diagnostics["output"] = o.output;
    emit(report, o, out);
    return kExitOk;
  }

  err << "unknown command '" << command << "'\n";
  return kExitError;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  Options o;
  CLI::App app{"Consistency, inconsistency measure and blame analysis for "
               "conditional probabilistic knowledge bases",
               "probinc"};
  app.fallthrough();
  app.require_subcommand(1);
  app.add_flag("--json", o.json, "Emit the report as JSON");
  app.add_option("--tol", o.tol, "Solver convergence tolerance")
      ->check(CLI::PositiveNumber);
  app.add_option("--starts", o.starts, "Solver multi-start count")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", o.seed, "Seed for random restarts");
  app.add_option("--max-worlds", o.max_worlds, "Largest admissible world count")
      ->check(CLI::PositiveNumber);
  app.add_flag("--auto-declare", o.auto_declare,
               "Declare unknown names in formulas as binary variables");

  auto file_arg = [&](CLI::App* sub) {
    sub->add_option("file", o.file, "Knowledge base file ('-' for stdin)")
        ->required();
  };
  auto* check = app.add_subcommand("check", "Decide consistency (exit 0/1)");
  file_arg(check);
  auto* measure = app.add_subcommand("measure", "Compute Inc* and deviations");
  file_arg(measure);
  measure->add_flag("--normalized", o.normalized, "Print only Inc*0");
  auto* oracle_flag =
      measure->add_flag("--oracle", o.oracle, "Also run the lattice oracle");
  measure->add_option("--resolution", o.resolution, "Oracle lattice resolution")
      ->check(CLI::PositiveNumber)
      ->needs(oracle_flag);
  auto* blame = app.add_subcommand("blame", "Shapley inconsistency values");
  file_arg(blame);
  blame->add_option("--parallel", o.parallel, "Worker threads")
      ->check(CLI::PositiveNumber);
  auto* repair_cmd = app.add_subcommand("repair", "Write a minimally adjusted KB");
  file_arg(repair_cmd);
  repair_cmd->add_option("-o,--output", o.output, "Output file");
  auto* mis = app.add_subcommand("mis", "Minimal inconsistent subsets");
  file_arg(mis);
  mis->add_option("--parallel", o.parallel, "Worker threads")
      ->check(CLI::PositiveNumber);

  std::vector<std::string> rest(args.rbegin(), args.rend() - 1);
  try {
    app.parse(rest);
  } catch (const CLI::Success&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "probinc: " << e.what() << "\n";
    return kExitError;
  }

  std::string command;
  for (auto* sub : {check, measure, blame, repair_cmd, mis}) {
    if (sub->parsed()) command = sub->get_name();
  }
  try {
    return execute(command, o, out, err);
  } catch (const std::exception& e) {
    err << "probinc: " << o.file << ": " << e.what() << "\n";
    return kExitError;
  }
}

}  // namespace probinc::cli
