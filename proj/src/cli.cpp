#include "bpmp/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "bpmp/analysis.hpp"
#include "bpmp/datagen.hpp"
#include "bpmp/errors.hpp"
#include "bpmp/formulations.hpp"
#include "bpmp/heuristic.hpp"
#include "bpmp/instance_io.hpp"
#include "bpmp/oracle.hpp"
#include "bpmp/solver.hpp"

namespace bpmp {

namespace {

constexpr int kOk = 0;
constexpr int kInfeasible = 1;
constexpr int kUsage = 2;
constexpr int kBackend = 3;

// Raised for failures of the external solver so they map to their own
// exit code whatever the underlying error type.
class BackendFailure : public Error {
 public:
  using Error::Error;
};

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + path);
  f << text;
}

std::string json_text(const nlohmann::json& j) { return j.dump(2) + "\n"; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string joined(const std::vector<std::string>& args) {
  std::string s = "bpmp";
  for (const std::string& a : args) s += " " + a;
  return s;
}

nlohmann::json run_report(const std::vector<std::string>& args, const Instance& inst,
                          const std::string& formulation, const std::string& backend,
                          double objective, double bound, double wall) {
  nlohmann::json r;
  r["command"] = joined(args);
  r["instance_digest"] = instance_digest(inst);
  r["formulation"] = formulation;
  r["backend"] = backend;
  r["objective"] = objective;
  r["bound"] = bound;
  r["gap"] = (bound - objective) / std::max(1.0, std::fabs(objective));
  r["wall_time"] = wall;
  return r;
}

struct Options {
  // generate
  int n = 10;
  std::uint64_t seed = 1;
  Parameters params = Parameters::standard();
  // shared
  std::string input;
  std::string output;
  std::string formulation = "enhanced-triples";
  std::string format = "lp";
  std::string big_m = "default";
  // solve
  std::string backend = "builtin";
  std::string backend_cmd;
  std::string workdir;
  bool check = false;
  double time_limit = kInf;
  std::size_t node_limit = MilpOptions{}.node_limit;
  // validate
  std::string solution;
};

int cmd_generate(const Options& o, std::ostream& out) {
  const Instance inst = generate_instance(o.n, o.seed, o.params);
  emit(instance_to_string(inst), o.output, out);
  return kOk;
}

BuildOptions build_options(const Options& o) {
  BuildOptions b;
  if (o.big_m == "knapsack") {
    b.big_m = BigMMode::knapsack;
  } else if (o.big_m != "default") {
    throw ConfigError("--big-m must be default or knapsack");
  }
  return b;
}

int cmd_build(const Options& o, std::ostream& out) {
  const Instance inst = load_instance(o.input);
  const BuiltModel built = build_model(inst, parse_formulation(o.formulation), build_options(o));
  emit(o.format == "mps" ? emit_mps(built.model) : emit_lp(built.model), o.output, out);
  return kOk;
}

int cmd_stats(const Options& o, std::ostream& out) {
  const Instance inst = load_instance(o.input);
  const ModelStats s = model_stats(build_model(inst, parse_formulation(o.formulation), build_options(o)).model);
  const nlohmann::json j{{"formulation", o.formulation},
                         {"binaries", s.binaries},
                         {"continuous", s.continuous},
                         {"constraints", s.constraints}};
  emit(json_text(j), o.output, out);
  return kOk;
}

int cmd_bound(const Options& o, std::ostream& out, std::ostream& err) {
  const Instance inst = load_instance(o.input);
  if (!inst.satisfies_triangle_inequality()) {
    err << "warning: distances break the triangle inequality; the bound may not hold\n";
  }
  out << format_number(profit_upper_bound(inst.params())) << "\n";
  return kOk;
}

int cmd_solve(const std::vector<std::string>& args, const Options& o, std::ostream& out,
              std::ostream& err) {
  const Instance inst = load_instance(o.input);
  const FormulationKind kind = parse_formulation(o.formulation);
  const auto t0 = std::chrono::steady_clock::now();
  const BuiltModel built = build_model(inst, kind, build_options(o));

  MilpResult res;
  if (o.backend == "builtin") {
    MilpOptions mo;
    mo.time_limit = o.time_limit;
    mo.node_limit = o.node_limit;
    res = solve_milp(built.model, mo);
  } else if (o.backend == "external") {
    std::string cmd = o.backend_cmd;
    if (cmd.empty()) {
      if (const char* env = std::getenv("BPMP_BACKEND_CMD")) cmd = env;
    }
    if (cmd.empty()) throw ConfigError("external backend needs --backend-cmd or BPMP_BACKEND_CMD");
    BackendConfig cfg{cmd, o.format == "mps" ? ModelFormat::mps : ModelFormat::lp};
    check_backend_config(cfg);
    const std::filesystem::path dir =
        o.workdir.empty() ? std::filesystem::temp_directory_path() / ("bpmp-" + instance_digest(inst))
                          : std::filesystem::path(o.workdir);
    try {
      res = solve_external(built.model, cfg, dir);
    } catch (const LaunchError& e) {
      throw BackendFailure(e.what());
    } catch (const ParseError& e) {
      throw BackendFailure(e.what());
    } catch (const IntegrityError& e) {
      throw BackendFailure(e.what());
    }
  } else {
    throw ConfigError("--backend must be builtin or external");
  }

  if (!res.incumbent) {
    err << "no feasible solution (" << to_string(res.status) << ")\n";
    return kInfeasible;
  }
  const BpmpSolution sol = decode_solution(inst, built, *res.incumbent, DecodeOptions{o.check});
  const std::vector<std::string> violations = validate_solution(inst, sol);
  nlohmann::json report =
      run_report(args, inst, o.formulation, o.backend, sol.profit, res.best_bound, seconds_since(t0));
  report["status"] = to_string(res.status);
  report["nodes"] = res.nodes_explored;
  report["solution"] = solution_to_json(sol, violations);
  emit(json_text(report), o.output, out);
  if (o.check && !violations.empty()) {
    for (const std::string& v : violations) err << "violation: " << v << "\n";
    return kInfeasible;
  }
  return kOk;
}

int cmd_heuristic(const std::vector<std::string>& args, const Options& o, std::ostream& out) {
  const Instance inst = load_instance(o.input);
  const auto t0 = std::chrono::steady_clock::now();
  const HeuristicResult h = run_heuristic(inst);
  nlohmann::json report = run_report(args, inst, "enhanced-triples", "builtin", h.solution.profit,
                                     h.solution.profit, seconds_since(t0));
  report["bound"] = nullptr;
  report["gap"] = nullptr;
  report["phase1_profit"] = h.phase1_profit;
  report["phase2_profit"] = h.phase2_profit;
  report["attractive_triples"] = h.attractive_count;
  report["solution"] = solution_to_json(h.solution, validate_solution(inst, h.solution));
  emit(json_text(report), o.output, out);
  return kOk;
}

int cmd_oracle(const std::vector<std::string>& args, const Options& o, std::ostream& out) {
  const Instance inst = load_instance(o.input);
  const auto t0 = std::chrono::steady_clock::now();
  const BpmpSolution sol = solve_exact(inst);
  nlohmann::json report =
      run_report(args, inst, "oracle", "oracle", sol.profit, sol.profit, seconds_since(t0));
  report["solution"] = solution_to_json(sol, validate_solution(inst, sol));
  emit(json_text(report), o.output, out);
  return kOk;
}

int cmd_validate(const Options& o, std::ostream& out, std::ostream& err) {
  const Instance inst = load_instance(o.input);
  std::ifstream in(o.solution);
  if (!in) throw ConfigError("cannot open " + o.solution);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("cannot parse " + o.solution + ": " + e.what());
  }
  // Accept a bare solution or a run report wrapping one.
  const nlohmann::json& body = doc.contains("solution") ? doc.at("solution") : doc;
  BpmpSolution sol;
  try {
    sol = solution_from_json(body);
  } catch (const ParseError& e) {
    throw ConfigError(e.what());
  }
  const std::vector<std::string> violations = validate_solution(inst, sol);
  emit(json_text(nlohmann::json{{"valid", violations.empty()}, {"violations", violations}}), o.output, out);
  for (const std::string& v : violations) err << "violation: " << v << "\n";
  return violations.empty() ? kOk : kInfeasible;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Backhaul profit maximization toolkit", "bpmp"};
  app.require_subcommand(1);
  Options o;

  const std::vector<std::string> kinds{"node-arc", "enhanced-node-arc", "triples", "enhanced-triples"};
  auto add_input = [&](CLI::App* sub) {
    sub->add_option("-i,--input", o.input, "instance JSON")->required();
  };
  auto add_output = [&](CLI::App* sub) { sub->add_option("-o,--output", o.output, "output file"); };
  auto add_formulation = [&](CLI::App* sub) {
    sub->add_option("--formulation", o.formulation, "model family")
        ->check(CLI::IsMember(kinds))
        ->capture_default_str();
    sub->add_option("--big-m", o.big_m, "node-arc linking constant: default or knapsack")
        ->check(CLI::IsMember({"default", "knapsack"}));
  };

  CLI::App* gen = app.add_subcommand("generate", "random instance");
  gen->add_option("--n", o.n, "node count")->required()->check(CLI::Range(2, 200));
  gen->add_option("--seed", o.seed, "generator seed")->required();
  gen->add_option("--p", o.params.p, "revenue per mile per ton")->capture_default_str();
  gen->add_option("--c", o.params.c, "cost per mile per ton")->capture_default_str();
  gen->add_option("--v", o.params.v, "empty vehicle weight")->capture_default_str();
  gen->add_option("--Q", o.params.Q, "capacity")->capture_default_str();
  gen->add_option("--D", o.params.D, "distance limit")->capture_default_str();
  add_output(gen);

  CLI::App* build = app.add_subcommand("build", "write the MIP as LP or MPS text");
  add_formulation(build);
  build->add_option("--format", o.format)->check(CLI::IsMember({"lp", "mps"}))->capture_default_str();
  add_input(build);
  add_output(build);

  CLI::App* solve = app.add_subcommand("solve", "solve the MIP and report the decoded solution");
  add_formulation(solve);
  solve->add_option("--backend", o.backend)->check(CLI::IsMember({"builtin", "external"}))->capture_default_str();
  solve->add_option("--backend-cmd", o.backend_cmd,
                    "command template with {model} and {solution}; defaults to $BPMP_BACKEND_CMD");
  solve->add_option("--format", o.format, "model format for the external backend")
      ->check(CLI::IsMember({"lp", "mps"}));
  solve->add_option("--workdir", o.workdir, "scratch directory for the external backend");
  solve->add_option("--time-limit", o.time_limit, "seconds, builtin backend");
  solve->add_option("--node-limit", o.node_limit, "builtin backend");
  solve->add_flag("--check", o.check, "verify ordering and load consistency while decoding");
  add_input(solve);
  add_output(solve);

  CLI::App* heur = app.add_subcommand("heuristic", "restricted triples heuristic");
  add_input(heur);
  add_output(heur);

  CLI::App* orc = app.add_subcommand("oracle", "exhaustive search on a small instance");
  add_input(orc);
  add_output(orc);

  CLI::App* val = app.add_subcommand("validate", "check a solution report against an instance");
  add_input(val);
  val->add_option("-s,--solution", o.solution, "solution or run report JSON")->required();
  add_output(val);

  CLI::App* bnd = app.add_subcommand("bound", "print the a priori profit bound");
  add_input(bnd);

  CLI::App* stats = app.add_subcommand("stats", "variable and constraint counts");
  add_formulation(stats);
  add_input(stats);
  add_output(stats);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (gen->parsed()) return cmd_generate(o, out);
    if (build->parsed()) return cmd_build(o, out);
    if (solve->parsed()) return cmd_solve(args, o, out, err);
    if (heur->parsed()) return cmd_heuristic(args, o, out);
    if (orc->parsed()) return cmd_oracle(args, o, out);
    if (val->parsed()) return cmd_validate(o, out, err);
    if (bnd->parsed()) return cmd_bound(o, out, err);
    if (stats->parsed()) return cmd_stats(o, out);
  } catch (const BackendFailure& e) {
    err << "backend failure: " << e.what() << "\n";
    return kBackend;
  } catch (const InfeasibleError& e) {
    err << "infeasible: " << e.what() << "\n";
    return kInfeasible;
  } catch (const ConsistencyError& e) {
    err << "consistency check failed: " << e.what() << "\n";
    return kInfeasible;
  } catch (const InvalidInstanceError& e) {
    err << "invalid instance: " << e.what() << "\n";
    return kUsage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const SizeLimitError& e) {
    err << "too large: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kInfeasible;
  }
  return kUsage;
}

}  // namespace bpmp
