#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "bpmp/errors.hpp"
#include "bpmp/solver.hpp"

namespace bpmp {

namespace {

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char ch : s) {
    if (ch == '\'') {
      out += "'\\''";
    } else {
      out += ch;
    }
  }
  return out + "'";
}

std::string replace_all(std::string text, const std::string& from, const std::string& to) {
  std::size_t pos = 0;
  while ((pos = text.find(from, pos)) != std::string::npos) {
    text.replace(pos, from.size(), to);
    pos += to.size();
  }
  return text;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void check_backend_config(const BackendConfig& cfg) {
  if (cfg.command_template.find("{model}") == std::string::npos ||
      cfg.command_template.find("{solution}") == std::string::npos) {
    throw ConfigError("backend command template must contain {model} and {solution}");
  }
}

bool subprocess_available() { return std::system(nullptr) != 0; }

Assignment parse_solution_text(const MilpModel& model, const std::string& text, bool mps) {
  std::unordered_map<std::string, std::size_t> names;
  for (std::size_t j = 0; j < model.num_variables(); ++j) names[model.variables()[j].name] = j;
  if (mps) {
    const MpsNames short_names = mps_names(model);
    for (std::size_t j = 0; j < short_names.columns.size(); ++j) {
      names.emplace(short_names.columns[j], j);
    }
  }
  std::vector<double> values(model.num_variables(), 0.0);
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw.substr(0, raw.find('#'));
    std::replace(line.begin(), line.end(), '=', ' ');
    line = trim(line);
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string name;
    std::string value_text;
    std::string extra;
    fields >> name >> value_text;
    if (value_text.empty() || (fields >> extra)) {
      throw ParseError("solution line " + std::to_string(lineno) + ": expected `name value`: " + raw);
    }
    auto it = names.find(name);
    if (it == names.end()) {
      throw ParseError("solution line " + std::to_string(lineno) + ": unknown variable " + name);
    }
    double v = 0.0;
    try {
      std::size_t used = 0;
      v = std::stod(value_text, &used);
      if (used != value_text.size()) throw std::invalid_argument("trailing text");
    } catch (const std::exception&) {
      throw ParseError("solution line " + std::to_string(lineno) + ": bad number: " + raw);
    }
    values[it->second] = v;
  }
  return Assignment(std::move(values));
}

MilpResult solve_external(const MilpModel& model, const BackendConfig& cfg,
                          const std::filesystem::path& workdir) {
  check_backend_config(cfg);
  std::error_code ec;
  std::filesystem::create_directories(workdir, ec);
  const bool mps = cfg.format == ModelFormat::mps;
  const std::filesystem::path model_path = workdir / (mps ? "model.mps" : "model.lp");
  const std::filesystem::path sol_path = workdir / "solution.txt";
  {
    std::ofstream out(model_path, std::ios::binary);
    if (!out) throw LaunchError("cannot write " + model_path.string());
    out << (mps ? emit_mps(model) : emit_lp(model));
  }
  std::filesystem::remove(sol_path, ec);

  if (!subprocess_available()) throw LaunchError("no shell available to run the backend");
  std::string cmd = replace_all(cfg.command_template, "{model}", shell_quote(model_path.string()));
  cmd = replace_all(cmd, "{solution}", shell_quote(sol_path.string()));
  const int rc = std::system(cmd.c_str());
  if (rc == -1) throw LaunchError("could not start backend: " + cmd);
  if (rc != 0) {
    const int code = WIFEXITED(rc) ? WEXITSTATUS(rc) : rc;
    throw LaunchError("backend exited with status " + std::to_string(code) + ": " + cmd);
  }
  std::ifstream in(sol_path, std::ios::binary);
  if (!in) throw LaunchError("backend wrote no solution file " + sol_path.string());
  std::stringstream buf;
  buf << in.rdbuf();

  const Assignment asg = parse_solution_text(model, buf.str(), mps);
  const Evaluation ev = evaluate(model, asg);
  if (!ev.feasible()) {
    std::string msg = "backend solution violates";
    const std::size_t shown = std::min<std::size_t>(ev.violations.size(), 5);
    for (std::size_t i = 0; i < shown; ++i) {
      msg += (i ? ", " : " ") + ev.violations[i].name;
    }
    if (ev.violations.size() > shown) msg += ", ...";
    throw IntegrityError(msg);
  }
  MilpResult res;
  res.status = MilpStatus::optimal;
  res.incumbent = asg;
  res.objective = ev.objective;
  res.best_bound = ev.objective;
  return res;
}

}  // namespace bpmp
