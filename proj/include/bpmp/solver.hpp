#pragma once

// The builtin LP/MILP engine plus an adapter for outside solvers.

#include <cstddef>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>

#include "bpmp/mip.hpp"

namespace bpmp {

enum class LpStatus { optimal, infeasible, unbounded };

struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  double objective = 0.0;
  Assignment values;
  std::size_t iterations = 0;
};

// Primal simplex on the relaxation. With relax_integrality false every
// binary must already be fixed by its bounds (ModelError otherwise).
LpSolution solve_lp(const MilpModel& model, bool relax_integrality = true);

enum class MilpStatus { optimal, feasible, infeasible, node_limit };

std::string to_string(MilpStatus status);

struct MilpResult {
  MilpStatus status = MilpStatus::infeasible;
  std::optional<Assignment> incumbent;
  double objective = -std::numeric_limits<double>::infinity();
  double best_bound = std::numeric_limits<double>::infinity();
  std::size_t nodes_explored = 0;
};

struct MilpOptions {
  std::size_t node_limit = 2'000'000;
  // Wall-clock seconds; hitting it yields status feasible (with an
  // incumbent) or node_limit (without). Infinite by default.
  double time_limit = std::numeric_limits<double>::infinity();
  // Absolute objective gap below which a node is pruned.
  double gap_tolerance = 1e-6;
};

// Best-first branch-and-bound with depth-first plunges.
MilpResult solve_milp(const MilpModel& model, const MilpOptions& opts = {});

enum class ModelFormat { lp, mps };

struct BackendConfig {
  // Shell command with {model} and {solution} placeholders.
  std::string command_template;
  ModelFormat format = ModelFormat::lp;
};

// Throws ConfigError unless both placeholders are present.
void check_backend_config(const BackendConfig& cfg);

// Writes the model into workdir, runs the backend and reads its
// `name value` solution file. Throws LaunchError when the command cannot
// run or fails, ParseError on a malformed line and IntegrityError when
// the returned assignment violates the model.
MilpResult solve_external(const MilpModel& model, const BackendConfig& cfg,
                          const std::filesystem::path& workdir);

// Parses the solution dialect: one `name value` (or `name=value`) per
// line, `#` starts a comment, unlisted variables default to 0. Names are
// matched against the model names, and against the MPS names when
// `mps` is set.
Assignment parse_solution_text(const MilpModel& model, const std::string& text,
                               bool mps = false);

// Whether std::system can launch a shell here.
bool subprocess_available();

}  // namespace bpmp
