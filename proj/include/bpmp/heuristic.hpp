#pragma once

// Two-phase restricted triples heuristic: screen triples by a pseudo
// profit, solve with only the attractive ones, then fix the route and the
// accepted requests and re-solve with every triple.

#include <cstddef>
#include <functional>
#include <vector>

#include "bpmp/core.hpp"
#include "bpmp/mip.hpp"
#include "bpmp/oracle.hpp"
#include "bpmp/solver.hpp"

namespace bpmp {

// p d_ij w_ij - c (d_ik + d_kj)(v + w_ij), plus (p - c) d_ik w_ik when
// w_ij + w_ik <= Q and (p - c) d_kj w_kj when w_ij + w_kj <= Q. Weights
// are summed over requests sharing a node pair.
double pseudo_profit(const Instance& inst, const Triple& t);

// Triples with pseudo profit >= 0, in triple order.
std::vector<Triple> attractive_triples(const Instance& inst);

using MilpSolverFn = std::function<MilpResult(const MilpModel&)>;

struct HeuristicResult {
  BpmpSolution solution;
  double phase1_profit = 0.0;
  double phase2_profit = 0.0;
  std::size_t attractive_count = 0;
};

// Uses the builtin branch-and-bound when `milp` is empty. Throws
// InfeasibleError when no route fits within D.
HeuristicResult run_heuristic(const Instance& inst, const MilpSolverFn& milp = {});

}  // namespace bpmp
