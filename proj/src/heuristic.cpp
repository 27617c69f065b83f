#include "bpmp/heuristic.hpp"

#include "bpmp/analysis.hpp"
#include "bpmp/errors.hpp"
#include "bpmp/formulations.hpp"

namespace bpmp {

double pseudo_profit(const Instance& inst, const Triple& t) {
  const Parameters& P = inst.params();
  const double wij = inst.pair_weight(t.i, t.j);
  const double wik = inst.pair_weight(t.i, t.k);
  const double wkj = inst.pair_weight(t.k, t.j);
  const double dik = inst.d(t.i, t.k);
  const double dkj = inst.d(t.k, t.j);
  double rho = P.p * inst.d(t.i, t.j) * wij - P.c * (dik + dkj) * (P.v + wij);
  if (wij + wik <= P.Q) rho += (P.p - P.c) * dik * wik;
  if (wij + wkj <= P.Q) rho += (P.p - P.c) * dkj * wkj;
  return rho;
}

std::vector<Triple> attractive_triples(const Instance& inst) {
  std::vector<Triple> out;
  for (const Triple& t : triple_set(inst.n())) {
    // Exact zeros can come out as -1e-17 after the subtractions above.
    if (pseudo_profit(inst, t) >= -1e-9) out.push_back(t);
  }
  return out;
}

namespace {

BpmpSolution solve_and_decode(const Instance& inst, const BuiltModel& built, const MilpSolverFn& milp,
                              const char* phase) {
  const MilpResult res = milp ? milp(built.model) : solve_milp(built.model);
  if (!res.incumbent) {
    if (res.status == MilpStatus::infeasible) {
      throw InfeasibleError(std::string(phase) + ": no route from 1 to n fits within the distance limit");
    }
    throw NumericalError(std::string(phase) + ": solver stopped without a solution (" +
                         to_string(res.status) + ")");
  }
  return decode_solution(inst, built, *res.incumbent);
}

}  // namespace

HeuristicResult run_heuristic(const Instance& inst, const MilpSolverFn& milp) {
  HeuristicResult out;
  const std::vector<Triple> screen = attractive_triples(inst);
  out.attractive_count = screen.size();

  const BpmpSolution first = solve_and_decode(inst, build_restricted_triples(inst, screen), milp, "phase 1");
  out.phase1_profit = first.profit;

  std::vector<Arc> route_arcs;
  for (std::size_t k = 0; k + 1 < first.route.size(); ++k) {
    route_arcs.push_back(Arc{first.route[k], first.route[k + 1]});
  }
  const BuiltModel fixed =
      fix_route_and_requests(build_enhanced_triples(inst), inst, route_arcs, first.accepted);
  out.solution = solve_and_decode(inst, fixed, milp, "phase 2");
  out.phase2_profit = out.solution.profit;
  return out;
}

}  // namespace bpmp
