#pragma once

// Reading solver output back into routes and loads. Most of it is triples
// flow algebra over the diversion digraph.

#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "bpmp/core.hpp"
#include "bpmp/formulations.hpp"
#include "bpmp/mip.hpp"
#include "bpmp/oracle.hpp"

namespace bpmp {

// Value vectors used below are aligned with the instance's request list
// (y), with triple_set(n) (u) and with arc_set(n) (x, theta).

// theta_ij = sum of w y over requests i -> j + sum_k u_ik^j + sum_k u_kj^i
//            - sum_k u_ij^k
std::vector<double> arc_flows_from_triples(const Instance& inst, const std::vector<double>& y,
                                           const std::vector<double>& u);

struct DiversionDigraph {
  std::vector<Arc> nodes;                    // ascending
  std::vector<std::pair<Arc, Arc>> edges;    // in triple order

  std::vector<Arc> successors(const Arc& a) const;
};

// One node per arc touched by a positive triple; u_ij^k > 1e-9 adds
// [i,j] -> [i,k] and [i,j] -> [k,j].
DiversionDigraph build_diversion_digraph(int n, const std::vector<double>& u);

// Nodes without outgoing edges.
std::vector<Arc> leaves(const DiversionDigraph& g);

struct AcyclicityCheck {
  bool acyclic = true;
  std::vector<Arc> cycle;  // first node not repeated; starts at its smallest node
};

AcyclicityCheck check_acyclic(const DiversionDigraph& g);

// Nodes ordered so every edge points forward. Throws ConsistencyError on
// a cycle.
std::vector<Arc> topological_order(const DiversionDigraph& g);

// Moves flow off diversions until every theta >= -1e-9, visiting arcs
// parents first. Throws ConsistencyError when the digraph has a cycle.
std::vector<double> repair_negative_flows(const Instance& inst, const std::vector<double>& y,
                                          const std::vector<double>& u);

struct DecodeOptions {
  // Also verify the ordering and load consistency the formulations
  // guarantee, throwing ConsistencyError on any breach.
  bool check = false;
};

// Throws DecodeError when x does not describe one simple 1 -> n path and
// ConsistencyError when an accepted request does not ride the route in
// order.
BpmpSolution decode_solution(const Instance& inst, const BuiltModel& built, const Assignment& asg,
                             const DecodeOptions& opts = {});

// Assignment for every variable of `built` that realizes `sol`. Triples
// values put the cargo bound for e onto the diversion through the next
// route node.
Assignment encode_solution(const Instance& inst, const BuiltModel& built, const BpmpSolution& sol);

// Revenue minus cargo cost minus empty-vehicle cost, from the route, the
// accepted set and the stored arc loads.
double profit(const Instance& inst, const BpmpSolution& sol);

// Same objective on raw vectors.
double profit_from_flows(const Instance& inst, const std::vector<double>& y,
                         const std::vector<double>& theta, const std::vector<double>& x);

// (p - c) sum d w y - c sum (d_ik + d_kj - d_ij) u_ij^k - c v sum d x
double alt_profit(const Instance& inst, const std::vector<double>& y, const std::vector<double>& u,
                  const std::vector<double>& x);

// Empty when the solution is valid.
std::vector<std::string> validate_solution(const Instance& inst, const BpmpSolution& sol);

nlohmann::json solution_to_json(const BpmpSolution& sol,
                                const std::vector<std::string>& violations = {});
// Throws ParseError on a malformed report.
BpmpSolution solution_from_json(const nlohmann::json& j);

}  // namespace bpmp
