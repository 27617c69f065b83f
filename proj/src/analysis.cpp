#include "bpmp/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "bpmp/errors.hpp"
#include "bpmp/tolerances.hpp"

namespace bpmp {

namespace {

constexpr double kLoadTol = 1e-6;

void check_sizes(const Instance& inst, const std::vector<double>& y, const std::vector<double>& u,
                 const Network& net) {
  if (y.size() != inst.requests().size()) {
    throw std::invalid_argument("y needs one value per request");
  }
  if (u.size() != net.triples().size()) {
    throw std::invalid_argument("u needs one value per triple");
  }
}

std::string arc_text(const Arc& a) { return to_string(a); }

std::vector<int> route_positions(int n, const std::vector<int>& route) {
  std::vector<int> pos(n + 1, -1);
  for (std::size_t k = 0; k < route.size(); ++k) {
    if (route[k] >= 1 && route[k] <= n) pos[route[k]] = static_cast<int>(k);
  }
  return pos;
}

std::vector<double> values_of(const Assignment& asg, const std::vector<std::optional<VarRef>>& refs) {
  std::vector<double> out(refs.size(), 0.0);
  for (std::size_t k = 0; k < refs.size(); ++k) {
    if (refs[k]) out[k] = asg[*refs[k]];
  }
  return out;
}

// Follows x from node 1. Every arc with x >= 0.5 has to be on the path.
std::vector<int> trace_route(const BuiltModel& built, const Assignment& asg) {
  const int n = built.n;
  std::vector<int> succ(n + 1, 0);
  int chosen = 0;
  for (const Arc& a : arc_set(n)) {
    const auto ref = built.vars.x(a.from, a.to);
    if (!ref || asg[*ref] < 0.5) continue;
    ++chosen;
    if (succ[a.from] != 0) {
      throw DecodeError("node " + std::to_string(a.from) + " has more than one outgoing route arc");
    }
    succ[a.from] = a.to;
  }
  std::vector<int> route{1};
  std::vector<char> seen(n + 1, 0);
  seen[1] = 1;
  while (route.back() != n) {
    const int next = succ[route.back()];
    if (next == 0) {
      throw DecodeError("route stops at node " + std::to_string(route.back()) + " before reaching " +
                        std::to_string(n));
    }
    if (seen[next]) throw DecodeError("route revisits node " + std::to_string(next));
    seen[next] = 1;
    route.push_back(next);
  }
  if (chosen != static_cast<int>(route.size()) - 1) {
    throw DecodeError("x selects arcs that are not on the path from 1 to " + std::to_string(n));
  }
  return route;
}

}  // namespace

std::vector<double> arc_flows_from_triples(const Instance& inst, const std::vector<double>& y,
                                           const std::vector<double>& u) {
  const Network net(inst.n());
  check_sizes(inst, y, u, net);
  std::vector<double> theta(net.arcs().size(), 0.0);
  for (std::size_t r = 0; r < y.size(); ++r) {
    const Request& req = inst.requests()[r];
    theta[net.arc_index(req.origin, req.destination)] += req.weight * y[r];
  }
  for (std::size_t q = 0; q < u.size(); ++q) {
    if (u[q] == 0.0) continue;
    const Triple& t = net.triples()[q];
    theta[net.arc_index(t.i, t.k)] += u[q];
    theta[net.arc_index(t.k, t.j)] += u[q];
    theta[net.arc_index(t.i, t.j)] -= u[q];
  }
  return theta;
}

std::vector<Arc> DiversionDigraph::successors(const Arc& a) const {
  std::vector<Arc> out;
  for (const auto& [from, to] : edges) {
    if (from == a) out.push_back(to);
  }
  return out;
}

DiversionDigraph build_diversion_digraph(int n, const std::vector<double>& u) {
  const std::vector<Triple> triples = triple_set(n);
  if (u.size() != triples.size()) throw std::invalid_argument("u needs one value per triple");
  DiversionDigraph g;
  std::set<Arc> nodes;
  for (std::size_t q = 0; q < u.size(); ++q) {
    if (u[q] <= Tolerances::positivity) continue;
    const Triple& t = triples[q];
    const Arc parent{t.i, t.j};
    const Arc first{t.i, t.k};
    const Arc second{t.k, t.j};
    nodes.insert({parent, first, second});
    g.edges.emplace_back(parent, first);
    g.edges.emplace_back(parent, second);
  }
  g.nodes.assign(nodes.begin(), nodes.end());
  return g;
}

std::vector<Arc> leaves(const DiversionDigraph& g) {
  std::set<Arc> with_out;
  for (const auto& e : g.edges) with_out.insert(e.first);
  std::vector<Arc> out;
  for (const Arc& a : g.nodes) {
    if (!with_out.count(a)) out.push_back(a);
  }
  return out;
}

namespace {

struct KahnResult {
  std::vector<Arc> order;
  std::set<Arc> stuck;
};

KahnResult kahn(const DiversionDigraph& g) {
  std::map<Arc, int> indeg;
  std::map<Arc, std::vector<Arc>> succ;
  for (const Arc& a : g.nodes) indeg[a] = 0;
  for (const auto& [from, to] : g.edges) {
    ++indeg[to];
    succ[from].push_back(to);
  }
  std::set<Arc> ready;
  for (const auto& [a, d] : indeg) {
    if (d == 0) ready.insert(a);
  }
  KahnResult res;
  while (!ready.empty()) {
    const Arc a = *ready.begin();
    ready.erase(ready.begin());
    res.order.push_back(a);
    for (const Arc& b : succ[a]) {
      if (--indeg[b] == 0) ready.insert(b);
    }
  }
  for (const auto& [a, d] : indeg) {
    if (d > 0) res.stuck.insert(a);
  }
  return res;
}

}  // namespace

AcyclicityCheck check_acyclic(const DiversionDigraph& g) {
  const KahnResult k = kahn(g);
  AcyclicityCheck res;
  if (k.stuck.empty()) return res;
  res.acyclic = false;

  // Every stuck node keeps a stuck predecessor, so walking backwards from
  // any of them must close a loop.
  std::map<Arc, Arc> pred;
  for (const auto& [from, to] : g.edges) {
    if (k.stuck.count(from) && k.stuck.count(to) && !pred.count(to)) pred.emplace(to, from);
  }
  std::vector<Arc> walk{*k.stuck.begin()};
  std::map<Arc, std::size_t> at{{walk.front(), 0}};
  while (true) {
    const Arc p = pred.at(walk.back());
    if (auto it = at.find(p); it != at.end()) {
      std::vector<Arc> loop(walk.begin() + static_cast<std::ptrdiff_t>(it->second), walk.end());
      std::reverse(loop.begin(), loop.end());
      std::rotate(loop.begin(), std::min_element(loop.begin(), loop.end()), loop.end());
      res.cycle = std::move(loop);
      return res;
    }
    at.emplace(p, walk.size());
    walk.push_back(p);
  }
}

std::vector<Arc> topological_order(const DiversionDigraph& g) {
  KahnResult k = kahn(g);
  if (!k.stuck.empty()) {
    const AcyclicityCheck c = check_acyclic(g);
    std::string text;
    for (const Arc& a : c.cycle) text += arc_text(a) + " -> ";
    throw ConsistencyError("diversion digraph has a cycle: " + text + arc_text(c.cycle.front()));
  }
  return std::move(k.order);
}

std::vector<double> repair_negative_flows(const Instance& inst, const std::vector<double>& y,
                                          const std::vector<double>& u) {
  const Network net(inst.n());
  check_sizes(inst, y, u, net);
  std::vector<double> out = u;
  std::vector<double> theta = arc_flows_from_triples(inst, y, out);
  const std::vector<Arc> order = topological_order(build_diversion_digraph(inst.n(), u));
  const int n = inst.n();
  for (const Arc& a : order) {
    const int ij = net.arc_index(a.from, a.to);
    for (int k = 2; k < n && theta[ij] < -Tolerances::positivity; ++k) {
      const int q = net.triple_index(a.from, a.to, k);
      if (q < 0 || out[q] <= 0.0) continue;
      const double delta = std::min(out[q], -theta[ij]);
      out[q] -= delta;
      theta[ij] += delta;
      theta[net.arc_index(a.from, k)] -= delta;
      theta[net.arc_index(k, a.to)] -= delta;
    }
  }
  return out;
}

double profit(const Instance& inst, const BpmpSolution& sol) {
  const Parameters& P = inst.params();
  double revenue = 0.0;
  for (int id : sol.accepted) {
    const Request& r = inst.requests().at(static_cast<std::size_t>(id - 1));
    revenue += P.p * inst.d(r.origin, r.destination) * r.weight;
  }
  double cargo = 0.0;
  for (const auto& [a, load] : sol.arc_loads) cargo += inst.d(a.from, a.to) * load;
  return revenue - P.c * cargo - P.c * P.v * route_length(inst, sol.route);
}

double profit_from_flows(const Instance& inst, const std::vector<double>& y,
                         const std::vector<double>& theta, const std::vector<double>& x) {
  const Parameters& P = inst.params();
  const std::vector<Arc> arcs = arc_set(inst.n());
  double total = 0.0;
  for (std::size_t r = 0; r < y.size(); ++r) {
    const Request& req = inst.requests()[r];
    total += P.p * inst.d(req.origin, req.destination) * req.weight * y[r];
  }
  for (std::size_t a = 0; a < arcs.size(); ++a) {
    const double d = inst.d(arcs[a].from, arcs[a].to);
    total -= P.c * d * theta[a] + P.c * P.v * d * x[a];
  }
  return total;
}

double alt_profit(const Instance& inst, const std::vector<double>& y, const std::vector<double>& u,
                  const std::vector<double>& x) {
  const Parameters& P = inst.params();
  const Network net(inst.n());
  check_sizes(inst, y, u, net);
  double total = 0.0;
  for (std::size_t r = 0; r < y.size(); ++r) {
    const Request& req = inst.requests()[r];
    total += (P.p - P.c) * inst.d(req.origin, req.destination) * req.weight * y[r];
  }
  for (std::size_t q = 0; q < u.size(); ++q) {
    const Triple& t = net.triples()[q];
    total -= P.c * (inst.d(t.i, t.k) + inst.d(t.k, t.j) - inst.d(t.i, t.j)) * u[q];
  }
  for (std::size_t a = 0; a < net.arcs().size(); ++a) {
    total -= P.c * P.v * inst.d(net.arcs()[a].from, net.arcs()[a].to) * x[a];
  }
  return total;
}

BpmpSolution decode_solution(const Instance& inst, const BuiltModel& built, const Assignment& asg,
                             const DecodeOptions& opts) {
  const int n = inst.n();
  if (built.n != n) throw DecodeError("model and instance disagree on the node count");
  const Network net(n);
  BpmpSolution sol;
  sol.route = trace_route(built, asg);
  const std::vector<int> pos = route_positions(n, sol.route);

  std::vector<std::optional<VarRef>> yref;
  for (const Request& r : inst.requests()) {
    const auto ref = built.vars.y(r.id);
    if (!ref) throw DecodeError("model has no acceptance variable for request " + std::to_string(r.id));
    yref.push_back(ref);
    if (asg[*ref] < 0.5) continue;
    if (pos[r.origin] < 0 || pos[r.destination] < 0 || pos[r.origin] >= pos[r.destination]) {
      throw ConsistencyError("accepted request " + std::to_string(r.id) + " (" +
                             std::to_string(r.origin) + " -> " + std::to_string(r.destination) +
                             ") does not ride the route in order");
    }
    sol.accepted.push_back(r.id);
  }
  const std::map<Arc, double> expected = route_loads(inst, sol.route, sol.accepted);

  if (is_node_arc(built.kind)) {
    for (const auto& [a, load] : expected) {
      double sum = 0.0;
      for (const Request& r : inst.requests()) {
        const auto z = built.vars.z(r.id, a.from, a.to);
        if (z) sum += r.weight * asg[*z];
      }
      sol.arc_loads[a] = sum;
    }
  } else {
    std::vector<std::optional<VarRef>> uref;
    for (const Triple& t : net.triples()) uref.push_back(built.vars.u(t.i, t.j, t.k));
    const std::vector<double> y = values_of(asg, yref);
    const std::vector<double> u = values_of(asg, uref);
    if (opts.check) {
      for (std::size_t q = 0; q < u.size(); ++q) {
        if (u[q] <= 1e-6) continue;
        const Triple& t = net.triples()[q];
        if (pos[t.i] < 0 || pos[t.k] < 0 || pos[t.j] < 0 || !(pos[t.i] < pos[t.k]) ||
            !(pos[t.k] < pos[t.j])) {
          throw ConsistencyError("u" + to_string(t) + " is positive but its nodes are not visited in order");
        }
      }
    }
    std::vector<double> repaired = repair_negative_flows(inst, y, u);
    const std::vector<double> theta = arc_flows_from_triples(inst, y, repaired);
    for (const auto& [a, load] : expected) sol.arc_loads[a] = theta[net.arc_index(a.from, a.to)];
    if (opts.check) {
      for (std::size_t k = 0; k < theta.size(); ++k) {
        const Arc& a = net.arcs()[k];
        if (!expected.count(a) && std::fabs(theta[k]) > kLoadTol) {
          throw ConsistencyError("off-route arc " + to_string(a) + " carries " +
                                 std::to_string(theta[k]) + " tons");
        }
      }
    }
    sol.u = std::move(repaired);
  }
  if (opts.check) {
    for (const auto& [a, load] : expected) {
      if (std::fabs(sol.arc_loads[a] - load) > kLoadTol) {
        throw ConsistencyError("arc " + to_string(a) + " carries " + std::to_string(sol.arc_loads[a]) +
                               " tons, the accepted requests need " + std::to_string(load));
      }
    }
  }
  sol.profit = profit(inst, sol);
  return sol;
}

Assignment encode_solution(const Instance& inst, const BuiltModel& built, const BpmpSolution& sol) {
  const int n = inst.n();
  const MilpModel& model = built.model;
  std::vector<double> values(model.num_variables(), 0.0);
  auto put = [&](const std::optional<VarRef>& ref, double v) {
    if (ref) values[ref->index] = v;
  };
  const std::vector<int> pos = route_positions(n, sol.route);
  const std::map<Arc, double> loads = route_loads(inst, sol.route, sol.accepted);
  const std::size_t L = sol.route.size();

  for (std::size_t c = 0; c + 1 < L; ++c) put(built.vars.x(sol.route[c], sol.route[c + 1]), 1.0);
  for (int id : sol.accepted) put(built.vars.y(id), 1.0);
  for (const auto& [a, load] : loads) put(built.vars.theta(a.from, a.to), load);
  for (int i = 1; i <= n; ++i) {
    const auto s = built.vars.s(i);
    if (!s) continue;
    const double lo = model.variable(*s).lower;
    values[s->index] = pos[i] >= 0 ? pos[i] : (std::isfinite(lo) ? std::max(lo, 0.0) : 0.0);
  }

  if (is_node_arc(built.kind)) {
    for (int id : sol.accepted) {
      const Request& r = inst.requests()[id - 1];
      for (int c = pos[r.origin]; c < pos[r.destination]; ++c) {
        put(built.vars.z(id, sol.route[c], sol.route[c + 1]), 1.0);
      }
    }
  } else {
    // Weight bound for route node e that has boarded by position c.
    std::vector<std::vector<double>> boarded(L, std::vector<double>(L, 0.0));
    for (int id : sol.accepted) {
      const Request& r = inst.requests()[id - 1];
      for (int c = pos[r.origin]; c < static_cast<int>(L); ++c) boarded[c][pos[r.destination]] += r.weight;
    }
    for (std::size_t c = 0; c + 2 < L; ++c) {
      for (std::size_t e = c + 2; e < L; ++e) {
        if (boarded[c][e] == 0.0) continue;
        put(built.vars.u(sol.route[c], sol.route[e], sol.route[c + 1]), boarded[c][e]);
      }
    }
  }
  return Assignment(std::move(values));
}

std::vector<std::string> validate_solution(const Instance& inst, const BpmpSolution& sol) {
  const int n = inst.n();
  const Parameters& P = inst.params();
  std::vector<std::string> out;

  if (sol.route.empty() || sol.route.front() != 1 || sol.route.back() != n) {
    out.push_back("route: must start at 1 and end at " + std::to_string(n));
  }
  std::vector<char> seen(n + 1, 0);
  bool nodes_ok = true;
  for (int v : sol.route) {
    if (v < 1 || v > n) {
      out.push_back("route: node " + std::to_string(v) + " does not exist");
      nodes_ok = false;
    } else if (seen[v]++) {
      out.push_back("route: node " + std::to_string(v) + " is visited twice");
    }
  }
  if (!nodes_ok) return out;
  for (std::size_t k = 0; k + 1 < sol.route.size(); ++k) {
    const int a = sol.route[k];
    const int b = sol.route[k + 1];
    if (a == n || b == 1 || a == b) out.push_back("route: " + to_string(Arc{a, b}) + " is not an arc");
  }
  const double len = route_length(inst, sol.route);
  if (len > P.D + 1e-9 * std::max(1.0, std::fabs(P.D))) {
    out.push_back("distance: route length " + std::to_string(len) + " exceeds " + std::to_string(P.D));
  }

  const std::vector<int> pos = route_positions(n, sol.route);
  std::vector<int> riding;
  std::set<int> ids;
  for (int id : sol.accepted) {
    if (!ids.insert(id).second) {
      out.push_back("order: request " + std::to_string(id) + " accepted twice");
      continue;
    }
    if (id < 1 || id > static_cast<int>(inst.requests().size())) {
      out.push_back("order: unknown request " + std::to_string(id));
      continue;
    }
    const Request& r = inst.requests()[id - 1];
    if (pos[r.origin] < 0 || pos[r.destination] < 0) {
      out.push_back("order: request " + std::to_string(id) + " has an endpoint off the route");
    } else if (pos[r.origin] >= pos[r.destination]) {
      out.push_back("order: request " + std::to_string(id) + " is delivered before it is picked up");
    } else {
      riding.push_back(id);
    }
  }

  const std::map<Arc, double> loads = route_loads(inst, sol.route, riding);
  for (const auto& [a, load] : loads) {
    if (load > P.Q + 1e-9) {
      out.push_back("capacity: arc " + to_string(a) + " carries " + std::to_string(load) +
                    " tons, capacity " + std::to_string(P.Q));
    }
    auto it = sol.arc_loads.find(a);
    const double stored = it == sol.arc_loads.end() ? 0.0 : it->second;
    if (std::fabs(stored - load) > kLoadTol) {
      out.push_back("loads: arc " + to_string(a) + " reports " + std::to_string(stored) +
                    " tons, accepted requests give " + std::to_string(load));
    }
  }
  for (const auto& [a, load] : sol.arc_loads) {
    if (!loads.count(a) && std::fabs(load) > kLoadTol) {
      out.push_back("loads: off-route arc " + to_string(a) + " carries " + std::to_string(load) + " tons");
    }
  }

  BpmpSolution clean = sol;
  clean.accepted = riding;
  clean.arc_loads = loads;
  const double expected = profit(inst, clean);
  if (std::fabs(expected - sol.profit) > 1e-6 * std::max(1.0, std::fabs(expected))) {
    out.push_back("profit: reported " + std::to_string(sol.profit) + ", recomputed " +
                  std::to_string(expected));
  }
  return out;
}

nlohmann::json solution_to_json(const BpmpSolution& sol, const std::vector<std::string>& violations) {
  nlohmann::json loads = nlohmann::json::array();
  for (const auto& [a, t] : sol.arc_loads) loads.push_back({{"from", a.from}, {"to", a.to}, {"tons", t}});
  return nlohmann::json{{"route", sol.route},
                        {"accepted", sol.accepted},
                        {"profit", sol.profit},
                        {"arc_loads", loads},
                        {"violations", violations}};
}

BpmpSolution solution_from_json(const nlohmann::json& j) {
  try {
    BpmpSolution sol;
    sol.route = j.at("route").get<std::vector<int>>();
    sol.accepted = j.at("accepted").get<std::vector<int>>();
    std::sort(sol.accepted.begin(), sol.accepted.end());
    sol.profit = j.at("profit").get<double>();
    for (const auto& e : j.at("arc_loads")) {
      sol.arc_loads[Arc{e.at("from").get<int>(), e.at("to").get<int>()}] = e.at("tons").get<double>();
    }
    return sol;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("solution report: ") + e.what());
  }
}

}  // namespace bpmp
