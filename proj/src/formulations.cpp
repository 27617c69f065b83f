#include "bpmp/formulations.hpp"

#include <algorithm>
#include <set>

#include "bpmp/errors.hpp"

namespace bpmp {

namespace {

std::string arc_suffix(int i, int j) { return std::to_string(i) + "_" + std::to_string(j); }

void require_valid(const Instance& inst) {
  const ValidationReport report = validate_instance(inst);
  if (report.ok()) return;
  std::string msg = "invalid instance:";
  for (const std::string& e : report.errors) msg += "\n  " + e;
  throw InvalidInstanceError(msg);
}

// Variables and rows shared by every kind.
struct Common {
  const Instance& inst;
  Network net;
  BuiltModel out;

  Common(const Instance& in, FormulationKind kind) : inst(in), net(in.n()) {
    out.kind = kind;
    out.n = in.n();
  }

  MilpModel& m() { return out.model; }
  VarRef x(int i, int j) const { return *out.vars.x(i, j); }
  VarRef theta(int i, int j) const { return *out.vars.theta(i, j); }
  VarRef s(int i) const { return *out.vars.s(i); }
  VarRef y(int id) const { return *out.vars.y(id); }

  void add_core_variables(double theta_lower, double s_lower, double s_upper) {
    const int n = inst.n();
    for (const Arc& a : net.arcs()) {
      out.vars.put('x', a.from, a.to, 0,
                   m().add_variable("x_" + arc_suffix(a.from, a.to), VarKind::binary, 0, 1));
    }
    const bool per_pair = !inst.has_duplicate_pairs();
    for (const Request& r : inst.requests()) {
      const std::string name = per_pair ? "y_" + arc_suffix(r.origin, r.destination)
                                        : "y_r" + std::to_string(r.id);
      out.vars.put('y', r.id, 0, 0, m().add_variable(name, VarKind::binary, 0, 1));
    }
    for (const Arc& a : net.arcs()) {
      out.vars.put('t', a.from, a.to, 0,
                   m().add_variable("theta_" + arc_suffix(a.from, a.to), VarKind::continuous,
                                    theta_lower, kInf));
    }
    for (int i = 1; i <= n; ++i) {
      const double lo = i == 1 ? 0.0 : s_lower;
      const double hi = i == 1 ? 0.0 : s_upper;
      out.vars.put('s', i, 0, 0,
                   m().add_variable("s_" + std::to_string(i), VarKind::continuous, lo, hi));
    }
  }

  void add_objective() {
    const Parameters& prm = inst.params();
    for (const Request& r : inst.requests()) {
      m().add_objective(y(r.id), prm.p * inst.d(r.origin, r.destination) * r.weight);
    }
    for (const Arc& a : net.arcs()) {
      m().add_objective(theta(a.from, a.to), -prm.c * inst.d(a.from, a.to));
    }
    for (const Arc& a : net.arcs()) {
      m().add_objective(x(a.from, a.to), -prm.c * prm.v * inst.d(a.from, a.to));
    }
  }

  // Unit flow from 1 to n: leave 1 once, enter n once, balance elsewhere.
  void add_routing(bool node_degree) {
    const int n = inst.n();
    std::vector<Term> start;
    std::vector<Term> end;
    for (const Arc& a : net.arcs()) {
      if (a.from == 1) start.push_back({x(a.from, a.to), 1.0});
      if (a.to == n) end.push_back({x(a.from, a.to), 1.0});
    }
    m().add_constraint("route_start", start, Sense::equal, 1.0);
    m().add_constraint("route_end", end, Sense::equal, 1.0);
    for (int k = 2; k < n; ++k) {
      std::vector<Term> bal;
      for (const Arc& a : net.arcs()) {
        if (a.to == k) bal.push_back({x(a.from, a.to), 1.0});
        if (a.from == k) bal.push_back({x(a.from, a.to), -1.0});
      }
      m().add_constraint("route_bal_" + std::to_string(k), bal, Sense::equal, 0.0);
    }
    if (!node_degree) return;
    for (int k = 2; k < n; ++k) {
      std::vector<Term> in;
      for (const Arc& a : net.arcs()) {
        if (a.to == k) in.push_back({x(a.from, a.to), 1.0});
      }
      m().add_constraint("degree_" + std::to_string(k), in, Sense::less_equal, 1.0);
    }
  }

  void add_distance() {
    std::vector<Term> terms;
    for (const Arc& a : net.arcs()) terms.push_back({x(a.from, a.to), inst.d(a.from, a.to)});
    m().add_constraint("distance", terms, Sense::less_equal, inst.params().D);
  }

  void add_mtz() {
    const double n = inst.n();
    for (const Arc& a : net.arcs()) {
      m().add_constraint("mtz_" + arc_suffix(a.from, a.to),
                         {{s(a.from), 1.0}, {s(a.to), -1.0}, {x(a.from, a.to), n + 1}},
                         Sense::less_equal, n);
    }
  }

  // Lifted sequencing rows over ordered interior pairs.
  void add_lifted_mtz() {
    const int n = inst.n();
    for (int i = 2; i < n; ++i) {
      for (int j = 2; j < n; ++j) {
        if (i == j) continue;
        m().add_constraint("lmtz_" + arc_suffix(i, j),
                           {{x(i, j), n - 1.0}, {s(i), 1.0}, {s(j), -1.0}, {x(j, i), n - 3.0}},
                           Sense::less_equal, n - 2.0);
      }
    }
  }

  void add_conditional_arc_flow() {
    const double Q = inst.params().Q;
    for (const Arc& a : net.arcs()) {
      m().add_constraint("cond_" + arc_suffix(a.from, a.to),
                         {{theta(a.from, a.to), 1.0}, {x(a.from, a.to), -Q}},
                         Sense::less_equal, 0.0);
    }
  }

  // Per-request arc variables and their flow rows, then the arc loads.
  void add_commodity_flow() {
    const int n = inst.n();
    for (const Request& r : inst.requests()) {
      for (const Arc& a : net.arcs()) {
        const VarRef v = m().add_variable(
            "z_r" + std::to_string(r.id) + "_" + arc_suffix(a.from, a.to), VarKind::binary, 0, 1);
        out.vars.put('z', r.id, a.from, a.to, v);
        // Detours are rarely worth it; let the LP price them last.
        if (a.from != r.origin || a.to != r.destination) m().set_deferred(v);
      }
    }
    for (const Request& r : inst.requests()) {
      const std::string tag = "r" + std::to_string(r.id);
      auto z = [&](const Arc& a) { return *out.vars.z(r.id, a.from, a.to); };
      std::vector<Term> src{{y(r.id), -1.0}};
      std::vector<Term> sink{{y(r.id), -1.0}};
      for (const Arc& a : net.arcs()) {
        if (a.from == r.origin) src.push_back({z(a), 1.0});
        if (a.to == r.destination) sink.push_back({z(a), 1.0});
      }
      m().add_constraint("src_" + tag, src, Sense::equal, 0.0);
      m().add_constraint("sink_" + tag, sink, Sense::equal, 0.0);
      for (int h = 1; h <= n; ++h) {
        if (h == r.origin || h == r.destination) continue;
        std::vector<Term> bal;
        for (const Arc& a : net.arcs()) {
          if (a.to == h) bal.push_back({z(a), 1.0});
          if (a.from == h) bal.push_back({z(a), -1.0});
        }
        m().add_constraint("cons_" + tag + "_" + std::to_string(h), bal, Sense::equal, 0.0);
      }
    }
    for (const Arc& a : net.arcs()) {
      std::vector<Term> load{{theta(a.from, a.to), 1.0}};
      for (const Request& r : inst.requests()) {
        load.push_back({*out.vars.z(r.id, a.from, a.to), -r.weight});
      }
      m().add_constraint("load_" + arc_suffix(a.from, a.to), load, Sense::equal, 0.0);
    }
  }

  void add_triples_variables() {
    for (const Triple& t : net.triples()) {
      out.vars.put('u', t.i, t.j, t.k,
                   m().add_variable("u_" + arc_suffix(t.i, t.j) + "_" + std::to_string(t.k),
                                    VarKind::continuous, 0.0, kInf));
    }
  }

  // theta_ij = sum w y over requests i -> j + diversions through (i,j)
  // - diversions of (i,j).
  void add_triples_rows() {
    const auto& arcs = net.arcs();
    std::vector<std::vector<Term>> rows(arcs.size());
    for (std::size_t a = 0; a < arcs.size(); ++a) {
      rows[a].push_back({theta(arcs[a].from, arcs[a].to), 1.0});
    }
    for (const Request& r : inst.requests()) {
      rows[net.arc_index(r.origin, r.destination)].push_back({y(r.id), -r.weight});
    }
    for (const Triple& t : net.triples()) {
      const VarRef u = *out.vars.u(t.i, t.j, t.k);
      rows[net.arc_index(t.i, t.k)].push_back({u, -1.0});
      rows[net.arc_index(t.k, t.j)].push_back({u, -1.0});
      rows[net.arc_index(t.i, t.j)].push_back({u, 1.0});
    }
    for (std::size_t a = 0; a < arcs.size(); ++a) {
      m().add_constraint("trip_" + arc_suffix(arcs[a].from, arcs[a].to), std::move(rows[a]),
                         Sense::equal, 0.0);
    }
  }

  void add_demand_cuts() {
    const int n = inst.n();
    const double Q = inst.params().Q;
    for (int i = 1; i < n; ++i) {
      std::vector<Term> terms;
      for (const Request& r : inst.requests()) {
        if (r.origin == i) terms.push_back({y(r.id), r.weight});
      }
      if (!terms.empty()) {
        m().add_constraint("cutout_" + std::to_string(i), terms, Sense::less_equal, Q);
      }
    }
    for (int j = 2; j <= n; ++j) {
      std::vector<Term> terms;
      for (const Request& r : inst.requests()) {
        if (r.destination == j) terms.push_back({y(r.id), r.weight});
      }
      if (!terms.empty()) {
        m().add_constraint("cutin_" + std::to_string(j), terms, Sense::less_equal, Q);
      }
    }
  }

  void prioritize_routing() {
    for (const Arc& a : net.arcs()) m().set_branch_priority(x(a.from, a.to), 1);
  }
};

long node_arc_big_m(const Instance& inst, BigMMode mode) {
  long m = compute_big_m(inst, mode);
  // Several requests may share a node pair; the pair-count value no
  // longer bounds how many ride one arc.
  if (mode == BigMMode::data_independent && inst.has_duplicate_pairs()) {
    m = std::max<long>(m, static_cast<long>(inst.requests().size()));
  }
  return m;
}

BuiltModel build_node_arc_kind(const Instance& inst, const BuildOptions& opts, bool enhanced) {
  require_valid(inst);
  Common b(inst, enhanced ? FormulationKind::enhanced_node_arc : FormulationKind::node_arc);
  b.add_core_variables(0.0, 0.0, kInf);
  b.add_objective();
  b.add_routing(!enhanced);
  b.add_mtz();
  b.add_distance();
  b.add_commodity_flow();
  if (enhanced) {
    b.add_conditional_arc_flow();
  } else {
    const double M = static_cast<double>(node_arc_big_m(inst, opts.big_m));
    const double Q = inst.params().Q;
    for (const Arc& a : b.net.arcs()) {
      std::vector<Term> link;
      for (const Request& r : inst.requests()) {
        link.push_back({*b.out.vars.z(r.id, a.from, a.to), 1.0});
      }
      link.push_back({b.x(a.from, a.to), -M});
      b.m().add_constraint("bigm_" + arc_suffix(a.from, a.to), link, Sense::less_equal, 0.0);
    }
    for (const Arc& a : b.net.arcs()) {
      b.m().add_constraint("cap_" + arc_suffix(a.from, a.to), {{b.theta(a.from, a.to), 1.0}},
                           Sense::less_equal, Q);
    }
  }
  b.prioritize_routing();
  return std::move(b.out);
}

}  // namespace

std::string to_string(FormulationKind kind) {
  switch (kind) {
    case FormulationKind::node_arc: return "node-arc";
    case FormulationKind::enhanced_node_arc: return "enhanced-node-arc";
    case FormulationKind::triples: return "triples";
    case FormulationKind::enhanced_triples: return "enhanced-triples";
  }
  return "unknown";
}

FormulationKind parse_formulation(const std::string& name) {
  for (FormulationKind k : {FormulationKind::node_arc, FormulationKind::enhanced_node_arc,
                            FormulationKind::triples, FormulationKind::enhanced_triples}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown formulation '" + name + "'");
}

bool is_node_arc(FormulationKind kind) {
  return kind == FormulationKind::node_arc || kind == FormulationKind::enhanced_node_arc;
}

std::size_t VarMap::count(char role) const {
  std::size_t total = 0;
  for (const auto& [k, v] : map_) {
    if (static_cast<char>(k >> 48) == role) ++total;
  }
  return total;
}

std::string constraint_family(const std::string& row_name) {
  return row_name.substr(0, row_name.find('_'));
}

BuiltModel build_node_arc(const Instance& inst, const BuildOptions& opts) {
  return build_node_arc_kind(inst, opts, false);
}

BuiltModel build_enhanced_node_arc(const Instance& inst, const BuildOptions& opts) {
  return build_node_arc_kind(inst, opts, true);
}

BuiltModel build_triples(const Instance& inst) {
  require_valid(inst);
  Common b(inst, FormulationKind::triples);
  b.add_core_variables(0.0, 0.0, kInf);
  b.add_triples_variables();
  b.add_objective();
  b.add_routing(false);
  b.add_mtz();
  b.add_distance();
  b.add_triples_rows();
  b.add_conditional_arc_flow();
  const double Q = inst.params().Q;
  for (const Triple& t : b.net.triples()) {
    b.m().add_constraint("ulink_" + arc_suffix(t.i, t.j) + "_" + std::to_string(t.k),
                         {{*b.out.vars.u(t.i, t.j, t.k), 1.0}, {b.x(t.i, t.k), -Q}},
                         Sense::less_equal, 0.0);
  }
  return std::move(b.out);
}

BuiltModel build_enhanced_triples(const Instance& inst) {
  require_valid(inst);
  Common b(inst, FormulationKind::enhanced_triples);
  b.add_core_variables(-kInf, 1.0, inst.n());
  b.add_triples_variables();
  b.add_objective();
  b.add_routing(true);
  b.add_lifted_mtz();
  b.add_distance();
  b.add_triples_rows();
  b.add_conditional_arc_flow();
  b.add_demand_cuts();
  return std::move(b.out);
}

BuiltModel build_model(const Instance& inst, FormulationKind kind, const BuildOptions& opts) {
  switch (kind) {
    case FormulationKind::node_arc: return build_node_arc(inst, opts);
    case FormulationKind::enhanced_node_arc: return build_enhanced_node_arc(inst, opts);
    case FormulationKind::triples: return build_triples(inst);
    case FormulationKind::enhanced_triples: return build_enhanced_triples(inst);
  }
  throw ConfigError("unknown formulation kind");
}

BuiltModel build_restricted_triples(const Instance& inst, const std::vector<Triple>& attractive) {
  const Network net(inst.n());
  std::set<Triple> keep;
  for (const Triple& t : attractive) {
    if (net.triple_index(t.i, t.j, t.k) < 0) {
      throw ModelError("triple " + to_string(t) + " is not in the triple set");
    }
    keep.insert(t);
  }
  BuiltModel built = build_enhanced_triples(inst);
  for (const Triple& t : net.triples()) {
    if (!keep.count(t)) built.model.set_bounds(*built.vars.u(t.i, t.j, t.k), 0.0, 0.0);
  }
  return built;
}

BuiltModel fix_route_and_requests(const BuiltModel& built, const Instance& inst,
                                  const std::vector<Arc>& route_arcs,
                                  const std::vector<int>& accepted) {
  const int n = inst.n();
  std::vector<int> succ(n + 1, 0);
  std::vector<int> indeg(n + 1, 0);
  for (const Arc& a : route_arcs) {
    if (!built.vars.x(a.from, a.to)) {
      throw ModelError("arc " + to_string(a) + " is not in the model");
    }
    if (succ[a.from] != 0) throw ModelError("route arcs branch at node " + std::to_string(a.from));
    if (++indeg[a.to] > 1) throw ModelError("route arcs merge at node " + std::to_string(a.to));
    succ[a.from] = a.to;
  }
  std::vector<int> position(n + 1, -1);
  int node = 1;
  int pos = 0;
  std::size_t used = 0;
  position[1] = 0;
  while (node != n) {
    const int next = succ[node];
    if (next == 0) throw ModelError("route arcs do not form a path from 1 to " + std::to_string(n));
    if (position[next] >= 0) throw ModelError("route arcs contain a cycle");
    position[next] = ++pos;
    node = next;
    ++used;
  }
  if (used != route_arcs.size()) {
    throw ModelError("route arcs include arcs off the path from 1 to " + std::to_string(n));
  }

  BuiltModel out = built;
  for (const Arc& a : route_arcs) {
    const VarRef x = *out.vars.x(a.from, a.to);
    out.model.set_bounds(x, 1.0, out.model.variable(x).upper);
  }
  for (int id : accepted) {
    auto it = std::find_if(inst.requests().begin(), inst.requests().end(),
                           [id](const Request& r) { return r.id == id; });
    if (it == inst.requests().end()) throw ModelError("unknown request id " + std::to_string(id));
    if (position[it->origin] < 0 || position[it->destination] < 0 ||
        position[it->origin] >= position[it->destination]) {
      throw ModelError("request " + std::to_string(id) + " is not carried along the route");
    }
    const VarRef y = *out.vars.y(id);
    out.model.set_bounds(y, 1.0, out.model.variable(y).upper);
  }
  return out;
}

}  // namespace bpmp
