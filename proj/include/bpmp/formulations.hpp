#pragma once

// Builders for the node-arc, enhanced node-arc, triples and enhanced
// triples MIPs, plus the restricted and route-fixed variants used by the
// heuristic.

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "bpmp/core.hpp"
#include "bpmp/mip.hpp"

namespace bpmp {

enum class FormulationKind { node_arc, enhanced_node_arc, triples, enhanced_triples };

// "node-arc", "enhanced-node-arc", "triples", "enhanced-triples".
std::string to_string(FormulationKind kind);
// Throws ConfigError for an unknown name.
FormulationKind parse_formulation(const std::string& name);

bool is_node_arc(FormulationKind kind);

// Lookup from (role, indices) to model variables. Requests are addressed
// by id.
class VarMap {
 public:
  std::optional<VarRef> x(int i, int j) const { return get('x', i, j, 0); }
  std::optional<VarRef> y(int request_id) const { return get('y', request_id, 0, 0); }
  std::optional<VarRef> z(int request_id, int i, int j) const {
    return get('z', request_id, i, j);
  }
  std::optional<VarRef> theta(int i, int j) const { return get('t', i, j, 0); }
  std::optional<VarRef> s(int i) const { return get('s', i, 0, 0); }
  std::optional<VarRef> u(int i, int j, int k) const { return get('u', i, j, k); }

  void put(char role, int a, int b, int c, VarRef ref) { map_[key(role, a, b, c)] = ref.index; }
  // Number of variables registered under a role letter (t for theta).
  std::size_t count(char role) const;

 private:
  static std::uint64_t key(char role, int a, int b, int c) {
    return (static_cast<std::uint64_t>(static_cast<unsigned char>(role)) << 48) |
           (static_cast<std::uint64_t>(a & 0xffff) << 32) |
           (static_cast<std::uint64_t>(b & 0xffff) << 16) |
           static_cast<std::uint64_t>(c & 0xffff);
  }
  std::optional<VarRef> get(char role, int a, int b, int c) const {
    auto it = map_.find(key(role, a, b, c));
    if (it == map_.end()) return std::nullopt;
    return VarRef{it->second};
  }

  std::unordered_map<std::uint64_t, std::size_t> map_;
};

struct BuiltModel {
  MilpModel model;
  VarMap vars;
  FormulationKind kind = FormulationKind::enhanced_triples;
  int n = 0;
};

// Constraint family of a row name produced by the builders: the text
// before the first underscore ("route", "degree", "distance", "mtz",
// "lmtz", "bigm", "src", "sink", "cons", "load", "cap", "cond", "trip",
// "ulink", "cutout", "cutin").
std::string constraint_family(const std::string& row_name);

struct BuildOptions {
  BigMMode big_m = BigMMode::data_independent;
};

// All builders throw InvalidInstanceError when validate_instance reports
// errors.
BuiltModel build_node_arc(const Instance& inst, const BuildOptions& opts = {});
BuiltModel build_enhanced_node_arc(const Instance& inst, const BuildOptions& opts = {});
BuiltModel build_triples(const Instance& inst);
BuiltModel build_enhanced_triples(const Instance& inst);
BuiltModel build_model(const Instance& inst, FormulationKind kind,
                       const BuildOptions& opts = {});

// Enhanced triples with u fixed to zero outside `attractive`. Throws
// ModelError for a triple that is not in the triple set.
BuiltModel build_restricted_triples(const Instance& inst,
                                    const std::vector<Triple>& attractive);

// Copy of `built` with lower bound 1 on the x of every route arc and the
// y of every accepted request. Throws ModelError unless the arcs form a
// simple path from 1 to n and every accepted request lies on it in order.
BuiltModel fix_route_and_requests(const BuiltModel& built, const Instance& inst,
                                  const std::vector<Arc>& route_arcs,
                                  const std::vector<int>& accepted);

}  // namespace bpmp
