#include "bpmp/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>
#include <vector>

#include "bpmp/errors.hpp"
#include "bpmp/tolerances.hpp"
#include "simplex.hpp"

namespace bpmp {

using detail::Basis;
using detail::Simplex;
using detail::SimplexStatus;

std::string to_string(MilpStatus status) {
  switch (status) {
    case MilpStatus::optimal: return "optimal";
    case MilpStatus::feasible: return "feasible";
    case MilpStatus::infeasible: return "infeasible";
    case MilpStatus::node_limit: return "node_limit";
  }
  return "unknown";
}

namespace {

void check_finite(const MilpModel& model) {
  for (const Variable& v : model.variables()) {
    if (std::isnan(v.lower) || std::isnan(v.upper)) {
      throw ModelError("variable " + v.name + " has a NaN bound");
    }
    if (!std::isfinite(model.objective_coef(*model.find(v.name)))) {
      throw ModelError("variable " + v.name + " has a non-finite objective coefficient");
    }
  }
  for (const LinearConstraint& row : model.constraints()) {
    if (!std::isfinite(row.rhs)) throw ModelError("constraint " + row.name + " has a non-finite rhs");
    for (const Term& t : row.terms) {
      if (!std::isfinite(t.coef)) {
        throw ModelError("constraint " + row.name + " has a non-finite coefficient");
      }
    }
  }
}

LpStatus convert(SimplexStatus s) {
  switch (s) {
    case SimplexStatus::optimal: return LpStatus::optimal;
    case SimplexStatus::infeasible: return LpStatus::infeasible;
    case SimplexStatus::unbounded: return LpStatus::unbounded;
  }
  return LpStatus::infeasible;
}

bool is_integral(double v) { return std::fabs(v - std::round(v)) <= Tolerances::integrality; }

struct BoundChange {
  std::size_t var;
  double lo;
  double hi;
};

struct Node {
  std::size_t id = 0;
  double bound = kInf;  // parent LP objective
  std::vector<BoundChange> changes;  // path from the root
  Basis basis;          // parent's optimal basis
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound < b.bound;  // larger bound first
    return a.id > b.id;                               // then older node
  }
};

class BranchAndBound {
 public:
  BranchAndBound(const MilpModel& model, const MilpOptions& opts)
      : model_(model), opts_(opts), lp_(model) {
    for (std::size_t j = 0; j < model.num_variables(); ++j) {
      root_lo_.push_back(lp_.lower(j));
      root_hi_.push_back(lp_.upper(j));
      if (model.variables()[j].kind == VarKind::binary) binaries_.push_back(j);
    }
    priority_ = model.branch_priority();
    if (priority_.empty()) priority_.assign(model.num_variables(), 0);
  }

  MilpResult run() {
    const auto start = std::chrono::steady_clock::now();
    auto out_of_time = [&] {
      if (!std::isfinite(opts_.time_limit)) return false;
      const std::chrono::duration<double> el = std::chrono::steady_clock::now() - start;
      return el.count() > opts_.time_limit;
    };

    std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
    open.push(Node{next_id_++, kInf, {}, {}});
    bool limit_hit = false;
    bool time_hit = false;
    double frontier = -kInf;  // best bound among nodes abandoned by a limit

    while (!open.empty()) {
      Node node = open.top();
      open.pop();
      if (prunable(node.bound)) continue;
      // Plunge from this node until the dive dies.
      while (true) {
        if (nodes_ >= opts_.node_limit || out_of_time()) {
          limit_hit = nodes_ >= opts_.node_limit;
          time_hit = !limit_hit;
          frontier = std::max(frontier, node.bound);
          break;
        }
        apply(node.changes);
        const SimplexStatus st = lp_.solve(node.basis.empty() ? nullptr : &node.basis);
        ++nodes_;
        if (st == SimplexStatus::unbounded) {
          throw ModelError("LP relaxation is unbounded");
        }
        if (st == SimplexStatus::infeasible) break;
        const double obj = lp_.objective();
        if (prunable(obj)) break;
        const std::vector<double> x = lp_.structural_values();
        const std::size_t var = pick_branch(x);
        if (var == kNone) {
          offer_incumbent(x, node.changes);
          break;
        }
        Basis basis = lp_.basis();
        Node down{next_id_++, obj, node.changes, basis};
        down.changes.push_back({var, current_lo(node.changes, var), 0.0});
        Node up{next_id_++, obj, node.changes, basis};
        up.changes.push_back({var, 1.0, current_hi(node.changes, var)});
        if (x[var] >= 0.5) {
          open.push(std::move(down));
          node = std::move(up);
        } else {
          open.push(std::move(up));
          node = std::move(down);
        }
      }
      if (limit_hit || time_hit) break;
    }

    MilpResult res;
    res.nodes_explored = nodes_;
    if (incumbent_) {
      res.incumbent = Assignment(*incumbent_);
      res.objective = incumbent_obj_;
    }
    if (limit_hit || time_hit) {
      double bound = frontier;
      while (!open.empty()) {
        bound = std::max(bound, open.top().bound);
        open.pop();
      }
      res.best_bound = std::max(bound, incumbent_ ? incumbent_obj_ : -kInf);
      if (time_hit && incumbent_) {
        res.status = MilpStatus::feasible;
      } else {
        res.status = MilpStatus::node_limit;
      }
      return res;
    }
    if (!incumbent_) {
      res.status = MilpStatus::infeasible;
      res.best_bound = -kInf;
      return res;
    }
    res.status = MilpStatus::optimal;
    res.best_bound = incumbent_obj_;
    return res;
  }

 private:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  bool prunable(double bound) const {
    if (!incumbent_) return false;
    const double tol = opts_.gap_tolerance + 1e-9 * std::fabs(incumbent_obj_);
    return bound <= incumbent_obj_ + tol;
  }

  double current_lo(const std::vector<BoundChange>& ch, std::size_t var) const {
    double lo = root_lo_[var];
    for (const BoundChange& c : ch) {
      if (c.var == var) lo = c.lo;
    }
    return lo;
  }
  double current_hi(const std::vector<BoundChange>& ch, std::size_t var) const {
    double hi = root_hi_[var];
    for (const BoundChange& c : ch) {
      if (c.var == var) hi = c.hi;
    }
    return hi;
  }

  void apply(const std::vector<BoundChange>& changes) {
    for (std::size_t j : touched_) lp_.set_bounds(j, root_lo_[j], root_hi_[j]);
    touched_.clear();
    for (const BoundChange& c : changes) {
      lp_.set_bounds(c.var, c.lo, c.hi);
      touched_.push_back(c.var);
    }
  }

  // Most fractional binary in the highest priority class that has one;
  // ties go to the lowest index.
  std::size_t pick_branch(const std::vector<double>& x) const {
    std::size_t best = kNone;
    int best_prio = 0;
    double best_frac = -1.0;
    for (std::size_t j : binaries_) {
      if (is_integral(x[j])) continue;
      const double f = x[j] - std::floor(x[j]);
      const double frac = std::min(f, 1.0 - f);
      const int prio = priority_[j];
      if (best == kNone || prio > best_prio || (prio == best_prio && frac > best_frac + 1e-12)) {
        best = j;
        best_prio = prio;
        best_frac = frac;
      }
    }
    return best;
  }

  // Re-solves with every binary fixed at its rounded value so the stored
  // incumbent is exactly integral with consistent continuous values.
  void offer_incumbent(const std::vector<double>& x, const std::vector<BoundChange>& changes) {
    std::vector<BoundChange> fixed = changes;
    for (std::size_t j : binaries_) {
      const double v = std::round(x[j]);
      fixed.push_back({j, v, v});
    }
    const Basis basis = lp_.basis();
    apply(fixed);
    std::vector<double> vals = x;
    double obj = 0.0;
    if (lp_.solve(&basis) == SimplexStatus::optimal) {
      vals = lp_.structural_values();
      for (std::size_t j : binaries_) vals[j] = std::round(vals[j]);
    } else {
      for (std::size_t j : binaries_) vals[j] = std::round(vals[j]);
    }
    for (std::size_t j = 0; j < vals.size(); ++j) obj += model_.objective_coef(VarRef{j}) * vals[j];
    if (incumbent_ && obj <= incumbent_obj_) return;
    if (!evaluate(model_, Assignment(vals)).feasible()) return;
    incumbent_ = std::move(vals);
    incumbent_obj_ = obj;
  }

  const MilpModel& model_;
  MilpOptions opts_;
  Simplex lp_;
  std::vector<double> root_lo_;
  std::vector<double> root_hi_;
  std::vector<std::size_t> binaries_;
  std::vector<int> priority_;
  std::vector<std::size_t> touched_;
  std::optional<std::vector<double>> incumbent_;
  double incumbent_obj_ = -kInf;
  std::size_t nodes_ = 0;
  std::size_t next_id_ = 0;
};

}  // namespace

LpSolution solve_lp(const MilpModel& model, bool relax_integrality) {
  check_finite(model);
  if (!relax_integrality) {
    for (const Variable& v : model.variables()) {
      if (v.kind == VarKind::binary && v.lower != v.upper) {
        throw ModelError("binary " + v.name + " is not fixed; use solve_milp");
      }
    }
  }
  Simplex lp(model);
  LpSolution out;
  out.status = convert(lp.solve());
  out.iterations = lp.iterations();
  if (out.status == LpStatus::optimal) {
    out.objective = lp.objective();
    out.values = Assignment(lp.structural_values());
  }
  return out;
}

MilpResult solve_milp(const MilpModel& model, const MilpOptions& opts) {
  check_finite(model);
  BranchAndBound bb(model, opts);
  return bb.run();
}

}  // namespace bpmp
