#pragma once

// Solver-agnostic MILP representation (maximization only), LP/MPS text
// emitters and an assignment evaluator.

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace bpmp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarKind { binary, continuous };
enum class Sense { less_equal, greater_equal, equal };

struct VarRef {
  std::size_t index = 0;

  friend bool operator==(VarRef, VarRef) = default;
};

struct Variable {
  std::string name;
  VarKind kind = VarKind::continuous;
  double lower = 0.0;
  double upper = kInf;
};

struct Term {
  VarRef var;
  double coef = 0.0;
};

struct LinearConstraint {
  std::string name;
  std::vector<Term> terms;  // one entry per variable, nonzero coefficients
  Sense sense = Sense::less_equal;
  double rhs = 0.0;
};

class MilpModel {
 public:
  // Throws ModelError on a duplicate name or inconsistent bounds.
  VarRef add_variable(std::string name, VarKind kind, double lower = 0.0,
                      double upper = kInf);
  // Merges repeated variables, drops zero coefficients. Throws ModelError
  // for unregistered variables or a duplicate constraint name.
  void add_constraint(std::string name, std::vector<Term> terms, Sense sense,
                      double rhs);
  // Adds coef to the objective coefficient of var.
  void add_objective(VarRef var, double coef);
  void set_bounds(VarRef var, double lower, double upper);
  void set_branch_priority(VarRef var, int priority);
  // Deferred columns are priced by the LP solver only once the others
  // admit no improving move. Purely a speed hint; optima are unchanged.
  void set_deferred(VarRef var, bool deferred = true);

  const std::vector<Variable>& variables() const { return vars_; }
  const Variable& variable(VarRef v) const { return vars_.at(v.index); }
  const std::vector<LinearConstraint>& constraints() const { return rows_; }
  // Objective terms in order of first appearance.
  std::vector<Term> objective() const;
  double objective_coef(VarRef v) const { return obj_.at(v.index); }
  // Empty when no priorities were set; otherwise one entry per variable.
  const std::vector<int>& branch_priority() const { return priority_; }
  // Empty when nothing is deferred; otherwise one flag per variable.
  const std::vector<char>& deferred() const { return deferred_; }

  std::optional<VarRef> find(const std::string& name) const;
  std::optional<std::size_t> find_constraint(const std::string& name) const;
  std::size_t num_variables() const { return vars_.size(); }

 private:
  std::vector<Variable> vars_;
  std::vector<double> obj_;
  std::vector<std::size_t> obj_order_;
  std::vector<LinearConstraint> rows_;
  std::vector<int> priority_;
  std::vector<char> deferred_;
  std::unordered_map<std::string, std::size_t> var_names_;
  std::unordered_map<std::string, std::size_t> row_names_;
};

// Values for (some of) a model's variables, indexed by VarRef.
class Assignment {
 public:
  Assignment() = default;
  explicit Assignment(std::size_t num_vars) : values_(num_vars), set_(num_vars, 0) {}
  explicit Assignment(std::vector<double> values)
      : values_(std::move(values)), set_(values_.size(), 1) {}

  void set(VarRef v, double value) {
    values_.at(v.index) = value;
    set_.at(v.index) = 1;
  }
  bool has(VarRef v) const { return v.index < set_.size() && set_[v.index]; }
  double operator[](VarRef v) const { return values_.at(v.index); }
  std::size_t size() const { return values_.size(); }
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> values_;
  std::vector<char> set_;
};

// Deterministic CPLEX-LP text.
std::string emit_lp(const MilpModel& model);

// Deterministic fixed-field MPS text. Names longer than eight characters
// are truncated and made unique; mps_names gives the mapping.
std::string emit_mps(const MilpModel& model);

struct MpsNames {
  std::vector<std::string> columns;  // per variable
  std::vector<std::string> rows;     // per constraint
};
MpsNames mps_names(const MilpModel& model);

struct Violation {
  std::string name;  // constraint name, or "bound:<var>" / "integrality:<var>"
  double slack = 0.0;  // signed; negative means violated by that amount
};

struct Evaluation {
  double objective = 0.0;
  std::vector<Violation> violations;

  bool feasible() const { return violations.empty(); }
};

// Throws ModelError naming the first variable without a value.
Evaluation evaluate(const MilpModel& model, const Assignment& asg);

struct ModelStats {
  std::size_t binaries = 0;
  std::size_t continuous = 0;
  std::size_t constraints = 0;

  friend bool operator==(const ModelStats&, const ModelStats&) = default;
};

ModelStats model_stats(const MilpModel& model);

// Number rendering shared by the emitters: up to 12 significant digits,
// no exponent in [1e-4, 1e9].
std::string format_number(double x);

}  // namespace bpmp
