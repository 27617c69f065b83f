#include "bpmp/mip.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <unordered_set>

#include "bpmp/errors.hpp"
#include "bpmp/tolerances.hpp"

namespace bpmp {

VarRef MilpModel::add_variable(std::string name, VarKind kind, double lower,
                               double upper) {
  if (name.empty()) throw ModelError("variable name must not be empty");
  if (var_names_.count(name)) throw ModelError("duplicate variable name " + name);
  if (kind == VarKind::binary) {
    lower = std::max(lower, 0.0);
    upper = std::min(upper, 1.0);
  }
  if (!(lower <= upper)) throw ModelError("inconsistent bounds for " + name);
  const VarRef ref{vars_.size()};
  var_names_.emplace(name, ref.index);
  vars_.push_back(Variable{std::move(name), kind, lower, upper});
  obj_.push_back(0.0);
  if (!priority_.empty()) priority_.push_back(0);
  if (!deferred_.empty()) deferred_.push_back(0);
  return ref;
}

void MilpModel::add_constraint(std::string name, std::vector<Term> terms, Sense sense,
                               double rhs) {
  if (name.empty()) throw ModelError("constraint name must not be empty");
  if (row_names_.count(name)) throw ModelError("duplicate constraint name " + name);
  std::vector<Term> merged;
  merged.reserve(terms.size());
  std::unordered_map<std::size_t, std::size_t> pos;
  for (const Term& t : terms) {
    if (t.var.index >= vars_.size()) {
      throw ModelError("constraint " + name + " refers to unregistered variable #" +
                       std::to_string(t.var.index));
    }
    auto [it, inserted] = pos.emplace(t.var.index, merged.size());
    if (inserted) {
      merged.push_back(t);
    } else {
      merged[it->second].coef += t.coef;
    }
  }
  std::erase_if(merged, [](const Term& t) { return t.coef == 0.0; });
  row_names_.emplace(name, rows_.size());
  rows_.push_back(LinearConstraint{std::move(name), std::move(merged), sense, rhs});
}

void MilpModel::add_objective(VarRef var, double coef) {
  if (var.index >= vars_.size()) throw ModelError("objective refers to unregistered variable");
  if (obj_[var.index] == 0.0 && coef != 0.0 &&
      std::find(obj_order_.begin(), obj_order_.end(), var.index) == obj_order_.end()) {
    obj_order_.push_back(var.index);
  }
  obj_[var.index] += coef;
}

void MilpModel::set_bounds(VarRef var, double lower, double upper) {
  Variable& v = vars_.at(var.index);
  if (v.kind == VarKind::binary) {
    lower = std::max(lower, 0.0);
    upper = std::min(upper, 1.0);
  }
  if (!(lower <= upper)) throw ModelError("inconsistent bounds for " + v.name);
  v.lower = lower;
  v.upper = upper;
}

void MilpModel::set_deferred(VarRef var, bool deferred) {
  if (var.index >= vars_.size()) throw ModelError("deferral for unregistered variable");
  if (deferred_.empty()) deferred_.assign(vars_.size(), 0);
  deferred_[var.index] = deferred ? 1 : 0;
}

void MilpModel::set_branch_priority(VarRef var, int priority) {
  if (var.index >= vars_.size()) throw ModelError("priority for unregistered variable");
  if (priority_.empty()) priority_.assign(vars_.size(), 0);
  priority_[var.index] = priority;
}

std::vector<Term> MilpModel::objective() const {
  std::vector<Term> out;
  for (std::size_t idx : obj_order_) {
    if (obj_[idx] != 0.0) out.push_back(Term{VarRef{idx}, obj_[idx]});
  }
  return out;
}

std::optional<VarRef> MilpModel::find(const std::string& name) const {
  auto it = var_names_.find(name);
  if (it == var_names_.end()) return std::nullopt;
  return VarRef{it->second};
}

std::optional<std::size_t> MilpModel::find_constraint(const std::string& name) const {
  auto it = row_names_.find(name);
  if (it == row_names_.end()) return std::nullopt;
  return it->second;
}

std::string format_number(double x) {
  if (x == 0.0) return "0";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

namespace {

constexpr std::size_t kTermsPerLine = 8;

void check_refs(const MilpModel& model) {
  const std::size_t nv = model.num_variables();
  for (const LinearConstraint& row : model.constraints()) {
    for (const Term& t : row.terms) {
      if (t.var.index >= nv) {
        throw ModelError("constraint " + row.name + " refers to unregistered variable");
      }
    }
  }
}

void append_terms(std::ostringstream& os, const MilpModel& model,
                  const std::vector<Term>& terms) {
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (i > 0 && i % kTermsPerLine == 0) os << "\n   ";
    const double c = terms[i].coef;
    const std::string& name = model.variable(terms[i].var).name;
    const double mag = std::fabs(c);
    if (i == 0) {
      if (c < 0) os << " -";
    } else {
      os << (c < 0 ? " -" : " +");
    }
    if (mag != 1.0) os << ' ' << format_number(mag);
    os << ' ' << name;
  }
}

const char* lp_sense(Sense s) {
  switch (s) {
    case Sense::less_equal: return "<=";
    case Sense::greater_equal: return ">=";
    case Sense::equal: return "=";
  }
  return "=";
}

std::string lp_bound_line(const Variable& v) {
  const std::string& nm = v.name;
  const bool lo_inf = std::isinf(v.lower);
  const bool hi_inf = std::isinf(v.upper);
  if (v.kind == VarKind::binary) {
    if (v.lower == 0.0 && v.upper == 1.0) return {};
    if (v.lower == v.upper) return nm + " = " + format_number(v.lower);
    return format_number(v.lower) + " <= " + nm + " <= " + format_number(v.upper);
  }
  if (!lo_inf && !hi_inf && v.lower == v.upper) return nm + " = " + format_number(v.lower);
  if (lo_inf && hi_inf) return nm + " free";
  if (lo_inf) return "-inf <= " + nm + " <= " + format_number(v.upper);
  if (hi_inf) {
    if (v.lower == 0.0) return {};
    return nm + " >= " + format_number(v.lower);
  }
  return format_number(v.lower) + " <= " + nm + " <= " + format_number(v.upper);
}

// Fixed-field MPS number: at most 12 characters.
std::string mps_number(double x) {
  if (x == 0.0) return "0";
  char buf[64];
  for (int prec = 12; prec >= 1; --prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, x);
    if (std::string(buf).size() <= 12) return buf;
  }
  return buf;
}

std::string to_base36(int value) {
  static const char* digits = "0123456789abcdefghijklmnopqrstuvwxyz";
  std::string out;
  do {
    out.insert(out.begin(), digits[value % 36]);
    value /= 36;
  } while (value > 0);
  return out;
}

// Assigns unique names of at most eight characters. Short names keep
// their spelling; longer or clashing names are truncated and suffixed.
std::vector<std::string> shorten_names(const std::vector<std::string>& names,
                                       std::unordered_set<std::string> used) {
  std::vector<std::string> out(names.size());
  auto valid = [](const std::string& s) {
    return !s.empty() && s.size() <= 8 && s.find(' ') == std::string::npos;
  };
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (valid(names[i]) && used.insert(names[i]).second) out[i] = names[i];
  }
  std::unordered_map<std::string, int> next_suffix;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (!out[i].empty()) continue;
    std::string base = names[i];
    std::replace(base.begin(), base.end(), ' ', '_');
    std::string cand = base.substr(0, 8);
    if (!used.insert(cand).second) {
      int& counter = next_suffix[cand];
      do {
        const std::string suffix = "~" + to_base36(++counter);
        cand = base.substr(0, 8 - suffix.size()) + suffix;
      } while (!used.insert(cand).second);
    }
    out[i] = cand;
  }
  return out;
}

void mps_line(std::ostringstream& os, const std::string& f1, const std::string& f2,
              const std::string& f3 = {}, const std::string& f4 = {},
              const std::string& f5 = {}, const std::string& f6 = {}) {
  std::string line(1, ' ');
  auto put = [&line](std::size_t col, const std::string& s) {
    if (s.empty()) return;
    if (line.size() < col - 1) line.resize(col - 1, ' ');
    line += s;
  };
  put(2, f1);
  put(5, f2);
  put(15, f3);
  put(25, f4);
  put(40, f5);
  put(50, f6);
  while (!line.empty() && line.back() == ' ') line.pop_back();
  os << line << '\n';
}

}  // namespace

std::string emit_lp(const MilpModel& model) {
  check_refs(model);
  std::ostringstream os;
  os << "\\ BPMP model\n";
  os << "Maximize\n";
  os << " obj:";
  append_terms(os, model, model.objective());
  os << "\n";
  os << "Subject To\n";
  for (const LinearConstraint& row : model.constraints()) {
    os << ' ' << row.name << ':';
    if (row.terms.empty()) {
      if (model.num_variables() == 0) throw ModelError("empty constraint in empty model");
      os << " 0 " << model.variables().front().name;
    } else {
      append_terms(os, model, row.terms);
    }
    os << ' ' << lp_sense(row.sense) << ' ' << format_number(row.rhs) << '\n';
  }
  std::vector<std::string> bounds;
  std::vector<std::string> binaries;
  for (const Variable& v : model.variables()) {
    std::string b = lp_bound_line(v);
    if (!b.empty()) bounds.push_back(std::move(b));
    if (v.kind == VarKind::binary) binaries.push_back(v.name);
  }
  if (!bounds.empty()) {
    os << "Bounds\n";
    for (const std::string& b : bounds) os << ' ' << b << '\n';
  }
  if (!binaries.empty()) {
    os << "Binaries\n";
    for (std::size_t i = 0; i < binaries.size(); ++i) {
      os << (i % kTermsPerLine == 0 ? " " : " ") << binaries[i];
      if (i % kTermsPerLine == kTermsPerLine - 1 || i + 1 == binaries.size()) os << '\n';
    }
  }
  os << "End\n";
  return os.str();
}

MpsNames mps_names(const MilpModel& model) {
  std::vector<std::string> cols;
  cols.reserve(model.num_variables());
  for (const Variable& v : model.variables()) cols.push_back(v.name);
  std::vector<std::string> rows;
  rows.reserve(model.constraints().size());
  for (const LinearConstraint& r : model.constraints()) rows.push_back(r.name);
  MpsNames out;
  out.columns = shorten_names(cols, {});
  out.rows = shorten_names(rows, {"obj"});
  return out;
}

std::string emit_mps(const MilpModel& model) {
  check_refs(model);
  const MpsNames names = mps_names(model);
  const std::size_t nv = model.num_variables();

  // Column-major view of the constraint matrix.
  std::vector<std::vector<std::pair<std::size_t, double>>> cols(nv);
  const auto& rows = model.constraints();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (const Term& t : rows[r].terms) cols[t.var.index].emplace_back(r, t.coef);
  }

  std::ostringstream os;
  os << "NAME          BPMP\n";
  os << "OBJSENSE\n    MAX\n";
  os << "ROWS\n";
  mps_line(os, "N", "obj");
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const char* s = rows[r].sense == Sense::less_equal      ? "L"
                    : rows[r].sense == Sense::greater_equal ? "G"
                                                            : "E";
    mps_line(os, s, names.rows[r]);
  }
  os << "COLUMNS\n";
  bool in_int = false;
  int marker = 0;
  for (std::size_t j = 0; j < nv; ++j) {
    const bool is_bin = model.variables()[j].kind == VarKind::binary;
    if (is_bin != in_int) {
      const std::string mname = "M" + std::to_string(marker++);
      mps_line(os, "", mname, "'MARKER'", "", is_bin ? "'INTORG'" : "'INTEND'");
      in_int = is_bin;
    }
    const std::string& cname = names.columns[j];
    const double oc = model.objective_coef(VarRef{j});
    if (oc != 0.0 || cols[j].empty()) mps_line(os, "", cname, "obj", mps_number(oc));
    for (const auto& [r, coef] : cols[j]) {
      mps_line(os, "", cname, names.rows[r], mps_number(coef));
    }
  }
  if (in_int) {
    mps_line(os, "", "M" + std::to_string(marker++), "'MARKER'", "", "'INTEND'");
  }
  os << "RHS\n";
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].rhs != 0.0) mps_line(os, "", "RHS", names.rows[r], mps_number(rows[r].rhs));
  }
  os << "BOUNDS\n";
  for (std::size_t j = 0; j < nv; ++j) {
    const Variable& v = model.variables()[j];
    const std::string& cname = names.columns[j];
    if (v.kind == VarKind::binary) {
      if (v.lower == v.upper) {
        mps_line(os, "FX", "BND", cname, mps_number(v.lower));
      } else {
        mps_line(os, "BV", "BND", cname);
      }
      continue;
    }
    const bool lo_inf = std::isinf(v.lower);
    const bool hi_inf = std::isinf(v.upper);
    if (!lo_inf && !hi_inf && v.lower == v.upper) {
      mps_line(os, "FX", "BND", cname, mps_number(v.lower));
      continue;
    }
    if (lo_inf && hi_inf) {
      mps_line(os, "FR", "BND", cname);
      continue;
    }
    if (lo_inf) {
      mps_line(os, "MI", "BND", cname);
    } else if (v.lower != 0.0) {
      mps_line(os, "LO", "BND", cname, mps_number(v.lower));
    }
    if (!hi_inf) mps_line(os, "UP", "BND", cname, mps_number(v.upper));
  }
  os << "ENDATA\n";
  return os.str();
}

Evaluation evaluate(const MilpModel& model, const Assignment& asg) {
  const auto& vars = model.variables();
  for (std::size_t j = 0; j < vars.size(); ++j) {
    if (!asg.has(VarRef{j})) throw ModelError("no value for variable " + vars[j].name);
  }
  Evaluation ev;
  for (std::size_t j = 0; j < vars.size(); ++j) {
    ev.objective += model.objective_coef(VarRef{j}) * asg[VarRef{j}];
  }
  const double tol = Tolerances::feasibility;
  for (const LinearConstraint& row : model.constraints()) {
    double lhs = 0.0;
    for (const Term& t : row.terms) lhs += t.coef * asg[t.var];
    double slack = 0.0;
    switch (row.sense) {
      case Sense::less_equal: slack = row.rhs - lhs; break;
      case Sense::greater_equal: slack = lhs - row.rhs; break;
      case Sense::equal: slack = -std::fabs(lhs - row.rhs); break;
    }
    if (slack < -tol * std::max(1.0, std::fabs(row.rhs))) {
      ev.violations.push_back(Violation{row.name, slack});
    }
  }
  for (std::size_t j = 0; j < vars.size(); ++j) {
    const Variable& v = vars[j];
    const double x = asg[VarRef{j}];
    if (!std::isfinite(x)) {
      ev.violations.push_back(Violation{"bound:" + v.name, -kInf});
      continue;
    }
    if (x < v.lower - tol * std::max(1.0, std::fabs(v.lower))) {
      ev.violations.push_back(Violation{"bound:" + v.name, x - v.lower});
    } else if (x > v.upper + tol * std::max(1.0, std::fabs(v.upper))) {
      ev.violations.push_back(Violation{"bound:" + v.name, v.upper - x});
    }
    if (v.kind == VarKind::binary) {
      const double frac = std::fabs(x - std::round(x));
      if (frac > Tolerances::integrality) {
        ev.violations.push_back(Violation{"integrality:" + v.name, -frac});
      }
    }
  }
  return ev;
}

ModelStats model_stats(const MilpModel& model) {
  ModelStats s;
  for (const Variable& v : model.variables()) {
    if (v.kind == VarKind::binary) {
      ++s.binaries;
    } else {
      ++s.continuous;
    }
  }
  s.constraints = model.constraints().size();
  return s;
}

}  // namespace bpmp
