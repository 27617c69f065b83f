#include "simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bpmp/errors.hpp"

namespace bpmp::detail {

namespace {

constexpr double kPrimalTol = 1e-9;
constexpr double kDualTol = 1e-9;
constexpr double kPivotTol = 1e-9;
constexpr double kDropTol = 1e-13;
constexpr std::size_t kRefactorEvery = 100;
constexpr int kDegenerateBeforeBland = 50;
constexpr int kDegenerateBeforePerturb = 30;
constexpr double kPerturbScale = 1e-6;

double bound_tol(double b) { return kPrimalTol * std::max(1.0, std::fabs(b)); }

}  // namespace

Simplex::Simplex(const MilpModel& model) {
  n_ = model.num_variables();
  m_ = model.constraints().size();
  const std::size_t total = n_ + m_;
  cost_.assign(total, 0.0);
  lo_.assign(total, 0.0);
  up_.assign(total, 0.0);
  for (std::size_t j = 0; j < n_; ++j) {
    const Variable& v = model.variables()[j];
    lo_[j] = v.lower;
    up_[j] = v.upper;
    cost_[j] = model.objective_coef(VarRef{j});
  }

  std::vector<int> counts(n_ + 1, 0);
  const auto& rows = model.constraints();
  for (const LinearConstraint& row : rows) {
    for (const Term& t : row.terms) ++counts[t.var.index + 1];
  }
  col_start_.assign(n_ + 1, 0);
  for (std::size_t j = 0; j < n_; ++j) col_start_[j + 1] = col_start_[j] + counts[j + 1];
  row_index_.resize(col_start_[n_]);
  value_.resize(col_start_[n_]);
  std::vector<int> fill(col_start_.begin(), col_start_.end() - 1);
  for (std::size_t i = 0; i < m_; ++i) {
    for (const Term& t : rows[i].terms) {
      const int at = fill[t.var.index]++;
      row_index_[at] = static_cast<int>(i);
      value_[at] = t.coef;
    }
    const std::size_t r = n_ + i;
    switch (rows[i].sense) {
      case Sense::less_equal:
        lo_[r] = -kInf;
        up_[r] = rows[i].rhs;
        break;
      case Sense::greater_equal:
        lo_[r] = rows[i].rhs;
        up_[r] = kInf;
        break;
      case Sense::equal:
        lo_[r] = up_[r] = rows[i].rhs;
        break;
    }
  }
  row_start_.assign(m_ + 1, 0);
  for (std::size_t i = 0; i < m_; ++i) {
    row_start_[i + 1] = row_start_[i] + static_cast<int>(rows[i].terms.size());
  }
  col_index_.resize(row_start_[m_]);
  row_value_.resize(row_start_[m_]);
  for (std::size_t i = 0; i < m_; ++i) {
    int at = row_start_[i];
    for (const Term& t : rows[i].terms) {
      col_index_[at] = static_cast<int>(t.var.index);
      row_value_[at++] = t.coef;
    }
  }
  active_.assign(total, 1);
  for (std::size_t j = 0; j < model.deferred().size(); ++j) {
    if (model.deferred()[j]) active_[j] = 0;
  }
  x_.assign(total, 0.0);
  where_.assign(total, -1);
  status_.assign(total, VarStatus::at_lower);
}

void Simplex::set_bounds(std::size_t j, double lo, double hi) {
  lo_[j] = lo;
  up_[j] = hi;
}

void Simplex::place_nonbasic(std::size_t j) {
  if (std::isfinite(lo_[j])) {
    status_[j] = VarStatus::at_lower;
    x_[j] = lo_[j];
  } else if (std::isfinite(up_[j])) {
    status_[j] = VarStatus::at_upper;
    x_[j] = up_[j];
  } else {
    status_[j] = VarStatus::free_zero;
    x_[j] = 0.0;
  }
}

void Simplex::slack_basis() {
  head_.assign(m_, 0);
  std::fill(where_.begin(), where_.end(), -1);
  for (std::size_t j = 0; j < n_; ++j) place_nonbasic(j);
  for (std::size_t i = 0; i < m_; ++i) {
    head_[i] = static_cast<int>(n_ + i);
    where_[n_ + i] = static_cast<int>(i);
    status_[n_ + i] = VarStatus::basic;
  }
}

void Simplex::install(const Basis& b) {
  head_ = b.head;
  status_ = b.status;
  std::fill(where_.begin(), where_.end(), -1);
  for (std::size_t p = 0; p < m_; ++p) where_[head_[p]] = static_cast<int>(p);
}

bool Simplex::refactor() {
  etas_.clear();
  if (m_ == 0) return true;
  std::vector<Eigen::Triplet<double, int>> trip;
  trip.reserve(col_start_[n_] + m_);
  for (std::size_t p = 0; p < m_; ++p) {
    const std::size_t j = head_[p];
    if (j >= n_) {
      trip.emplace_back(static_cast<int>(j - n_), static_cast<int>(p), -1.0);
    } else {
      for (int k = col_start_[j]; k < col_start_[j + 1]; ++k) {
        trip.emplace_back(row_index_[k], static_cast<int>(p), value_[k]);
      }
    }
  }
  SpMat B(static_cast<int>(m_), static_cast<int>(m_));
  B.setFromTriplets(trip.begin(), trip.end());
  B.makeCompressed();
  lu_ = std::make_unique<Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>>>();
  lu_->analyzePattern(B);
  lu_->factorize(B);
  return lu_->info() == Eigen::Success;
}

void Simplex::ftran(std::vector<double>& v) const {
  if (m_ == 0) return;
  Eigen::Map<Eigen::VectorXd> b(v.data(), static_cast<Eigen::Index>(m_));
  Eigen::VectorXd sol = lu_->solve(b);
  b = sol;
  for (const Eta& e : etas_) {
    const double xp = v[e.pos] / e.pivot;
    if (xp != 0.0) {
      for (const auto& [i, a] : e.entries) v[i] -= a * xp;
    }
    v[e.pos] = xp;
  }
}

void Simplex::btran(std::vector<double>& v) const {
  if (m_ == 0) return;
  for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
    double s = v[it->pos];
    for (const auto& [i, a] : it->entries) s -= a * v[i];
    v[it->pos] = s / it->pivot;
  }
  Eigen::Map<Eigen::VectorXd> c(v.data(), static_cast<Eigen::Index>(m_));
  Eigen::VectorXd sol = lu_->transpose().solve(c);
  c = sol;
}

double Simplex::col_dot(std::size_t j, const std::vector<double>& pi) const {
  if (j >= n_) return -pi[j - n_];
  double s = 0.0;
  for (int k = col_start_[j]; k < col_start_[j + 1]; ++k) s += value_[k] * pi[row_index_[k]];
  return s;
}

void Simplex::load_column(std::size_t j, std::vector<double>& dense) const {
  std::fill(dense.begin(), dense.end(), 0.0);
  if (j >= n_) {
    dense[j - n_] = -1.0;
    return;
  }
  for (int k = col_start_[j]; k < col_start_[j + 1]; ++k) dense[row_index_[k]] = value_[k];
}

void Simplex::recompute_basics() {
  std::vector<double> rhs(m_, 0.0);
  for (std::size_t j = 0; j < n_; ++j) {
    if (where_[j] >= 0 || x_[j] == 0.0) continue;
    for (int k = col_start_[j]; k < col_start_[j + 1]; ++k) rhs[row_index_[k]] -= value_[k] * x_[j];
  }
  for (std::size_t i = 0; i < m_; ++i) {
    if (where_[n_ + i] < 0) rhs[i] += x_[n_ + i];
  }
  ftran(rhs);
  for (std::size_t p = 0; p < m_; ++p) x_[head_[p]] = rhs[p];
}

// -1 below the lower bound, +1 above the upper bound, 0 within tolerance.
double Simplex::infeasibility(std::size_t pos) const {
  const std::size_t j = head_[pos];
  if (x_[j] < lo_[j] - bound_tol(lo_[j])) return -1.0;
  if (x_[j] > up_[j] + bound_tol(up_[j])) return 1.0;
  return 0.0;
}

SimplexStatus Simplex::solve(const Basis* warm) {
  const std::size_t total = n_ + m_;
  if (warm && warm->head.size() == m_ && warm->status.size() == total) {
    install(*warm);
  } else if (head_.size() != m_) {
    slack_basis();
  }
  for (std::size_t j = 0; j < total; ++j) {
    if (where_[j] >= 0) continue;
    if (lo_[j] == up_[j]) {
      status_[j] = VarStatus::at_lower;
      x_[j] = lo_[j];
    } else if (status_[j] == VarStatus::at_upper && std::isfinite(up_[j])) {
      x_[j] = up_[j];
    } else if (status_[j] == VarStatus::at_lower && std::isfinite(lo_[j])) {
      x_[j] = lo_[j];
    } else {
      place_nonbasic(j);
    }
  }
  if (!refactor()) {
    slack_basis();
    if (!refactor()) throw NumericalError("simplex: cannot factor the slack basis");
  }
  recompute_basics();
  return iterate();
}

// Reduced costs of every nonbasic variable for the current phase, from a
// fresh BTRAN. Phase 1 uses the composite infeasibility objective.
void Simplex::compute_duals(bool phase1, const std::vector<double>& infeas) {
  std::vector<double> pi(m_);
  for (std::size_t p = 0; p < m_; ++p) pi[p] = phase1 ? -infeas[p] : cost_[head_[p]];
  btran(pi);
  for (std::size_t j = 0; j < n_ + m_; ++j) {
    d_[j] = where_[j] >= 0 ? 0.0 : (phase1 ? 0.0 : cost_[j]) - col_dot(j, pi);
  }
}

// Row `pos` of B^-1 [A -I], accumulated row-wise so that only columns
// touching a nonzero of rho are visited.
void Simplex::pivot_row(std::size_t pos, std::vector<double>& rho) {
  std::fill(rho.begin(), rho.end(), 0.0);
  rho[pos] = 1.0;
  btran(rho);
  for (std::size_t j : row_touched_) row_alpha_[j] = 0.0;
  row_touched_.clear();
  for (std::size_t i = 0; i < m_; ++i) {
    const double r = rho[i];
    if (std::fabs(r) <= kDropTol) continue;
    for (int k = row_start_[i]; k < row_start_[i + 1]; ++k) {
      const std::size_t j = col_index_[k];
      if (row_alpha_[j] == 0.0) row_touched_.push_back(j);
      row_alpha_[j] += r * row_value_[k];
      if (row_alpha_[j] == 0.0) row_alpha_[j] = 1e-300;
    }
    const std::size_t l = n_ + i;
    if (row_alpha_[l] == 0.0) row_touched_.push_back(l);
    row_alpha_[l] -= r;
    if (row_alpha_[l] == 0.0) row_alpha_[l] = 1e-300;
  }
}

// Brings the most attractive deferred columns into pricing. False when
// none of them can improve the current phase objective.
bool Simplex::activate_deferred(bool phase1, const std::vector<double>& infeas) {
  if (inactive_left_ == 0) return false;
  compute_duals(phase1, infeas);
  std::vector<std::pair<double, std::size_t>> cand;
  for (std::size_t j = 0; j < n_; ++j) {
    if (active_[j] || where_[j] >= 0 || lo_[j] == up_[j]) continue;
    const double d = d_[j];
    const bool ok = (status_[j] == VarStatus::at_lower && d > kDualTol) ||
                    (status_[j] == VarStatus::at_upper && d < -kDualTol) ||
                    (status_[j] == VarStatus::free_zero && std::fabs(d) > kDualTol);
    if (ok) cand.emplace_back(std::fabs(d), j);
  }
  if (cand.empty()) return false;
  const std::size_t take = std::min(cand.size(), std::max<std::size_t>(50, m_ / 10));
  std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(take), cand.end(),
                    [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; k < take; ++k) {
    active_[cand[k].second] = 1;
    weight_[cand[k].second] = 1.0;
  }
  inactive_left_ -= take;
  return true;
}

SimplexStatus Simplex::iterate() {
  const std::size_t total = n_ + m_;
  const std::size_t max_iter = 50 * total + 100000;

  std::vector<double> alpha(m_);
  std::vector<double> rho(m_);
  std::vector<double> infeas(m_);
  d_.assign(total, 0.0);
  weight_.assign(total, 1.0);
  row_alpha_.assign(total, 0.0);
  row_touched_.clear();
  int degenerate_run = 0;
  int final_checks = 0;
  std::size_t local_iter = 0;
  bool fresh_duals = false;
  bool was_phase1 = true;
  int ray_checks = 0;
  std::size_t pivots_since_duals = 0;
  perturb_rounds_ = 0;
  inactive_left_ = 0;
  for (std::size_t j = 0; j < n_; ++j) {
    if (where_[j] >= 0 || (status_[j] == VarStatus::at_upper && std::isfinite(up_[j]))) active_[j] = 1;
    if (!active_[j]) ++inactive_left_;
  }

  auto full_refactor = [&] {
    if (!refactor()) {
      slack_basis();
      if (!refactor()) throw NumericalError("simplex: cannot factor the slack basis");
    }
    recompute_basics();
    fresh_duals = false;
  };

  while (true) {
    if (etas_.size() >= kRefactorEvery) full_refactor();

    bool phase1 = false;
    for (std::size_t p = 0; p < m_; ++p) {
      infeas[p] = infeasibility(p);
      if (infeas[p] != 0.0) phase1 = true;
    }
    // Phase 1 costs shift whenever a basic variable becomes feasible, so
    // its duals are always recomputed; phase 2 updates them per pivot.
    if (phase1 || was_phase1 || !fresh_duals) {
      compute_duals(phase1, infeas);
      fresh_duals = true;
      pivots_since_duals = 0;
    }
    was_phase1 = phase1;

    const bool bland = degenerate_run > kDegenerateBeforeBland;
    std::size_t enter = total;
    double best = 0.0;
    for (std::size_t j = 0; j < total; ++j) {
      if (where_[j] >= 0 || lo_[j] == up_[j] || !active_[j]) continue;
      const double d = d_[j];
      bool ok = false;
      switch (status_[j]) {
        case VarStatus::at_lower: ok = d > kDualTol; break;
        case VarStatus::at_upper: ok = d < -kDualTol; break;
        case VarStatus::free_zero: ok = std::fabs(d) > kDualTol; break;
        case VarStatus::basic: break;
      }
      if (!ok) continue;
      if (bland) {
        enter = j;
        break;
      }
      const double score = d * d / weight_[j];
      if (score > best) {
        best = score;
        enter = j;
      }
    }

    if (enter == total) {
      if (perturbed_) {
        unperturb();
        fresh_duals = false;
        continue;
      }
      if (activate_deferred(phase1, infeas)) continue;
      if (phase1) return SimplexStatus::infeasible;
      // Confirm on a fresh factorization before declaring optimality.
      if (etas_.empty() || final_checks >= 3) return SimplexStatus::optimal;
      ++final_checks;
      full_refactor();
      continue;
    }

    const double enter_d = d_[enter];
    const double dir = enter_d > 0.0 ? 1.0 : -1.0;
    load_column(enter, alpha);
    ftran(alpha);

    // Harris two-pass ratio test over the basic variables.
    auto target = [&](std::size_t p, double g, double& tgt) {
      const std::size_t j = head_[p];
      const double xv = x_[j];
      if (g < 0.0) {
        if (xv > up_[j] + bound_tol(up_[j])) {
          tgt = up_[j];
        } else if (xv >= lo_[j] - bound_tol(lo_[j])) {
          tgt = lo_[j];
        } else {
          return false;
        }
      } else {
        if (xv < lo_[j] - bound_tol(lo_[j])) {
          tgt = lo_[j];
        } else if (xv <= up_[j] + bound_tol(up_[j])) {
          tgt = up_[j];
        } else {
          return false;
        }
      }
      return std::isfinite(tgt);
    };

    const double flip = up_[enter] - lo_[enter];
    double theta_max = kInf;
    for (std::size_t p = 0; p < m_; ++p) {
      if (std::fabs(alpha[p]) <= kPivotTol) continue;
      const double g = -dir * alpha[p];
      double tgt = 0.0;
      if (!target(p, g, tgt)) continue;
      const double signed_gap = g < 0.0 ? x_[head_[p]] - tgt : tgt - x_[head_[p]];
      theta_max = std::min(theta_max, (signed_gap + bound_tol(tgt)) / std::fabs(g));
    }

    if (!std::isfinite(theta_max) && !std::isfinite(flip)) {
      if (perturbed_) {
        unperturb();
        fresh_duals = false;
        continue;
      }
      // Drifted reduced costs can fake a ray; confirm from scratch first.
      if (!etas_.empty() || pivots_since_duals > 0) {
        if (++ray_checks > 3) throw NumericalError("simplex: unstable unbounded ray");
        full_refactor();
        continue;
      }
      if (phase1) throw NumericalError("simplex: unbounded direction in phase 1");
      return SimplexStatus::unbounded;
    }

    if (std::isfinite(flip) && flip <= theta_max) {
      for (std::size_t p = 0; p < m_; ++p) {
        if (alpha[p] != 0.0) x_[head_[p]] -= dir * flip * alpha[p];
      }
      if (status_[enter] == VarStatus::at_lower) {
        status_[enter] = VarStatus::at_upper;
        x_[enter] = up_[enter];
      } else {
        status_[enter] = VarStatus::at_lower;
        x_[enter] = lo_[enter];
      }
      degenerate_run = 0;
      ++iterations_;
      if (++local_iter > max_iter) throw NumericalError("simplex: iteration limit reached");
      continue;
    }

    std::size_t leave_pos = m_;
    double leave_tgt = 0.0;
    double step = 0.0;
    double best_pivot = 0.0;
    for (std::size_t p = 0; p < m_; ++p) {
      if (std::fabs(alpha[p]) <= kPivotTol) continue;
      const double g = -dir * alpha[p];
      double tgt = 0.0;
      if (!target(p, g, tgt)) continue;
      const double gap = g < 0.0 ? x_[head_[p]] - tgt : tgt - x_[head_[p]];
      const double ratio = std::max(0.0, gap / std::fabs(g));
      if (bland) {
        const bool better = leave_pos == m_ || ratio < step - 1e-12 ||
                            (ratio <= step + 1e-12 && head_[p] < head_[leave_pos]);
        if (better) {
          leave_pos = p;
          leave_tgt = tgt;
          step = ratio;
        }
      } else if (ratio <= theta_max && std::fabs(alpha[p]) > best_pivot) {
        best_pivot = std::fabs(alpha[p]);
        leave_pos = p;
        leave_tgt = tgt;
        step = ratio;
      }
    }
    if (leave_pos == m_) throw NumericalError("simplex: ratio test found no pivot");

    // Pivot row for the dual and reference-weight updates, taken against
    // the basis before the exchange.
    pivot_row(leave_pos, rho);
    const double arq = alpha[leave_pos];
    const double ratio_d = enter_d / arq;
    const double wq = weight_[enter];
    const std::size_t leave = head_[leave_pos];
    for (std::size_t j : row_touched_) {
      if (where_[j] >= 0 || j == enter) continue;
      const double a = row_alpha_[j];
      d_[j] -= ratio_d * a;
      const double r = a / arq;
      weight_[j] = std::max(weight_[j], r * r * wq);
    }

    for (std::size_t p = 0; p < m_; ++p) {
      if (alpha[p] != 0.0) x_[head_[p]] -= dir * step * alpha[p];
    }
    x_[enter] += dir * step;
    x_[leave] = leave_tgt;
    status_[leave] = (leave_tgt == lo_[leave]) ? VarStatus::at_lower : VarStatus::at_upper;
    where_[leave] = -1;
    head_[leave_pos] = static_cast<int>(enter);
    where_[enter] = static_cast<int>(leave_pos);
    status_[enter] = VarStatus::basic;
    d_[enter] = 0.0;
    d_[leave] = -ratio_d;
    weight_[leave] = std::max(wq / (arq * arq), 1.0);
    if (weight_[leave] > 1e6 || wq > 1e6) std::fill(weight_.begin(), weight_.end(), 1.0);

    Eta eta{static_cast<int>(leave_pos), arq, {}};
    for (std::size_t p = 0; p < m_; ++p) {
      if (p != leave_pos && std::fabs(alpha[p]) > kDropTol) {
        eta.entries.emplace_back(static_cast<int>(p), alpha[p]);
      }
    }
    etas_.push_back(std::move(eta));
    ++pivots_since_duals;

    degenerate_run = step * std::fabs(enter_d) < 1e-11 ? degenerate_run + 1 : 0;
    if (degenerate_run > kDegenerateBeforePerturb && !perturbed_ && perturb_rounds_ < 2) {
      perturb();
      degenerate_run = 0;
    }
    ++iterations_;
    if (++local_iter > max_iter) throw NumericalError("simplex: iteration limit reached");
  }
}

// Widens every finite bound by a small pseudo-random amount so that
// degenerate vertices split apart; unperturb() restores them.
void Simplex::perturb() {
  const std::size_t total = n_ + m_;
  saved_lo_ = lo_;
  saved_up_ = up_;
  std::uint64_t h = 0x9e3779b97f4a7c15ULL;
  auto next = [&h] {
    h ^= h << 13;
    h ^= h >> 7;
    h ^= h << 17;
    return static_cast<double>(h >> 11) * 0x1.0p-53;
  };
  for (std::size_t j = 0; j < total; ++j) {
    const double r1 = next();
    const double r2 = next();
    if (j < n_ && lo_[j] == up_[j]) continue;
    if (std::isfinite(lo_[j])) lo_[j] -= kPerturbScale * (1.0 + std::fabs(lo_[j])) * (1.0 + r1);
    if (std::isfinite(up_[j])) up_[j] += kPerturbScale * (1.0 + std::fabs(up_[j])) * (1.0 + r2);
    if (where_[j] < 0) {
      if (status_[j] == VarStatus::at_lower) x_[j] = lo_[j];
      if (status_[j] == VarStatus::at_upper) x_[j] = up_[j];
    }
  }
  perturbed_ = true;
  ++perturb_rounds_;
  recompute_basics();
}

void Simplex::unperturb() {
  lo_ = saved_lo_;
  up_ = saved_up_;
  perturbed_ = false;
  for (std::size_t j = 0; j < n_ + m_; ++j) {
    if (where_[j] >= 0) continue;
    if (status_[j] == VarStatus::at_lower) x_[j] = lo_[j];
    if (status_[j] == VarStatus::at_upper) x_[j] = up_[j];
  }
  if (!refactor()) {
    slack_basis();
    if (!refactor()) throw NumericalError("simplex: cannot factor the slack basis");
  }
  recompute_basics();
}

double Simplex::objective() const {
  double s = 0.0;
  for (std::size_t j = 0; j < n_; ++j) s += cost_[j] * x_[j];
  return s;
}

std::vector<double> Simplex::structural_values() const {
  return std::vector<double>(x_.begin(), x_.begin() + static_cast<std::ptrdiff_t>(n_));
}

Basis Simplex::basis() const { return Basis{head_, status_}; }

}  // namespace bpmp::detail
