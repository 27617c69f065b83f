#pragma once

// Bounded-variable revised primal simplex used by solve_lp and the
// branch-and-bound driver. Rows are turned into logical variables
// r_i = a_i x with bounds taken from the row sense, so the working system
// is A x - r = 0 with every variable boxed (possibly infinitely).

#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "bpmp/mip.hpp"

namespace bpmp::detail {

enum class VarStatus : std::int8_t { basic, at_lower, at_upper, free_zero };

struct Basis {
  std::vector<int> head;           // variable in each basis position
  std::vector<VarStatus> status;   // per variable (structural then logical)

  bool empty() const { return head.empty(); }
};

enum class SimplexStatus { optimal, infeasible, unbounded };

class Simplex {
 public:
  explicit Simplex(const MilpModel& model);

  std::size_t num_structural() const { return n_; }
  std::size_t num_rows() const { return m_; }

  double lower(std::size_t j) const { return lo_[j]; }
  double upper(std::size_t j) const { return up_[j]; }
  void set_bounds(std::size_t j, double lo, double hi);

  // Starts from `warm` when given and usable, otherwise from the current
  // basis (initially all-logical).
  SimplexStatus solve(const Basis* warm = nullptr);

  double objective() const;
  std::vector<double> structural_values() const;
  Basis basis() const;
  std::size_t iterations() const { return iterations_; }

 private:
  using SpMat = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

  void install(const Basis& b);
  void slack_basis();
  void place_nonbasic(std::size_t j);
  bool refactor();
  void recompute_basics();
  void ftran(std::vector<double>& v) const;
  void btran(std::vector<double>& v) const;
  double col_dot(std::size_t j, const std::vector<double>& pi) const;
  void load_column(std::size_t j, std::vector<double>& dense) const;
  double infeasibility(std::size_t pos) const;
  SimplexStatus iterate();
  void compute_duals(bool phase1, const std::vector<double>& infeas);
  void pivot_row(std::size_t pos, std::vector<double>& rho);
  bool activate_deferred(bool phase1, const std::vector<double>& infeas);
  void perturb();
  void unperturb();

  std::size_t n_ = 0;  // structural columns
  std::size_t m_ = 0;  // rows
  std::vector<int> col_start_;
  std::vector<int> row_index_;
  std::vector<double> value_;
  std::vector<double> cost_;  // maximization objective, zero for logicals
  std::vector<double> lo_;
  std::vector<double> up_;

  std::vector<int> row_start_;  // row-wise copy of the structural part
  std::vector<int> col_index_;
  std::vector<double> row_value_;

  std::vector<double> x_;
  std::vector<int> head_;
  std::vector<int> where_;  // basis position or -1
  std::vector<VarStatus> status_;

  struct Eta {
    int pos;
    double pivot;
    std::vector<std::pair<int, double>> entries;  // off-pivot entries
  };
  std::unique_ptr<Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>>> lu_;
  std::vector<Eta> etas_;
  std::size_t iterations_ = 0;
  std::vector<char> active_;    // columns currently eligible for pricing
  std::size_t inactive_left_ = 0;
  std::vector<double> d_;       // reduced costs of nonbasic variables
  std::vector<double> weight_;  // devex reference weights
  std::vector<double> row_alpha_;
  std::vector<std::size_t> row_touched_;
  std::vector<double> saved_lo_;
  std::vector<double> saved_up_;
  bool perturbed_ = false;
  int perturb_rounds_ = 0;
};

}  // namespace bpmp::detail
