#pragma once

namespace bpmp {

// Numerical tolerances shared by every module.
struct Tolerances {
  // Constraint satisfaction, relative to max(1, |rhs|).
  static constexpr double feasibility = 1e-7;
  // Distance of a binary value from the nearest integer.
  static constexpr double integrality = 1e-6;
  // Threshold above which a triples or flow value counts as positive.
  static constexpr double positivity = 1e-9;
  // Absolute optimality gap for branch-and-bound.
  static constexpr double gap = 1e-6;
};

}  // namespace bpmp
