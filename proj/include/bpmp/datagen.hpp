#pragma once

// Random instances in the style of the empirical study, and the reduction
// from the orienteering problem.

#include <cstdint>
#include <vector>

#include "bpmp/core.hpp"

namespace bpmp {

// Points uniform in a 700 x 700 mile square; Euclidean distances rounded
// to whole miles and then closed under shortest paths. One request per
// arc with weight round(50 U, 1) tons, dropped when it rounds to zero.
// The generator is std::mt19937_64 seeded with `seed`; uniforms are the
// top 53 bits of each draw, coordinates are drawn before weights.
Instance generate_instance(int n, std::uint64_t seed,
                           const Parameters& params = Parameters::standard());

// Orienteering instance: start at 1, finish at n, collect points[i-1] for
// visiting interior node i, travel time at most t_max.
struct OpInstance {
  int n = 0;
  std::vector<std::vector<double>> times;  // n x n hours
  std::vector<double> points;              // size n; entries 1 and n unused
  double t_max = 0.0;
};

// BPMP with unit speed distances, D = t_max, p = 1, c = 0, v = 1, one
// request (i, n) of weight P_i / t_in per scoring interior node, and Q the
// total weight (1 when there are no requests). Throws
// InvalidInstanceError when a scoring node has t_in = 0.
Instance op_to_bpmp(const OpInstance& op);

}  // namespace bpmp
