#pragma once

// Shared fixtures for the test binaries.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "bpmp/core.hpp"
#include "bpmp/datagen.hpp"
#include "bpmp/instance_io.hpp"

namespace bpmp::testing {

inline std::string fixture(const std::string& name) {
  return std::string(BPMP_FIXTURE_DIR) + "/" + name;
}

inline Instance t4() { return load_instance(fixture("t4.json")); }

// Nodes on a line at the given milestones.
inline std::vector<std::vector<double>> line_distances(const std::vector<double>& at) {
  const std::size_t n = at.size();
  std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) d[i][j] = at[i] > at[j] ? at[i] - at[j] : at[j] - at[i];
  }
  return d;
}

inline std::vector<Request> requests(const std::vector<std::tuple<int, int, double>>& list) {
  std::vector<Request> out;
  int id = 1;
  for (const auto& [o, t, w] : list) out.push_back(Request{id++, o, t, w});
  return out;
}

// Reference solution on T4: every request rides 1-2-3-4, with triples
// values sending 1->3 via 2, 1->4 via 2 and 2->4 via 3.
struct Reference {
  std::vector<double> y = std::vector<double>(6, 1.0);
  std::vector<double> u;  // aligned with triple_set(4)
  std::vector<double> x;  // aligned with arc_set(4)
};

inline Reference reference_solution() {
  Reference f;
  const auto triples = triple_set(4);
  f.u.assign(triples.size(), 0.0);
  for (std::size_t t = 0; t < triples.size(); ++t) {
    const Triple& tr = triples[t];
    if (tr == Triple{1, 3, 2}) f.u[t] = 0.3;
    if (tr == Triple{1, 4, 2}) f.u[t] = 0.2;
    if (tr == Triple{2, 4, 3}) f.u[t] = 0.3;
  }
  const auto arcs = arc_set(4);
  f.x.assign(arcs.size(), 0.0);
  for (std::size_t a = 0; a < arcs.size(); ++a) {
    if (arcs[a] == Arc{1, 2} || arcs[a] == Arc{2, 3} || arcs[a] == Arc{3, 4}) f.x[a] = 1.0;
  }
  return f;
}

// Random orienteering instance with integer scores and travel times.
// Times into the finish are powers of two so that P_i / t_in, and the
// revenue it earns back, are exact in binary.
inline OpInstance random_op(std::mt19937_64& rng, int interior) {
  const int n = interior + 2;
  std::uniform_int_distribution<int> time(1, 6);
  std::uniform_int_distribution<int> pow2(0, 3);
  std::uniform_int_distribution<int> score(0, 9);
  OpInstance op;
  op.n = n;
  op.times.assign(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double t = j == n - 1 ? double(1 << pow2(rng)) : double(time(rng));
      op.times[i][j] = op.times[j][i] = t;
    }
  }
  op.points.assign(n, 0.0);
  for (int i = 1; i < n - 1; ++i) op.points[i] = score(rng);
  std::uniform_int_distribution<int> budget(static_cast<int>(op.times[0][n - 1]), 14);
  op.t_max = budget(rng);
  return op;
}

// Best score over every ordered subset of interior nodes; -infinity when
// not even the direct trip fits.
inline double brute_force_op(const OpInstance& op) {
  const int n = op.n;
  const int k = n - 2;
  double best = -std::numeric_limits<double>::infinity();
  for (unsigned mask = 0; mask < (1u << k); ++mask) {
    std::vector<int> stops;
    for (int i = 0; i < k; ++i) {
      if (mask >> i & 1u) stops.push_back(i + 1);
    }
    double score = 0;
    for (int s : stops) score += op.points[s];
    do {
      double t = 0;
      int at = 0;
      for (int s : stops) t += op.times[at][s], at = s;
      t += op.times[at][n - 1];
      if (t <= op.t_max) best = std::max(best, score);
    } while (std::next_permutation(stops.begin(), stops.end()));
  }
  return best;
}

}  // namespace bpmp::testing
