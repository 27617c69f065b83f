#pragma once

// Backhaul profit maximization instance model: nodes 1..n, the vehicle
// starts at node 1 and must reach the depot at node n. Node indices are
// 1-based throughout the public API.

#include <compare>
#include <cstddef>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace bpmp {

struct Parameters {
  double p = 0.0;  // revenue per mile per ton
  double c = 0.0;  // travel cost per mile per ton
  double v = 0.0;  // empty vehicle weight, tons
  double Q = 0.0;  // capacity, tons
  double D = 0.0;  // distance limit, miles

  // $1.20/mile/ton revenue, $1.00/mile/ton cost, 5 t vehicle, 50 t
  // capacity, 1000 miles.
  static Parameters standard();

  friend bool operator==(const Parameters&, const Parameters&) = default;
};

struct Request {
  int id = 0;  // 1-based ordinal
  int origin = 0;
  int destination = 0;
  double weight = 0.0;

  friend bool operator==(const Request&, const Request&) = default;
};

struct Arc {
  int from = 0;
  int to = 0;

  friend auto operator<=>(const Arc&, const Arc&) = default;
};

// Triple (i, j, k): flow from i to j composed of flow i -> k adjoined to
// flow k -> j. Written u_ij^k in the formulation.
struct Triple {
  int i = 0;
  int j = 0;
  int k = 0;

  friend auto operator<=>(const Triple&, const Triple&) = default;
};

std::string to_string(const Arc& a);
std::string to_string(const Triple& t);

class Instance {
 public:
  // Throws InvalidInstanceError when the shape is unusable (n < 2 or a
  // distance matrix that is not n x n). Value-level problems are left to
  // validate_instance.
  Instance(int n, std::vector<std::vector<double>> dist,
           std::vector<Request> requests, Parameters params);

  int n() const { return n_; }
  // Distance from node i to node j, 1-based.
  double d(int i, int j) const {
    return dist_[static_cast<std::size_t>(i - 1) * n_ + (j - 1)];
  }
  std::vector<std::vector<double>> dist_matrix() const;
  const std::vector<Request>& requests() const { return requests_; }
  const Parameters& params() const { return params_; }

  // True when d_ij <= d_ik + d_kj for every triple (i, j, k) of the
  // network.
  bool satisfies_triangle_inequality() const { return triangle_ok_; }
  // True when two requests share the same (origin, destination).
  bool has_duplicate_pairs() const { return duplicate_pairs_; }
  // Summed weight of all requests from i to j, zero when none.
  double pair_weight(int i, int j) const;

  // Same instance with different parameters or requests.
  Instance with_params(const Parameters& params) const;
  Instance with_requests(std::vector<Request> requests) const;

 private:
  int n_;
  std::vector<double> dist_;
  std::vector<Request> requests_;
  Parameters params_;
  std::vector<double> pair_weight_;
  bool triangle_ok_ = true;
  bool duplicate_pairs_ = false;
};

// Arc and triple index sets with O(1) lookup.
class Network {
 public:
  explicit Network(int n);

  int n() const { return n_; }
  const std::vector<Arc>& arcs() const { return arcs_; }
  const std::vector<Triple>& triples() const { return triples_; }
  // Position of (i, j) in arcs(), or -1 when (i, j) is not an arc.
  int arc_index(int i, int j) const;
  // Position of (i, j, k) in triples(), or -1.
  int triple_index(int i, int j, int k) const;

 private:
  int n_;
  std::vector<Arc> arcs_;
  std::vector<Triple> triples_;
  std::vector<int> arc_lookup_;
  std::vector<int> triple_lookup_;
};

// Arcs (i, j) with i < n, j > 1, i != j in lexicographic order.
// Throws std::invalid_argument for n < 2.
std::vector<Arc> arc_set(int n);

// Triples (i, j, k) with i != n, j not in {1, i}, k not in {1, n, i, j},
// lexicographic. Empty for n < 3.
std::vector<Triple> triple_set(int n);

struct ValidationReport {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;

  bool ok() const { return errors.empty(); }
};

ValidationReport validate_instance(const Instance& inst);

// (pQ - cQ - cv) D. Bounds the optimum only under the triangle inequality.
double profit_upper_bound(const Parameters& params);

enum class BigMMode { data_independent, knapsack };

// Number of requests that can share one arc: (n^2 - n) / 2 or the
// cardinality knapsack value.
long compute_big_m(const Instance& inst, BigMMode mode);

// Number of (route, accepted set) combinations with k interior nodes:
// sum over r of P(k, r) * 2^C(r + 2, 2).
boost::multiprecision::cpp_int count_solution_space(int k);

}  // namespace bpmp
