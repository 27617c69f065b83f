#pragma once

// Exhaustive search over routes and request subsets. Slow by design; it is
// the ground truth the MIP formulations are checked against.

#include <map>
#include <optional>
#include <vector>

#include "bpmp/core.hpp"

namespace bpmp {

struct BpmpSolution {
  std::vector<int> route;     // 1, ..., n without repeats
  std::vector<int> accepted;  // request ids, ascending
  double profit = 0.0;
  std::map<Arc, double> arc_loads;  // every route arc, tons
  // Triples values aligned with triple_set(n) when the solution came from
  // a triples model.
  std::optional<std::vector<double>> u;
};

// Simple 1 -> n paths of length at most D in lexicographic order,
// produced one at a time by depth-first search.
class RouteEnumerator {
 public:
  explicit RouteEnumerator(const Instance& inst);

  std::optional<std::vector<int>> next();

 private:
  struct Frame {
    int node;
    int next_candidate;
    double length;
  };

  const Instance* inst_;
  std::vector<Frame> stack_;
  std::vector<char> on_path_;
  double limit_;
};

RouteEnumerator enumerate_routes(const Instance& inst);

struct RouteSelection {
  std::vector<int> accepted;
  double profit = 0.0;
};

// Largest request count the subset search accepts on one route.
inline constexpr int kMaxOracleRequests = 25;

// Best subset of the requests that the route can carry in order. Throws
// SizeLimitError when more than kMaxOracleRequests profitable requests
// lie on the route.
RouteSelection best_requests_for_route(const Instance& inst, const std::vector<int>& route);

// Route length in miles.
double route_length(const Instance& inst, const std::vector<int>& route);

// Load on each route arc when the accepted requests ride along.
std::map<Arc, double> route_loads(const Instance& inst, const std::vector<int>& route,
                                  const std::vector<int>& accepted);

struct OracleLimits {
  int max_interior_nodes = 6;
};

// Global optimum; ties go to the lexicographically smallest route and
// then the smallest accepted id list. Throws SizeLimitError above the
// limit and InfeasibleError when no route fits within D.
BpmpSolution solve_exact(const Instance& inst, const OracleLimits& limits = {});

}  // namespace bpmp
