#include "bpmp/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bpmp/errors.hpp"

namespace bpmp {

namespace {

constexpr double kTieTol = 1e-9;

double length_limit(const Instance& inst) {
  const double D = inst.params().D;
  return D + 1e-9 * std::max(1.0, std::fabs(D));
}

std::vector<int> positions(int n, const std::vector<int>& route) {
  std::vector<int> pos(n + 1, -1);
  for (std::size_t k = 0; k < route.size(); ++k) pos[route[k]] = static_cast<int>(k);
  return pos;
}

struct Candidate {
  int id;
  int first_arc;  // route position of the origin
  int last_arc;   // route position just before the destination
  double weight;
  double value;   // revenue minus cargo cost along the route
};

class SubsetSearch {
 public:
  SubsetSearch(std::vector<Candidate> cands, std::size_t arcs, double Q)
      : cands_(std::move(cands)), residual_(arcs, Q) {}

  RouteSelection run() {
    best_value_ = 0.0;
    best_.clear();
    chosen_.clear();
    visit(0, 0.0);
    return RouteSelection{best_, best_value_};
  }

 private:
  bool fits(const Candidate& c) const {
    for (int a = c.first_arc; a <= c.last_arc; ++a) {
      if (residual_[a] < c.weight - 1e-9) return false;
    }
    return true;
  }

  // Each remaining request alone, scaled down to what its tightest arc
  // can still take.
  double bound(std::size_t idx, double value) const {
    double b = value;
    for (std::size_t k = idx; k < cands_.size(); ++k) {
      const Candidate& c = cands_[k];
      double room = std::numeric_limits<double>::infinity();
      for (int a = c.first_arc; a <= c.last_arc; ++a) room = std::min(room, residual_[a]);
      b += c.value * std::clamp(room / c.weight, 0.0, 1.0);
    }
    return b;
  }

  // Include-first order visits tied subsets with smaller ids first.
  void visit(std::size_t idx, double value) {
    if (idx == cands_.size()) {
      if (value > best_value_ + kTieTol) {
        best_value_ = value;
        best_ = chosen_;
      }
      return;
    }
    if (bound(idx, value) <= best_value_ + kTieTol) return;
    const Candidate& c = cands_[idx];
    if (fits(c)) {
      for (int a = c.first_arc; a <= c.last_arc; ++a) residual_[a] -= c.weight;
      chosen_.push_back(c.id);
      visit(idx + 1, value + c.value);
      chosen_.pop_back();
      for (int a = c.first_arc; a <= c.last_arc; ++a) residual_[a] += c.weight;
    }
    visit(idx + 1, value);
  }

  std::vector<Candidate> cands_;
  std::vector<double> residual_;
  std::vector<int> chosen_;
  std::vector<int> best_;
  double best_value_ = 0.0;
};

}  // namespace

RouteEnumerator::RouteEnumerator(const Instance& inst)
    : inst_(&inst), on_path_(inst.n() + 1, 0), limit_(length_limit(inst)) {
  stack_.push_back(Frame{1, 2, 0.0});
  on_path_[1] = 1;
}

std::optional<std::vector<int>> RouteEnumerator::next() {
  const int n = inst_->n();
  while (!stack_.empty()) {
    Frame& f = stack_.back();
    int pick = 0;
    for (int c = f.next_candidate; c <= n; ++c) {
      if (on_path_[c] || f.length + inst_->d(f.node, c) > limit_) continue;
      pick = c;
      break;
    }
    if (pick == 0) {
      on_path_[f.node] = 0;
      stack_.pop_back();
      continue;
    }
    f.next_candidate = pick + 1;
    if (pick == n) {
      std::vector<int> route;
      route.reserve(stack_.size() + 1);
      for (const Frame& g : stack_) route.push_back(g.node);
      route.push_back(n);
      return route;
    }
    const double len = f.length + inst_->d(f.node, pick);
    stack_.push_back(Frame{pick, 2, len});
    on_path_[pick] = 1;
  }
  return std::nullopt;
}

RouteEnumerator enumerate_routes(const Instance& inst) { return RouteEnumerator(inst); }

double route_length(const Instance& inst, const std::vector<int>& route) {
  double len = 0.0;
  for (std::size_t k = 0; k + 1 < route.size(); ++k) len += inst.d(route[k], route[k + 1]);
  return len;
}

std::map<Arc, double> route_loads(const Instance& inst, const std::vector<int>& route,
                                  const std::vector<int>& accepted) {
  std::map<Arc, double> loads;
  for (std::size_t k = 0; k + 1 < route.size(); ++k) loads[Arc{route[k], route[k + 1]}] = 0.0;
  const std::vector<int> pos = positions(inst.n(), route);
  for (int id : accepted) {
    if (id < 1 || id > static_cast<int>(inst.requests().size())) {
      throw ConsistencyError("unknown request id " + std::to_string(id));
    }
    const Request& r = inst.requests()[id - 1];
    const int a = pos[r.origin];
    const int b = pos[r.destination];
    if (a < 0 || b < 0 || a >= b) {
      throw ConsistencyError("request " + std::to_string(id) + " does not ride the route in order");
    }
    for (int k = a; k < b; ++k) loads[Arc{route[k], route[k + 1]}] += r.weight;
  }
  return loads;
}

RouteSelection best_requests_for_route(const Instance& inst, const std::vector<int>& route) {
  const Parameters& P = inst.params();
  const std::vector<int> pos = positions(inst.n(), route);
  std::vector<double> along(route.size(), 0.0);
  for (std::size_t k = 1; k < route.size(); ++k) {
    along[k] = along[k - 1] + inst.d(route[k - 1], route[k]);
  }

  std::vector<Candidate> cands;
  for (const Request& r : inst.requests()) {
    const int a = pos[r.origin];
    const int b = pos[r.destination];
    if (a < 0 || b < 0 || a >= b || r.weight > P.Q) continue;
    const double value =
        r.weight * (P.p * inst.d(r.origin, r.destination) - P.c * (along[b] - along[a]));
    // A request that earns nothing only uses up capacity.
    if (value <= 0.0) continue;
    cands.push_back(Candidate{r.id, a, b - 1, r.weight, value});
  }
  if (static_cast<int>(cands.size()) > kMaxOracleRequests) {
    throw SizeLimitError(std::to_string(cands.size()) +
                         " profitable requests on one route exceed the oracle limit of " +
                         std::to_string(kMaxOracleRequests));
  }
  const std::size_t arcs = route.size() > 0 ? route.size() - 1 : 0;
  RouteSelection sel = SubsetSearch(std::move(cands), arcs, P.Q).run();
  sel.profit -= P.c * P.v * along.back();
  return sel;
}

BpmpSolution solve_exact(const Instance& inst, const OracleLimits& limits) {
  const ValidationReport report = validate_instance(inst);
  if (!report.ok()) throw InvalidInstanceError(report.errors.front());
  if (inst.n() - 2 > limits.max_interior_nodes) {
    throw SizeLimitError("oracle handles at most " + std::to_string(limits.max_interior_nodes) +
                         " interior nodes, instance has " + std::to_string(inst.n() - 2));
  }
  std::optional<BpmpSolution> best;
  RouteEnumerator routes(inst);
  while (auto route = routes.next()) {
    RouteSelection sel = best_requests_for_route(inst, *route);
    if (best && sel.profit <= best->profit + kTieTol) continue;
    best = BpmpSolution{*route, sel.accepted, sel.profit, {}, std::nullopt};
  }
  if (!best) throw InfeasibleError("no route from 1 to n fits within the distance limit");
  best->arc_loads = route_loads(inst, best->route, best->accepted);
  return *best;
}

}  // namespace bpmp
