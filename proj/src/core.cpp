#include "bpmp/core.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "bpmp/errors.hpp"

namespace bpmp {

namespace {

constexpr double kTriangleSlack = 1e-9;

std::string fmt_num(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

}  // namespace

Parameters Parameters::standard() { return Parameters{1.2, 1.0, 5.0, 50.0, 1000.0}; }

std::string to_string(const Arc& a) {
  return "(" + std::to_string(a.from) + "," + std::to_string(a.to) + ")";
}

std::string to_string(const Triple& t) {
  return "(" + std::to_string(t.i) + "," + std::to_string(t.j) + "," +
         std::to_string(t.k) + ")";
}

Instance::Instance(int n, std::vector<std::vector<double>> dist,
                   std::vector<Request> requests, Parameters params)
    : n_(n), requests_(std::move(requests)), params_(params) {
  if (n < 2) {
    throw InvalidInstanceError("node count must be at least 2, got " +
                               std::to_string(n));
  }
  if (dist.size() != static_cast<std::size_t>(n)) {
    throw InvalidInstanceError("distance matrix has " +
                               std::to_string(dist.size()) + " rows, expected " +
                               std::to_string(n));
  }
  dist_.reserve(static_cast<std::size_t>(n) * n);
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (dist[i].size() != static_cast<std::size_t>(n)) {
      throw InvalidInstanceError("distance row " + std::to_string(i + 1) +
                                 " has " + std::to_string(dist[i].size()) +
                                 " entries, expected " + std::to_string(n));
    }
    dist_.insert(dist_.end(), dist[i].begin(), dist[i].end());
  }

  pair_weight_.assign(static_cast<std::size_t>(n) * n, 0.0);
  std::vector<char> seen(static_cast<std::size_t>(n) * n, 0);
  for (const Request& r : requests_) {
    if (r.origin < 1 || r.origin > n || r.destination < 1 || r.destination > n)
      continue;
    const auto idx = static_cast<std::size_t>(r.origin - 1) * n + (r.destination - 1);
    if (seen[idx]) duplicate_pairs_ = true;
    seen[idx] = 1;
    pair_weight_[idx] += r.weight;
  }

  for (const Triple& t : triple_set(n)) {
    if (d(t.i, t.j) > d(t.i, t.k) + d(t.k, t.j) + kTriangleSlack) {
      triangle_ok_ = false;
      break;
    }
  }
}

std::vector<std::vector<double>> Instance::dist_matrix() const {
  std::vector<std::vector<double>> out(n_);
  for (int i = 0; i < n_; ++i) {
    out[i].assign(dist_.begin() + static_cast<std::ptrdiff_t>(i) * n_,
                  dist_.begin() + static_cast<std::ptrdiff_t>(i + 1) * n_);
  }
  return out;
}

double Instance::pair_weight(int i, int j) const {
  return pair_weight_[static_cast<std::size_t>(i - 1) * n_ + (j - 1)];
}

Instance Instance::with_params(const Parameters& params) const {
  return Instance(n_, dist_matrix(), requests_, params);
}

Instance Instance::with_requests(std::vector<Request> requests) const {
  return Instance(n_, dist_matrix(), std::move(requests), params_);
}

Network::Network(int n) : n_(n), arcs_(arc_set(n)), triples_(triple_set(n)) {
  const auto nn = static_cast<std::size_t>(n);
  arc_lookup_.assign(nn * nn, -1);
  for (std::size_t a = 0; a < arcs_.size(); ++a) {
    arc_lookup_[(arcs_[a].from - 1) * nn + (arcs_[a].to - 1)] = static_cast<int>(a);
  }
  triple_lookup_.assign(nn * nn * nn, -1);
  for (std::size_t t = 0; t < triples_.size(); ++t) {
    const Triple& tr = triples_[t];
    triple_lookup_[((tr.i - 1) * nn + (tr.j - 1)) * nn + (tr.k - 1)] = static_cast<int>(t);
  }
}

int Network::arc_index(int i, int j) const {
  if (i < 1 || j < 1 || i > n_ || j > n_) return -1;
  return arc_lookup_[static_cast<std::size_t>(i - 1) * n_ + (j - 1)];
}

int Network::triple_index(int i, int j, int k) const {
  if (i < 1 || j < 1 || k < 1 || i > n_ || j > n_ || k > n_) return -1;
  const auto nn = static_cast<std::size_t>(n_);
  return triple_lookup_[((i - 1) * nn + (j - 1)) * nn + (k - 1)];
}

std::vector<Arc> arc_set(int n) {
  if (n < 2) throw std::invalid_argument("arc_set: n must be at least 2");
  std::vector<Arc> arcs;
  arcs.reserve(static_cast<std::size_t>(n) * n);
  for (int i = 1; i < n; ++i) {
    for (int j = 2; j <= n; ++j) {
      if (i != j) arcs.push_back({i, j});
    }
  }
  return arcs;
}

std::vector<Triple> triple_set(int n) {
  std::vector<Triple> triples;
  if (n < 3) return triples;
  for (int i = 1; i < n; ++i) {
    for (int j = 2; j <= n; ++j) {
      if (j == i) continue;
      for (int k = 2; k < n; ++k) {
        if (k == i || k == j) continue;
        triples.push_back({i, j, k});
      }
    }
  }
  return triples;
}

ValidationReport validate_instance(const Instance& inst) {
  ValidationReport report;
  const int n = inst.n();
  const Parameters& prm = inst.params();

  auto check_param = [&](bool ok, const std::string& what) {
    if (!ok) report.errors.push_back("invalid parameter: " + what);
  };
  check_param(prm.p >= 0.0, "p must be >= 0");
  check_param(prm.c >= 0.0, "c must be >= 0");
  check_param(prm.v >= 0.0, "v must be >= 0");
  check_param(prm.Q > 0.0, "Q must be > 0");
  check_param(prm.D > 0.0, "D must be > 0");

  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) {
      const double dij = inst.d(i, j);
      if (!std::isfinite(dij)) {
        report.errors.push_back("non-finite distance (" + std::to_string(i) + "," +
                                std::to_string(j) + ")");
      } else if (dij < 0.0) {
        report.errors.push_back("negative distance (" + std::to_string(i) + "," +
                                std::to_string(j) + ")");
      } else if (i == j && dij != 0.0) {
        report.errors.push_back("nonzero self distance (" + std::to_string(i) + "," +
                                std::to_string(i) + ")");
      }
    }
  }

  std::map<int, int> ids;
  for (const Request& r : inst.requests()) {
    const std::string tag = "request " + std::to_string(r.id);
    if (++ids[r.id] == 2) report.errors.push_back(tag + ": duplicate id");
    const bool in_range =
        r.origin >= 1 && r.origin <= n && r.destination >= 1 && r.destination <= n;
    if (!in_range) {
      report.errors.push_back(tag + ": node index out of range");
      continue;
    }
    if (r.origin == r.destination) report.errors.push_back(tag + ": origin equals destination");
    if (r.origin == n) report.errors.push_back(tag + ": origin is the depot");
    if (r.destination == 1) report.errors.push_back(tag + ": destination is the start node");
    if (!(r.weight > 0.0)) report.errors.push_back(tag + ": weight must be > 0");
    if (r.weight > prm.Q) {
      report.errors.push_back(tag + ": weight " + fmt_num(r.weight) +
                              " exceeds capacity " + fmt_num(prm.Q));
    }
  }

  for (const Triple& t : triple_set(n)) {
    if (inst.d(t.i, t.j) > inst.d(t.i, t.k) + inst.d(t.k, t.j) + kTriangleSlack) {
      report.warnings.push_back("triangle inequality violated at " + to_string(t));
    }
  }
  return report;
}

double profit_upper_bound(const Parameters& prm) {
  return (prm.p * prm.Q - prm.c * prm.Q - prm.c * prm.v) * prm.D;
}

long compute_big_m(const Instance& inst, BigMMode mode) {
  const long n = inst.n();
  const long data_independent = (n * n - n) / 2;
  if (mode == BigMMode::data_independent) return data_independent;

  // Maximum cardinality under a single weight budget: the lightest
  // requests first is exact.
  std::vector<double> weights;
  weights.reserve(inst.requests().size());
  for (const Request& r : inst.requests()) weights.push_back(r.weight);
  std::sort(weights.begin(), weights.end());
  long count = 0;
  double load = 0.0;
  for (double w : weights) {
    if (load + w > inst.params().Q + 1e-9) break;
    load += w;
    ++count;
  }
  // Without duplicate pairs a simple path carries at most one request per
  // ordered node pair.
  if (!inst.has_duplicate_pairs()) count = std::min(count, data_independent);
  return count;
}

boost::multiprecision::cpp_int count_solution_space(int k) {
  using boost::multiprecision::cpp_int;
  if (k < 0) throw std::invalid_argument("count_solution_space: k must be >= 0");
  cpp_int total = 0;
  cpp_int perms = 1;  // P(k, r)
  for (int r = 0; r <= k; ++r) {
    if (r > 0) perms *= (k - r + 1);
    const unsigned pairs = static_cast<unsigned>((r + 2) * (r + 1) / 2);
    cpp_int subsets = 1;
    subsets <<= pairs;
    total += perms * subsets;
  }
  return total;
}

}  // namespace bpmp
