#include "bpmp/datagen.hpp"

#include <cmath>
#include <random>

#include "bpmp/errors.hpp"

namespace bpmp {

namespace {

constexpr double kSquareMiles = 700.0;

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

Instance generate_instance(int n, std::uint64_t seed, const Parameters& params) {
  if (n < 2) throw InvalidInstanceError("generate_instance: n must be at least 2");
  std::mt19937_64 rng(seed);

  std::vector<double> px(n);
  std::vector<double> py(n);
  for (int i = 0; i < n; ++i) {
    px[i] = kSquareMiles * uniform01(rng);
    py[i] = kSquareMiles * uniform01(rng);
  }
  std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j) dist[i][j] = std::round(std::hypot(px[i] - px[j], py[i] - py[j]));
    }
  }
  // Rounding can break the triangle inequality by a mile; close it.
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        dist[i][j] = std::min(dist[i][j], dist[i][k] + dist[k][j]);
      }
    }
  }

  std::vector<Request> requests;
  for (const Arc& a : arc_set(n)) {
    const long tenths = std::lround(500.0 * uniform01(rng));
    if (tenths == 0) continue;
    requests.push_back(Request{static_cast<int>(requests.size()) + 1, a.from, a.to,
                               static_cast<double>(tenths) / 10.0});
  }
  return Instance(n, std::move(dist), std::move(requests), params);
}

Instance op_to_bpmp(const OpInstance& op) {
  const int n = op.n;
  if (op.points.size() != static_cast<std::size_t>(n)) {
    throw InvalidInstanceError("orienteering instance needs one score per node");
  }
  std::vector<Request> requests;
  double total = 0.0;
  for (int i = 2; i < n; ++i) {
    const double score = op.points[i - 1];
    if (score <= 0.0) continue;
    const double t = op.times.at(i - 1).at(n - 1);
    if (!(t > 0.0)) {
      throw InvalidInstanceError("node " + std::to_string(i) +
                                 " scores points but has zero travel time to the finish");
    }
    const double w = score / t;
    requests.push_back(Request{static_cast<int>(requests.size()) + 1, i, n, w});
    total += w;
  }
  const Parameters params{1.0, 0.0, 1.0, requests.empty() ? 1.0 : total, op.t_max};
  return Instance(n, op.times, std::move(requests), params);
}

}  // namespace bpmp
