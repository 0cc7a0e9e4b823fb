#pragma once

#include "epirep/convex_core.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

namespace epirep::testing {

inline Polygon random_polygon(std::mt19937_64& rng, double spread = 1.0, int points = 12) {
  std::normal_distribution<double> n(0.0, spread);
  std::uniform_real_distribution<double> c(-2.0, 2.0);
  const Vec2 center(c(rng), c(rng));
  std::vector<Vec2> pts;
  for (int i = 0; i < points; ++i) pts.emplace_back(center + Vec2(n(rng), n(rng)));
  return Polygon::hull(std::move(pts));
}

// Steiner point straight from its definition, s = 2 * mean of u sigma(u),
// with a plain midpoint rule in the angle. Independent of the library path.
inline Vec2 steiner_by_angles(const Polygon& p, int nodes) {
  Vec2 acc = Vec2::Zero();
  for (int k = 0; k < nodes; ++k) {
    const double th = 2.0 * std::numbers::pi * (k + 0.5) / nodes;
    const Vec2 u(std::cos(th), std::sin(th));
    double s = -INFINITY;
    for (const auto& v : p.vertices()) s = std::max(s, u.dot(v));
    acc += u * s;
  }
  return acc * (2.0 / nodes);
}

// Brute-force Hausdorff distance on densely sampled boundaries.
inline double hausdorff_by_sampling(const Polygon& a, const Polygon& b, int per_edge) {
  auto sample = [&](const Polygon& p) {
    std::vector<Vec2> out;
    const auto v = p.vertices();
    for (std::size_t i = 0; i < v.size(); ++i)
      for (int k = 0; k < per_edge; ++k)
        out.push_back(v[i] + (v[(i + 1) % v.size()] - v[i]) * (double(k) / per_edge));
    return out;
  };
  double h = 0.0;
  for (const auto& z : sample(a)) h = std::max(h, b.distance(z));
  for (const auto& z : sample(b)) h = std::max(h, a.distance(z));
  return h;
}

}  // namespace epirep::testing
