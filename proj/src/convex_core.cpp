#include "epirep/convex_core.hpp"
#include "epirep/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace epirep {
namespace {

template <class... F>
struct overloaded : F... {
  using F::operator()...;
};
template <class... F>
overloaded(F...) -> overloaded<F...>;

Vec2 as2(const Vec& v) {
  if (v.size() != 2) throw GeometryError("dimension mismatch");
  return {v[0], v[1]};
}

Vec as_vec(const Vec2& v) {
  Vec out(2);
  out << v.x(), v.y();
  return out;
}

Polygon ball_polygon(const Ball& b, int segments) {
  std::vector<Vec2> pts;
  const Vec2 c = as2(b.center);
  if (b.radius == 0.0) return Polygon::point(c);
  for (int k = 0; k < segments; ++k) {
    const double th = 2.0 * std::numbers::pi * k / segments;
    pts.emplace_back(c + b.radius * Vec2(std::cos(th), std::sin(th)));
  }
  return Polygon::hull(std::move(pts));
}

// Euclidean projection onto the probability simplex.
void project_simplex(Vec& w) {
  Vec s = w;
  std::sort(s.data(), s.data() + s.size(), std::greater<>());
  double cum = 0.0, theta = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    cum += s[i];
    const double t = (cum - 1.0) / static_cast<double>(i + 1);
    if (s[i] - t > 0.0) theta = t;
  }
  w = (w.array() - theta).max(0.0).matrix();
}

// Nearest point of conv(points) to z by accelerated projected gradient on
// the barycentric weights.
Vec hull_nearest(const PointHull& h, const Vec& z) {
  const auto n = static_cast<Eigen::Index>(h.points.size());
  const Eigen::Index m = z.size();
  Eigen::MatrixXd q(m, n);
  for (Eigen::Index i = 0; i < n; ++i) q.col(i) = h.points[static_cast<std::size_t>(i)] - z;
  const double lip = std::max(q.squaredNorm(), 1e-300);
  Vec w = Vec::Constant(n, 1.0 / static_cast<double>(n));
  Vec y = w, prev = w;
  double t = 1.0;
  for (int it = 0; it < 50000; ++it) {
    Vec g = q.transpose() * (q * y);
    Vec next = y - g / lip;
    project_simplex(next);
    const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = next + ((t - 1.0) / tn) * (next - prev);
    const double change = (next - prev).lpNorm<Eigen::Infinity>();
    prev = next;
    t = tn;
    if (change < 1e-15) break;
  }
  return z + q * prev;
}

double van_der_corput(std::uint64_t i, std::uint64_t base) {
  double f = 1.0, r = 0.0;
  while (i > 0) {
    f /= static_cast<double>(base);
    r += f * static_cast<double>(i % base);
    i /= base;
  }
  return r;
}

}  // namespace

ConvexBody::ConvexBody(Ball b) : shape_(std::move(b)) {
  const Ball& ball = std::get<Ball>(shape_);
  if (ball.center.size() == 0 || !ball.center.allFinite() || !(ball.radius >= 0.0) ||
      !std::isfinite(ball.radius))
    throw GeometryError("degenerate body");
}

ConvexBody::ConvexBody(Polygon p) : shape_(std::move(p)) {
  if (std::get<Polygon>(shape_).empty()) throw GeometryError("degenerate body");
}

ConvexBody::ConvexBody(PointHull h) : shape_(Polygon()) {
  if (h.points.empty()) throw GeometryError("degenerate body");
  const auto m = h.points.front().size();
  for (const auto& p : h.points)
    if (p.size() != m || m == 0 || !p.allFinite()) throw GeometryError("degenerate body");
  if (m == 2) {
    std::vector<Vec2> pts;
    for (const auto& p : h.points) pts.emplace_back(p[0], p[1]);
    shape_ = Polygon::hull(std::move(pts));
  } else {
    shape_ = std::move(h);
  }
}

int ConvexBody::dimension() const {
  return std::visit(overloaded{[](const Ball& b) { return static_cast<int>(b.center.size()); },
                               [](const Polygon&) { return 2; },
                               [](const PointHull& h) {
                                 return static_cast<int>(h.points.front().size());
                               }},
                    shape_);
}

double ConvexBody::diameter_bound() const {
  return std::visit(overloaded{[](const Ball& b) { return 2.0 * b.radius; },
                               [](const Polygon& p) { return p.diameter(); },
                               [](const PointHull& h) {
                                 double d = 0.0;
                                 for (const auto& a : h.points)
                                   for (const auto& b : h.points) d = std::max(d, (a - b).norm());
                                 return d;
                               }},
                    shape_);
}

double support(const ConvexBody& body, const Vec& u) {
  if (u.size() != body.dimension()) throw GeometryError("dimension mismatch");
  return std::visit(overloaded{[&](const Ball& b) { return u.dot(b.center) + b.radius * u.norm(); },
                               [&](const Polygon& p) { return p.support(as2(u)); },
                               [&](const PointHull& h) {
                                 double best = -INFINITY;
                                 for (const auto& p : h.points) best = std::max(best, u.dot(p));
                                 return best;
                               }},
                    body.shape());
}

Vec nearest_point(const ConvexBody& body, const Vec& z) {
  if (z.size() != body.dimension()) throw GeometryError("dimension mismatch");
  return std::visit(overloaded{[&](const Ball& b) -> Vec {
                                 const Vec d = z - b.center;
                                 const double n = d.norm();
                                 if (n <= b.radius) return z;
                                 return b.center + (b.radius / n) * d;
                               },
                               [&](const Polygon& p) -> Vec { return as_vec(p.nearest(as2(z))); },
                               [&](const PointHull& h) -> Vec { return hull_nearest(h, z); }},
                    body.shape());
}

double distance_to(const ConvexBody& body, const Vec& z) {
  if (const auto* b = std::get_if<Ball>(&body.shape())) {
    if (z.size() != b->center.size()) throw GeometryError("dimension mismatch");
    return std::max(0.0, (z - b->center).norm() - b->radius);
  }
  return (nearest_point(body, z) - z).norm();
}

bool contains(const ConvexBody& body, const Vec& z, double tol) {
  if (const auto* p = body.polygon()) return p->contains(as2(z), tol < 0.0 ? kPolygonTol : tol);
  return distance_to(body, z) <= (tol < 0.0 ? kSampledTol : tol);
}

ConvexBody clamp_intersection(const ConvexBody& body, const Vec& anchor,
                              const GeometryOptions& opts) {
  if (body.dimension() != 2) throw GeometryError("clamp_intersection: planar bodies only");
  const Vec2 y = as2(anchor);
  if (const auto* p = body.polygon()) return clamp_intersection(*p, y, opts.arc_segments);
  const Ball& b = std::get<Ball>(body.shape());
  const double d = std::max(0.0, (y - as2(b.center)).norm() - b.radius);
  if (d == 0.0) return Polygon::point(y);
  return clip_disk(ball_polygon(b, opts.arc_segments), y, 2.0 * d, opts.arc_segments);
}

std::vector<Vec> sphere_nodes(int m, int count) {
  static constexpr std::uint64_t primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  if (m < 2 || m > 12) throw GeometryError("sphere_nodes: unsupported dimension");
  std::vector<Vec> out;
  const int half = std::max(1, count / 2);
  const int pairs = (m + 1) / 2;
  for (int i = 0; i < half; ++i) {
    Vec g(2 * pairs);
    for (int k = 0; k < pairs; ++k) {
      // Box-Muller on Halton coordinates; index offset skips the origin
      const auto idx = static_cast<std::uint64_t>(i) + 1;
      const double u1 = std::max(van_der_corput(idx, primes[2 * k]), 1e-300);
      const double u2 = van_der_corput(idx, primes[2 * k + 1]);
      const double rad = std::sqrt(-2.0 * std::log(u1));
      g[2 * k] = rad * std::cos(2.0 * std::numbers::pi * u2);
      g[2 * k + 1] = rad * std::sin(2.0 * std::numbers::pi * u2);
    }
    Vec p = g.head(m);
    const double n = p.norm();
    if (n == 0.0) continue;
    p /= n;
    out.push_back(p);
    out.push_back(-p);
  }
  return out;
}

Vec steiner_point_quadrature(const std::function<double(const Vec&)>& support_fn, int m,
                             const GeometryOptions& opts, double scale) {
  auto estimate = [&](int nodes) {
    Vec acc = Vec::Zero(m);
    if (m == 2) {
      for (int k = 0; k < nodes; ++k) {
        const double th = 2.0 * std::numbers::pi * k / nodes;
        Vec u(2);
        u << std::cos(th), std::sin(th);
        acc += u * support_fn(u);
      }
      return Vec(acc * (2.0 / nodes));
    }
    const auto pts = sphere_nodes(m, nodes);
    for (const auto& u : pts) acc += u * support_fn(u);
    return Vec(acc * (static_cast<double>(m) / static_cast<double>(pts.size())));
  };
  const double tol = (m == 2 ? opts.steiner_tol : opts.steiner_tol_high) * scale;
  int nodes = opts.sphere_nodes;
  Vec prev = estimate(nodes);
  while (nodes < opts.max_sphere_nodes) {
    nodes *= 2;
    Vec next = estimate(nodes);
    if ((next - prev).norm() <= tol) return next;
    prev = std::move(next);
  }
  throw NumericalError("steiner quadrature did not converge");
}

Vec steiner_point(const ConvexBody& body, const GeometryOptions& opts) {
  if (const auto* b = std::get_if<Ball>(&body.shape())) return b->center;
  if (const auto* p = body.polygon()) return as_vec(steiner_point(*p));
  return steiner_point_quadrature([&](const Vec& u) { return support(body, u); },
                                  body.dimension(), opts, 1.0 + body.diameter_bound());
}

double hausdorff(const ConvexBody& a, const ConvexBody& b, const GeometryOptions& opts) {
  const int m = a.dimension();
  if (m != b.dimension()) throw GeometryError("dimension mismatch");
  const auto* ba = std::get_if<Ball>(&a.shape());
  const auto* bb = std::get_if<Ball>(&b.shape());
  if (ba && bb) return (ba->center - bb->center).norm() + std::abs(ba->radius - bb->radius);
  if (a.polygon() && b.polygon()) return hausdorff(*a.polygon(), *b.polygon());

  // H(K, D) = sup over unit u of |sigma_K(u) - sigma_D(u)|
  auto gap = [&](const Vec& u) { return std::abs(support(a, u) - support(b, u)); };
  if (m == 2) {
    const int n = opts.hausdorff_directions;
    auto at = [&](double th) {
      Vec u(2);
      u << std::cos(th), std::sin(th);
      return gap(u);
    };
    double best = 0.0, best_th = 0.0;
    for (int k = 0; k < n; ++k) {
      const double th = 2.0 * std::numbers::pi * k / n;
      const double g = at(th);
      if (g > best) best = g, best_th = th;
    }
    // golden-section polish around the best sampled direction
    const double h = 2.0 * std::numbers::pi / n;
    double lo = best_th - h, hi = best_th + h;
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - r * (hi - lo), x2 = lo + r * (hi - lo);
    double f1 = at(x1), f2 = at(x2);
    for (int it = 0; it < 60; ++it) {
      if (f1 > f2) {
        hi = x2, x2 = x1, f2 = f1, x1 = hi - r * (hi - lo), f1 = at(x1);
      } else {
        lo = x1, x1 = x2, f1 = f2, x2 = lo + r * (hi - lo), f2 = at(x2);
      }
    }
    return std::max({best, f1, f2});
  }
  double best = 0.0;
  for (const auto& u : sphere_nodes(m, opts.sphere_nodes)) best = std::max(best, gap(u));
  return best;
}

}  // namespace epirep
