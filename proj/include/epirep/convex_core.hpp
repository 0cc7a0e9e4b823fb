#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <functional>
#include <span>
#include <variant>
#include <vector>

namespace epirep {

using Vec = Eigen::VectorXd;
using Vec2 = Eigen::Vector2d;

// tolerances for exact (polygon) paths and for sampled paths
inline constexpr double kPolygonTol = 1e-9;
inline constexpr double kSampledTol = 1e-6;

struct Ball {
  Vec center;
  double radius = 0.0;
};

// Convex polygon with counter-clockwise vertices. A single vertex is a point
// and two vertices a segment; both are legitimate compact convex sets.
class Polygon {
 public:
  Polygon() = default;

  // Convex hull of arbitrary points (monotone chain, collinear points dropped).
  static Polygon hull(std::vector<Vec2> points);
  static Polygon point(const Vec2& p) { return hull({p}); }
  static Polygon segment(const Vec2& a, const Vec2& b) { return hull({a, b}); }
  static Polygon box(double x0, double y0, double x1, double y1);

  std::span<const Vec2> vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  bool empty() const { return vertices_.empty(); }

  Polygon translated(const Vec2& v) const;
  double support(const Vec2& u) const;
  bool contains(const Vec2& z, double tol = kPolygonTol) const;
  Vec2 nearest(const Vec2& z) const;
  double distance(const Vec2& z) const { return (nearest(z) - z).norm(); }
  double diameter() const;
  double area() const;

 private:
  std::vector<Vec2> vertices_;
};

// Convex hull of finitely many points in R^m, for m > 2.
struct PointHull {
  std::vector<Vec> points;
};

// Options for the sampled paths (Steiner quadrature, Hausdorff by support
// sampling, arcs of clamped sets).
struct GeometryOptions {
  int sphere_nodes = 4096;       // starting node count, doubled until stable
  int max_sphere_nodes = 1 << 20;
  double steiner_tol = 1e-8;     // m = 2
  double steiner_tol_high = 1e-3;  // m > 2, relative to 1 + diameter
  int arc_segments = 720;        // per full turn when discretizing circle arcs
  int hausdorff_directions = 2880;
};

class ConvexBody {
 public:
  using Variant = std::variant<Ball, Polygon, PointHull>;

  ConvexBody(Ball b);
  ConvexBody(Polygon p);
  ConvexBody(PointHull h);

  int dimension() const;
  double diameter_bound() const;
  const Variant& shape() const { return shape_; }
  const Polygon* polygon() const { return std::get_if<Polygon>(&shape_); }

 private:
  Variant shape_;
};

double support(const ConvexBody& body, const Vec& direction);
bool contains(const ConvexBody& body, const Vec& z, double tol = -1.0);
Vec nearest_point(const ConvexBody& body, const Vec& z);
double distance_to(const ConvexBody& body, const Vec& z);

// P(y, K) = K intersected with the ball B(y, 2 d(y, K)). Planar bodies only;
// the result is a polygon whose circular arcs are discretized.
ConvexBody clamp_intersection(const ConvexBody& body, const Vec& anchor,
                              const GeometryOptions& opts = {});
Polygon clamp_intersection(const Polygon& body, const Vec2& anchor,
                           int arc_segments = 720);

// Steiner point of K intersected with a closed disk, with the circular arcs
// integrated exactly over their normal angles instead of discretized.
struct DiskClipSteiner {
  Vec2 point = Vec2::Zero();
  double diameter = 0.0;     // arcs sampled at 64 points per turn
  std::size_t pieces = 0;    // corners plus arcs of the boundary
};
DiskClipSteiner steiner_of_disk_clip(const Polygon& body, const Vec2& center, double radius);
// Exact Steiner point of P(y, K) for a polygon K.
DiskClipSteiner clamp_steiner(const Polygon& body, const Vec2& anchor);

// K intersected with a closed disk. Throws GeometryError when empty.
Polygon clip_disk(const Polygon& body, const Vec2& center, double radius,
                  int arc_segments = 720);
// K intersected with the half-plane {z : <n, z> <= c}.
Polygon clip_halfplane(const Polygon& body, const Vec2& n, double c);

Vec steiner_point(const ConvexBody& body, const GeometryOptions& opts = {});
// Exact exterior-angle formula: sum of vertices weighted by exterior angle / 2 pi.
Vec2 steiner_point(const Polygon& body);
// m * mean of p sigma(p) over the sphere, from a support oracle alone.
// Trapezoidal in the angle for m = 2, quasi-Monte-Carlo for m > 2.
Vec steiner_point_quadrature(const std::function<double(const Vec&)>& support_fn,
                             int m, const GeometryOptions& opts = {},
                             double scale = 1.0);

double hausdorff(const ConvexBody& a, const ConvexBody& b,
                 const GeometryOptions& opts = {});
double hausdorff(const Polygon& a, const Polygon& b);

// Deterministic unit vectors for sphere quadrature in R^m, antipodally paired.
std::vector<Vec> sphere_nodes(int m, int count);

}  // namespace epirep
