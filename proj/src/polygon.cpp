#include "epirep/convex_core.hpp"
#include "epirep/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace epirep {
namespace {

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

double cross3(const Vec2& o, const Vec2& a, const Vec2& b) { return cross(a - o, b - o); }

Vec2 nearest_on_segment(const Vec2& a, const Vec2& b, const Vec2& z) {
  const Vec2 d = b - a;
  const double len2 = d.squaredNorm();
  if (len2 == 0.0) return a;
  const double t = std::clamp((z - a).dot(d) / len2, 0.0, 1.0);
  return a + t * d;
}

void require_nonempty(const Polygon& p) {
  if (p.empty()) throw GeometryError("degenerate body");
}

}  // namespace

Polygon Polygon::hull(std::vector<Vec2> pts) {
  for (const auto& p : pts)
    if (!std::isfinite(p.x()) || !std::isfinite(p.y())) throw GeometryError("degenerate body");
  std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  Polygon out;
  if (pts.size() <= 2) {
    out.vertices_ = std::move(pts);
    return out;
  }
  std::vector<Vec2> h(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross3(h[k - 2], h[k - 1], p) <= 0.0) --k;
    h[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lo = k + 1; i-- > 0;) {
    while (k >= lo && cross3(h[k - 2], h[k - 1], pts[i]) <= 0.0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  out.vertices_ = std::move(h);
  return out;
}

Polygon Polygon::box(double x0, double y0, double x1, double y1) {
  return hull({Vec2(x0, y0), Vec2(x1, y0), Vec2(x1, y1), Vec2(x0, y1)});
}

Polygon Polygon::translated(const Vec2& v) const {
  Polygon out = *this;
  for (auto& p : out.vertices_) p += v;
  return out;
}

double Polygon::support(const Vec2& u) const {
  require_nonempty(*this);
  double best = -INFINITY;
  for (const auto& p : vertices_) best = std::max(best, u.dot(p));
  return best;
}

bool Polygon::contains(const Vec2& z, double tol) const {
  require_nonempty(*this);
  const std::size_t n = vertices_.size();
  if (n <= 2) return distance(z) <= tol;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = vertices_[i];
    const Vec2& b = vertices_[(i + 1) % n];
    if (cross(b - a, z - a) < -tol * (b - a).norm()) return false;
  }
  return true;
}

Vec2 Polygon::nearest(const Vec2& z) const {
  require_nonempty(*this);
  const std::size_t n = vertices_.size();
  if (n == 1) return vertices_[0];
  if (n >= 3 && contains(z, 0.0)) return z;
  Vec2 best = vertices_[0];
  double best_d = INFINITY;
  const std::size_t edges = n == 2 ? 1 : n;
  for (std::size_t i = 0; i < edges; ++i) {
    const Vec2 q = nearest_on_segment(vertices_[i], vertices_[(i + 1) % n], z);
    const double d = (q - z).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = q;
    }
  }
  return best;
}

double Polygon::diameter() const {
  const std::size_t n = vertices_.size();
  if (n <= 1) return 0.0;
  if (n == 2) return (vertices_[0] - vertices_[1]).norm();
  // rotating calipers over antipodal pairs
  const auto& v = vertices_;
  double best = 0.0;
  std::size_t j = 1;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t ni = (i + 1) % n;
    const Vec2 e = v[ni] - v[i];
    for (std::size_t guard = 0; guard < n && cross(e, v[(j + 1) % n] - v[j]) > 0.0; ++guard)
      j = (j + 1) % n;
    best = std::max({best, (v[i] - v[j]).squaredNorm(), (v[ni] - v[j]).squaredNorm()});
  }
  return std::sqrt(best);
}

double Polygon::area() const {
  double a = 0.0;
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) a += cross(vertices_[i], vertices_[(i + 1) % n]);
  return 0.5 * a;
}

Polygon clip_disk(const Polygon& body, const Vec2& c, double r, int arc_segments) {
  require_nonempty(body);
  const auto v = body.vertices();
  const std::size_t n = v.size();
  const double slack = 1e-12 * (1.0 + r);
  if (!(r > 0.0)) {
    if (body.contains(c)) return Polygon::point(c);
    throw GeometryError("empty intersection");
  }
  if (n == 1) {
    if ((v[0] - c).norm() <= r + slack) return body;
    throw GeometryError("empty intersection");
  }

  // parameter interval of the chord A + t (B - A) inside the disk
  auto chord = [&](const Vec2& a, const Vec2& b, double& t0, double& t1) {
    const Vec2 d = b - a;
    const Vec2 w = a - c;
    const double qa = d.squaredNorm();
    const double qb = 2.0 * d.dot(w);
    const double qc = w.squaredNorm() - r * r;
    const double disc = qb * qb - 4.0 * qa * qc;
    if (qa == 0.0 || disc < 0.0) return false;
    const double s = std::sqrt(disc);
    t0 = (-qb - s) / (2.0 * qa);
    t1 = (-qb + s) / (2.0 * qa);
    return true;
  };

  if (n == 2) {
    double t0, t1;
    if (!chord(v[0], v[1], t0, t1) || t1 < 0.0 || t0 > 1.0) {
      if (body.distance(c) <= r + slack) return Polygon::point(body.nearest(c));
      throw GeometryError("empty intersection");
    }
    t0 = std::max(t0, 0.0);
    t1 = std::min(t1, 1.0);
    return Polygon::segment(v[0] + t0 * (v[1] - v[0]), v[0] + t1 * (v[1] - v[0]));
  }

  enum Kind { kVertex, kEntry, kExit };
  struct Event {
    Vec2 p;
    Kind kind;
  };
  std::vector<Event> seq;
  bool crossings = false;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = v[i];
    const Vec2& b = v[(i + 1) % n];
    if ((a - c).norm() <= r) seq.push_back({a, kVertex});
    double t0, t1;
    if (chord(a, b, t0, t1)) {
      if (t0 > 0.0 && t0 < 1.0) {
        seq.push_back({a + t0 * (b - a), kEntry});
        crossings = true;
      }
      if (t1 > 0.0 && t1 < 1.0) {
        seq.push_back({a + t1 * (b - a), kExit});
        crossings = true;
      }
    }
  }

  const double step = 2.0 * std::numbers::pi / arc_segments;
  std::vector<Vec2> pts;
  if (!crossings) {
    if (!seq.empty()) return body;  // every vertex inside
    if (!body.contains(c)) {
      if (body.distance(c) <= r + slack) return Polygon::point(body.nearest(c));
      throw GeometryError("empty intersection");
    }
    for (int k = 0; k < arc_segments; ++k)
      pts.emplace_back(c + r * Vec2(std::cos(k * step), std::sin(k * step)));
    return Polygon::hull(std::move(pts));
  }

  for (std::size_t k = 0; k < seq.size(); ++k) {
    pts.push_back(seq[k].p);
    if (seq[k].kind != kExit) continue;
    const Event& next = seq[(k + 1) % seq.size()];
    if (next.kind != kEntry) continue;
    const Vec2 e = seq[k].p - c;
    const Vec2 f = next.p - c;
    const double th0 = std::atan2(e.y(), e.x());
    double span = std::atan2(f.y(), f.x()) - th0;
    while (span < 0.0) span += 2.0 * std::numbers::pi;
    const int m = static_cast<int>(std::ceil(span / step));
    for (int j = 1; j < m; ++j) {
      const double th = th0 + span * j / m;
      pts.emplace_back(c + r * Vec2(std::cos(th), std::sin(th)));
    }
  }
  return Polygon::hull(std::move(pts));
}

Polygon clip_halfplane(const Polygon& body, const Vec2& nrm, double lvl) {
  require_nonempty(body);
  const auto v = body.vertices();
  const std::size_t n = v.size();
  std::vector<Vec2> pts;
  if (n == 1) {
    if (nrm.dot(v[0]) <= lvl) return body;
    throw GeometryError("empty intersection");
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = v[i];
    const Vec2& b = v[(i + 1) % n];
    const double fa = nrm.dot(a) - lvl;
    const double fb = nrm.dot(b) - lvl;
    if (fa <= 0.0) pts.push_back(a);
    if ((fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0))
      pts.push_back(a + (fa / (fa - fb)) * (b - a));
  }
  if (pts.empty()) throw GeometryError("empty intersection");
  return Polygon::hull(std::move(pts));
}

Polygon clamp_intersection(const Polygon& body, const Vec2& anchor, int arc_segments) {
  require_nonempty(body);
  const Vec2 q = body.nearest(anchor);
  const double d = (q - anchor).norm();
  if (d == 0.0) return Polygon::point(anchor);
  return clip_disk(body, anchor, 2.0 * d, arc_segments);
}

DiskClipSteiner steiner_of_disk_clip(const Polygon& body, const Vec2& c, double r) {
  require_nonempty(body);
  const auto v = body.vertices();
  const std::size_t n = v.size();
  auto finish_polygon = [](const Polygon& k) {
    return DiskClipSteiner{steiner_point(k), k.diameter(), k.size()};
  };
  if (n <= 2 || !(r > 0.0)) return finish_polygon(clip_disk(body, c, r, 4));

  // inside portion [t0, t1] of each edge
  struct Portion {
    Vec2 p, q;
    bool from_vertex, to_vertex;
    std::size_t edge;
  };
  std::vector<Portion> parts;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = v[i];
    const Vec2 d = v[(i + 1) % n] - a;
    const Vec2 w = a - c;
    const double qa = d.squaredNorm();
    const double qb = 2.0 * d.dot(w);
    const double qc = w.squaredNorm() - r * r;
    const double disc = qb * qb - 4.0 * qa * qc;
    if (qa == 0.0 || disc < 0.0) continue;
    const double sq = std::sqrt(disc);
    const double t0 = std::max(0.0, (-qb - sq) / (2.0 * qa));
    const double t1 = std::min(1.0, (-qb + sq) / (2.0 * qa));
    if (!(t1 > t0)) continue;
    parts.push_back({a + t0 * d, a + t1 * d, t0 == 0.0, t1 == 1.0, i});
  }
  if (parts.empty()) {
    if (body.contains(c)) return {c, 2.0 * r, 1};
    if (body.distance(c) <= r + 1e-12 * (1.0 + r)) return {body.nearest(c), 0.0, 1};
    throw GeometryError("empty intersection");
  }
  if (parts.size() == n && std::all_of(parts.begin(), parts.end(), [](const Portion& p) {
        return p.from_vertex && p.to_vertex;
      }))
    return finish_polygon(body);

  // Gauss-map integral: each corner contributes its turning angle times the
  // point, each arc the integral of c + r u(theta) over its normal angles
  Vec2 acc = Vec2::Zero();
  double total = 0.0;
  std::vector<Vec2> rim;
  auto turn = [](const Vec2& a, const Vec2& b) { return std::atan2(cross(a, b), a.dot(b)); };
  auto tangent = [&](const Vec2& p) { return Vec2(c.y() - p.y(), p.x() - c.x()); };
  std::size_t pieces = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const Portion& cur = parts[k];
    const Portion& next = parts[(k + 1) % parts.size()];
    const Vec2 din = cur.q - cur.p;
    const Vec2 dout = next.q - next.p;
    rim.push_back(cur.p);
    rim.push_back(cur.q);
    const bool joined = cur.to_vertex && next.from_vertex && next.edge == (cur.edge + 1) % n;
    if (joined) {
      const double ext = turn(din, dout);
      acc += ext * cur.q;
      total += ext;
      ++pieces;
      continue;
    }
    // leave the polygon boundary at cur.q, follow the circle to next.p
    const double e1 = turn(din, tangent(cur.q));
    const double e2 = turn(tangent(next.p), dout);
    acc += e1 * cur.q + e2 * next.p;
    total += e1 + e2;
    const double th0 = std::atan2(cur.q.y() - c.y(), cur.q.x() - c.x());
    double span = std::atan2(next.p.y() - c.y(), next.p.x() - c.x()) - th0;
    while (span < 0.0) span += 2.0 * std::numbers::pi;
    const double th1 = th0 + span;
    acc += span * c + r * Vec2(std::sin(th1) - std::sin(th0), std::cos(th0) - std::cos(th1));
    total += span;
    pieces += 3;
    const int m = std::max(1, static_cast<int>(std::ceil(span * 32.0 / std::numbers::pi)));
    for (int j = 1; j < m; ++j)
      rim.push_back(c + r * Vec2(std::cos(th0 + span * j / m), std::sin(th0 + span * j / m)));
  }
  return {acc / total, Polygon::hull(std::move(rim)).diameter(), pieces};
}

DiskClipSteiner clamp_steiner(const Polygon& body, const Vec2& anchor) {
  require_nonempty(body);
  const Vec2 q = body.nearest(anchor);
  const double d = (q - anchor).norm();
  if (d == 0.0) return {anchor, 0.0, 1};
  return steiner_of_disk_clip(body, anchor, 2.0 * d);
}

Vec2 steiner_point(const Polygon& body) {
  require_nonempty(body);
  const auto v = body.vertices();
  const std::size_t n = v.size();
  if (n == 1) return v[0];
  if (n == 2) return 0.5 * (v[0] + v[1]);
  Vec2 acc = Vec2::Zero();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 din = v[i] - v[(i + n - 1) % n];
    const Vec2 dout = v[(i + 1) % n] - v[i];
    const double ext = std::atan2(cross(din, dout), din.dot(dout));
    acc += ext * v[i];
    total += ext;
  }
  return acc / total;
}

double hausdorff(const Polygon& a, const Polygon& b) {
  require_nonempty(a);
  require_nonempty(b);
  double h = 0.0;
  for (const auto& p : a.vertices()) h = std::max(h, b.distance(p));
  for (const auto& p : b.vertices()) h = std::max(h, a.distance(p));
  return h;
}

}  // namespace epirep
