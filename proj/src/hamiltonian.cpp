#include "epirep/hamiltonian.hpp"
#include "epirep/errors.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <random>

namespace epirep {
namespace {

// Maximizes a concave function of one variable. Expands a bracket from p0 by
// doubling, then Brent. Returns value +inf on divergence.
template <class Phi>
ConjugateValue maximize_concave(Phi&& phi, double p0, const ConjugateOptions& opts) {
  auto eval = [&](double p) {
    const double v = phi(p);
    if (std::isnan(v)) throw ModelError("Hamiltonian returned NaN");
    return v;
  };
  const double s = 1.0;
  const double f0 = eval(p0);
  const double fr = eval(p0 + s);
  const double fl = eval(p0 - s);
  double lo = p0 - s, hi = p0 + s;
  if (fr > f0 || fl > f0) {
    const double dir = fr >= fl ? 1.0 : -1.0;
    double a = p0, fa = f0;
    double b = p0 + dir * s, fb = dir > 0 ? fr : fl;
    for (double step = 2.0 * s;; step *= 2.0) {
      const double c = b + dir * step;
      if (std::abs(c) > opts.p_max || fb > opts.divergence_cap) return {};
      const double fc = eval(c);
      // concavity: the chord slope may not increase along the expansion
      const double excess = (fc - fb) - (fb - fa) * (c - b) / (b - a);
      if (excess > 1e-9 * (1.0 + std::abs(fa) + std::abs(fb) + std::abs(fc)))
        throw ModelError("non-concave conjugate objective: H is not convex in p");
      if (fc <= fb) {
        lo = std::min(a, c);
        hi = std::max(a, c);
        break;
      }
      a = b, fa = fb, b = c, fb = fc;
    }
  }
  // Brent on the bracket; boost caps the precision at half the mantissa
  const int bits = static_cast<int>(std::ceil(-std::log2(opts.tolerance)));
  std::uintmax_t iters = 200;
  const auto [xb, nfb] = boost::math::tools::brent_find_minima(
      [&](double p) { return -eval(p); }, lo, hi, bits, iters);
  ConjugateValue out{-nfb, xb};
  if (f0 > out.value) out = {f0, p0};
  if (out.value > opts.divergence_cap) return {};
  return out;
}

double norm(State v) {
  double s = 0.0;
  for (double a : v) s += a * a;
  return std::sqrt(s);
}

}  // namespace

ConjugateValue conjugate_scalar(const HamiltonianModel& model, double t, double x, double v,
                                const ConjugateOptions& opts) {
  return maximize_concave([&](double p) { return v * p - model(t, x, p); }, 0.0, opts);
}

double conjugate(const HamiltonianModel& model, double t, State x, State v,
                 const ConjugateOptions& opts) {
  const std::size_t n = v.size();
  if (n != x.size() || n == 0) throw ModelError("conjugate: dimension mismatch");
  if (n == 1) return conjugate_scalar(model, t, x[0], v[0], opts).value;
  if (n > 8) throw ModelError("conjugate: dimension too large");
  // cyclic coordinate ascent; each coordinate problem is concave
  std::array<double, 8> p{};
  auto phi = [&]() {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i] * p[i];
    return s - model(t, x, State(p.data(), n));
  };
  double best = phi();
  for (int cycle = 0; cycle < opts.max_cycles; ++cycle) {
    const double start = best;
    for (std::size_t i = 0; i < n; ++i) {
      const double keep = p[i];
      const auto r = maximize_concave(
          [&](double q) {
            p[i] = q;
            return phi();
          },
          keep, opts);
      if (!r.finite()) return kInf;
      p[i] = r.argmax;
      best = r.value;
    }
    if (best - start <= 1e-13 * (1.0 + std::abs(best))) break;
  }
  return best;
}

double conjugate_domain_bound(const HamiltonianModel& model, double t, State x) {
  return model.c(t) * (1.0 + norm(x));
}

double conjugate_domain_bound(const HamiltonianModel& model, double t, double x) {
  return conjugate_domain_bound(model, t, State(&x, 1));
}

Interval conjugate_domain(const HamiltonianModel& model, double t, double x,
                          const ConjugateOptions& opts) {
  const double big = opts.p_max, half = 0.5 * opts.p_max;
  double hi = (model(t, x, big) - model(t, x, half)) / half;
  double lo = (model(t, x, -big) - model(t, x, -half)) / -half;
  const double w = conjugate_domain_bound(model, t, x);
  hi = std::min(hi, w);
  lo = std::max(lo, -w);
  if (lo > hi) lo = hi = 0.5 * (lo + hi);
  return {lo, hi};
}

Interval banded_domain(const HamiltonianModel& model, double t, double x, double band,
                       const ConjugateOptions& opts) {
  Interval d = conjugate_domain(model, t, x, opts);
  const double half = 0.5 * d.width();
  return {d.lo + band * half, d.hi - band * half};
}

ConjugateProfile::ConjugateProfile(const HamiltonianModel& model, double t, double x, double band,
                                   const ConjugateOptions& opts, bool closed_form)
    : model_(&model), t_(t), x_(x), opts_(opts), closed_form_(closed_form) {
  if (model.dim != 1) throw ModelError("conjugate profile: n = 1 only");
  if (closed_form && !model.has_closed_form())
    throw ModelError("model '" + model.name + "' has no closed-form conjugate");
  const Interval full = conjugate_domain(model, t, x, opts);
  const double w = conjugate_domain_bound(model, t, x);
  window_ = {-w, w};
  degenerate_ = full.width() <= 1e-9 * (1.0 + std::abs(full.lo) + std::abs(full.hi));
  if (degenerate_) {
    const double b = 0.5 * (full.lo + full.hi);
    domain_ = {b, b};
    point_value_ = -model(t, x, 0.0);
  } else {
    const double half = 0.5 * full.width();
    domain_ = {full.lo + band * half, full.hi - band * half};
  }
}

ConjugateValue ConjugateProfile::eval(double v) const {
  if (!domain_.contains(v)) return {};
  ++evaluations_;
  if (degenerate_) return {point_value_, 0.0};
  if (closed_form_) {
    // slope by differences inside the domain, standing in for the argmax
    const double f = model_->closed_form(t_, x_, v);
    const double h = 1e-7 * (1.0 + std::abs(v));
    const double a = std::max(domain_.lo, v - h), b = std::min(domain_.hi, v + h);
    const double slope =
        (model_->closed_form(t_, x_, b) - model_->closed_form(t_, x_, a)) / (b - a);
    return {f, slope};
  }
  return conjugate_scalar(*model_, t_, x_, v, opts_);
}

bool ConjugateProfile::contains(const Vec2& a) const {
  if (!domain_.contains(a.x())) return false;
  // points on the graph may miss by rounding of the numerical sup
  const double f = eval(a.x()).value;
  return a.y() >= f - 1e-12 * (1.0 + std::abs(f));
}

Vec2 ConjugateProfile::nearest(const Vec2& a, double* distance) const {
  auto finish = [&](double v, double f) {
    const Vec2 z(v, std::max(f, a.y()));
    if (distance) *distance = (z - a).norm();
    return z;
  };
  if (degenerate_) return finish(domain_.lo, point_value_);
  // derivative of (v - a_v)^2 + max(0, f(v) - a_eta)^2, with f' = argmax p
  auto slope = [&](double v, double* fv) {
    const auto c = eval(v);
    if (!c.finite()) throw NumericalError("conjugate infinite inside banded domain");
    *fv = c.value;
    return (v - a.x()) + std::max(0.0, c.value - a.y()) * c.argmax;
  };
  double lo = domain_.lo, hi = domain_.hi, flo, fhi;
  double glo = slope(lo, &flo);
  if (glo >= 0.0) return finish(lo, flo);
  double ghi = slope(hi, &fhi);
  if (ghi <= 0.0) return finish(hi, fhi);
  // safeguarded secant on the monotone derivative
  const double tol = 1e-14 * (1.0 + std::abs(lo) + std::abs(hi));
  double best_v = std::abs(glo) < std::abs(ghi) ? lo : hi;
  double best_f = best_v == lo ? flo : fhi;
  for (int it = 0; it < 200 && hi - lo > tol; ++it) {
    double m = lo - glo * (hi - lo) / (ghi - glo);
    const double span = hi - lo;
    if (!(m > lo + 0.05 * span && m < hi - 0.05 * span) || it % 3 == 2) m = 0.5 * (lo + hi);
    double fm;
    const double gm = slope(m, &fm);
    best_v = m, best_f = fm;
    if (gm == 0.0) break;
    if (gm < 0.0)
      lo = m, glo = gm;
    else
      hi = m, ghi = gm;
  }
  return finish(best_v, best_f);
}

std::vector<Vec2> sample_convex_graph(const std::function<double(double)>& f, double lo,
                                      double hi, int base, double tol, int max_points) {
  std::vector<Vec2> out;
  if (hi <= lo) {
    out.emplace_back(lo, f(lo));
    return out;
  }
  base = std::max(base, 2);
  std::vector<Vec2> seed;
  for (int i = 0; i <= base; ++i) {
    const double v = i == base ? hi : lo + (hi - lo) * i / base;
    const double fv = f(v);
    if (!std::isfinite(fv)) throw NumericalError("conjugate infinite inside sampled domain");
    seed.emplace_back(v, fv);
  }
  const double min_len = 1e-13 * (1.0 + std::abs(lo) + std::abs(hi));
  // largest sag first, so a truncated chain is still uniformly refined
  struct Piece {
    Vec2 a, m, b;
    double sag;
    bool operator<(const Piece& o) const { return sag < o.sag; }
  };
  auto make = [&](const Vec2& a, const Vec2& b) {
    const double vm = 0.5 * (a.x() + b.x());
    const Vec2 m(vm, f(vm));
    const Vec2 d = b - a;
    const double sag = std::abs(d.x() * (m.y() - a.y()) - d.y() * (m.x() - a.x())) / d.norm();
    return Piece{a, m, b, std::isfinite(sag) ? sag : 0.0};
  };
  std::priority_queue<Piece> queue;
  for (std::size_t i = 0; i + 1 < seed.size(); ++i) queue.push(make(seed[i], seed[i + 1]));
  out = seed;
  const auto budget = static_cast<std::size_t>(std::max(max_points, base + 1));
  while (!queue.empty() && out.size() < budget) {
    const Piece top = queue.top();
    if (!(top.sag > tol)) break;
    queue.pop();
    out.push_back(top.m);
    if (top.m.x() - top.a.x() >= min_len) queue.push(make(top.a, top.m));
    if (top.b.x() - top.m.x() >= min_len) queue.push(make(top.m, top.b));
  }
  std::sort(out.begin(), out.end(), [](const Vec2& p, const Vec2& q) { return p.x() < q.x(); });
  return out;
}

double default_cap(const HamiltonianModel& model, double t, double x, const SliceOptions& opts) {
  const ConjugateProfile prof(model, t, x, opts.band, opts.conj);
  // a convex function attains its max over an interval at an endpoint
  const double top = std::max(prof(prof.domain().lo), prof(prof.domain().hi));
  return std::max(2.0 * top + 10.0, top + 1.0);
}

EpigraphSlice epigraph_slice(const HamiltonianModel& model, double t, double x,
                             std::optional<double> cap, const SliceOptions& opts) {
  const ConjugateProfile prof(model, t, x, opts.band, opts.conj);
  EpigraphSlice s;
  s.t = t;
  s.x = x;
  s.window = prof.window();
  s.domain = prof.domain();
  s.band = opts.band;
  s.cap = cap ? *cap : default_cap(model, t, x, opts);
  const Interval& d = s.domain;
  const double scale = 1.0 + d.width() + std::abs(s.cap);
  auto chain = sample_convex_graph([&](double v) { return prof(v); }, d.lo, d.hi,
                                   prof.degenerate() ? 1 : opts.base_vertices,
                                   opts.sag_tolerance * scale, opts.max_vertices);
  double lowest = kInf;
  for (const auto& p : chain) lowest = std::min(lowest, p.y());
  if (s.cap < lowest + 1e-9 * (1.0 + std::abs(lowest))) throw GeometryError("cap too low");
  // top corners; where the graph ends above the cap the clip removes them
  chain.emplace_back(d.hi, std::max(s.cap, chain.back().y()));
  chain.emplace_back(d.lo, std::max(s.cap, chain.front().y()));
  s.body = clip_halfplane(Polygon::hull(std::move(chain)), Vec2(0.0, 1.0), s.cap);
  return s;
}

double hausdorff_slice_gap(const HamiltonianModel& model, double t, double x, double y,
                           std::optional<double> cap, const SliceOptions& opts) {
  const double c =
      cap ? *cap : std::max(default_cap(model, t, x, opts), default_cap(model, t, y, opts));
  return hausdorff(epigraph_slice(model, t, x, c, opts).body,
                   epigraph_slice(model, t, y, c, opts).body);
}

AssumptionReport check_assumptions(const HamiltonianModel& model, double horizon, double radius,
                                   std::size_t samples, std::uint64_t seed) {
  AssumptionReport r;
  if (model.dim != 1) {
    r.warnings.push_back("assumption check covers n = 1 only; skipped");
    return r;
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ut(0.0, horizon), ux(-radius, radius), up(-10.0, 10.0);
  for (std::size_t i = 0; i < samples; ++i) {
    const double t = ut(rng), x = ux(rng), y = ux(rng), p = up(rng), q = up(rng);
    const double hp = model(t, x, p), hq = model(t, x, q);
    const double mid = model(t, x, 0.5 * (p + q));
    r.convexity_defect = std::max(r.convexity_defect,
                                  (mid - 0.5 * (hp + hq)) / (1.0 + std::abs(hp) + std::abs(hq)));
    const double c = model.c(t) * (1.0 + std::abs(x));
    if (p != q && c > 0.0)
      r.growth_ratio = std::max(r.growth_ratio, std::abs(hp - hq) / (c * std::abs(p - q)));
    const double k = model.k(t, radius) * (1.0 + std::abs(p));
    const double dx = std::abs(model(t, x, p) - model(t, y, p));
    if (x != y) {
      if (k > 0.0)
        r.lipschitz_ratio = std::max(r.lipschitz_ratio, dx / (k * std::abs(x - y)));
      else if (dx > 0.0)
        r.lipschitz_ratio = kInf;
    }
    ++r.samples;
  }
  if (r.convexity_defect > 1e-12) r.warnings.push_back("H fails midpoint convexity in p");
  if (r.growth_ratio > 1.0 + 1e-9) r.warnings.push_back("growth bound c(t)(1+|x|) violated");
  if (r.lipschitz_ratio > 1.0 + 1e-9) r.warnings.push_back("local Lipschitz bound k_R violated");
  return r;
}

}  // namespace epirep
