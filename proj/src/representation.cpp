#include "epirep/representation.hpp"
#include "epirep/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace epirep {

RepresentationOutput parameterize(const HamiltonianModel& model, double t, double x,
                                  const Vec2& a, const RepresentationOptions& opts) {
  if (!a.allFinite()) throw Error("parameterize: control must be finite");
  const ConjugateProfile prof(model, t, x, opts.band, opts.conj, opts.closed_form);
  RepresentationOutput out;
  if (prof.contains(a)) {
    out.f = a.x();
    out.l = a.y();
    out.fixed_point = true;
    out.nodes = 1;
    return out;
  }
  double d = 0.0;
  prof.nearest(a, &d);
  const double r = 2.0 * d;
  const Interval& dom = prof.domain();
  const double sag =
      std::max(std::min(opts.sag_tolerance * r, opts.sag_absolute), 1e-15 * (1.0 + a.norm()));
  // the polygon is inscribed in E, so its distance to a can exceed d by the sag
  const double reach = r + 4.0 * sag + 1e-12 * (1.0 + std::abs(a.x()));
  const double lo = std::max(dom.lo, a.x() - reach);
  const double hi = std::min(dom.hi, a.x() + reach);
  auto chain = sample_convex_graph([&](double v) { return prof(v); }, lo, std::max(lo, hi),
                                   prof.degenerate() ? 1 : opts.base_samples, sag,
                                   opts.max_samples);
  const double lid = a.y() + reach + 1.0;
  chain.emplace_back(chain.back().x(), std::max(lid, chain.back().y()));
  chain.emplace_back(chain.front().x(), std::max(lid, chain.front().y()));
  const Polygon local = clip_halfplane(Polygon::hull(std::move(chain)), Vec2(0.0, 1.0), lid);
  const auto phi = clamp_steiner(local, a);
  out.f = dom.clamp(phi.point.x());  // a convex combination of domain points; clamp rounding only
  out.l = phi.point.y();
  out.distance = d;
  out.phi_diameter = phi.diameter;
  out.nodes = phi.pieces;
  return out;
}

double growth_violation(const HamiltonianModel& model, double t, double x, const Vec2& a,
                        const RepresentationOutput& out) {
  const double c = conjugate_domain_bound(model, t, x);
  const double h0 = std::abs(model(t, x, 0.0));
  const double upper = 2.0 * h0 + 2.0 * c + 3.0 * a.norm();
  // floating-point slack only: the inequalities hold exactly in real arithmetic
  const double eps = 1e-12 * (1.0 + c + upper);
  return std::max({std::abs(out.f) - c - eps, -h0 - out.l - eps, out.l - upper - eps});
}

std::vector<double> representation_residuals(const HamiltonianModel& model, double t, double x,
                                             const std::vector<double>& ps, double v_step,
                                             const RepresentationOptions& opts) {
  const ConjugateProfile prof(model, t, x, opts.band, opts.conj, opts.closed_form);
  const Interval d = prof.domain();
  std::vector<double> best(ps.size(), -kInf);
  // nodes k * v_step inside the domain plus both ends; anchoring at 0 keeps
  // a node on the kink that conjugates of flat-bottomed H have there
  std::vector<double> vs{d.lo};
  for (long k = static_cast<long>(std::floor(d.lo / v_step)) + 1; k * v_step < d.hi; ++k)
    if (k * v_step > d.lo) vs.push_back(static_cast<double>(k) * v_step);
  if (d.hi > d.lo) vs.push_back(d.hi);
  for (double v : vs) {
    // graph point; parameterize fixes it, so the output is read back
    const Vec2 a(v, prof(v));
    const auto e = parameterize(model, t, x, a, opts);
    for (std::size_t k = 0; k < ps.size(); ++k)
      best[k] = std::max(best[k], ps[k] * e.f - e.l);
  }
  std::vector<double> res(ps.size());
  for (std::size_t k = 0; k < ps.size(); ++k) res[k] = std::abs(model(t, x, ps[k]) - best[k]);
  return res;
}

double representation_residual(const HamiltonianModel& model, double t, double x, double p,
                               double v_step, const RepresentationOptions& opts) {
  return representation_residuals(model, t, x, {p}, v_step, opts).front();
}

namespace {

double audit_a_box(const HamiltonianModel& model, const AuditBox& box) {
  if (box.a_box > 0.0) return box.a_box;
  return 3.0 * (default_cap(model, 0.0, box.radius) + conjugate_domain_bound(model, 0.0, box.radius));
}

// Half uniform in the box, half close to the lower boundary of E(t,x).
Vec2 sample_control(const HamiltonianModel& model, double t, double x, double half_width,
                    std::mt19937_64& rng, const RepresentationOptions& opts) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  if (u(rng) < 0.5) return {half_width * (2.0 * u(rng) - 1.0), half_width * (2.0 * u(rng) - 1.0)};
  const ConjugateProfile prof(model, t, x, opts.band, opts.conj);
  const Interval d = prof.domain();
  const double v = d.lo + d.width() * u(rng);
  const double off = std::pow(10.0, -3.0 + 3.5 * u(rng)) * (u(rng) < 0.5 ? -1.0 : 1.0);
  const double dv = d.width() > 0.0 ? 0.0 : 0.1 * (2.0 * u(rng) - 1.0);
  return {v + dv, prof(v) + off};
}

}  // namespace

AuditRecord lipschitz_audit(const HamiltonianModel& model, const AuditBox& box,
                            std::size_t pairs, std::uint64_t seed,
                            const RepresentationOptions& opts) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double half = audit_a_box(model, box);
  AuditRecord rec;
  rec.name = "lipschitz_A1:" + model.name;
  rec.bound = 10.0 * (model.dim + 1) * 1.05;
  rec.seed = seed;
  auto log_sep = [&] { return std::pow(10.0, -3.0 + 3.0 * u(rng)) * (u(rng) < 0.5 ? -1.0 : 1.0); };
  for (std::size_t i = 0; i < pairs; ++i) {
    const double t = box.horizon * u(rng);
    const double x = box.radius * (2.0 * u(rng) - 1.0);
    double y = x;
    const bool move_x = u(rng) < 0.7;
    if (move_x) y = std::clamp(x + box.radius * log_sep(), -box.radius, box.radius);
    const Vec2 a = sample_control(model, t, x, half, rng, opts);
    Vec2 b = a;
    if (!move_x || u(rng) < 0.7) {
      const double th = 2.0 * std::acos(-1.0) * u(rng);
      b = a + std::abs(log_sep()) * Vec2(std::cos(th), std::sin(th));
    }
    const double den = model.k(t, box.radius) * std::abs(x - y) + (a - b).norm();
    if (den == 0.0) continue;
    // discretization error must stay well below the separation being resolved
    RepresentationOptions fine = opts;
    fine.sag_absolute = std::min(opts.sag_absolute, 1e-4 * den);
    const auto ea = parameterize(model, t, x, a, fine);
    const auto eb = parameterize(model, t, y, b, fine);
    rec.observed = std::max(rec.observed, (ea.e() - eb.e()).norm() / den);
    ++rec.samples;
  }
  rec.pass = rec.observed <= rec.bound;
  rec.note = "bound 10(n+1) with 5% slack; a-box half width " + format_double(half);
  return rec;
}

AuditRecord growth_audit(const HamiltonianModel& model, const AuditBox& box, std::size_t samples,
                         std::uint64_t seed, const RepresentationOptions& opts) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double half = audit_a_box(model, box);
  AuditRecord rec;
  rec.name = "growth_A2:" + model.name;
  rec.bound = 0.0;
  rec.observed = -kInf;
  rec.seed = seed;
  std::size_t violations = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double t = box.horizon * u(rng);
    const double x = box.radius * (2.0 * u(rng) - 1.0);
    const Vec2 a = sample_control(model, t, x, half, rng, opts);
    const double v = growth_violation(model, t, x, a, parameterize(model, t, x, a, opts));
    rec.observed = std::max(rec.observed, v);
    violations += v > 0.0;
    ++rec.samples;
  }
  rec.pass = violations == 0;
  rec.note = std::to_string(violations) + " violations; observed is the worst signed excess";
  return rec;
}

AuditRecord extra_property_audit(const HamiltonianModel& model, double t, double x,
                                 std::size_t samples, std::uint64_t seed, double s_max,
                                 const RepresentationOptions& opts) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const ConjugateProfile prof(model, t, x, opts.band, opts.conj, opts.closed_form);
  const Interval d = prof.domain();
  AuditRecord rec;
  rec.name = "extra_property_A3:" + model.name;
  rec.bound = 1e-6;
  rec.seed = seed;
  for (std::size_t i = 0; i < samples; ++i) {
    const double v = d.lo + d.width() * u(rng);
    const double s = u(rng) < 0.5 ? 0.0 : s_max * u(rng);
    const Vec2 a(v, prof(v) + s);
    rec.observed = std::max(rec.observed, (parameterize(model, t, x, a, opts).e() - a).norm());
    ++rec.samples;
  }
  rec.pass = rec.observed <= rec.bound;
  return rec;
}

namespace {

template <class F>
void for_each_grid_point(const CompactGrid& g, F&& f) {
  auto lin = [](double lo, double hi, int n, int i) {
    return n <= 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * i / (n - 1);
  };
  for (int i = 0; i < g.t_points; ++i)
    for (int j = 0; j < g.x_points; ++j)
      for (int k = 0; k < g.a_points; ++k)
        for (int m = 0; m < g.a_points; ++m)
          f(lin(0.0, g.horizon, g.t_points, i), lin(-g.radius, g.radius, g.x_points, j),
            Vec2(lin(-g.a_box, g.a_box, g.a_points, k), lin(-g.a_box, g.a_box, g.a_points, m)));
}

}  // namespace

StabilityGap stability_gap(const HamiltonianModel& a, const HamiltonianModel& b,
                           const CompactGrid& grid, const RepresentationOptions& opts) {
  StabilityGap gap;
  for_each_grid_point(grid, [&](double t, double x, const Vec2& ctl) {
    const auto ea = parameterize(a, t, x, ctl, opts);
    const auto eb = parameterize(b, t, x, ctl, opts);
    gap.representation = std::max(gap.representation, (ea.e() - eb.e()).norm());
    // the a-grid doubles as a p-grid for the Hamiltonian gap
    const double p = ctl.x() * grid.p_box / std::max(grid.a_box, 1e-300);
    gap.hamiltonian = std::max(gap.hamiltonian, std::abs(a(t, x, p) - b(t, x, p)));
    ++gap.points;
  });
  return gap;
}

double translation_equivariance_gap(const HamiltonianModel& model, double delta,
                                    const CompactGrid& grid, const RepresentationOptions& opts) {
  const HamiltonianModel moved = shifted(model, delta);
  const Vec2 down(0.0, delta);
  double worst = 0.0;
  for_each_grid_point(grid, [&](double t, double x, const Vec2& ctl) {
    const Vec2 ea = parameterize(model, t, x, ctl, opts).e();
    const Vec2 eb = parameterize(moved, t, x, ctl - down, opts).e();
    worst = std::max(worst, (eb - (ea - down)).norm());
  });
  return worst;
}

}  // namespace epirep
