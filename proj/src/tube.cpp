#include "epirep/tube.hpp"

#include "epirep/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace epirep {

Tube::Tube(ValueField field, double epsilon) : field_(std::move(field)), epsilon_(epsilon) {
  if (field_.N < 1 || field_.nx < 2 || field_.v.empty()) throw ConfigError("tube: empty value field");
  if (!(epsilon_ >= 0.0)) throw ConfigError("tube: epsilon must be >= 0");
}

double Tube::graph_distance(double s, double y, double u) const {
  const double T = horizon();
  const double gap = lower(s, y) - u;
  if (gap <= 0.0) return 0.0;
  // the vertical drop is an upper bound; search the box it spans, then zoom in
  auto dist = [&](double a, double b) {
    const double below = std::max(0.0, lower(a, b) - u);
    return std::sqrt((a - s) * (a - s) + (b - y) * (b - y) + below * below);
  };
  double best = gap, bs = s, by = y, r = gap;
  constexpr int kSide = 10;
  for (int round = 0; round < 5; ++round) {
    const double cs = bs, cy = by;
    for (int i = -kSide; i <= kSide; ++i)
      for (int j = -kSide; j <= kSide; ++j) {
        const double a = std::clamp(cs + r * i / kSide, 0.0, T);
        const double b = std::clamp(cy + r * j / kSide, y_lo(), y_hi());
        const double d = dist(a, b);
        if (d < best) best = d, bs = a, by = b;
      }
    r *= 0.25;
  }
  return best;
}

double Tube::slope(double s, double y) const {
  const double h = field_.h;
  const double a = std::max(y - h, y_lo()), b = std::min(y + h, y_hi());
  return (lower(s, b) - lower(s, a)) / (b - a);
}

InclusionPath simulate_inclusion(const HamiltonianModel& dynamics, double s0, const Vec2& z0,
                                 const ControlSignal& control, const StageOptions& opts) {
  const Trajectory p = integrate_control(dynamics, s0, z0.x(), control, opts);
  InclusionPath out;
  for (int k = 0; k <= p.steps(); ++k) {
    out.s.push_back(p.time(k));
    out.y.push_back(p.x[k]);
    out.u.push_back(z0.y() + p.u[k]);
  }
  return out;
}

std::vector<Vec2> graph_directions(const HamiltonianModel& dynamics, double s, double y, int count,
                                   double offset, double band) {
  if (count < 1) throw ConfigError("graph_directions: count must be >= 1");
  const ConjugateProfile prof(dynamics, s, y, band);
  const Interval d = prof.domain();
  std::vector<Vec2> out;
  for (int k = 0; k < count; ++k) {
    const double v = count == 1 ? 0.5 * (d.lo + d.hi) : d.lo + d.width() * k / (count - 1);
    out.emplace_back(v, prof(v) + offset);
  }
  return out;
}

Vec2 optimal_direction(const HamiltonianModel& dynamics, const Tube& tube, double s, double y, double band) {
  const double q = tube.slope(s, y);
  const double d = 1e-6 * (1.0 + std::abs(q));
  const ConjugateProfile prof(dynamics, s, y, band);
  const double v = prof.domain().clamp((dynamics(s, y, q + d) - dynamics(s, y, q - d)) / (2.0 * d));
  return {v, prof(v)};
}

std::vector<double> default_taus() {
  std::vector<double> taus;
  for (int k = 4; k <= 12; ++k) taus.push_back(std::ldexp(1.0, -k));
  return taus;
}

ProbeReport tangency_probe(const Tube& tube, double s, double y, double u,
                           const std::vector<Vec2>& directions, const std::vector<double>& taus) {
  if (!tube.contains(s, y, u)) throw Error("tangency probe: point outside the tube");
  ProbeReport rep;
  rep.threshold = 5e-2 * tube.step();
  for (const auto& e : directions) {
    ProbeResult r;
    r.direction = e;
    r.min_ratio = kInf;
    for (double tau : taus) {
      if (!(tau > 0.0) || s + tau > tube.horizon()) continue;
      const double yy = y + tau * e.x();
      if (yy < tube.y_lo() || yy > tube.y_hi()) continue;
      const double ratio = tube.graph_distance(s + tau, yy, u + tau * e.y()) / tau;
      r.ratios.push_back(ratio);
      r.min_ratio = std::min(r.min_ratio, ratio);
    }
    if (r.ratios.empty()) throw Error("tangency probe: no admissible tau");
    r.pass = r.min_ratio <= rep.threshold;
    rep.all_pass = rep.all_pass && r.pass;
    rep.worst = std::max(rep.worst, r.min_ratio);
    rep.results.push_back(std::move(r));
  }
  return rep;
}

InvarianceReport invariance_audit(const ValueProblem& problem, const Tube& tube,
                                  std::uint64_t seed, const InvarianceOptions& opts) {
  const double T = problem.horizon;
  if (std::abs(tube.horizon() - T) > 1e-12 * (1.0 + T)) throw ConfigError("invariance: tube horizon differs");
  if (opts.trajectories < 1 || opts.N < 1) throw ConfigError("invariance: empty audit");
  if (!(opts.y_range >= 0.0) || -opts.y_range < tube.y_lo() || opts.y_range > tube.y_hi())
    throw ConfigError("invariance: start range outside the tube grid");
  const HamiltonianModel dyn = time_reversed(problem.model, T);
  const double half =
      opts.a_box > 0.0 ? opts.a_box
                       : 3.0 * (default_cap(dyn, 0.0, opts.y_range) + conjugate_domain_bound(dyn, 0.0, opts.y_range));

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  InvarianceReport rep;
  rep.seed = seed;
  for (int n = 0; n < opts.trajectories; ++n) {
    // s0 in [0, 0.9 T]: the start lies strictly before the end of the horizon
    const double s0 = 0.9 * T * uni(rng);
    const double y0 = opts.y_range * (2.0 * uni(rng) - 1.0);
    const double u0 = tube.lower(s0, y0) + (n % 2 == 0 ? 0.0 : uni(rng));
    const double h = (T - s0) / opts.N;
    double y = y0, u = u0, prev = u0 - tube.lower(s0, y0);
    double worst_margin = prev, worst_drop = 0.0;
    for (int k = 0; k < opts.N; ++k) {
      const double s = s0 + k * h;
      Vec2 a;
      if (uni(rng) < 0.5) {
        a = {half * (2.0 * uni(rng) - 1.0), half * (2.0 * uni(rng) - 1.0)};
      } else {
        // near the lower boundary of E at the current state
        const ConjugateProfile prof(dyn, s, y, opts.stage.rep.band, opts.stage.rep.conj);
        const double v = prof.domain().lo + prof.domain().width() * uni(rng);
        a = {v, prof(v) + std::pow(10.0, -3.0 + 3.0 * uni(rng)) * (uni(rng) < 0.5 ? -1.0 : 1.0)};
      }
      ControlSignal one{s, k + 1 == opts.N ? T : s0 + (k + 1) * h, {a}};
      const auto p = simulate_inclusion(dyn, s, {y, u}, one, opts.stage);
      y = p.y.back();
      u = p.u.back();
      if (y < tube.y_lo() || y > tube.y_hi()) throw NumericalError("invariance: trajectory left the tube grid");
      const double m = u - tube.lower(one.T, y);
      worst_margin = std::min(worst_margin, m);
      worst_drop = std::max(worst_drop, prev - m);
      prev = m;
    }
    ++rep.trajectories;
    rep.min_margin = std::min(rep.min_margin, worst_margin);
    rep.worst_decrease = std::max(rep.worst_decrease, worst_drop);
    if (worst_margin < -opts.eps_inv) ++rep.failures;
    if (worst_drop > opts.eps_inv) ++rep.decreases;
  }
  rep.record.name = "tube invariance";
  rep.record.bound = opts.eps_inv;
  rep.record.observed = std::max(-rep.min_margin, rep.worst_decrease);
  rep.record.pass = rep.failures == 0 && rep.decreases == 0;
  rep.record.samples = rep.trajectories;
  rep.record.seed = seed;
  rep.record.note = "min margin " + format_double(rep.min_margin) + ", largest margin drop " +
                    format_double(rep.worst_decrease) + ", tube step " + format_double(tube.step());
  return rep;
}

}  // namespace epirep
