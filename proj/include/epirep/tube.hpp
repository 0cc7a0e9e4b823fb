#pragma once

#include "epirep/report.hpp"
#include "epirep/value_function.hpp"

#include <algorithm>
#include <cstdint>
#include <vector>

namespace epirep {

// Epigraph tube of a value field, indexed by reversed time s = T - t:
// P(s) = epi W(s, .) with W(s, y) = V(T - s, y), so P(0) = epi g. Along
// z' in epi H_rev*(s, y, .) with H_rev = time_reversed(H, T), the margin
// u - W(s, y) is nondecreasing, which makes the tube forward invariant in s.
// Between grid nodes W is the bilinear interpolant of the field, so the tube
// is piecewise linear in y and absolutely continuous in s.
class Tube {
 public:
  explicit Tube(ValueField field, double epsilon = 0.0);

  double horizon() const { return field_.T; }
  double lower(double s, double y) const { return field_(field_.T - s, y); }
  bool contains(double s, double y, double u) const { return u >= lower(s, y) - epsilon_; }
  // Largest of the x spacing and the time-row spacing.
  double step() const { return std::max(field_.h, field_.T / field_.N); }
  double y_lo() const { return field_.lo(); }
  double y_hi() const { return field_.hi(); }
  double epsilon() const { return epsilon_; }
  const ValueField& field() const { return field_; }

  // Central difference of W in y at one grid step, one-sided at the edges.
  double slope(double s, double y) const;
  // Euclidean distance from (s, y, u) to the graph {(s', y', u') : u' >= W(s', y')}.
  double graph_distance(double s, double y, double u) const;

 private:
  ValueField field_;
  double epsilon_;
};

// z(s) = (y, u) for y' = f, u' = l with (f, l) = e(s, y, a(s)) of `dynamics`,
// by the same RK4 as integrate_control, from (s0, y0, u0).
struct InclusionPath {
  std::vector<double> s;
  std::vector<double> y;
  std::vector<double> u;
};
InclusionPath simulate_inclusion(const HamiltonianModel& dynamics, double s0, const Vec2& z0,
                                 const ControlSignal& control, const StageOptions& opts = {});

// Directions (v, H_rev*(s, y, v) + offset) from graph points of E(s, y).
std::vector<Vec2> graph_directions(const HamiltonianModel& dynamics, double s, double y, int count,
                                   double offset = 0.0, double band = kBand);

// (v, H_rev*(s, y, v)) with v = d/dq H_rev(s, y, q) at q = W_y: the velocity
// of the optimal arc through (s, y, W(s, y)), where Fenchel-Young is tight
// and the margin is stationary. Lowering its cost gives a violation witness.
Vec2 optimal_direction(const HamiltonianModel& dynamics, const Tube& tube, double s, double y,
                       double band = kBand);

struct ProbeResult {
  Vec2 direction;
  std::vector<double> ratios;  // d((s, z) + tau (1, e), gph P) / tau per tau
  double min_ratio = 0.0;
  bool pass = false;
};
struct ProbeReport {
  double threshold = 0.0;  // 5e-2 times the tube step
  std::vector<ProbeResult> results;
  bool all_pass = true;
  double worst = 0.0;  // max over directions of the min ratio
};

std::vector<double> default_taus();  // 2^-k, k = 4..12

// Tangency probe of the directions at (s, y, u) in the tube; taus past the
// horizon are skipped. Throws Error when (s, y, u) is outside the tube.
ProbeReport tangency_probe(const Tube& tube, double s, double y, double u,
                           const std::vector<Vec2>& directions,
                           const std::vector<double>& taus = default_taus());

struct InvarianceOptions {
  int trajectories = 100;
  int N = 64;
  double a_box = 0.0;    // control box half width; <= 0 takes the representation audit box
  double y_range = 1.0;  // starts drawn from [-y_range, y_range]
  double eps_inv = 1e-2;
  StageOptions stage{};
};

struct InvarianceReport {
  std::size_t trajectories = 0;
  double min_margin = kInf;
  double worst_decrease = 0.0;  // largest drop of the margin between nodes
  std::size_t failures = 0;     // trajectories with a margin below -eps_inv
  std::size_t decreases = 0;    // trajectories with a drop above eps_inv
  std::uint64_t seed = 0;
  AuditRecord record;
};

// Random controls and starts (half on the boundary of the tube, half above
// it) for the reversed dynamics of `problem`; the tube must come from a
// converged field of the same problem.
InvarianceReport invariance_audit(const ValueProblem& problem, const Tube& tube,
                                  std::uint64_t seed, const InvarianceOptions& opts = {});

}  // namespace epirep
