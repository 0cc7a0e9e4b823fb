#pragma once

#include "epirep/hamiltonian.hpp"
#include "epirep/report.hpp"

#include <cstdint>
#include <vector>

namespace epirep {

struct RepresentationOptions {
  double band = kBand;
  int base_samples = 16;        // seed points of the local graph chain
  double sag_tolerance = 1e-5;  // chain refinement, relative to the clamp radius
  double sag_absolute = kInf;   // optional absolute cap on the same
  int max_samples = 4096;
  ConjugateOptions conj{};
  bool closed_form = false;     // use the model's oracle conjugate
};

// e(t,x,a) = (f, l) with diagnostics.
struct RepresentationOutput {
  double f = 0.0;
  double l = 0.0;
  double distance = 0.0;      // d(a, E(t,x))
  double phi_diameter = 0.0;  // diameter of E intersected with B(a, 2d)
  std::size_t nodes = 0;      // boundary pieces of that set (corners and arcs)
  bool fixed_point = false;   // a was already in E

  Vec2 e() const { return {f, l}; }
};

// Steiner point of E(t,x) intersected with B(a, 2 d(a, E(t,x))), for n = 1.
//
// When a lies in the (banded) epigraph it is returned as is. Otherwise the
// lower boundary of E is sampled only over the v-range the ball can reach,
// closed with a lid above the ball, clamped to the ball, and averaged with
// the exact arc-aware Steiner formula.
RepresentationOutput parameterize(const HamiltonianModel& model, double t, double x,
                                  const Vec2& a, const RepresentationOptions& opts = {});

// Inequalities of the growth property at one evaluated point:
// |f| <= c(1+|x|) and -|H(t,x,0)| <= l <= 2|H(t,x,0)| + 2c(1+|x|) + 3|a|.
// Returns the worst signed violation (<= 0 means all hold).
double growth_violation(const HamiltonianModel& model, double t, double x, const Vec2& a,
                        const RepresentationOutput& out);

// |H(t,x,p) - max over graph points a = (v, H*(v)) of (p f - l)| for each p,
// with v on the nodes k * v_step of the banded domain plus its two ends.
std::vector<double> representation_residuals(const HamiltonianModel& model, double t, double x,
                                             const std::vector<double>& ps, double v_step,
                                             const RepresentationOptions& opts = {});
double representation_residual(const HamiltonianModel& model, double t, double x, double p,
                               double v_step, const RepresentationOptions& opts = {});

struct AuditBox {
  double horizon = 1.0;
  double radius = 2.0;  // x, y in the ball of this radius
  // a-box half width; <= 0 means 3 (cap + domain radius) at the widest x
  double a_box = 0.0;
};

// Largest |e(t,x,a) - e(t,y,b)| / (k_R(t)|x - y| + |a - b|) over random pairs.
// Pass iff <= 10 (n+1) with 5% slack. Half the a-samples are drawn uniformly
// from the box, half near the lower boundary of E, where the geometry is
// least trivial.
AuditRecord lipschitz_audit(const HamiltonianModel& model, const AuditBox& box,
                            std::size_t pairs, std::uint64_t seed,
                            const RepresentationOptions& opts = {});

// Growth bounds at random points of the box; pass iff no violation.
AuditRecord growth_audit(const HamiltonianModel& model, const AuditBox& box, std::size_t samples,
                         std::uint64_t seed, const RepresentationOptions& opts = {});

// max |e(t,x,a) - a| over a = (v, H*(v) + s), s >= 0; pass iff <= 1e-6.
AuditRecord extra_property_audit(const HamiltonianModel& model, double t, double x,
                                 std::size_t samples, std::uint64_t seed, double s_max = 5.0,
                                 const RepresentationOptions& opts = {});

struct CompactGrid {
  double horizon = 1.0;
  double radius = 2.0;
  double a_box = 5.0;
  int t_points = 3;
  int x_points = 9;
  int a_points = 9;  // per axis
  double p_box = 3.0;
};

struct StabilityGap {
  double representation = 0.0;  // sup |e_a - e_b|
  double hamiltonian = 0.0;     // sup |H_a - H_b|
  std::size_t points = 0;
};
StabilityGap stability_gap(const HamiltonianModel& a, const HamiltonianModel& b,
                           const CompactGrid& grid, const RepresentationOptions& opts = {});

// sup |e_b(t,x,a - (0,delta)) - (e_a(t,x,a) - (0,delta))| for b = a + delta.
double translation_equivariance_gap(const HamiltonianModel& model, double delta,
                                    const CompactGrid& grid,
                                    const RepresentationOptions& opts = {});

}  // namespace epirep
