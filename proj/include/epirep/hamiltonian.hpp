#pragma once

#include "epirep/convex_core.hpp"

#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace epirep {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

using State = std::span<const double>;
using ModelParams = std::map<std::string, double, std::less<>>;

// H(t, x, p) together with the structural data the constructions need:
// growth c(t) with |H(t,x,p) - H(t,x,q)| <= c(t)(1 + |x|)|p - q|, and local
// Lipschitz moduli k_R(t) with |H(t,x,p) - H(t,y,p)| <= k_R(t)(1 + |p|)|x - y|
// on the ball of radius R.
struct HamiltonianModel {
  using Eval = std::function<double(double, State, State)>;

  std::string name;
  int dim = 1;
  Eval value;
  std::function<double(double)> growth;
  std::function<double(double, double)> lipschitz;  // (t, R) -> k_R(t)
  bool continuous_in_t = true;
  Eval closed_form_conjugate;  // optional oracle

  double operator()(double t, double x, double p) const {
    return value(t, State(&x, 1), State(&p, 1));
  }
  double operator()(double t, State x, State p) const { return value(t, x, p); }
  double c(double t) const { return growth(t); }
  double k(double t, double radius) const { return lipschitz(t, radius); }
  bool has_closed_form() const { return static_cast<bool>(closed_form_conjugate); }
  double closed_form(double t, double x, double v) const {
    return closed_form_conjugate(t, State(&x, 1), State(&v, 1));
  }
};

// Registry: sqrt_example, zero, quadratic, linear_drift.
HamiltonianModel builtin(std::string_view name, const ModelParams& params = {});
std::vector<std::string> builtin_names();

// H = <p, b(t,x)> - l0(t,x) for n = 1; bx and l0x bound the x-Lipschitz
// constants of b and l0, bmax bounds |b| / (1 + |x|).
HamiltonianModel linear_drift(std::function<double(double, double)> b,
                              std::function<double(double, double)> l0, double bmax, double bx,
                              double l0x);
// H + delta.
HamiltonianModel shifted(const HamiltonianModel& base, double delta);
// Moreau envelope in p, min_q H(q) + |p - q|^2 / (2 lambda); its conjugate is
// H* + lambda |v|^2 / 2. A smooth approximation that keeps c.
HamiltonianModel moreau_envelope(const HamiltonianModel& base, double lambda);
// s -> H(T - s, y, -q): the Hamiltonian of the same problem run backwards in
// time, whose forward value function is V(T - s, y).
HamiltonianModel time_reversed(const HamiltonianModel& base, double horizon);

struct ConjugateOptions {
  double p_max = 1e12;         // bracket expansion limit
  double divergence_cap = 1e8;  // running max above this means +inf
  double tolerance = 1e-10;    // golden-section bracket width (relative)
  int max_cycles = 200;        // coordinate sweeps for n = 2
};

struct ConjugateValue {
  double value = kInf;
  double argmax = std::numeric_limits<double>::quiet_NaN();
  bool finite() const { return value < kInf; }
};

// H*(t,x,v) = sup_p v p - H(t,x,p) for n = 1, with the maximizing p.
ConjugateValue conjugate_scalar(const HamiltonianModel& model, double t, double x, double v,
                                const ConjugateOptions& opts = {});
// General n (1 or 2).
double conjugate(const HamiltonianModel& model, double t, State x, State v,
                 const ConjugateOptions& opts = {});

// c(t)(1 + |x|): every v with finite conjugate lies in this ball.
double conjugate_domain_bound(const HamiltonianModel& model, double t, State x);
double conjugate_domain_bound(const HamiltonianModel& model, double t, double x);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
  bool contains(double v) const { return v >= lo && v <= hi; }
  double clamp(double v) const { return v < lo ? lo : (v > hi ? hi : v); }
};

inline constexpr double kBand = 1e-3;

// Closure of dom H*(t,x,.) for n = 1, from the recession slopes of H,
// intersected with the window [-c(1+|x|), c(1+|x|)].
Interval conjugate_domain(const HamiltonianModel& model, double t, double x,
                          const ConjugateOptions& opts = {});
// The domain pulled inward by band * half-width on each side. A degenerate
// (single point) domain is returned unchanged.
Interval banded_domain(const HamiltonianModel& model, double t, double x, double band = kBand,
                       const ConjugateOptions& opts = {});

// H*(t,x,.) for n = 1 restricted to the banded domain: +inf outside it.
// When the domain is a single point b, H is affine in p, H*(b) = -H(t,x,0),
// and that value is returned at b without a numerical sup (the recession
// slope only locates b up to rounding).
class ConjugateProfile {
 public:
  // closed_form = true evaluates the model's oracle conjugate instead of the
  // numerical sup (the second route used for cross-checks).
  ConjugateProfile(const HamiltonianModel& model, double t, double x, double band = kBand,
                   const ConjugateOptions& opts = {}, bool closed_form = false);

  const Interval& domain() const { return domain_; }
  const Interval& window() const { return window_; }
  bool degenerate() const { return degenerate_; }
  double operator()(double v) const { return eval(v).value; }
  ConjugateValue eval(double v) const;
  // Nearest point of the epigraph to a, and its distance. Exact up to the
  // golden-section tolerance; uses derivative information from the argmax.
  Vec2 nearest(const Vec2& a, double* distance = nullptr) const;
  bool contains(const Vec2& a) const;
  std::size_t evaluations() const { return evaluations_; }

 private:
  const HamiltonianModel* model_;
  double t_, x_;
  ConjugateOptions opts_;
  Interval domain_, window_;
  bool degenerate_ = false;
  bool closed_form_ = false;
  double point_value_ = 0.0;
  mutable std::size_t evaluations_ = 0;
};

struct SliceOptions {
  double band = kBand;
  int base_vertices = 720;
  double sag_tolerance = 1e-7;  // relative to 1 + slice diameter
  int max_vertices = 20000;
  ConjugateOptions conj{};
};

// Compact piece {(v, eta): H*(t,x,v) <= eta <= cap} of the epigraph.
struct EpigraphSlice {
  double t = 0.0;
  double x = 0.0;
  Polygon body;
  Interval window;  // [-c(1+|x|), c(1+|x|)]
  Interval domain;  // banded domain actually sampled
  double cap = 0.0;
  double band = kBand;
};

// 2 * max of H* over the banded domain + 10.
double default_cap(const HamiltonianModel& model, double t, double x,
                   const SliceOptions& opts = {});
EpigraphSlice epigraph_slice(const HamiltonianModel& model, double t, double x,
                             std::optional<double> cap = std::nullopt,
                             const SliceOptions& opts = {});
double hausdorff_slice_gap(const HamiltonianModel& model, double t, double x, double y,
                           std::optional<double> cap = std::nullopt,
                           const SliceOptions& opts = {});

// Samples the lower boundary of the epigraph of a convex function on
// [lo, hi]: uniform seed points, then chord-midpoint refinement until the
// sag from the chord is below tol. Returns points ordered by v.
std::vector<Vec2> sample_convex_graph(const std::function<double(double)>& f, double lo,
                                      double hi, int base, double tol, int max_points);

// Finite-difference spot checks of the declared structure. Violations are
// reported, not thrown.
struct AssumptionReport {
  double convexity_defect = 0.0;  // max of H(mid) - average, should be <= 0
  double growth_ratio = 0.0;      // max |dH/dp| / (c (1+|x|)), should be <= 1
  double lipschitz_ratio = 0.0;   // max |dH/dx| / (k_R (1+|p|)), should be <= 1
  std::size_t samples = 0;
  std::vector<std::string> warnings;
};
AssumptionReport check_assumptions(const HamiltonianModel& model, double horizon, double radius,
                                   std::size_t samples, std::uint64_t seed);

}  // namespace epirep
