#pragma once

#include "epirep/hamiltonian.hpp"
#include "epirep/optimize.hpp"
#include "epirep/report.hpp"
#include "epirep/representation.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace epirep {

// Terminal cost g on R, with an a.e. derivative for gradients and its
// Lipschitz constant on balls.
struct TerminalCost {
  std::string name;
  std::function<double(double)> value;
  std::function<double(double)> slope;
  std::function<double(double)> lipschitz;  // R -> Lipschitz constant on B_R

  double operator()(double x) const { return value(x); }
};

// Registry:
//   abs        scale |x - center|
//   quadratic  scale x^2 / 2
//   constant   level
//   piecewise  level + left (x - kink) for x < kink, level + right (x - kink) otherwise
TerminalCost terminal_cost(std::string_view name, const ModelParams& params = {});
std::vector<std::string> terminal_cost_names();

// Minimize g(x(T)) + integral of H*(t, x, x') over paths starting at (t0, x0).
struct ValueProblem {
  HamiltonianModel model;
  TerminalCost g;
  double horizon = 1.0;
};

// Uniform mesh t0 = tau_0 < ... < tau_N = T with nodes x_k; piecewise linear.
// u holds the running cost at the nodes when the path came from a control.
struct Trajectory {
  double t0 = 0.0;
  double T = 1.0;
  std::vector<double> x;
  std::vector<double> u;

  int steps() const { return static_cast<int>(x.size()) - 1; }
  double step() const { return steps() > 0 ? (T - t0) / steps() : 0.0; }
  double time(int k) const { return k == steps() ? T : t0 + k * step(); }
  double slope(int k) const { return (x[k + 1] - x[k]) / step(); }
};

// Piecewise constant a_k in R^2 on the same mesh.
struct ControlSignal {
  double t0 = 0.0;
  double T = 1.0;
  std::vector<Vec2> a;

  int steps() const { return static_cast<int>(a.size()); }
  double step() const { return steps() > 0 ? (T - t0) / steps() : 0.0; }
  double time(int k) const { return k == steps() ? T : t0 + k * step(); }
};

// Trapezoidal quadrature of H* along the slopes plus g(x_N). +inf when a
// slope leaves the banded domain at either end of its interval.
double cost_variational(const ValueProblem& problem, const Trajectory& path, double band = kBand);

struct StageOptions {
  RepresentationOptions rep{};
  double x_max = 1e8;  // blowup guard
};

// Fixed-step RK4 for x' = f(t, x, a(t)), u' = l(t, x, a(t)), u(t0) = 0.
Trajectory integrate_control(const HamiltonianModel& model, double t0, double x0,
                             const ControlSignal& control, const StageOptions& opts = {});
// g(x_N) + integral of l, recomputed from the control; throws if the path
// does not belong to it.
double cost_control(const ValueProblem& problem, const Trajectory& path,
                    const ControlSignal& control, const StageOptions& opts = {});
// Largest H*(t, x_k, f) - l over the nodes of a controlled path, with
// (f, l) = e(t, x_k, a_k). Nonpositive up to solver tolerance.
double running_cost_deficit(const HamiltonianModel& model, const Trajectory& path,
                            const ControlSignal& control, const RepresentationOptions& rep = {});

struct SolverOptions {
  int N = 64;
  int starts = 16;
  std::uint64_t seed = 1;
  double band = kBand;
  BfgsOptions bfgs{};
  StageOptions stage{};
};

struct VariationalResult {
  Trajectory path;
  double value = kInf;
  double gradient_norm = 0.0;
  int feasible_starts = 0;
  int iterations = 0;
};

// Multistart BFGS over the node states; the first start is the constant path.
VariationalResult solve_variational(const ValueProblem& problem, double t0, double x0,
                                    const SolverOptions& opts = {});

struct ControlResult {
  Trajectory path;
  ControlSignal control;
  double value = kInf;
  double sup_control = 0.0;  // max_k |a_k|
  double gradient_norm = 0.0;
  int feasible_starts = 0;
  int iterations = 0;
};

// Multistart BFGS over piecewise constant controls, with RK4 dynamics
// through (f, l) and a discrete adjoint gradient. Each a_k is searched in
// E(tau_k, x_k) through the chart (v, H*(tau_k, x_k, v) + w^2); by the extra
// property every control acts at the node like a point of that set.
ControlResult solve_control(const ValueProblem& problem, double t0, double x0,
                            const SolverOptions& opts = {});

// Grid for the finite-difference solve of -V_t + H(t, x, -V_x) = 0.
struct HJGrid {
  int N = 64;            // stored time rows, t_j = T j / N
  double x_lo = -2.0;    // reporting window
  double x_hi = 2.0;
  double h_x = 1.0 / 64.0;
  double pad = -1.0;     // extra room on each side; < 0 means the reach of the dynamics
  int substeps = 0;      // per stored row; 0 picks the smallest stable count
  double cfl = 0.9;
  bool local_dissipation = true;  // local Lax-Friedrichs; false uses the growth bound
};

struct ValueField {
  double T = 1.0;
  int N = 0;
  double x0 = 0.0;  // first node of the computational grid
  double h = 0.0;
  int nx = 0;
  std::vector<double> v;  // row-major (N + 1) x nx, row j at t_j = T j / N
  double window_lo = 0.0;
  double window_hi = 0.0;
  int substeps = 0;
  double cfl_number = 0.0;  // realized max theta dt / h
  std::string scheme;

  double node(int i) const { return x0 + i * h; }
  double time(int j) const { return j == N ? T : T * j / N; }
  double at(int j, int i) const { return v[static_cast<std::size_t>(j) * nx + i]; }
  // Bilinear interpolation; throws outside the computational grid.
  double operator()(double t, double x) const;
  double lo() const { return x0; }
  double hi() const { return x0 + (nx - 1) * h; }
};

// Field of a known V(t, x) on the grid of a finite-difference solve over
// exactly [x_lo, x_hi]; used for closed-form reference tubes.
ValueField tabulate(const std::function<double(double, double)>& V, double T, int N, double x_lo,
                    double x_hi, double h_x);

// Monotone Lax-Friedrichs sweep backward from V(T, .) = g. Throws
// NumericalError when explicit substeps violate the CFL condition.
ValueField solve_hj_fd(const ValueProblem& problem, const HJGrid& grid);

// Structural constants for balls of radius M, integrals over [0, T] by
// the trapezoid rule on `samples` points.
struct RegularityConstants {
  double M = 0.0;
  double R = 0.0;
  double D_R = 0.0;  // Lipschitz constant of g on B_R
  double D = 0.0;    // adjoint bound (N_g + int k_2R) exp(int k_2R)
  double C_M = 0.0;
  double int_omega = 0.0;
  double lambda_max = 0.0;  // max over the samples of lambda_M
  std::vector<double> t;
  std::vector<double> omega;
  std::vector<double> lambda;
  std::vector<double> alpha;

  double alpha_at(double time) const;  // linear interpolation
};
RegularityConstants regularity_constants(const ValueProblem& problem, double M,
                                         int samples = 1001);

// Lower bound min_{B_R} g - R int k_R - int |H(t,0,0)| on V over B_M.
double value_lower_bound(const ValueProblem& problem, double M, int samples = 1001);

struct InstanceGrid {
  double t_lo = 0.0;
  double t_hi = 1.0;
  int t_points = 9;
  double x_lo = -2.0;
  double x_hi = 2.0;
  int x_points = 9;
};

struct InstanceRow {
  double t0 = 0.0;
  double x0 = 0.0;
  double v_var = 0.0;
  double v_ctrl = 0.0;
  double v_fd = 0.0;
  double sup_control = 0.0;
  double gap_ctrl = 0.0;  // |v_var - v_ctrl| / max(|v_var|, |v_ctrl|, floor)
  double gap_fd = 0.0;    // |v_var - v_fd|
};

struct EqualityReport {
  std::vector<InstanceRow> rows;
  AuditRecord control;      // relative variational vs control gap
  AuditRecord fd;           // absolute variational vs finite-difference gap
  AuditRecord lower_bound;  // V_var >= value_lower_bound
};

struct EqualityTolerances {
  double relative = 0.02;
  double fd = 5e-2;
  double floor = 1e-6;  // relative comparisons use max(|a|, |b|, floor)
};

// with_control = false skips the control solver: v_ctrl is NaN and the
// control record passes vacuously with zero samples.
EqualityReport equality_audit(const ValueProblem& problem, const InstanceGrid& grid,
                              const SolverOptions& opts, const HJGrid& fd_grid,
                              const EqualityTolerances& tol = {}, bool with_control = true);

// Sampled two-point bound |V(t,x) - V(s,y)| <= |alpha(t) - alpha(s)| + C_M |x - y|
// on a finite-difference field over B_M. Violating pairs are recomputed on a
// field with doubled N and halved h_x; pass iff at most 1% violate at first
// and none survive the refinement.
AuditRecord regularity_audit(const ValueProblem& problem, double M, std::size_t pairs,
                             std::uint64_t seed, const HJGrid& fd_grid);

// sup_k |a_k| of solve_control against max_t lambda_M(t) over x0 on a grid
// of B_M at t0 = 0.
AuditRecord boundedness_audit(const ValueProblem& problem, double M, int x_points,
                              const SolverOptions& opts);

struct StabilityReport {
  std::vector<double> gaps;  // sup over the window of |V_i - V|
  AuditRecord record;
};

// Sup-grid gaps of a problem sequence against its limit, from
// finite-difference fields. Pass iff the gaps are nonincreasing within
// `noise` and the last is <= tol.
StabilityReport value_stability_audit(const std::vector<ValueProblem>& sequence,
                                      const ValueProblem& limit, const HJGrid& grid, double tol,
                                      double noise = 1e-9);

}  // namespace epirep
