#include "epirep/value_function.hpp"
#include "epirep/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>

namespace epirep {
namespace {

double param(const ModelParams& params, std::string_view key, double fallback) {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

void reject_unknown(const ModelParams& params, std::initializer_list<std::string_view> known,
                    std::string_view name) {
  for (const auto& [key, value] : params)
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ConfigError("terminal cost " + std::string(name) + ": unknown parameter '" + key + "'");
}

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

double h_x(const HamiltonianModel& m, double t, double x, double p) {
  const double d = 1e-6 * (1.0 + std::abs(x));
  return (m(t, x + d, p) - m(t, x - d, p)) / (2.0 * d);
}

}  // namespace

TerminalCost terminal_cost(std::string_view name, const ModelParams& params) {
  TerminalCost g;
  g.name = std::string(name);
  if (name == "abs") {
    reject_unknown(params, {"scale", "center"}, name);
    const double s = param(params, "scale", 1.0), c = param(params, "center", 0.0);
    g.value = [s, c](double x) { return s * std::abs(x - c); };
    g.slope = [s, c](double x) { return s * sign(x - c); };
    g.lipschitz = [s](double) { return std::abs(s); };
  } else if (name == "quadratic") {
    reject_unknown(params, {"scale"}, name);
    const double s = param(params, "scale", 1.0);
    g.value = [s](double x) { return 0.5 * s * x * x; };
    g.slope = [s](double x) { return s * x; };
    g.lipschitz = [s](double r) { return std::abs(s) * r; };
  } else if (name == "constant") {
    reject_unknown(params, {"level"}, name);
    const double c = param(params, "level", 0.0);
    g.value = [c](double) { return c; };
    g.slope = [](double) { return 0.0; };
    g.lipschitz = [](double) { return 0.0; };
  } else if (name == "piecewise") {
    reject_unknown(params, {"kink", "left", "right", "level"}, name);
    const double k = param(params, "kink", 0.0), lo = param(params, "left", -1.0),
                 hi = param(params, "right", 0.5), c = param(params, "level", 0.0);
    g.value = [=](double x) { return c + (x < k ? lo : hi) * (x - k); };
    g.slope = [=](double x) { return x < k ? lo : hi; };
    g.lipschitz = [=](double) { return std::max(std::abs(lo), std::abs(hi)); };
  } else {
    throw ConfigError("unknown terminal cost '" + std::string(name) + "'");
  }
  return g;
}

std::vector<std::string> terminal_cost_names() { return {"abs", "quadratic", "constant", "piecewise"}; }

double cost_variational(const ValueProblem& problem, const Trajectory& path, double band) {
  if (path.x.empty()) throw Error("cost_variational: empty trajectory");
  const auto& m = problem.model;
  double acc = 0.0;
  for (int k = 0; k < path.steps(); ++k) {
    const double s = path.slope(k);
    const double a = ConjugateProfile(m, path.time(k), path.x[k], band)(s);
    const double b = ConjugateProfile(m, path.time(k + 1), path.x[k + 1], band)(s);
    if (!std::isfinite(a) || !std::isfinite(b)) return kInf;
    acc += 0.5 * path.step() * (a + b);
  }
  return acc + problem.g(path.x.back());
}

namespace {

// (f, l) at one RK4 stage, with Jacobians in y and a when asked.
struct Stage {
  double f = 0.0, l = 0.0;
  double fy = 0.0, ly = 0.0;
  Vec2 fa = Vec2(1.0, 0.0), la = Vec2(0.0, 1.0);
};

Stage eval_stage(const HamiltonianModel& m, double t, double y, const Vec2& a,
                 const RepresentationOptions& rep, bool jacobian) {
  const auto e = parameterize(m, t, y, a, rep);
  Stage s;
  s.f = e.f;
  s.l = e.l;
  if (!jacobian || e.fixed_point) return s;  // identity on the interior side of E
  const double dy = 1e-6 * (1.0 + std::abs(y));
  const auto ey = parameterize(m, t, y + dy, a, rep);
  s.fy = (ey.f - e.f) / dy;
  s.ly = (ey.l - e.l) / dy;
  for (int i = 0; i < 2; ++i) {
    Vec2 b = a;
    const double da = 1e-6 * (1.0 + std::abs(a[i]));
    b[i] += da;
    const auto eb = parameterize(m, t, y, b, rep);
    s.fa[i] = (eb.f - e.f) / da;
    s.la[i] = (eb.l - e.l) / da;
  }
  return s;
}

struct Step {
  std::array<double, 4> y{};
  std::array<Stage, 4> st{};
};

constexpr std::array<double, 4> kWeights{1.0 / 6.0, 2.0 / 6.0, 2.0 / 6.0, 1.0 / 6.0};

// One RK4 step of (x, u); returns (dx, du).
std::pair<double, double> rk4_step(const HamiltonianModel& m, double t, double h, double x,
                                   const Vec2& a, const StageOptions& opts, bool jacobian,
                                   Step* rec) {
  Step local;
  Step& r = rec ? *rec : local;
  const std::array<double, 4> dt{0.0, 0.5 * h, 0.5 * h, h};
  double df = 0.0, dl = 0.0;
  for (int i = 0; i < 4; ++i) {
    r.y[i] = i == 0 ? x : x + dt[i] * r.st[i - 1].f;
    if (!(std::abs(r.y[i]) <= opts.x_max)) throw NumericalError("state blowup in RK4");
    r.st[i] = eval_stage(m, t + dt[i], r.y[i], a, opts.rep, jacobian);
    df += kWeights[i] * r.st[i].f;
    dl += kWeights[i] * r.st[i].l;
  }
  return {h * df, h * dl};
}

}  // namespace

Trajectory integrate_control(const HamiltonianModel& model, double t0, double x0,
                             const ControlSignal& control, const StageOptions& opts) {
  for (const auto& a : control.a)
    if (!a.allFinite()) throw Error("integrate_control: control must be finite");
  if (std::abs(control.t0 - t0) > 1e-12 * (1.0 + std::abs(t0)))
    throw Error("integrate_control: control mesh starts at a different time");
  Trajectory p;
  p.t0 = control.t0;
  p.T = control.T;
  p.x.assign(1, x0);
  p.u.assign(1, 0.0);
  const double h = control.step();
  for (int k = 0; k < control.steps(); ++k) {
    const auto [dx, du] = rk4_step(model, control.time(k), h, p.x.back(), control.a[k], opts, false,
                                   nullptr);
    p.x.push_back(p.x.back() + dx);
    p.u.push_back(p.u.back() + du);
  }
  return p;
}

double cost_control(const ValueProblem& problem, const Trajectory& path,
                    const ControlSignal& control, const StageOptions& opts) {
  if (path.x.empty() || path.steps() != control.steps() || path.t0 != control.t0 ||
      path.T != control.T)
    throw Error("cost_control: trajectory and control meshes differ");
  const Trajectory again = integrate_control(problem.model, path.t0, path.x.front(), control, opts);
  for (std::size_t k = 0; k < again.x.size(); ++k)
    if (std::abs(again.x[k] - path.x[k]) > 1e-9 * (1.0 + std::abs(path.x[k])))
      throw Error("cost_control: trajectory is not generated by the control");
  return problem.g(again.x.back()) + again.u.back();
}

double running_cost_deficit(const HamiltonianModel& model, const Trajectory& path,
                            const ControlSignal& control, const RepresentationOptions& rep) {
  double worst = -kInf;
  for (int k = 0; k < control.steps(); ++k) {
    const auto e = parameterize(model, control.time(k), path.x[k], control.a[k], rep);
    const ConjugateProfile prof(model, control.time(k), path.x[k], rep.band, rep.conj);
    worst = std::max(worst, prof(e.f) - e.l);
  }
  return worst;
}

namespace {

Trajectory constant_path(double t0, double T, double x0, int N) {
  Trajectory p;
  p.t0 = t0;
  p.T = T;
  p.x.assign(N + 1, x0);
  return p;
}

// Trapezoidal objective over x_1..x_N with the envelope gradient:
// d/dv H* is the maximizing p and d/dx H* is -H_x at that p.
double variational_objective(const ValueProblem& pr, double t0, double x0, int N, double band,
                             const Vec& z, Vec* grad) {
  const double h = (pr.horizon - t0) / N;
  auto node = [&](int k) { return k == 0 ? x0 : z[k - 1]; };
  auto time = [&](int k) { return k == N ? pr.horizon : t0 + k * h; };
  if (grad) grad->setZero(N);
  double acc = 0.0;
  for (int k = 0; k < N; ++k) {
    const double xa = node(k), xb = node(k + 1);
    const double s = (xb - xa) / h;
    const ConjugateProfile pa(pr.model, time(k), xa, band), pb(pr.model, time(k + 1), xb, band);
    const auto ca = pa.eval(s), cb = pb.eval(s);
    if (!ca.finite() || !cb.finite()) return kInf;
    acc += 0.5 * h * (ca.value + cb.value);
    if (!grad) continue;
    const double qa = std::isfinite(ca.argmax) ? ca.argmax : 0.0;
    const double qb = std::isfinite(cb.argmax) ? cb.argmax : 0.0;
    const double ds = 0.5 * (qa + qb);
    if (k > 0) (*grad)[k - 1] += -ds - 0.5 * h * h_x(pr.model, time(k), xa, qa);
    (*grad)[k] += ds - 0.5 * h * h_x(pr.model, time(k + 1), xb, qb);
  }
  const double xn = node(N);
  if (grad) (*grad)[N - 1] += pr.g.slope(xn);
  return acc + pr.g(xn);
}

}  // namespace

VariationalResult solve_variational(const ValueProblem& problem, double t0, double x0,
                                    const SolverOptions& opts) {
  if (opts.N < 8) throw ConfigError("solve_variational: N must be at least 8");
  if (!(t0 >= 0.0 && t0 <= problem.horizon)) throw ConfigError("solve_variational: t0 outside [0, T]");
  const double T = problem.horizon;
  VariationalResult best;
  if (t0 == T) {
    best.path = constant_path(t0, T, x0, 0);
    best.value = problem.g(x0);
    best.feasible_starts = 1;
    return best;
  }
  const int N = opts.N;
  const double h = (T - t0) / N;
  const Objective obj = [&](const Vec& z, Vec* g) {
    return variational_objective(problem, t0, x0, N, opts.band, z, g);
  };
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Interval dom0 = banded_domain(problem.model, t0, x0, opts.band);
  const double mid = 0.5 * (dom0.lo + dom0.hi), half = 0.5 * dom0.width();
  for (int s = 0; s < std::max(1, opts.starts); ++s) {
    Vec z = Vec::Constant(N, x0);
    if (s > 0) {
      // constant slope plus one smooth bump, shrunk toward x0 until feasible
      const double slope = mid + 0.5 * half * u(rng);
      const double bump = 0.25 * half * (T - t0) * u(rng);
      for (int k = 1; k <= N; ++k) {
        const double r = static_cast<double>(k) / N;
        z[k - 1] = x0 + slope * k * h + bump * std::sin(std::acos(-1.0) * r);
      }
      for (int shrink = 0; shrink < 30 && !std::isfinite(obj(z, nullptr)); ++shrink)
        z = x0 + 0.5 * (z.array() - x0);
    }
    if (!std::isfinite(obj(z, nullptr))) continue;
    ++best.feasible_starts;
    const auto r = minimize_bfgs(obj, z, opts.bfgs);
    best.iterations += r.iterations;
    if (r.value < best.value) {
      best.value = r.value;
      best.gradient_norm = r.gradient_norm;
      best.path = constant_path(t0, T, x0, N);
      for (int k = 1; k <= N; ++k) best.path.x[k] = r.x[k - 1];
    }
  }
  if (best.feasible_starts == 0) throw NumericalError("solve_variational: all starts infeasible");
  return best;
}

namespace {

struct ControlEval {
  double value = kInf;
  std::vector<double> x;
  std::vector<Vec2> a;
};

// Variables (v_k, w_k); a_k = (v_k, H*(tau_k, x_k, v_k) + w_k^2).
ControlEval control_objective(const ValueProblem& pr, double t0, double x0, int N,
                              const SolverOptions& opts, const Vec& z, Vec* grad) {
  const double h = (pr.horizon - t0) / N;
  auto time = [&](int k) { return k == N ? pr.horizon : t0 + k * h; };
  ControlEval ev;
  ev.x.assign(1, x0);
  ev.a.resize(N);
  std::vector<Step> steps(grad ? N : 0);
  std::vector<double> argmax(N);
  double u = 0.0;
  for (int k = 0; k < N; ++k) {
    const double xk = ev.x.back();
    const ConjugateProfile prof(pr.model, time(k), xk, opts.band);
    const auto c = prof.eval(z[2 * k]);
    if (!c.finite()) return ev;
    argmax[k] = std::isfinite(c.argmax) ? c.argmax : 0.0;
    ev.a[k] = Vec2(z[2 * k], c.value + z[2 * k + 1] * z[2 * k + 1]);
    const auto [dx, du] = rk4_step(pr.model, time(k), h, xk, ev.a[k], opts.stage, grad != nullptr,
                                   grad ? &steps[k] : nullptr);
    ev.x.push_back(xk + dx);
    u += du;
  }
  ev.value = pr.g(ev.x.back()) + u;
  if (!grad) return ev;

  // discrete adjoint of the RK4 recursion; the running cost has adjoint 1
  grad->setZero(2 * N);
  double lam = pr.g.slope(ev.x.back());
  const std::array<double, 4> c{0.0, 0.5 * h, 0.5 * h, h};
  for (int k = N - 1; k >= 0; --k) {
    const Step& s = steps[k];
    std::array<double, 4> fbar{};
    for (int i = 0; i < 4; ++i) fbar[i] = h * kWeights[i] * lam;
    double xbar = lam;
    Vec2 abar = Vec2::Zero();
    for (int i = 3; i >= 0; --i) {
      const Stage& st = s.st[i];
      const double lbar = h * kWeights[i];
      const double ybar = fbar[i] * st.fy + lbar * st.ly;
      abar += fbar[i] * st.fa + lbar * st.la;
      if (i > 0) fbar[i - 1] += c[i] * ybar;
      xbar += ybar;
    }
    const double xk = ev.x[k];
    (*grad)[2 * k] = abar.x() + abar.y() * argmax[k];
    (*grad)[2 * k + 1] = abar.y() * 2.0 * z[2 * k + 1];
    xbar += abar.y() * -h_x(pr.model, time(k), xk, argmax[k]);
    lam = xbar;
  }
  return ev;
}

}  // namespace

ControlResult solve_control(const ValueProblem& problem, double t0, double x0,
                            const SolverOptions& opts) {
  if (opts.N < 8) throw ConfigError("solve_control: N must be at least 8");
  if (!(t0 >= 0.0 && t0 <= problem.horizon)) throw ConfigError("solve_control: t0 outside [0, T]");
  const double T = problem.horizon;
  ControlResult best;
  if (t0 == T) {
    best.path = constant_path(t0, T, x0, 0);
    best.path.u.assign(1, 0.0);
    best.control.t0 = best.control.T = T;
    best.value = problem.g(x0);
    best.feasible_starts = 1;
    return best;
  }
  SolverOptions so = opts;
  so.stage.rep.band = opts.band;
  const int N = opts.N;
  const Objective obj = [&](const Vec& z, Vec* g) {
    return control_objective(problem, t0, x0, N, so, z, g).value;
  };
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Interval dom0 = banded_domain(problem.model, t0, x0, opts.band);
  const double mid = 0.5 * (dom0.lo + dom0.hi), half = 0.5 * dom0.width();
  for (int s = 0; s < std::max(1, opts.starts); ++s) {
    Vec z = Vec::Zero(2 * N);
    for (int k = 0; k < N; ++k) z[2 * k] = mid;
    if (s > 0) {
      const double v = 0.5 * half * u(rng), w = 0.5 * std::abs(u(rng));
      for (int k = 0; k < N; ++k) {
        z[2 * k] = mid + v;
        z[2 * k + 1] = w;
      }
      for (int shrink = 0; shrink < 30 && !std::isfinite(obj(z, nullptr)); ++shrink)
        for (int k = 0; k < N; ++k) z[2 * k] = mid + 0.5 * (z[2 * k] - mid);
    }
    double f0 = kInf;
    try {
      f0 = obj(z, nullptr);
    } catch (const NumericalError&) {
    }
    if (!std::isfinite(f0)) continue;
    ++best.feasible_starts;
    const auto r = minimize_bfgs(obj, z, so.bfgs);
    best.iterations += r.iterations;
    if (r.value < best.value) {
      const auto ev = control_objective(problem, t0, x0, N, so, r.x, nullptr);
      best.value = ev.value;
      best.gradient_norm = r.gradient_norm;
      best.control.t0 = t0;
      best.control.T = T;
      best.control.a = ev.a;
      best.path = integrate_control(problem.model, t0, x0, best.control, so.stage);
      best.sup_control = 0.0;
      for (const auto& a : ev.a) best.sup_control = std::max(best.sup_control, a.norm());
    }
  }
  if (best.feasible_starts == 0) throw NumericalError("solve_control: all starts infeasible");
  return best;
}

double RegularityConstants::alpha_at(double time) const {
  if (t.empty()) return 0.0;
  if (time <= t.front()) return alpha.front();
  if (time >= t.back()) return alpha.back();
  const auto it = std::upper_bound(t.begin(), t.end(), time);
  const auto i = static_cast<std::size_t>(it - t.begin()) - 1;
  const double w = (time - t[i]) / (t[i + 1] - t[i]);
  return (1.0 - w) * alpha[i] + w * alpha[i + 1];
}

namespace {

double h00(const HamiltonianModel& m, double t) {
  const std::array<double, 8> zero{};
  const State z(zero.data(), static_cast<std::size_t>(m.dim));
  return std::abs(m(t, z, z));
}

}  // namespace

RegularityConstants regularity_constants(const ValueProblem& problem, double M, int samples) {
  const auto& m = problem.model;
  const double T = problem.horizon;
  const int n = std::max(samples, 2);
  RegularityConstants k;
  k.M = M;
  k.t.resize(n);
  for (int i = 0; i < n; ++i) k.t[i] = i == n - 1 ? T : T * i / (n - 1);
  auto integrate = [&](auto&& f) {
    double acc = 0.0;
    for (int i = 0; i + 1 < n; ++i) acc += 0.5 * (k.t[i + 1] - k.t[i]) * (f(k.t[i]) + f(k.t[i + 1]));
    return acc;
  };
  const double int_c = integrate([&](double t) { return m.c(t); });
  k.R = (M + int_c) * std::exp(int_c);
  k.D_R = problem.g.lipschitz(k.R);
  const double int_k2 = integrate([&](double t) { return m.k(t, 2.0 * k.R); });
  k.D = (k.D_R + int_k2) * std::exp(int_k2);
  const double dim = m.dim;
  k.omega.resize(n);
  k.lambda.resize(n);
  for (int i = 0; i < n; ++i) {
    const double t = k.t[i];
    k.omega[i] = 2.0 * h00(m, t) + (10.0 * (dim + 1.0) * m.k(t, k.R) + m.c(t)) * (1.0 + k.R);
    k.lambda[i] = 2.0 * (1.0 + k.R) * (1.0 + k.D) * m.c(t) + h00(m, t) + k.R * m.k(t, k.R);
  }
  k.int_omega = integrate([&](double t) {
    return 2.0 * h00(m, t) + (10.0 * (dim + 1.0) * m.k(t, k.R) + m.c(t)) * (1.0 + k.R);
  });
  k.lambda_max = *std::max_element(k.lambda.begin(), k.lambda.end());
  k.C_M = (k.D_R + k.int_omega) * std::exp(k.int_omega);
  k.alpha.assign(n, 0.0);
  double om = 0.0, la = 0.0;
  for (int i = 0; i + 1 < n; ++i) {
    const double dt = k.t[i + 1] - k.t[i];
    om += 0.5 * dt * (k.omega[i] + k.omega[i + 1]);
    la += 0.5 * dt * (k.lambda[i] + k.lambda[i + 1]);
    k.alpha[i + 1] = (1.0 + k.C_M) * om + 3.0 * la;
  }
  return k;
}

double value_lower_bound(const ValueProblem& problem, double M, int samples) {
  const auto k = regularity_constants(problem, M, samples);
  // min of g over B_R from a grid, lowered by the Lipschitz slack between nodes
  const int grid = 4000;
  double gmin = kInf;
  for (int i = 0; i <= grid; ++i) gmin = std::min(gmin, problem.g(-k.R + 2.0 * k.R * i / grid));
  gmin -= k.D_R * k.R / grid;
  const auto& m = problem.model;
  const double T = problem.horizon;
  double int_k = 0.0, int_h = 0.0;
  const int n = std::max(samples, 2);
  for (int i = 0; i + 1 < n; ++i) {
    const double a = T * i / (n - 1), b = T * (i + 1) / (n - 1);
    int_k += 0.5 * (b - a) * (m.k(a, k.R) + m.k(b, k.R));
    int_h += 0.5 * (b - a) * (h00(m, a) + h00(m, b));
  }
  return gmin - k.R * int_k - int_h;
}

namespace {

double lin(double lo, double hi, int n, int i) {
  return n <= 1 ? 0.5 * (lo + hi) : (i == n - 1 ? hi : lo + (hi - lo) * i / (n - 1));
}

}  // namespace

EqualityReport equality_audit(const ValueProblem& problem, const InstanceGrid& grid,
                              const SolverOptions& opts, const HJGrid& fd_grid,
                              const EqualityTolerances& tol, bool with_control) {
  if (grid.t_points < 1 || grid.x_points < 1) throw ConfigError("equality_audit: empty instance grid");
  const ValueField field = solve_hj_fd(problem, fd_grid);
  EqualityReport rep;
  double worst_ctrl = 0.0, worst_fd = 0.0, min_v = kInf, max_abs_x = 0.0;
  for (int i = 0; i < grid.t_points; ++i) {
    for (int j = 0; j < grid.x_points; ++j) {
      InstanceRow row;
      row.t0 = lin(grid.t_lo, grid.t_hi, grid.t_points, i);
      row.x0 = lin(grid.x_lo, grid.x_hi, grid.x_points, j);
      const auto var = solve_variational(problem, row.t0, row.x0, opts);
      row.v_var = var.value;
      row.v_fd = field(row.t0, row.x0);
      if (with_control) {
        const auto ctl = solve_control(problem, row.t0, row.x0, opts);
        row.v_ctrl = ctl.value;
        row.sup_control = ctl.sup_control;
        row.gap_ctrl = std::abs(row.v_var - row.v_ctrl) /
                       std::max({std::abs(row.v_var), std::abs(row.v_ctrl), tol.floor});
      } else {
        row.v_ctrl = row.sup_control = row.gap_ctrl = std::numeric_limits<double>::quiet_NaN();
      }
      row.gap_fd = std::abs(row.v_var - row.v_fd);
      if (with_control) worst_ctrl = std::max(worst_ctrl, row.gap_ctrl);
      worst_fd = std::max(worst_fd, row.gap_fd);
      min_v = std::min(min_v, row.v_var);
      max_abs_x = std::max(max_abs_x, std::abs(row.x0));
      rep.rows.push_back(row);
    }
  }
  const auto n = rep.rows.size();
  rep.control = {"equality_ctrl:" + problem.model.name, tol.relative, worst_ctrl, worst_ctrl <= tol.relative,
                 with_control ? n : 0, opts.seed,
                 with_control ? "relative |V_var - V_ctrl|" : "control solver skipped"};
  rep.fd = {"equality_fd:" + problem.model.name, tol.fd, worst_fd, worst_fd <= tol.fd, n, opts.seed,
            "|V_var - V_fd|, " + field.scheme + ", h_x " + format_double(fd_grid.h_x)};
  const double lb = value_lower_bound(problem, max_abs_x);
  rep.lower_bound = {"lower_bound:" + problem.model.name, 0.0, lb - min_v, lb <= min_v, n, opts.seed,
                     "observed is bound minus min V_var; bound " + format_double(lb)};
  return rep;
}

AuditRecord regularity_audit(const ValueProblem& problem, double M, std::size_t pairs,
                             std::uint64_t seed, const HJGrid& fd_grid) {
  HJGrid g = fd_grid;
  g.x_lo = -M;
  g.x_hi = M;
  const ValueField field = solve_hj_fd(problem, g);
  const auto k = regularity_constants(problem, M);
  const double T = problem.horizon;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  struct Pair {
    double t, s, x, y;
  };
  std::vector<Pair> bad;
  AuditRecord rec;
  rec.name = "regularity:" + problem.model.name;
  rec.bound = 1.0;
  rec.seed = seed;
  auto rhs = [&](const Pair& p) { return std::abs(k.alpha_at(p.t) - k.alpha_at(p.s)) + k.C_M * std::abs(p.x - p.y); };
  for (std::size_t i = 0; i < pairs; ++i) {
    Pair p{T * u(rng), 0.0, M * (2.0 * u(rng) - 1.0), 0.0};
    // half the pairs are close, where difference quotients are sharpest
    if (u(rng) < 0.5) {
      const double sep = std::pow(10.0, -3.0 + 2.0 * u(rng));
      p.s = std::clamp(p.t + sep * T * (2.0 * u(rng) - 1.0), 0.0, T);
      p.y = std::clamp(p.x + sep * M * (2.0 * u(rng) - 1.0), -M, M);
    } else {
      p.s = T * u(rng);
      p.y = M * (2.0 * u(rng) - 1.0);
    }
    const double lhs = std::abs(field(p.t, p.x) - field(p.s, p.y));
    const double r = rhs(p);
    if (r > 0.0) rec.observed = std::max(rec.observed, lhs / r);
    if (lhs > r) bad.push_back(p);
    ++rec.samples;
  }
  std::size_t persistent = 0;
  if (!bad.empty()) {
    g.N *= 2;
    g.h_x *= 0.5;
    const ValueField fine = solve_hj_fd(problem, g);
    for (const auto& p : bad) persistent += std::abs(fine(p.t, p.x) - fine(p.s, p.y)) > rhs(p);
  }
  rec.pass = bad.size() <= pairs / 100 && persistent == 0;
  rec.note = "observed is the max of lhs / rhs; C_M " + format_double(k.C_M) + "; " +
             std::to_string(bad.size()) + " violations, " + std::to_string(persistent) +
             " after refinement";
  return rec;
}

AuditRecord boundedness_audit(const ValueProblem& problem, double M, int x_points,
                              const SolverOptions& opts) {
  const auto k = regularity_constants(problem, M);
  AuditRecord rec;
  rec.name = "boundedness:" + problem.model.name;
  rec.bound = k.lambda_max;
  rec.seed = opts.seed;
  std::size_t violations = 0;
  for (int i = 0; i < x_points; ++i) {
    const double x0 = lin(-M, M, x_points, i);
    const auto r = solve_control(problem, 0.0, x0, opts);
    rec.observed = std::max(rec.observed, r.sup_control);
    violations += r.sup_control > k.lambda_max;
    ++rec.samples;
  }
  rec.pass = violations == 0;
  rec.note = std::to_string(violations) + " violations; bound is max_t lambda_M(t)";
  return rec;
}

StabilityReport value_stability_audit(const std::vector<ValueProblem>& sequence,
                                      const ValueProblem& limit, const HJGrid& grid, double tol,
                                      double noise) {
  const ValueField base = solve_hj_fd(limit, grid);
  StabilityReport rep;
  bool monotone = true;
  for (const auto& p : sequence) {
    const ValueField f = solve_hj_fd(p, grid);
    if (f.nx != base.nx || f.N != base.N) throw NumericalError("value_stability_audit: grids differ");
    double gap = 0.0;
    for (int j = 0; j <= f.N; ++j)
      for (int i = 0; i < f.nx; ++i) {
        const double x = f.node(i);
        if (x < grid.x_lo - 1e-12 || x > grid.x_hi + 1e-12) continue;
        gap = std::max(gap, std::abs(f.at(j, i) - base.at(j, i)));
      }
    if (!rep.gaps.empty() && gap > rep.gaps.back() + noise) monotone = false;
    rep.gaps.push_back(gap);
  }
  auto& r = rep.record;
  r.name = "value_stability:" + limit.model.name;
  r.bound = tol;
  r.observed = rep.gaps.empty() ? 0.0 : rep.gaps.back();
  r.samples = rep.gaps.size();
  r.pass = monotone && r.observed <= tol;
  r.note = monotone ? "gaps nonincreasing" : "gaps increase somewhere in the sequence";
  return rep;
}

}  // namespace epirep
