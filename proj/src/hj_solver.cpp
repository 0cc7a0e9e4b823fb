#include "epirep/errors.hpp"
#include "epirep/value_function.hpp"

#include <algorithm>
#include <cmath>

namespace epirep {

double ValueField::operator()(double t, double x) const {
  if (!(t >= 0.0 && t <= T)) throw Error("value field: time outside [0, T]");
  const double fx = (x - x0) / h;
  if (!(fx >= -1e-9 && fx <= nx - 1 + 1e-9)) throw Error("value field: x outside the grid");
  const double ft = N > 0 ? t / T * N : 0.0;
  const int j = std::clamp(static_cast<int>(std::floor(ft)), 0, std::max(N - 1, 0));
  const int i = std::clamp(static_cast<int>(std::floor(fx)), 0, nx - 2);
  const double wx = std::clamp(fx - i, 0.0, 1.0);
  auto row = [&](int r) { return (1.0 - wx) * at(r, i) + wx * at(r, i + 1); };
  if (N == 0) return row(0);
  const double wt = std::clamp(ft - j, 0.0, 1.0);
  return (1.0 - wt) * row(j) + wt * row(j + 1);
}

ValueField tabulate(const std::function<double(double, double)>& V, double T, int N, double x_lo,
                    double x_hi, double h_x) {
  if (!(T > 0.0) || N < 1 || !(h_x > 0.0) || !(x_hi > x_lo)) throw ConfigError("tabulate: invalid grid");
  ValueField f;
  f.T = T;
  f.N = N;
  f.h = h_x;
  f.x0 = x_lo;
  f.nx = static_cast<int>(std::ceil((x_hi - x_lo) / h_x - 1e-9)) + 1;
  f.window_lo = x_lo;
  f.window_hi = x_hi;
  f.scheme = "tabulated";
  f.v.resize(static_cast<std::size_t>(N + 1) * f.nx);
  for (int j = 0; j <= N; ++j)
    for (int i = 0; i < f.nx; ++i) f.v[static_cast<std::size_t>(j) * f.nx + i] = V(f.time(j), f.node(i));
  return f;
}

namespace {

double integral_of(const std::function<double(double)>& f, double T, int samples) {
  double acc = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double t0 = T * i / samples, t1 = T * (i + 1) / samples;
    acc += 0.5 * (t1 - t0) * (f(t0) + f(t1));
  }
  return acc;
}

double max_of(const std::function<double(double)>& f, double T, int samples) {
  double m = 0.0;
  for (int i = 0; i <= samples; ++i) m = std::max(m, f(T * i / samples));
  return m;
}

}  // namespace

ValueField solve_hj_fd(const ValueProblem& problem, const HJGrid& grid) {
  const auto& model = problem.model;
  const double T = problem.horizon;
  if (model.dim != 1) throw ModelError("solve_hj_fd: n = 1 only");
  if (!(T > 0.0) || grid.N < 1 || !(grid.h_x > 0.0) || !(grid.x_hi > grid.x_lo) || !(grid.cfl > 0.0))
    throw ConfigError("solve_hj_fd: invalid grid");
  const double int_c = integral_of(model.growth, T, 256);
  if (!std::isfinite(int_c)) throw ModelError("solve_hj_fd: growth constant must be finite");

  // characteristics from the window stay within (X + int c) exp(int c)
  const double X = std::max(std::abs(grid.x_lo), std::abs(grid.x_hi));
  const double pad = grid.pad >= 0.0 ? grid.pad : (X + int_c) * std::exp(int_c) - X + 4.0 * grid.h_x;
  const int cells_pad = static_cast<int>(std::ceil(pad / grid.h_x));
  const int cells_win = static_cast<int>(std::ceil((grid.x_hi - grid.x_lo) / grid.h_x - 1e-9));

  ValueField out;
  out.T = T;
  out.N = grid.N;
  out.h = grid.h_x;
  out.x0 = grid.x_lo - cells_pad * grid.h_x;
  out.nx = cells_win + 2 * cells_pad + 1;
  out.window_lo = grid.x_lo;
  out.window_hi = grid.x_hi;
  out.scheme = grid.local_dissipation ? "local Lax-Friedrichs" : "Lax-Friedrichs (growth bound)";
  const int nx = out.nx;
  if (nx < 3) throw ConfigError("solve_hj_fd: grid needs at least 3 nodes");

  const double x_abs = std::max(std::abs(out.lo()), std::abs(out.hi()));
  const double speed = max_of(model.growth, T, 256) * (1.0 + x_abs);
  const double row_dt = T / grid.N;
  int sub = grid.substeps;
  if (sub <= 0) {
    sub = std::max(1, static_cast<int>(std::ceil(row_dt * speed / (grid.cfl * grid.h_x))));
  } else if (row_dt / sub * speed > grid.h_x * (1.0 + 1e-12)) {
    throw NumericalError("CFL condition violated: dt " + format_double(row_dt / sub) +
                         " exceeds h_x / max|H_p| = " + format_double(grid.h_x / speed));
  }
  out.substeps = sub;
  const double dt = row_dt / sub;

  out.v.assign(static_cast<std::size_t>(grid.N + 1) * nx, 0.0);
  std::vector<double> w(nx), next(nx);
  for (int i = 0; i < nx; ++i) w[i] = problem.g(out.node(i));
  std::copy(w.begin(), w.end(), out.v.begin() + static_cast<std::ptrdiff_t>(grid.N) * nx);

  auto hp = [&](double t, double x, double p) {
    const double d = 1e-6 * (1.0 + std::abs(p));
    return (model(t, x, p + d) - model(t, x, p - d)) / (2.0 * d);
  };
  double realized = 0.0;
  for (int j = grid.N - 1; j >= 0; --j) {
    for (int s = 0; s < sub; ++s) {
      // explicit step from t down to t - dt
      const double t = out.time(j + 1) - s * dt;
      const double bound_c = model.c(t);
      for (int i = 0; i < nx; ++i) {
        const double x = out.node(i);
        const double wl = i > 0 ? w[i - 1] : 2.0 * w[0] - w[1];
        const double wr = i + 1 < nx ? w[i + 1] : 2.0 * w[nx - 1] - w[nx - 2];
        const double pm = (w[i] - wl) / grid.h_x;
        const double pp = (wr - w[i]) / grid.h_x;
        const double bound = bound_c * (1.0 + std::abs(x));
        double theta = bound;
        if (grid.local_dissipation)
          theta = std::min(bound, std::max(std::abs(hp(t, x, -pm)), std::abs(hp(t, x, -pp))));
        realized = std::max(realized, theta * dt / grid.h_x);
        // V_t = H(t, x, -V_x), marched backward
        const double ham = model(t, x, -0.5 * (pm + pp)) - 0.5 * theta * (pp - pm);
        next[i] = w[i] - dt * ham;
      }
      w.swap(next);
    }
    for (int i = 0; i < nx; ++i)
      if (!std::isfinite(w[i])) throw NumericalError("solve_hj_fd: non-finite value");
    std::copy(w.begin(), w.end(), out.v.begin() + static_cast<std::ptrdiff_t>(j) * nx);
  }
  out.cfl_number = realized;
  return out;
}

}  // namespace epirep
