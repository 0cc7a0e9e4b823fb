#include "epirep/optimize.hpp"
#include "epirep/errors.hpp"

#include <cmath>

namespace epirep {

BfgsResult minimize_bfgs(const Objective& f, const Vec& start, const BfgsOptions& opts) {
  const Eigen::Index n = start.size();
  BfgsResult res;
  res.x = start;
  Vec g(n);
  res.value = f(res.x, &g);
  res.evaluations = 1;
  if (!std::isfinite(res.value)) throw NumericalError("bfgs: infeasible start");
  Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(n, n);
  int stalled = 0;
  Vec trial(n), gt(n);
  for (;;) {
    res.gradient_norm = n ? g.lpNorm<Eigen::Infinity>() : 0.0;
    if (res.gradient_norm <= opts.gradient_tolerance * (1.0 + std::abs(res.value))) {
      res.converged = true;
      res.stop = "gradient";
      return res;
    }
    if (res.iterations >= opts.max_iterations) {
      res.stop = "iterations";
      return res;
    }
    Vec dir = -hinv * g;
    if (dir.dot(g) >= 0.0) {
      hinv.setIdentity();
      dir = -g;
    }
    double step = std::min(1.0, opts.max_step / std::max(dir.norm(), 1e-300));
    if (res.iterations > 0) step = 1.0;
    const double slope = dir.dot(g);
    double ft = 0.0;
    bool accepted = false;
    for (int b = 0; b < opts.max_backtracks; ++b, step *= 0.5) {
      trial = res.x + step * dir;
      ft = f(trial, &gt);
      ++res.evaluations;
      if (std::isfinite(ft) && ft <= res.value + opts.armijo * step * slope) {
        accepted = true;
        break;
      }
    }
    ++res.iterations;
    if (!accepted) {
      if (hinv.isIdentity()) {
        res.stop = "line search";
        return res;
      }
      hinv.setIdentity();  // retry once along the gradient
      continue;
    }
    const Vec s = trial - res.x;
    const Vec y = gt - g;
    const double decrease = res.value - ft;
    res.x = trial;
    res.value = ft;
    g = gt;
    stalled = decrease <= opts.value_tolerance * (1.0 + std::abs(ft)) ? stalled + 1 : 0;
    if (stalled >= opts.stall_iterations) {
      res.gradient_norm = g.lpNorm<Eigen::Infinity>();
      res.stop = "stalled";
      return res;
    }
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      if (res.iterations == 1) hinv *= sy / y.squaredNorm();
      const Vec hy = hinv * y;
      const double rho = 1.0 / sy;
      hinv += ((sy + y.dot(hy)) * rho * rho) * (s * s.transpose()) -
              rho * (hy * s.transpose() + s * hy.transpose());
    }
  }
}

}  // namespace epirep
