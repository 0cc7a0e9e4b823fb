#pragma once

#include "epirep/convex_core.hpp"

#include <functional>
#include <string>

namespace epirep {

// Objective with optional gradient output. Returning +inf marks an
// infeasible point; the line search backs off from it.
using Objective = std::function<double(const Vec& x, Vec* gradient)>;

struct BfgsOptions {
  int max_iterations = 400;
  double gradient_tolerance = 1e-8;  // on the max-norm, relative to 1 + |f|
  double value_tolerance = 1e-15;    // relative decrease that counts as stalled
  int stall_iterations = 4;
  int max_backtracks = 60;
  double armijo = 1e-4;
  double max_step = 1.0;             // cap on the first trial step length
};

struct BfgsResult {
  Vec x;
  double value = 0.0;
  double gradient_norm = 0.0;  // max-norm at x
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;      // gradient test met
  std::string stop;            // gradient, stalled, line search, iterations
};

// Quasi-Newton descent with Armijo backtracking from a feasible start.
BfgsResult minimize_bfgs(const Objective& f, const Vec& start, const BfgsOptions& opts = {});

}  // namespace epirep
