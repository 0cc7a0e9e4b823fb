#include "epirep/errors.hpp"
#include "epirep/hamiltonian.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace epirep {
namespace {

double param(const ModelParams& params, std::string_view key, double fallback) {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

void reject_unknown(const ModelParams& params, std::initializer_list<std::string_view> known,
                    std::string_view model) {
  for (const auto& [key, value] : params) {
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ConfigError("model " + std::string(model) + ": unknown parameter '" + key + "'");
  }
}

double norm(State v) {
  double s = 0.0;
  for (double a : v) s += a * a;
  return std::sqrt(s);
}

double dot(State a, State b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// (sqrt|xp| - 1)^2 outside |xp| <= 1. Conjugate |v| / (|x| - |v|) on the open
// interval (-|x|, |x|), 0 at (x, v) = (0, 0), +inf elsewhere.
HamiltonianModel sqrt_example() {
  HamiltonianModel m;
  m.name = "sqrt_example";
  m.value = [](double, State x, State p) {
    const double s = std::abs(x[0] * p[0]);
    if (s <= 1.0) return 0.0;
    const double r = std::sqrt(s) - 1.0;
    return r * r;
  };
  m.growth = [](double) { return 1.0; };
  m.lipschitz = [](double, double) { return 1.0; };
  m.closed_form_conjugate = [](double, State x, State v) {
    const double ax = std::abs(x[0]), av = std::abs(v[0]);
    if (av == 0.0) return 0.0;
    if (av < ax) return av / (ax - av);
    return kInf;
  };
  return m;
}

HamiltonianModel zero_model() {
  HamiltonianModel m;
  m.name = "zero";
  m.value = [](double, State, State) { return 0.0; };
  m.growth = [](double) { return 1.0; };
  m.lipschitz = [](double, double) { return 0.0; };
  m.closed_form_conjugate = [](double, State, State v) { return norm(v) == 0.0 ? 0.0 : kInf; };
  return m;
}

// |p|^2 / 2 continued linearly beyond |p| = c (1 + |x|), so that the growth
// condition holds with constant c. The conjugate is |v|^2 / 2 on the ball of
// radius c (1 + |x|). With huber = 0 it is the plain quadratic, which has no
// finite growth constant.
HamiltonianModel quadratic(double c, bool huber) {
  HamiltonianModel m;
  m.name = "quadratic";
  if (!huber) {
    m.value = [](double, State, State p) { return 0.5 * dot(p, p); };
    m.growth = [](double) { return kInf; };
    m.lipschitz = [](double, double) { return 0.0; };
    m.closed_form_conjugate = [](double, State, State v) { return 0.5 * dot(v, v); };
    return m;
  }
  m.value = [c](double, State x, State p) {
    const double rho = c * (1.0 + norm(x));
    const double n = norm(p);
    return n <= rho ? 0.5 * n * n : rho * n - 0.5 * rho * rho;
  };
  m.growth = [c](double) { return c; };
  m.lipschitz = [c](double, double) { return c; };
  m.closed_form_conjugate = [c](double, State x, State v) {
    const double n = norm(v);
    return n <= c * (1.0 + norm(x)) ? 0.5 * n * n : kInf;
  };
  return m;
}

}  // namespace

HamiltonianModel linear_drift(std::function<double(double, double)> b,
                              std::function<double(double, double)> l0, double bmax, double bx,
                              double l0x) {
  HamiltonianModel m;
  m.name = "linear_drift";
  m.value = [b, l0](double t, State x, State p) { return p[0] * b(t, x[0]) - l0(t, x[0]); };
  m.growth = [bmax](double) { return bmax; };
  const double k = std::max(bx, l0x);
  m.lipschitz = [k](double, double) { return k; };
  m.closed_form_conjugate = [b, l0](double t, State x, State v) {
    return v[0] == b(t, x[0]) ? l0(t, x[0]) : kInf;
  };
  return m;
}

HamiltonianModel shifted(const HamiltonianModel& base, double delta) {
  HamiltonianModel m = base;
  m.name = base.name + "+shift";
  m.value = [h = base.value, delta](double t, State x, State p) { return h(t, x, p) + delta; };
  if (base.closed_form_conjugate)
    m.closed_form_conjugate = [h = base.closed_form_conjugate, delta](double t, State x, State v) {
      return h(t, x, v) - delta;
    };
  return m;
}

HamiltonianModel moreau_envelope(const HamiltonianModel& base, double lambda) {
  if (base.dim != 1) throw ModelError("moreau_envelope: n = 1 only");
  if (!(lambda >= 0.0)) throw ModelError("moreau_envelope: lambda must be >= 0");
  if (lambda == 0.0) return base;
  HamiltonianModel m = base;
  m.name = base.name + "+moreau";
  m.value = [h = base.value, c = base.growth, lambda](double t, State x, State p) {
    // the minimizer lies within lambda * Lipschitz(H) of p
    const double reach = lambda * c(t) * (1.0 + std::abs(x[0]));
    auto obj = [&](double q) {
      const double d = p[0] - q;
      return h(t, x, State(&q, 1)) + d * d / (2.0 * lambda);
    };
    double lo = p[0] - reach, hi = p[0] + reach;
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
    double f1 = obj(x1), f2 = obj(x2);
    while (hi - lo > 1e-12 * (1.0 + std::abs(p[0]))) {
      if (f1 < f2) {
        hi = x2, x2 = x1, f2 = f1, x1 = hi - g * (hi - lo), f1 = obj(x1);
      } else {
        lo = x1, x1 = x2, f1 = f2, x2 = lo + g * (hi - lo), f2 = obj(x2);
      }
    }
    return std::min({f1, f2, obj(p[0])});
  };
  m.lipschitz = [k = base.lipschitz, c = base.growth, lambda](double t, double r) {
    return k(t, r) * (1.0 + lambda * c(t) * (1.0 + r));
  };
  if (base.closed_form_conjugate)
    m.closed_form_conjugate = [h = base.closed_form_conjugate, lambda](double t, State x,
                                                                       State v) {
      return h(t, x, v) + 0.5 * lambda * dot(v, v);
    };
  return m;
}

HamiltonianModel time_reversed(const HamiltonianModel& base, double horizon) {
  if (base.dim > 8) throw ModelError("time_reversed: dimension too large");
  HamiltonianModel m = base;
  m.name = base.name + "+reversed";
  m.value = [h = base.value, horizon](double s, State x, State q) {
    std::array<double, 8> neg{};
    for (std::size_t i = 0; i < q.size(); ++i) neg[i] = -q[i];
    return h(horizon - s, x, State(neg.data(), q.size()));
  };
  m.growth = [c = base.growth, horizon](double s) { return c(horizon - s); };
  m.lipschitz = [k = base.lipschitz, horizon](double s, double r) { return k(horizon - s, r); };
  if (base.closed_form_conjugate)
    m.closed_form_conjugate = [h = base.closed_form_conjugate, horizon](double s, State x,
                                                                        State w) {
      std::array<double, 8> neg{};
      for (std::size_t i = 0; i < w.size(); ++i) neg[i] = -w[i];
      return h(horizon - s, x, State(neg.data(), w.size()));
    };
  return m;
}

std::vector<std::string> builtin_names() {
  return {"sqrt_example", "zero", "quadratic", "linear_drift"};
}

HamiltonianModel builtin(std::string_view name, const ModelParams& params) {
  HamiltonianModel m;
  if (name == "sqrt_example") {
    reject_unknown(params, {"shift", "mollify"}, name);
    m = sqrt_example();
  } else if (name == "zero") {
    reject_unknown(params, {"shift", "mollify"}, name);
    m = zero_model();
  } else if (name == "quadratic") {
    reject_unknown(params, {"c", "huber", "shift", "mollify"}, name);
    m = quadratic(param(params, "c", 1.0), param(params, "huber", 1.0) != 0.0);
  } else if (name == "linear_drift") {
    reject_unknown(params, {"b0", "b1", "l0", "l1", "shift", "mollify"}, name);
    const double b0 = param(params, "b0", 0.0), b1 = param(params, "b1", 1.0);
    const double c0 = param(params, "l0", 0.0), c1 = param(params, "l1", 0.0);
    m = linear_drift([b0, b1](double, double x) { return b0 + b1 * x; },
                     [c0, c1](double, double x) { return c0 + c1 * x; },
                     std::max(std::abs(b0), std::abs(b1)), std::abs(b1), std::abs(c1));
  } else {
    throw ConfigError("unknown model '" + std::string(name) + "'");
  }
  if (const double lam = param(params, "mollify", 0.0); lam != 0.0) m = moreau_envelope(m, lam);
  if (const double d = param(params, "shift", 0.0); d != 0.0) m = shifted(m, d);
  return m;
}

}  // namespace epirep
