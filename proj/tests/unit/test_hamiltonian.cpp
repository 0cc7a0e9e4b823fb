#include <doctest.h>

#include "epirep/errors.hpp"
#include "epirep/hamiltonian.hpp"

#include <cmath>
#include <random>

using namespace epirep;

namespace {

// sup over a uniform p-grid, the brute-force oracle
double grid_sup(const HamiltonianModel& m, double x, double v, double lo, double hi, double step) {
  double best = -kInf;
  for (double p = lo; p <= hi; p += step) best = std::max(best, v * p - m(0.0, x, p));
  return best;
}

}  // namespace

TEST_CASE("conjugate examples") {
  const auto sq = builtin("sqrt_example");
  CHECK(conjugate_scalar(sq, 0.0, 2.0, 1.0).value == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(conjugate_scalar(sq, 0.0, 1.0, 1.5).value == kInf);
  CHECK(conjugate_scalar(sq, 0.0, 0.0, 0.0).value == 0.0);
  CHECK(conjugate_scalar(sq, 0.0, 0.0, 0.3).value == kInf);

  // the plain quadratic, as in the brute-force oracle
  const auto q = builtin("quadratic", {{"huber", 0.0}});
  const double oracle = grid_sup(q, 0.0, 3.0, -100.0, 100.0, 1e-4);
  CHECK(oracle == doctest::Approx(4.5).epsilon(1e-8));
  CHECK(conjugate_scalar(q, 0.0, 0.0, 3.0).value == doctest::Approx(oracle).epsilon(1e-9));
  // the Huber form agrees wherever v is inside its domain
  const auto hq = builtin("quadratic", {{"c", 5.0}});
  CHECK(conjugate_scalar(hq, 0.0, 0.0, 3.0).value == doctest::Approx(4.5).epsilon(1e-9));
  CHECK(conjugate_scalar(builtin("quadratic"), 0.0, 2.0, 3.0).value ==
        doctest::Approx(4.5).epsilon(1e-9));
}

TEST_CASE("sqrt_example matches its closed form across the banded domain") {
  const auto sq = builtin("sqrt_example");
  for (double x : {-2.0, -1.0, -0.5, 0.5, 1.0, 2.0}) {
    const Interval d = banded_domain(sq, 0.0, x);
    CHECK(d.hi < std::abs(x));
    CHECK(d.hi > std::abs(x) * (1.0 - 2e-3));
    for (int i = 0; i <= 40; ++i) {
      const double v = d.lo + d.width() * i / 40.0;
      const double got = conjugate_scalar(sq, 0.0, x, v).value;
      CHECK(std::abs(got - sq.closed_form(0.0, x, v)) <= 1e-6);
    }
    CHECK(conjugate_scalar(sq, 0.0, x, 1.01 * std::abs(x)).value == kInf);
    CHECK(conjugate_scalar(sq, 0.0, x, -std::abs(x)).value == kInf);
  }
}

TEST_CASE("domain bound") {
  const auto sq = builtin("sqrt_example");
  CHECK(conjugate_domain_bound(sq, 0.0, 2.0) == 3.0);
  CHECK(conjugate_domain_bound(sq, 0.0, 0.0) == 1.0);
  CHECK(conjugate_domain_bound(builtin("quadratic", {{"c", 2.5}}), 0.3, -1.0) == 5.0);
  const Interval d = conjugate_domain(sq, 0.0, 2.0);
  CHECK(d.lo == doctest::Approx(-2.0).epsilon(1e-5));
  CHECK(d.hi == doctest::Approx(2.0).epsilon(1e-5));
}

TEST_CASE("conjugate properties on samples") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> ux(-2, 2), up(-5, 5), ut(0, 1);
  for (const char* name : {"sqrt_example", "quadratic"}) {
    const auto m = builtin(name);
    for (int i = 0; i < 60; ++i) {
      const double t = ut(rng), x = ux(rng);
      const Interval d = banded_domain(m, t, x);
      std::uniform_real_distribution<double> uv(d.lo, d.hi);
      const double v = uv(rng), w = uv(rng), p = up(rng);
      const auto cv = conjugate_scalar(m, t, x, v);
      REQUIRE(cv.finite());
      // lower bound, Fenchel-Young, equality at the argmax
      CHECK(cv.value >= -std::abs(m(t, x, 0.0)) - 1e-9);
      CHECK(m(t, x, p) + cv.value >= p * v - 1e-9);
      CHECK(m(t, x, cv.argmax) + cv.value == doctest::Approx(cv.argmax * v).epsilon(1e-9));
      // midpoint convexity in v
      const double mid = conjugate_scalar(m, t, x, 0.5 * (v + w)).value;
      CHECK(mid <= 0.5 * (cv.value + conjugate_scalar(m, t, x, w).value) + 1e-9);
      // outside the growth ball the conjugate is +inf
      const double out = 1.001 * conjugate_domain_bound(m, t, x);
      CHECK(conjugate_scalar(m, t, x, out).value == kInf);
      // vertical shift equivariance
      CHECK(conjugate_scalar(shifted(m, 0.7), t, x, v).value ==
            doctest::Approx(cv.value - 0.7).epsilon(1e-10));
    }
  }
}

TEST_CASE("biconjugation recovers H") {
  const auto q = builtin("quadratic");
  const double x = 0.5;
  const Interval d = banded_domain(q, 0.0, x);
  for (double p : {-1.2, -0.3, 0.0, 0.8, 1.4}) {
    double best = -kInf;
    for (double v = d.lo; v <= d.hi; v += 1e-3)
      best = std::max(best, p * v - conjugate_scalar(q, 0.0, x, v).value);
    CHECK(std::abs(best - q(0.0, x, p)) < 1e-5);
  }
}

TEST_CASE("n = 2 conjugate by coordinate refinement") {
  HamiltonianModel m;
  m.dim = 2;
  m.value = [](double, State, State p) { return 0.5 * (p[0] * p[0] + 2.0 * p[1] * p[1]); };
  m.growth = [](double) { return kInf; };
  m.lipschitz = [](double, double) { return 0.0; };
  const double x[2] = {0, 0}, v[2] = {1.0, 2.0};
  // sup = v0^2/2 + v1^2/4
  CHECK(conjugate(m, 0.0, x, v) == doctest::Approx(1.5).epsilon(1e-8));
}

TEST_CASE("non-convex model is rejected") {
  HamiltonianModel bad = builtin("zero");
  bad.value = [](double, State, State p) { return -std::abs(p[0]) + std::cos(p[0]); };
  CHECK_THROWS_AS(conjugate_scalar(bad, 0.0, 0.0, 0.5), ModelError);
  const auto rep = check_assumptions(bad, 1.0, 2.0, 200, 1);
  CHECK(!rep.warnings.empty());
  CHECK(check_assumptions(builtin("sqrt_example"), 1.0, 2.0, 2000, 1).warnings.empty());
  CHECK(check_assumptions(builtin("quadratic"), 1.0, 2.0, 2000, 1).warnings.empty());
}

TEST_CASE("epigraph slices") {
  const auto zero = builtin("zero");
  const auto s0 = epigraph_slice(zero, 0.0, 0.3, 4.0);
  REQUIRE(s0.body.size() == 2);
  CHECK(s0.body.vertices()[0].isApprox(Vec2(0, 0)));
  CHECK(s0.body.vertices()[1].isApprox(Vec2(0, 4)));

  const auto sq = builtin("sqrt_example");
  const auto s = epigraph_slice(sq, 0.0, 2.0, 10.0);
  CHECK(s.cap == 10.0);
  CHECK(s.window.hi == 3.0);
  CHECK(s.body.size() >= 720);
  // every vertex is on or above the graph and under the cap
  for (const auto& p : s.body.vertices()) {
    CHECK(p.y() <= 10.0 + 1e-12);
    CHECK(p.y() >= sq.closed_form(0.0, 2.0, p.x()) - 1e-8);
  }
  // membership agrees with the closed form on a grid away from the boundary
  for (double v = -1.6; v <= 1.6; v += 0.1) {
    const double f = sq.closed_form(0.0, 2.0, v);
    CHECK(s.body.contains(Vec2(v, f + 1e-4)));
    CHECK(!s.body.contains(Vec2(v, f - 1e-4)));
  }
  CHECK_THROWS_AS(epigraph_slice(sq, 0.0, 2.0, -1.0), GeometryError);
  CHECK(default_cap(sq, 0.0, 2.0) > 1000.0);
}

TEST_CASE("slice hausdorff gaps") {
  const auto sq = builtin("sqrt_example");
  CHECK(hausdorff_slice_gap(sq, 0.0, 1.0, 1.0, 10.0) == 0.0);
  const double g = hausdorff_slice_gap(sq, 0.0, 1.0, 1.1, 10.0);
  CHECK(g > 0.0);
  CHECK(g <= 2.0 * sq.k(0.0, 2.0) * 0.1);
  // H = x p: slices are vertical segments at v = x
  const auto lin = builtin("linear_drift", {{"b0", 0.0}, {"b1", 1.0}});
  CHECK(hausdorff_slice_gap(lin, 0.0, 0.4, 0.9, 5.0) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("model wrappers") {
  const auto sq = builtin("sqrt_example");
  const auto env = moreau_envelope(sq, 0.25);
  for (double v : {0.0, 0.5, 1.2}) {
    CHECK(conjugate_scalar(env, 0.0, 1.5, v).value ==
          doctest::Approx(env.closed_form(0.0, 1.5, v)).epsilon(1e-7));
  }
  const auto rev = time_reversed(sq, 1.0);
  CHECK(rev(0.2, 2.0, -3.0) == sq(0.8, 2.0, 3.0));
  CHECK(rev.closed_form(0.0, 2.0, -1.0) == sq.closed_form(1.0, 2.0, 1.0));
  CHECK_THROWS_AS(builtin("nope"), ConfigError);
  CHECK_THROWS_AS(builtin("quadratic", {{"bogus", 1.0}}), ConfigError);
}
