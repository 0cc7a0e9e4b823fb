#include <doctest.h>

#include "epirep/errors.hpp"
#include "epirep/representation.hpp"

#include <chrono>
#include <cmath>
#include <random>

using namespace epirep;

TEST_CASE("parameterize examples") {
  const auto sq = builtin("sqrt_example");
  // (1, 1) lies on the graph at x = 2
  auto e = parameterize(sq, 0.0, 2.0, Vec2(1.0, 1.0));
  CHECK(e.fixed_point);
  CHECK(e.f == 1.0);
  CHECK(e.l == 1.0);

  const auto zero = builtin("zero");
  e = parameterize(zero, 0.0, 0.7, Vec2(0.0, -2.0));
  CHECK(e.distance == doctest::Approx(2.0));
  CHECK(std::abs(e.f) < 1e-12);
  CHECK(e.l == doctest::Approx(1.0).epsilon(1e-12));

  e = parameterize(zero, 0.0, 0.7, Vec2(0.0, 0.0));
  CHECK(e.e() == Vec2(0.0, 0.0));
}

// H = 0: E = {0} x [0, inf). For a = (s, h) the clamp is the segment
// {0} x [max(0, h - sqrt(4d^2 - s^2)), h + sqrt(4d^2 - s^2)] with d the
// distance to the ray; e is its midpoint.
TEST_CASE("zero model against the segment-midpoint oracle") {
  const auto zero = builtin("zero");
  auto oracle = [](const Vec2& a) {
    const double s = a.x(), h = a.y();
    const double d = h >= 0.0 ? std::abs(s) : std::hypot(s, h);
    if (d == 0.0) return a;
    const double half = std::sqrt(4.0 * d * d - s * s);
    const double lo = std::max(0.0, h - half), hi = h + half;
    return Vec2(0.0, 0.5 * (lo + hi));
  };
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  double worst_ratio = 0.0;
  for (int i = 0; i < 300; ++i) {
    const Vec2 a(u(rng), u(rng)), b(u(rng), u(rng));
    const Vec2 ea = parameterize(zero, 0.0, 0.0, a).e();
    CHECK((ea - oracle(a)).norm() < 1e-12 * (1.0 + a.norm()));
    const Vec2 eb = parameterize(zero, 0.0, 0.0, b).e();
    worst_ratio = std::max(worst_ratio, (ea - eb).norm() / (a - b).norm());
  }
  CHECK(worst_ratio <= 5.0);
}

TEST_CASE("selection invariants") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> ux(-2.0, 2.0), ua(-8.0, 8.0);
  for (const char* name : {"sqrt_example", "quadratic"}) {
    const auto m = builtin(name);
    for (int i = 0; i < 150; ++i) {
      const double x = ux(rng);
      const Vec2 a(ua(rng), ua(rng));
      const auto out = parameterize(m, 0.0, x, a);
      const ConjugateProfile prof(m, 0.0, x);
      // f in the domain and (f, l) in E, which is the support bound H*(f) <= l
      CHECK(prof.domain().contains(out.f));
      CHECK(prof(out.f) <= out.l + 1e-9 * (1.0 + std::abs(out.l)));
      CHECK(growth_violation(m, 0.0, x, a, out) <= 0.0);
      // idempotent: e is in E, hence a fixed point
      const auto again = parameterize(m, 0.0, x, out.e());
      CHECK((again.e() - out.e()).norm() <= 1e-8 * (1.0 + out.e().norm()));
      // the clamp radius bounds how far e can sit from a
      CHECK((out.e() - a).norm() <= 3.0 * out.distance + 1e-9);
    }
  }
}

TEST_CASE("numerical and closed-form conjugate routes agree") {
  const auto sq = builtin("sqrt_example");
  RepresentationOptions cf;
  cf.closed_form = true;
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> ux(-2.0, 2.0), ua(-4.0, 4.0);
  for (int i = 0; i < 100; ++i) {
    const double x = ux(rng);
    const Vec2 a(ua(rng), ua(rng));
    const Vec2 e1 = parameterize(sq, 0.0, x, a).e();
    const Vec2 e2 = parameterize(sq, 0.0, x, a, cf).e();
    CHECK((e1 - e2).norm() < 1e-5 * (1.0 + a.norm()));
  }
}

TEST_CASE("representation residual examples") {
  const auto sq = builtin("sqrt_example");
  CHECK(sq(0.0, 2.0, 1.0) == doctest::Approx(std::pow(std::sqrt(2.0) - 1.0, 2)));
  CHECK(representation_residual(sq, 0.0, 2.0, 1.0, 1e-3) <= 1e-3);
  CHECK(representation_residual(builtin("zero"), 0.0, 1.0, 3.0, 1e-3) == 0.0);
  // quadratic with p = 2: sup_v 2v - v^2/2 = 2, v = 2 is inside the domain at x = 2
  CHECK(representation_residual(builtin("quadratic"), 0.0, 2.0, 2.0, 1e-3) <= 1e-6);
  // refining the grid does not make it worse
  const double coarse = representation_residual(sq, 0.0, 1.3, 0.9, 1e-2);
  const double fine = representation_residual(sq, 0.0, 1.3, 0.9, 1e-3);
  CHECK(fine <= coarse + 1e-12);
}

TEST_CASE("vertical translation equivariance") {
  CompactGrid g;
  g.t_points = 1;
  g.x_points = 5;
  g.a_points = 7;
  CHECK(translation_equivariance_gap(builtin("sqrt_example"), 0.37, g) <= 1e-6);
  CHECK(translation_equivariance_gap(builtin("quadratic"), -1.5, g) <= 1e-6);
}

TEST_CASE("stability gaps") {
  CompactGrid g;
  g.t_points = 1;
  g.x_points = 5;
  g.a_points = 5;
  const auto sq = builtin("sqrt_example");
  CHECK(stability_gap(sq, sq, g).representation == 0.0);
  double prev = kInf;
  for (int i : {1, 2, 4, 8, 16}) {
    const auto gap = stability_gap(sq, shifted(sq, 1.0 / i), g);
    CHECK(gap.hamiltonian == doctest::Approx(1.0 / i));
    CHECK(gap.representation < prev);
    prev = gap.representation;
  }
}

TEST_CASE("small audits") {
  AuditBox box;
  for (const char* name : {"sqrt_example", "quadratic"}) {
    const auto m = builtin(name);
    const auto t0 = std::chrono::steady_clock::now();
    const auto l = lipschitz_audit(m, box, 500, 42);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    MESSAGE(std::string(name) << " A1 ratio " << l.observed << " over " << l.samples << " pairs in " << secs << " s");
    CHECK(l.pass);
    const auto g = growth_audit(m, box, 300, 43);
    CHECK(g.pass);
    const auto x = extra_property_audit(m, 0.3, -1.2, 300, 44);
    CHECK(x.pass);
    CHECK(x.observed <= 1e-6);
  }
}
