// One line per acceptance criterion; exit status 0 iff all pass.
#include "epirep/convex_core.hpp"
#include "epirep/errors.hpp"
#include "epirep/representation.hpp"
#include "epirep/runner.hpp"
#include "epirep/tube.hpp"
#include "epirep/value_function.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

using namespace epirep;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

bool all_pass(const std::vector<AuditRecord>& recs, std::string& detail) {
  bool ok = true;
  for (const auto& r : recs) {
    detail += (detail.empty() ? "" : "; ") + r.name + " " + num(r.observed) + (r.pass ? " ok" : " FAILED") +
              " (bound " + num(r.bound) + ")";
    ok = ok && r.pass;
  }
  return ok;
}

ExperimentConfig base_config(const std::string& model, const std::string& terminal) {
  ExperimentConfig c;
  c.model = model;
  c.terminal = terminal;
  c.seed = 2024;
  return c;
}

Outcome conjugate_oracle() {
  auto c = base_config("sqrt_example", "abs");
  c.conj_x = {-2.0, -1.0, -0.5, 0.5, 1.0, 2.0};
  c.conj_v_points = 201;
  const auto recs = conjugate_table(c, nullptr);
  Outcome o;
  o.pass = all_pass(recs, o.detail);
  // the closed domain endpoints and points well outside are +inf as well
  const auto model = builtin("sqrt_example");
  int finite = 0, probed = 0;
  for (double x : c.conj_x)
    for (double k : {-3.0, -1.5, -1.0, 1.0, 1.5, 3.0}) {
      ++probed;
      if (conjugate_scalar(model, 0.0, x, k * std::abs(x)).finite()) ++finite;
    }
  o.pass = o.pass && finite == 0;
  o.detail += "; +inf at " + std::to_string(probed - finite) + "/" + std::to_string(probed) +
              " points with |v| >= |x|";
  return o;
}

Outcome steiner_primitives() {
  Outcome o;
  Vec c(2);
  c << 1.0, -2.0;
  const double ball = (steiner_point(Ball{c, 3.0}) - c).norm();
  const double rect = (steiner_point(Polygon::box(-1.0, 0.0, 3.0, 1.0)) - Vec2(1.0, 0.5)).norm();
  const double tri =
      (steiner_point(Polygon::hull({{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}})) - Vec2(0.375, 0.375)).norm();

  std::mt19937_64 rng(5);
  std::normal_distribution<double> spread(0.0, 1.0), jitter(0.0, 0.05);
  std::uniform_real_distribution<double> u(-2.0, 2.0), anchor(-6.0, 6.0);
  double worst_s = 0.0, worst_p = 0.0;
  int used = 0;
  while (used < 1000) {
    const Vec2 centre(u(rng), u(rng));
    std::vector<Vec2> pts, moved;
    for (int i = 0; i < 12; ++i) pts.emplace_back(centre + Vec2(spread(rng), spread(rng)));
    const Polygon k = Polygon::hull(pts);
    for (const auto& v : k.vertices()) moved.emplace_back(v + Vec2(jitter(rng), jitter(rng)));
    const Polygon d = Polygon::hull(moved);
    const double h = hausdorff(k, d);
    if (h < 1e-3) continue;
    ++used;
    worst_s = std::max(worst_s, (steiner_point(k) - steiner_point(d)).norm() / h);
    const Vec2 x(anchor(rng), anchor(rng));
    const Vec2 y = x + Vec2(jitter(rng), jitter(rng));
    worst_p = std::max(worst_p, hausdorff(clamp_intersection(k, x), clamp_intersection(d, y)) / (h + (x - y).norm()));
  }
  o.pass = ball <= 1e-8 && rect <= 1e-8 && tri <= 1e-5 && worst_s <= 2.0 * 1.05 && worst_p <= 5.0 * 1.05;
  o.detail = "ball " + num(ball) + ", rectangle " + num(rect) + ", triangle " + num(tri) +
             "; Steiner ratio " + num(worst_s) + " <= 2.1, clamp ratio " + num(worst_p) + " <= 5.25 over " +
             std::to_string(used) + " pairs";
  return o;
}

Outcome representation_audits() {
  Outcome o;
  std::vector<AuditRecord> recs;
  for (const auto& [m, g] : {std::pair{"sqrt_example", "abs"}, std::pair{"quadratic", "quadratic"}}) {
    auto c = base_config(m, g);
    auto r = represent_audits(c, nullptr);
    recs.insert(recs.end(), r.begin(), r.end());
  }
  o.pass = all_pass(recs, o.detail);
  return o;
}

ValueProblem quadratic() { return {builtin("quadratic"), terminal_cost("quadratic"), 1.0}; }
ValueProblem sqrt_problem() { return {builtin("sqrt_example"), terminal_cost("abs"), 1.0}; }

Outcome value_equality() {
  Outcome o;
  SolverOptions so;
  so.seed = 2024;
  HJGrid fd;  // N = 64, h_x = 1/64 on [-2, 2]
  const auto eq = equality_audit(quadratic(), InstanceGrid{}, so, fd);
  double v_var = 0.0, v_ctrl = 0.0;
  for (const auto& r : eq.rows)
    if (r.t0 == 0.0 && r.x0 == 1.0) v_var = r.v_var, v_ctrl = r.v_ctrl;
  const bool window = v_var >= 0.245 && v_var <= 0.255 && v_ctrl >= 0.245 && v_ctrl <= 0.255;
  o.pass = all_pass({eq.control, eq.fd}, o.detail) && window;
  o.detail = "V_var(0,1) " + num(v_var) + ", V_ctrl(0,1) " + num(v_ctrl) + " in [0.245, 0.255]; " + o.detail +
             " over " + std::to_string(eq.rows.size()) + " instances";
  return o;
}

Outcome regularity() {
  Outcome o;
  HJGrid fd;
  std::vector<AuditRecord> recs{regularity_audit(quadratic(), 1.0, 1000, 2024, fd),
                                regularity_audit(sqrt_problem(), 1.0, 1000, 2025, fd)};
  o.pass = all_pass(recs, o.detail);
  return o;
}

Outcome boundedness() {
  Outcome o;
  SolverOptions q;
  q.seed = 2024;
  SolverOptions s;
  s.seed = 2024;
  s.N = 32;
  s.starts = 2;
  std::vector<AuditRecord> recs{boundedness_audit(quadratic(), 1.0, 9, q),
                                boundedness_audit(sqrt_problem(), 1.0, 5, s)};
  o.pass = all_pass(recs, o.detail);
  return o;
}

Outcome stability() {
  Outcome o;
  std::vector<AuditRecord> recs;
  for (const auto& [m, g] : {std::pair{"sqrt_example", "abs"}, std::pair{"quadratic", "quadratic"}}) {
    auto c = base_config(m, g);
    c.mollify.clear();
    auto r = stability_audits(c, nullptr);
    recs.insert(recs.end(), r.begin(), r.end());
  }
  // the same identity through the variational solver at a few starts
  double worst = 0.0;
  SolverOptions so;
  so.starts = 4;
  for (const auto& base : {quadratic(), sqrt_problem()})
    for (double x0 : {-1.0, 0.5, 1.5}) {
      const double v = solve_variational(base, 0.25, x0, so).value;
      for (double i : {1.0, 2.0, 4.0, 8.0}) {
        const ValueProblem p{shifted(base.model, 1.0 / i), base.g, 1.0};
        worst = std::max(worst, std::abs(solve_variational(p, 0.25, x0, so).value - (v - 0.75 / i)));
      }
    }
  recs.push_back({"shift_identity_variational", 1e-3, worst, worst <= 1e-3, 24, 0, ""});
  o.pass = all_pass(recs, o.detail);
  return o;
}

Outcome invariance() {
  Outcome o;
  std::vector<AuditRecord> recs;
  for (const auto& [m, g] : {std::pair{"sqrt_example", "abs"}, std::pair{"quadratic", "quadratic"}}) {
    auto c = base_config(m, g);
    auto r = invariance_audits(c, nullptr);
    recs.insert(recs.end(), r.begin(), r.end());
  }
  o.pass = all_pass(recs, o.detail);
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  Outcome o;
  auto c = base_config("quadratic", "quadratic");
  c.solver_N = 16;
  c.starts = 2;
  c.inst_t_points = 2;
  c.inst_x_points = 3;
  c.fd_h_x = 1.0 / 32.0;
  c.rep_lipschitz_pairs = 200;
  c.rep_extra_samples = c.rep_growth_samples = 200;
  c.rep_residual_points = 10;
  c.regularity_pairs = 200;
  c.shifts = {1.0, 2.0};
  c.mollify = {1.0, 2.0};
  c.stab_t_points = 2;
  c.stab_x_points = 3;
  c.stab_a_points = 3;
  c.inv_trajectories = 20;
  const fs::path root = fs::temp_directory_path() / "epirep_acceptance";
  fs::remove_all(root);
  std::ostringstream log;
  for (const char* run_name : {"a", "b"}) {
    c.output = (root / run_name).string();
    for (const auto& sub : subcommands()) run(sub, c, log);
  }
  std::size_t same = 0, total = 0;
  for (const auto& entry : fs::directory_iterator(root / "a")) {
    ++total;
    if (slurp(entry.path()) == slurp(root / "b" / entry.path().filename())) ++same;
  }
  o.pass = total == 12 && same == total;
  o.detail = std::to_string(same) + "/" + std::to_string(total) + " artifacts byte-identical across two runs of " +
             std::to_string(subcommands().size()) + " subcommands";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> check;
    double budget;  // seconds; <= 0 means none
  };
  const std::vector<Criterion> criteria{
      {1, "conjugate oracle", conjugate_oracle, 5.0},
      {2, "Steiner primitives", steiner_primitives, 0.0},
      {3, "representation audits", representation_audits, 120.0},
      {4, "value equality", value_equality, 0.0},
      {5, "regularity", regularity, 0.0},
      {6, "control boundedness", boundedness, 0.0},
      {7, "stability", stability, 0.0},
      {8, "invariance", invariance, 0.0},
      {9, "determinism", determinism, 0.0},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = c.budget <= 0.0 || secs < c.budget;
    const bool pass = o.pass && in_time;
    if (!pass) ++failed;
    std::cout << (pass ? "PASS" : "FAIL") << "  " << c.id << ". " << c.name << ": " << o.detail << "; " << num(secs)
              << " s" << (c.budget > 0.0 ? " (budget " + num(c.budget) + " s)" : "") << std::endl;
  }
  std::cout << (failed == 0 ? "all 9 criteria pass" : std::to_string(failed) + " of 9 criteria fail") << std::endl;
  return failed == 0 ? 0 : 1;
}
