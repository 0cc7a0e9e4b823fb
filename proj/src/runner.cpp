#include "epirep/runner.hpp"

#include "epirep/errors.hpp"
#include "epirep/representation.hpp"
#include "epirep/tube.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

namespace epirep {

namespace {

double lin(double lo, double hi, int n, int i) { return n == 1 ? lo : lo + (hi - lo) * i / (n - 1); }

RepresentationOptions rep_options(const ExperimentConfig& c) {
  RepresentationOptions r;
  r.band = c.band;
  return r;
}

AuditBox audit_box(const ExperimentConfig& c) {
  AuditBox b;
  b.horizon = c.horizon;
  b.radius = c.rep_radius;
  return b;
}

AuditRecord make_record(std::string name, double bound, double observed, bool pass, std::size_t samples,
                        std::uint64_t seed, std::string note = "") {
  return {std::move(name), bound, observed, pass, samples, seed, std::move(note)};
}

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

}  // namespace

std::vector<std::string> subcommands() {
  return {"conjugate-table", "represent", "value", "stability", "invariance"};
}

ValueProblem make_problem(const ExperimentConfig& c) {
  return {builtin(c.model, c.model_params), terminal_cost(c.terminal, c.terminal_params), c.horizon};
}

std::vector<AuditRecord> conjugate_table(const ExperimentConfig& c, std::ostream* csv) {
  const auto model = builtin(c.model, c.model_params);
  std::optional<CsvWriter> out;
  if (csv) out.emplace(*csv, "conjugate-table/1",
                       std::vector<std::string>{"t", "x", "v", "conjugate", "closed_form", "delta"});
  double worst = 0.0, leaks = 0.0;
  std::size_t compared = 0, outside = 0;
  for (double x : c.conj_x) {
    const Interval d = banded_domain(model, c.conj_t, x, c.band);
    for (int i = 0; i < c.conj_v_points; ++i) {
      const double v = lin(d.lo, d.hi, c.conj_v_points, i);
      const double h = conjugate_scalar(model, c.conj_t, x, v).value;
      const double ref = model.has_closed_form() ? model.closed_form(c.conj_t, x, v) : nan();
      const double delta = std::abs(h - ref);
      if (model.has_closed_form()) {
        worst = std::max(worst, delta);
        ++compared;
      }
      if (out) *out << c.conj_t << x << v << h << ref << (model.has_closed_form() ? delta : nan()), out->end_row();
    }
    // just past the closed domain on both sides
    const Interval full = conjugate_domain(model, c.conj_t, x);
    const double gap = 1e-2 * (1.0 + full.width());
    for (double v : {full.lo - gap, full.hi + gap}) {
      ++outside;
      if (conjugate_scalar(model, c.conj_t, x, v).finite()) ++leaks;
    }
  }
  std::vector<AuditRecord> recs;
  if (model.has_closed_form())
    recs.push_back(make_record("conjugate_oracle:" + model.name, c.tol_conjugate, worst, worst <= c.tol_conjugate,
                               compared, c.seed, "max |H* - closed form| on the banded domain"));
  recs.push_back(make_record("conjugate_domain:" + model.name, 0.0, leaks, leaks == 0.0, outside, c.seed,
                             "finite values just outside the closed domain"));
  return recs;
}

std::vector<AuditRecord> represent_audits(const ExperimentConfig& c, std::ostream* csv) {
  const auto model = builtin(c.model, c.model_params);
  const auto opts = rep_options(c);
  const AuditBox box = audit_box(c);
  const int n = c.rep_sweep_points;
  if (csv) {
    const double half =
        3.0 * (default_cap(model, 0.0, c.rep_radius) + conjugate_domain_bound(model, 0.0, c.rep_radius));
    CsvWriter out(*csv, "represent/1",
                  {"t", "x", "a_v", "a_l", "f", "l", "distance", "phi_diameter", "nodes", "fixed_point"});
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int m = 0; m < n; ++m) {
            const double t = lin(0.0, c.horizon, n, i), x = lin(-c.rep_radius, c.rep_radius, n, j);
            const Vec2 a(lin(-half, half, n, k), lin(-half, half, n, m));
            const auto e = parameterize(model, t, x, a, opts);
            out << t << x << a.x() << a.y() << e.f << e.l << e.distance << e.phi_diameter
                << static_cast<long long>(e.nodes) << static_cast<long long>(e.fixed_point);
            out.end_row();
          }
  }
  std::vector<AuditRecord> recs;
  // (A3) split over the sweep's x points at mid-horizon
  AuditRecord extra{"extra_property:" + model.name, 1e-6, 0.0, true, 0, c.seed, ""};
  for (int j = 0; j < n; ++j) {
    const std::size_t share = c.rep_extra_samples / n + (j < c.rep_extra_samples % n ? 1 : 0);
    if (share == 0) continue;
    const auto r = extra_property_audit(model, 0.5 * c.horizon, lin(-c.rep_radius, c.rep_radius, n, j), share,
                                        c.seed + 100 + j, 5.0, opts);
    extra.observed = std::max(extra.observed, r.observed);
    extra.pass = extra.pass && r.pass;
    extra.samples += r.samples;
  }
  extra.note = "max |e(a) - a| over epigraph points";
  recs.push_back(extra);
  recs.push_back(growth_audit(model, box, c.rep_growth_samples, c.seed + 1, opts));
  recs.push_back(lipschitz_audit(model, box, c.rep_lipschitz_pairs, c.seed + 2, opts));

  std::vector<double> ps;
  for (int k = 0; k < c.rep_residual_points; ++k) ps.push_back(lin(-c.rep_p_box, c.rep_p_box, c.rep_residual_points, k));
  double worst = 0.0;
  for (int j = 0; j < c.rep_residual_points; ++j) {
    const double x = lin(-c.rep_radius, c.rep_radius, c.rep_residual_points, j);
    for (double r : representation_residuals(model, 0.0, x, ps, c.rep_residual_v_step, opts)) worst = std::max(worst, r);
  }
  recs.push_back(make_record("representation_residual:" + model.name, c.tol_residual, worst, worst <= c.tol_residual,
                             static_cast<std::size_t>(c.rep_residual_points) * c.rep_residual_points, c.seed,
                             "v step " + format_double(c.rep_residual_v_step)));
  return recs;
}

std::vector<AuditRecord> value_audits(const ExperimentConfig& c, std::ostream* csv) {
  const auto problem = make_problem(c);
  SolverOptions so;
  so.N = c.solver_N;
  so.starts = c.starts;
  so.seed = c.seed;
  so.band = c.band;
  so.stage.rep = rep_options(c);
  HJGrid fd;
  fd.N = c.fd_N;
  fd.h_x = c.fd_h_x;
  fd.x_lo = c.fd_x_lo;
  fd.x_hi = c.fd_x_hi;
  const InstanceGrid grid{c.inst_t_lo, c.inst_t_hi, c.inst_t_points, c.inst_x_lo, c.inst_x_hi, c.inst_x_points};
  EqualityTolerances tol;
  tol.relative = c.tol_relative;
  tol.fd = c.tol_fd;
  const auto eq = equality_audit(problem, grid, so, fd, tol, c.value_control);
  if (csv) {
    CsvWriter out(*csv, "value/1", {"t0", "x0", "v_var", "v_ctrl", "v_fd", "sup_control", "gap_ctrl", "gap_fd"});
    for (const auto& r : eq.rows) {
      out << r.t0 << r.x0 << r.v_var << r.v_ctrl << r.v_fd << r.sup_control << r.gap_ctrl << r.gap_fd;
      out.end_row();
    }
  }
  std::vector<AuditRecord> recs;
  if (c.value_control) recs.push_back(eq.control);
  recs.push_back(eq.fd);
  recs.push_back(eq.lower_bound);
  if (c.value_regularity) recs.push_back(regularity_audit(problem, c.regularity_M, c.regularity_pairs, c.seed + 3, fd));
  if (c.boundedness_points > 0)
    recs.push_back(boundedness_audit(problem, c.regularity_M, c.boundedness_points, so));
  return recs;
}

std::vector<AuditRecord> stability_audits(const ExperimentConfig& c, std::ostream* csv) {
  const auto problem = make_problem(c);
  const auto& model = problem.model;
  const auto opts = rep_options(c);
  CompactGrid cg;
  cg.horizon = c.horizon;
  cg.radius = c.rep_radius;
  cg.t_points = c.stab_t_points;
  cg.x_points = c.stab_x_points;
  cg.a_points = c.stab_a_points;
  cg.a_box = c.stab_a_box;
  HJGrid fd;
  fd.N = c.fd_N;
  fd.h_x = c.stab_h_x;
  fd.x_lo = c.fd_x_lo;
  fd.x_hi = c.fd_x_hi;
  std::optional<CsvWriter> out;
  if (csv) out.emplace(*csv, "stability/1",
                       std::vector<std::string>{"sequence", "index", "hamiltonian_gap", "representation_gap", "value_gap"});

  std::vector<AuditRecord> recs;
  // constant shifts H + 1/i: V_i = V - (T - t)/i and e shifts down by 1/i
  const ValueField base = solve_hj_fd(problem, fd);
  double worst_shift = 0.0, worst_equiv = 0.0;
  std::vector<ValueProblem> seq;
  std::vector<double> rep_gaps;
  for (double i : c.shifts) {
    const double delta = 1.0 / i;
    const ValueProblem p{shifted(model, delta), problem.g, c.horizon};
    const ValueField f = solve_hj_fd(p, fd);
    double gap = 0.0;
    for (int j = 0; j <= f.N; ++j)
      for (int k = 0; k < f.nx; ++k) {
        gap = std::max(gap, std::abs(f.at(j, k) - base.at(j, k)));
        worst_shift = std::max(worst_shift, std::abs(f.at(j, k) - (base.at(j, k) - (c.horizon - f.time(j)) * delta)));
      }
    worst_equiv = std::max(worst_equiv, translation_equivariance_gap(model, delta, cg, opts));
    const auto sg = stability_gap(p.model, model, cg, opts);
    rep_gaps.push_back(sg.representation);
    if (out) *out << std::string("shift") << i << sg.hamiltonian << sg.representation << gap, out->end_row();
    seq.push_back(p);
  }
  recs.push_back(make_record("shift_identity:" + model.name, c.tol_shift, worst_shift, worst_shift <= c.tol_shift,
                             c.shifts.size(), c.seed, "sup |V_i - (V - (T - t)/i)| on the fd grid"));
  recs.push_back(make_record("translation_equivariance:" + model.name, c.tol_equivariance, worst_equiv,
                             worst_equiv <= c.tol_equivariance, c.shifts.size(), c.seed,
                             "sup |e_(H+d)(a - (0,d)) - (e_H(a) - (0,d))|"));

  if (!c.mollify.empty()) {
    // Moreau envelopes with lambda = 1/i approach H from below
    std::vector<ValueProblem> moll;
    double rising = 0.0, prev_rep = kInf;
    for (double i : c.mollify) {
      const ValueProblem p{moreau_envelope(model, 1.0 / i), problem.g, c.horizon};
      const auto sg = stability_gap(p.model, model, cg, opts);
      rising = std::max(rising, sg.representation - prev_rep);
      prev_rep = sg.representation;
      moll.push_back(p);
      if (out) *out << std::string("moreau") << i << sg.hamiltonian << sg.representation << nan(), out->end_row();
    }
    const auto vs = value_stability_audit(moll, problem, fd, kInf);
    auto r = vs.record;
    r.name = "value_stability:" + model.name;
    r.seed = c.seed;
    recs.push_back(r);
    recs.push_back(make_record("representation_stability:" + model.name, 1e-6, std::max(0.0, rising),
                               rising <= 1e-6, c.mollify.size(), c.seed,
                               "largest increase of sup |e_i - e| along the Moreau sequence"));
    if (csv) {
      // value gaps of the Moreau sequence, appended as their own rows
      for (std::size_t k = 0; k < vs.gaps.size(); ++k)
        *out << std::string("moreau_value") << c.mollify[k] << nan() << nan() << vs.gaps[k], out->end_row();
    }
  }
  return recs;
}

std::vector<AuditRecord> invariance_audits(const ExperimentConfig& c, std::ostream* csv, std::string* report) {
  const auto problem = make_problem(c);
  HJGrid fd;
  fd.N = c.inv_rows;
  fd.h_x = c.inv_h_x;
  fd.x_lo = -c.inv_y_range;
  fd.x_hi = c.inv_y_range;
  const Tube tube(solve_hj_fd(problem, fd));
  // converged: the same solve at twice the step agrees on the window
  HJGrid coarse = fd;
  coarse.h_x = 2.0 * fd.h_x;
  coarse.N = std::max(1, fd.N / 2);
  const ValueField check = solve_hj_fd(problem, coarse);
  double drift = 0.0;
  const int probes = 41;
  for (int j = 0; j <= coarse.N; ++j)
    for (int k = 0; k < probes; ++k) {
      const double t = check.time(j), x = lin(-c.inv_y_range, c.inv_y_range, probes, k);
      drift = std::max(drift, std::abs(check(t, x) - tube.field()(t, x)));
    }
  std::vector<AuditRecord> recs;
  recs.push_back(make_record("field_convergence:" + problem.model.name, c.tol_converged, drift,
                             drift <= c.tol_converged, static_cast<std::size_t>(coarse.N + 1) * probes, c.seed,
                             "sup |V_h - V_2h| on the start window"));

  InvarianceOptions io;
  io.trajectories = c.inv_trajectories;
  io.N = c.inv_N;
  io.y_range = c.inv_y_range;
  io.eps_inv = c.tol_invariance;
  io.stage.rep = rep_options(c);
  const auto inv = invariance_audit(problem, tube, c.seed + 4, io);
  auto r = inv.record;
  r.name = "invariance:" + problem.model.name;
  recs.push_back(r);
  if (report) {
    const auto num = [](double v) -> nlohmann::json { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(format_double(v)); };
    nlohmann::json j;
    j["trajectories"] = inv.trajectories;
    j["min_margin"] = num(inv.min_margin);
    j["worst_decrease"] = num(inv.worst_decrease);
    j["failures"] = inv.failures;
    j["decreases"] = inv.decreases;
    j["seed"] = inv.seed;
    j["config_hash"] = c.hash();
    *report = j.dump(2) + "\n";
  }

  // violation witness: the optimal direction with its cost lowered by 1/2
  const auto dyn = time_reversed(problem.model, c.horizon);
  std::optional<CsvWriter> out;
  if (csv) out.emplace(*csv, "invariance/1",
                       std::vector<std::string>{"s", "y", "u", "v", "eta", "min_ratio", "threshold"});
  double weakest = kInf, threshold = 0.0;
  std::size_t points = 0;
  const int m = c.inv_probe_points;
  for (int i = 0; i < m; ++i)
    for (int k = 0; k < m; ++k) {
      const double s = lin(0.0, 0.75 * c.horizon, m, i), y = lin(-c.inv_y_range, c.inv_y_range, m, k);
      const double u = tube.lower(s, y);
      const std::vector<Vec2> dirs{optimal_direction(dyn, tube, s, y, c.band) - Vec2(0.0, 0.5)};
      const auto pr = tangency_probe(tube, s, y, u, dirs);
      threshold = pr.threshold;
      weakest = std::min(weakest, pr.worst / pr.threshold);
      ++points;
      if (out) *out << s << y << u << dirs[0].x() << dirs[0].y() << pr.worst << pr.threshold, out->end_row();
    }
  recs.push_back(make_record("tangency_witness:" + problem.model.name, 10.0, weakest, weakest >= 10.0, points,
                             c.seed,
                             "min over boundary points of (probe ratio / threshold) for the optimal v and eta = H*(v) - 1/2; "
                             "threshold " + format_double(threshold) + "; passes when >= bound"));
  return recs;
}

RunResult run(std::string_view sub, const ExperimentConfig& config, std::ostream& log) {
  config.validate();
  const auto names = subcommands();
  if (std::find(names.begin(), names.end(), sub) == names.end())
    throw ConfigError("unknown subcommand '" + std::string(sub) + "'");
  namespace fs = std::filesystem;
  const fs::path dir(config.output);
  fs::create_directories(dir);
  const std::string stem(sub);

  std::ostringstream csv;
  std::string report;
  RunResult res;
  if (sub == "conjugate-table") res.audits = conjugate_table(config, &csv);
  else if (sub == "represent") res.audits = represent_audits(config, &csv);
  else if (sub == "value") res.audits = value_audits(config, &csv);
  else if (sub == "stability") res.audits = stability_audits(config, &csv);
  else res.audits = invariance_audits(config, &csv, &report);

  auto write = [&](const std::string& name, const std::string& text) {
    const fs::path p = dir / name;
    std::ofstream f(p, std::ios::binary);
    if (!f) throw Error("cannot write '" + p.string() + "'");
    f << text;
    res.artifacts.push_back(p.string());
  };
  const std::string hash = config.hash();
  write("config.ini", config.canonical());
  write(stem + ".csv", csv.str());
  write(stem + ".json", to_json(res.audits, hash) + "\n");
  if (!report.empty()) write(stem + "_report.json", report);

  for (const auto& r : res.audits) {
    log << (r.pass ? "pass " : "FAIL ") << r.name << "  observed " << format_double(r.observed) << "  bound "
        << format_double(r.bound) << "\n";
    if (!r.pass) {
      res.exit_code = kExitAuditFailure;
      log << to_json(r, hash) << "\n";
    }
  }
  return res;
}

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Epigraph representations of convex Hamiltonians: audits and tables"};
  app.require_subcommand(1);
  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  for (const auto& name : subcommands()) {
    auto* s = app.add_subcommand(name);
    s->add_option("--config", config_path, "INI experiment file")->required();
    s->add_option("--out", out_dir, "output directory (overrides [experiment] output)");
    s->add_option("--seed", seed, "seed (overrides [experiment] seed)");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    (e.get_exit_code() == 0 ? out : err) << (e.get_exit_code() == 0 ? app.help() : std::string(e.what()) + "\n");
    return e.get_exit_code() == 0 ? kExitPass : kExitUsage;
  }
  const std::string sub = app.get_subcommands().front()->get_name();
  try {
    ExperimentConfig config = load_config(config_path);
    if (!out_dir.empty()) config.output = out_dir;
    if (app.get_subcommands().front()->count("--seed")) config.seed = seed;
    const auto res = run(sub, config, out);
    return res.exit_code;
  } catch (const ConfigError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitAuditFailure;
  }
}

}  // namespace epirep
