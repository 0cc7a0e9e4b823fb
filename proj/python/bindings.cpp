#include "epirep/errors.hpp"
#include "epirep/representation.hpp"
#include "epirep/runner.hpp"
#include "epirep/value_function.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace epirep;

namespace {

py::dict audit_dict(const AuditRecord& r) {
  py::dict d;
  d["name"] = r.name;
  d["bound"] = r.bound;
  d["observed"] = r.observed;
  d["pass"] = r.pass;
  d["samples"] = r.samples;
  d["seed"] = r.seed;
  d["note"] = r.note;
  return d;
}

double value(const std::string& model, const std::string& terminal, double t0, double x0,
             const std::string& method, double horizon, int N, int starts, const ModelParams& params,
             const ModelParams& terminal_params) {
  const ValueProblem p{builtin(model, params), terminal_cost(terminal, terminal_params), horizon};
  SolverOptions o;
  o.N = N;
  o.starts = starts;
  if (method == "variational") return solve_variational(p, t0, x0, o).value;
  if (method == "control") return solve_control(p, t0, x0, o).value;
  if (method == "fd") {
    HJGrid g;
    g.N = N;
    g.x_lo = std::min(-2.0, x0);
    g.x_hi = std::max(2.0, x0);
    return solve_hj_fd(p, g)(t0, x0);
  }
  throw ConfigError("unknown method '" + method + "' (variational, control, fd)");
}

}  // namespace

PYBIND11_MODULE(_epirep, m) {
  m.doc() = "Epigraph representations of convex Hamiltonians";
  auto base = py::register_exception<Error>(m, "EpirepError", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<ModelError>(m, "ModelError", base.ptr());
  py::register_exception<GeometryError>(m, "GeometryError", base.ptr());
  py::register_exception<NumericalError>(m, "NumericalError", base.ptr());

  m.def("model_names", &builtin_names);
  m.def("terminal_names", &terminal_cost_names);
  m.def("subcommands", &subcommands);
  m.def(
      "hamiltonian",
      [](const std::string& name, double t, double x, double p, const ModelParams& params) {
        return builtin(name, params)(t, x, p);
      },
      py::arg("name"), py::arg("t"), py::arg("x"), py::arg("p"), py::arg("params") = ModelParams{});
  m.def(
      "conjugate",
      [](const std::string& name, double t, double x, double v, const ModelParams& params) {
        return conjugate_scalar(builtin(name, params), t, x, v).value;
      },
      py::arg("name"), py::arg("t"), py::arg("x"), py::arg("v"), py::arg("params") = ModelParams{});
  m.def(
      "closed_form_conjugate",
      [](const std::string& name, double t, double x, double v, const ModelParams& params) -> py::object {
        const auto model = builtin(name, params);
        if (!model.has_closed_form()) return py::none();
        return py::float_(model.closed_form(t, x, v));
      },
      py::arg("name"), py::arg("t"), py::arg("x"), py::arg("v"), py::arg("params") = ModelParams{});
  m.def(
      "parameterize",
      [](const std::string& name, double t, double x, double a_v, double a_l, const ModelParams& params) {
        const auto e = parameterize(builtin(name, params), t, x, Vec2(a_v, a_l));
        py::dict d;
        d["f"] = e.f;
        d["l"] = e.l;
        d["distance"] = e.distance;
        d["phi_diameter"] = e.phi_diameter;
        d["nodes"] = e.nodes;
        d["fixed_point"] = e.fixed_point;
        return d;
      },
      py::arg("name"), py::arg("t"), py::arg("x"), py::arg("a_v"), py::arg("a_l"),
      py::arg("params") = ModelParams{});
  m.def(
      "steiner_point",
      [](const std::vector<std::pair<double, double>>& points) {
        std::vector<Vec2> pts;
        for (const auto& [a, b] : points) pts.emplace_back(a, b);
        const Vec2 s = steiner_point(Polygon::hull(std::move(pts)));
        return std::make_pair(s.x(), s.y());
      },
      py::arg("points"), "Steiner point of the convex hull of planar points.");
  m.def("value", &value, py::arg("model"), py::arg("terminal"), py::arg("t0"), py::arg("x0"),
        py::arg("method") = "variational", py::arg("horizon") = 1.0, py::arg("N") = 64, py::arg("starts") = 4,
        py::arg("params") = ModelParams{}, py::arg("terminal_params") = ModelParams{});
  m.def(
      "config_hash", [](const std::string& path) { return load_config(path).hash(); }, py::arg("path"));
  m.def(
      "run",
      [](const std::string& sub, const std::string& config_path, const std::optional<std::string>& out,
         const std::optional<std::uint64_t>& seed) {
        auto config = load_config(config_path);
        if (out) config.output = *out;
        if (seed) config.seed = *seed;
        std::ostringstream log;
        const auto res = run(sub, config, log);
        py::list audits;
        for (const auto& r : res.audits) audits.append(audit_dict(r));
        return py::make_tuple(res.exit_code, audits);
      },
      py::arg("subcommand"), py::arg("config"), py::arg("out") = py::none(), py::arg("seed") = py::none(),
      "Run one subcommand; returns (exit_code, audits).");
}
