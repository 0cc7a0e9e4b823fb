#include "epirep/config.hpp"

#include "epirep/errors.hpp"
#include "epirep/report.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <variant>

namespace epirep {

namespace {

using Slot = std::variant<double*, int*, bool*, std::uint64_t*, std::string*, std::vector<double>*>;

struct Binding {
  const char* section;
  const char* key;
  Slot slot;
};

template <class C>
std::vector<Binding> bindings(C& c) {
  return {
      {"experiment", "horizon", &c.horizon},
      {"experiment", "seed", &c.seed},
      {"experiment", "output", &c.output},
      {"solver", "N", &c.solver_N},
      {"solver", "starts", &c.starts},
      {"solver", "band", &c.band},
      {"instance", "t_lo", &c.inst_t_lo},
      {"instance", "t_hi", &c.inst_t_hi},
      {"instance", "t_points", &c.inst_t_points},
      {"instance", "x_lo", &c.inst_x_lo},
      {"instance", "x_hi", &c.inst_x_hi},
      {"instance", "x_points", &c.inst_x_points},
      {"fd", "N", &c.fd_N},
      {"fd", "h_x", &c.fd_h_x},
      {"fd", "x_lo", &c.fd_x_lo},
      {"fd", "x_hi", &c.fd_x_hi},
      {"conjugate", "t", &c.conj_t},
      {"conjugate", "x", &c.conj_x},
      {"conjugate", "v_points", &c.conj_v_points},
      {"represent", "radius", &c.rep_radius},
      {"represent", "sweep_points", &c.rep_sweep_points},
      {"represent", "extra_samples", &c.rep_extra_samples},
      {"represent", "growth_samples", &c.rep_growth_samples},
      {"represent", "lipschitz_pairs", &c.rep_lipschitz_pairs},
      {"represent", "residual_points", &c.rep_residual_points},
      {"represent", "residual_v_step", &c.rep_residual_v_step},
      {"represent", "p_box", &c.rep_p_box},
      {"value", "control", &c.value_control},
      {"value", "regularity", &c.value_regularity},
      {"value", "regularity_pairs", &c.regularity_pairs},
      {"value", "M", &c.regularity_M},
      {"value", "boundedness_points", &c.boundedness_points},
      {"stability", "shifts", &c.shifts},
      {"stability", "mollify", &c.mollify},
      {"stability", "h_x", &c.stab_h_x},
      {"stability", "t_points", &c.stab_t_points},
      {"stability", "x_points", &c.stab_x_points},
      {"stability", "a_points", &c.stab_a_points},
      {"stability", "a_box", &c.stab_a_box},
      {"invariance", "trajectories", &c.inv_trajectories},
      {"invariance", "N", &c.inv_N},
      {"invariance", "y_range", &c.inv_y_range},
      {"invariance", "h_x", &c.inv_h_x},
      {"invariance", "rows", &c.inv_rows},
      {"invariance", "probe_points", &c.inv_probe_points},
      {"tolerances", "conjugate", &c.tol_conjugate},
      {"tolerances", "relative", &c.tol_relative},
      {"tolerances", "fd", &c.tol_fd},
      {"tolerances", "residual", &c.tol_residual},
      {"tolerances", "shift", &c.tol_shift},
      {"tolerances", "equivariance", &c.tol_equivariance},
      {"tolerances", "invariance", &c.tol_invariance},
      {"tolerances", "converged", &c.tol_converged},
  };
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  return s.substr(a, s.find_last_not_of(" \t\r") - a + 1);
}

std::string where(const std::string& section, const std::string& key) { return "[" + section + "] " + key; }

double to_double(const std::string& raw, const std::string& at) {
  const std::string s = trim(raw);
  // "1/64" is accepted for grid steps
  if (const auto slash = s.find('/'); slash != std::string::npos)
    return to_double(s.substr(0, slash), at) / to_double(s.substr(slash + 1), at);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    throw ConfigError(at + ": expected a number, got '" + raw + "'");
  return v;
}

template <class I>
I to_integer(const std::string& raw, const std::string& at) {
  const std::string s = trim(raw);
  I v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    throw ConfigError(at + ": expected an integer, got '" + raw + "'");
  return v;
}

bool to_bool(const std::string& raw, const std::string& at) {
  const std::string s = trim(raw);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError(at + ": expected true or false, got '" + raw + "'");
}

std::vector<double> to_list(const std::string& raw, const std::string& at) {
  std::vector<double> out;
  std::stringstream ss(raw);
  for (std::string item; std::getline(ss, item, ',');) out.push_back(to_double(item, at));
  return out;
}

void assign(const Slot& slot, const std::string& raw, const std::string& at) {
  std::visit(
      [&](auto* p) {
        using T = std::remove_pointer_t<decltype(p)>;
        if constexpr (std::is_same_v<T, double>) *p = to_double(raw, at);
        else if constexpr (std::is_same_v<T, int>) *p = to_integer<int>(raw, at);
        else if constexpr (std::is_same_v<T, std::uint64_t>) *p = to_integer<std::uint64_t>(raw, at);
        else if constexpr (std::is_same_v<T, bool>) *p = to_bool(raw, at);
        else if constexpr (std::is_same_v<T, std::string>) *p = trim(raw);
        else *p = to_list(raw, at);
      },
      slot);
}

std::string render(const Slot& slot) {
  return std::visit(
      [](auto* p) -> std::string {
        using T = std::remove_pointer_t<decltype(p)>;
        if constexpr (std::is_same_v<T, double>) return format_double(*p);
        else if constexpr (std::is_same_v<T, bool>) return *p ? "true" : "false";
        else if constexpr (std::is_same_v<T, std::string>) return *p;
        else if constexpr (std::is_same_v<T, std::vector<double>>) {
          std::string s;
          for (std::size_t i = 0; i < p->size(); ++i) s += (i ? "," : "") + format_double((*p)[i]);
          return s;
        } else return std::to_string(*p);
      },
      slot);
}

void read_named(const boost::property_tree::ptree& sec, const std::string& section, std::string& name,
                ModelParams& params) {
  for (const auto& [key, node] : sec) {
    if (!node.empty()) throw ConfigError(where(section, key) + ": nested keys are not supported");
    if (key == "name") name = trim(node.data());
    else params[key] = to_double(node.data(), where(section, key));
  }
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.message() + " at line " + std::to_string(e.line()));
  }
  ExperimentConfig c;
  const auto table = bindings(c);
  for (const auto& [section, sec] : tree) {
    if (sec.empty() && !sec.data().empty()) throw ConfigError("config: key '" + section + "' outside a section");
    if (section == "model") {
      read_named(sec, section, c.model, c.model_params);
      continue;
    }
    if (section == "terminal") {
      read_named(sec, section, c.terminal, c.terminal_params);
      continue;
    }
    bool known_section = false;
    for (const auto& b : table) known_section = known_section || section == b.section;
    if (!known_section) throw ConfigError("config: unknown section [" + section + "]");
    for (const auto& [key, node] : sec) {
      const Binding* hit = nullptr;
      for (const auto& b : table)
        if (section == b.section && key == b.key) hit = &b;
      if (!hit) throw ConfigError("config: unknown key " + where(section, key));
      assign(hit->slot, node.data(), where(section, key));
    }
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string ExperimentConfig::canonical() const {
  auto self = *this;
  std::ostringstream out;
  std::string section;
  auto named = [&](const char* sec, const std::string& name, const ModelParams& params) {
    out << "[" << sec << "]\nname = " << name << "\n";
    for (const auto& [k, v] : params) out << k << " = " << format_double(v) << "\n";
  };
  for (const auto& b : bindings(self)) {
    if (section != b.section) {
      if (section == "experiment") {
        named("model", model, model_params);
        named("terminal", terminal, terminal_params);
      }
      section = b.section;
      out << "[" << section << "]\n";
    }
    if (std::string_view(b.key) != "output") out << b.key << " = " << render(b.slot) << "\n";
  }
  return out.str();
}

std::string ExperimentConfig::hash() const {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : canonical()) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError("config: " + what); };
  if (!(horizon > 0.0)) fail("horizon must be > 0");
  if (output.empty()) fail("output directory is empty");
  if (solver_N < 2 || starts < 1) fail("solver grid needs N >= 2 and starts >= 1");
  if (!(band > 0.0 && band < 0.5)) fail("band must lie in (0, 0.5)");
  if (inst_t_points < 2 || inst_x_points < 2) fail("instance grid needs at least 2 points per axis");
  if (!(inst_t_hi >= inst_t_lo) || !(inst_x_hi >= inst_x_lo)) fail("instance grid bounds are reversed");
  if (inst_t_lo < 0.0 || inst_t_hi > horizon) fail("instance times must lie in [0, horizon]");
  if (fd_N < 2 || !(fd_h_x > 0.0) || !(fd_x_hi > fd_x_lo)) fail("fd grid needs N >= 2, h_x > 0, x_lo < x_hi");
  if (conj_x.empty() || conj_v_points < 2) fail("conjugate grid needs x values and v_points >= 2");
  if (!(rep_radius > 0.0) || rep_sweep_points < 2 || rep_residual_points < 2)
    fail("representation grid needs radius > 0 and sizes >= 2");
  if (rep_extra_samples < 1 || rep_growth_samples < 1 || rep_lipschitz_pairs < 1)
    fail("representation audits need at least one sample");
  if (!(rep_residual_v_step > 0.0) || !(rep_p_box > 0.0)) fail("residual grid needs v_step > 0 and p_box > 0");
  if (regularity_pairs < 1 || !(regularity_M > 0.0) || boundedness_points < 0)
    fail("value audits need pairs >= 1, M > 0, boundedness_points >= 0");
  if (shifts.empty() || !(stab_h_x > 0.0) || !(stab_a_box > 0.0)) fail("stability needs shifts, h_x > 0 and a_box > 0");
  if (stab_t_points < 1 || stab_x_points < 2 || stab_a_points < 2) fail("stability grid sizes must be >= 2");
  for (double s : shifts)
    if (!(s > 0.0)) fail("stability shifts must be > 0");
  for (double s : mollify)
    if (!(s > 0.0)) fail("stability mollify indices must be > 0");
  if (inv_trajectories < 1 || inv_N < 2 || inv_rows < 2 || inv_probe_points < 2)
    fail("invariance grid sizes must be >= 2 and trajectories >= 1");
  if (!(inv_y_range > 0.0) || !(inv_h_x > 0.0)) fail("invariance needs y_range > 0 and h_x > 0");
  for (double t : {tol_conjugate, tol_relative, tol_fd, tol_residual, tol_shift, tol_equivariance,
                   tol_invariance, tol_converged})
    if (!(t > 0.0)) fail("tolerances must be > 0");
}

}  // namespace epirep
