#include <doctest.h>

#include "epirep/errors.hpp"
#include "epirep/runner.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace epirep;
namespace fs = std::filesystem;

namespace {

std::string data(const std::string& name) { return std::string(EPIREP_TEST_DATA) + "/" + name; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("epirep_runner_" + name);
  fs::remove_all(p);
  return p;
}

int cli(const std::string& args) {
  const std::string cmd = std::string(EPIREP_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config parsing") {
  const auto c = parse_config("[experiment]\nhorizon = 2\nseed = 7\n[model]\nname = sqrt_example\nshift = 0.5\n"
                              "[fd]\nh_x = 1/32\n[conjugate]\nx = 1, -2\n[value]\nregularity = false\n");
  CHECK(c.horizon == 2.0);
  CHECK(c.seed == 7u);
  CHECK(c.model == "sqrt_example");
  CHECK(c.model_params.at("shift") == 0.5);
  CHECK(c.fd_h_x == 1.0 / 32.0);
  CHECK(c.conj_x == std::vector<double>{1.0, -2.0});
  CHECK_FALSE(c.value_regularity);
  CHECK(c.inst_t_points == 9);

  CHECK_THROWS_AS(parse_config("[fd]\nhx = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[nowhere]\nx = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[fd]\nN = many\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[experiment]\nhorizon = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[tolerances]\nfd = -1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[instance]\nx_points = 1\n"), ConfigError);

  // the hash ignores comments and key order but not values
  const auto a = parse_config("; comment\n[fd]\nN = 32\nh_x = 0.125\n");
  const auto b = parse_config("[fd]\nh_x = 1/8\nN = 32\n");
  CHECK(a.hash() == b.hash());
  CHECK(a.hash().size() == 16u);
  CHECK(parse_config("[fd]\nN = 33\n").hash() != a.hash());
  CHECK(parse_config(a.canonical()).canonical() == a.canonical());
}

TEST_CASE("every subcommand passes on the small quadratic run") {
  auto c = load_config(data("small.ini"));
  c.output = scratch("small").string();
  for (const auto& sub : subcommands()) {
    CAPTURE(sub);
    std::ostringstream log;
    const auto res = run(sub, c, log);
    CAPTURE(log.str());
    CHECK(res.exit_code == kExitPass);
    CHECK(fs::exists(fs::path(c.output) / (sub + ".csv")));
    const std::string json = slurp(fs::path(c.output) / (sub + ".json"));
    CHECK(json.find("\"config_hash\": \"" + c.hash() + "\"") != std::string::npos);
  }
  const std::string csv = slurp(fs::path(c.output) / "value.csv");
  CHECK(csv.rfind("# schema: value/1\nt0,x0,v_var,v_ctrl,v_fd,sup_control,gap_ctrl,gap_fd\n", 0) == 0);
  CHECK(csv.find('\r') == std::string::npos);
  CHECK_THROWS_AS(run("bogus", c, std::cout), ConfigError);
}

TEST_CASE("value table on the quadratic instance") {
  auto c = load_config(data("small.ini"));
  c.inst_t_points = 2;
  c.inst_x_points = 2;
  c.inst_x_lo = 1.0;
  c.inst_x_hi = 1.0;
  std::ostringstream csv;
  value_audits(c, &csv);
  std::istringstream in(csv.str());
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  std::getline(in, line);  // t0 = 0, x0 = 1
  double t0, x0, vv, vc, vf;
  char comma;
  std::istringstream row(line);
  row >> t0 >> comma >> x0 >> comma >> vv >> comma >> vc >> comma >> vf;
  CHECK(t0 == 0.0);
  CHECK(x0 == 1.0);
  CHECK(vv == doctest::Approx(0.25).epsilon(1e-3));
  CHECK(vc == doctest::Approx(0.25).epsilon(1e-3));
  CHECK(vf == doctest::Approx(0.25).epsilon(0.05));
}

TEST_CASE("conjugate table on sqrt_example matches the closed form") {
  const auto c = load_config(data("sqrt_table.ini"));
  std::ostringstream csv;
  const auto recs = conjugate_table(c, &csv);
  REQUIRE(recs.size() == 2u);
  CHECK(recs[0].pass);
  CHECK(recs[0].observed <= 1e-6);
  CHECK(recs[1].pass);
  std::istringstream in(csv.str());
  std::string line;
  int rows = -2;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 21);
}

TEST_CASE("identical config and seed give byte-identical artifacts") {
  auto c = load_config(data("small.ini"));
  c.output = scratch("det_a").string();
  std::ostringstream log;
  for (const auto& sub : subcommands()) run(sub, c, log);
  auto d = c;
  d.output = scratch("det_b").string();
  for (const auto& sub : subcommands()) run(sub, d, log);
  std::size_t compared = 0;
  for (const auto& entry : fs::directory_iterator(c.output)) {
    CAPTURE(entry.path().filename().string());
    CHECK(slurp(entry.path()) == slurp(fs::path(d.output) / entry.path().filename()));
    ++compared;
  }
  CHECK(compared == 12u);
}

TEST_CASE("command-line exit codes") {
  const std::string out = scratch("cli").string();
  CHECK(cli("conjugate-table --config " + data("sqrt_table.ini") + " --out " + out) == kExitPass);
  CHECK(fs::exists(fs::path(out) / "conjugate-table.csv"));
  CHECK(cli("value --config " + data("empty_grid.ini") + " --out " + out) == kExitUsage);
  CHECK(cli("value --config " + data("unknown_model.ini") + " --out " + out) == kExitUsage);
  CHECK(cli("bogus --config " + data("small.ini")) == kExitUsage);
  CHECK(cli("value") == kExitUsage);
  CHECK(cli("value --config /no/such/file.ini") == kExitUsage);
  // a tolerance no solver can meet turns into an audit failure
  const fs::path strict = fs::path(out) / "strict.ini";
  std::ofstream(strict) << slurp(data("sqrt_table.ini")) << "\n[tolerances]\nconjugate = 1e-300\n";
  CHECK(cli("conjugate-table --config " + strict.string() + " --out " + out) == kExitAuditFailure);
}
