#pragma once

#include "epirep/hamiltonian.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace epirep {

// One experiment, read from an INI file. Sections and keys (defaults in
// parentheses); unknown sections or keys are rejected.
//
//   [experiment]  horizon (1), seed (1), output (out)
//   [model]       name (quadratic), any other key is a model parameter
//   [terminal]    name (quadratic), any other key is a cost parameter
//   [solver]      N (64), starts (16), band (1e-3)
//   [instance]    t_lo (0), t_hi (1), t_points (9), x_lo (-2), x_hi (2), x_points (9)
//   [fd]          N (64), h_x (1/64), x_lo (-2), x_hi (2)
//   [conjugate]   t (0), x (-2,-1,-0.5,0.5,1,2), v_points (41)
//   [represent]   radius (2), sweep_points (5), extra_samples (1000),
//                 growth_samples (1000), lipschitz_pairs (10000),
//                 residual_points (50), residual_v_step (1e-3), p_box (1.5)
//   [value]       control (true), regularity (true), regularity_pairs (1000),
//                 M (1), boundedness_points (0)
//   [stability]   shifts (1,2,4,8), mollify (1,2,4,8), h_x (1/32),
//                 t_points (3), x_points (9), a_points (9), a_box (5)
//   [invariance]  trajectories (100), N (64), y_range (1), h_x (1/128),
//                 rows (256), probe_points (5)
//   [tolerances]  conjugate (1e-6), relative (0.02), fd (5e-2), residual (1e-3),
//                 shift (1e-3), equivariance (1e-6), invariance (1e-2), converged (5e-2)
struct ExperimentConfig {
  double horizon = 1.0;
  std::uint64_t seed = 1;
  std::string output = "out";

  std::string model = "quadratic";
  ModelParams model_params;
  std::string terminal = "quadratic";
  ModelParams terminal_params;

  int solver_N = 64;
  int starts = 16;
  double band = kBand;

  double inst_t_lo = 0.0, inst_t_hi = 1.0;
  int inst_t_points = 9;
  double inst_x_lo = -2.0, inst_x_hi = 2.0;
  int inst_x_points = 9;

  int fd_N = 64;
  double fd_h_x = 1.0 / 64.0;
  double fd_x_lo = -2.0, fd_x_hi = 2.0;

  double conj_t = 0.0;
  std::vector<double> conj_x{-2.0, -1.0, -0.5, 0.5, 1.0, 2.0};
  int conj_v_points = 41;

  double rep_radius = 2.0;
  int rep_sweep_points = 5;
  int rep_extra_samples = 1000;
  int rep_growth_samples = 1000;
  int rep_lipschitz_pairs = 10000;
  int rep_residual_points = 50;
  double rep_residual_v_step = 1e-3;
  double rep_p_box = 1.5;

  bool value_control = true;
  bool value_regularity = true;
  int regularity_pairs = 1000;
  double regularity_M = 1.0;
  int boundedness_points = 0;  // 0 skips the boundedness audit

  std::vector<double> shifts{1.0, 2.0, 4.0, 8.0};
  std::vector<double> mollify{1.0, 2.0, 4.0, 8.0};
  double stab_h_x = 1.0 / 32.0;
  int stab_t_points = 3;
  int stab_x_points = 9;
  int stab_a_points = 9;
  double stab_a_box = 5.0;

  int inv_trajectories = 100;
  int inv_N = 64;
  double inv_y_range = 1.0;
  double inv_h_x = 1.0 / 128.0;
  int inv_rows = 256;
  int inv_probe_points = 5;

  double tol_conjugate = 1e-6;
  double tol_relative = 0.02;
  double tol_fd = 5e-2;
  double tol_residual = 1e-3;
  double tol_shift = 1e-3;
  double tol_equivariance = 1e-6;
  double tol_invariance = 1e-2;
  double tol_converged = 5e-2;

  // Every field but the output directory, in a fixed order. The input text is
  // not echoed verbatim, so comments and key order do not change the hash,
  // and runs into different directories share it.
  std::string canonical() const;
  // FNV-1a 64 of canonical(), as 16 hex digits.
  std::string hash() const;
  // Throws ConfigError unless tolerances > 0, T > 0 and grid sizes >= 2.
  void validate() const;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

}  // namespace epirep
