#pragma once

#include "epirep/config.hpp"
#include "epirep/report.hpp"
#include "epirep/value_function.hpp"

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace epirep {

inline constexpr int kExitPass = 0;
inline constexpr int kExitAuditFailure = 1;
inline constexpr int kExitUsage = 2;

// conjugate-table, represent, value, stability, invariance
std::vector<std::string> subcommands();

ValueProblem make_problem(const ExperimentConfig& config);

// Audits behind each subcommand, also used by the acceptance binary. The
// tables are written as CSV to `csv` when it is non-null.
std::vector<AuditRecord> conjugate_table(const ExperimentConfig& config, std::ostream* csv);
std::vector<AuditRecord> represent_audits(const ExperimentConfig& config, std::ostream* csv);
std::vector<AuditRecord> value_audits(const ExperimentConfig& config, std::ostream* csv);
std::vector<AuditRecord> stability_audits(const ExperimentConfig& config, std::ostream* csv);
// `report` receives {trajectories, min_margin, failures, seed} as JSON.
std::vector<AuditRecord> invariance_audits(const ExperimentConfig& config, std::ostream* csv,
                                           std::string* report = nullptr);

struct RunResult {
  int exit_code = kExitPass;
  std::vector<AuditRecord> audits;
  std::vector<std::string> artifacts;  // paths written
};

// Writes <output>/<subcommand>.csv, <subcommand>.json and config.ini (the
// canonical echo). Exit code 0 iff every audit passes, 1 otherwise (failing
// records go to `log`). Unknown subcommands and ConfigError throw.
RunResult run(std::string_view subcommand, const ExperimentConfig& config, std::ostream& log);

// `<tool> <subcommand> --config <path> [--out <dir>] [--seed <u64>]`
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace epirep
