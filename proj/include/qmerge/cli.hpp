#pragma once

// Batch front end: parse a command line into a RunConfig, run one
// subcommand, write the report to `out` and diagnostics to `err`.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace qmerge::cli {

enum ExitCode : int { kOk = 0, kVerificationFailed = 1, kUsage = 2, kCap = 3 };

struct RunConfig {
  std::string subcommand;

  std::string set_path;
  std::string protocol_path;
  std::string state_path;
  std::string base = "builtin:bell";  // builtin:bell, builtin:mes<d>, or a state file
  std::string spectrum;               // schur-demo: comma separated eigenvalues
  std::string emit_protocol;
  std::string emit_set;

  bool hull = false;
  bool avqs = false;
  bool exhaustive = false;

  std::size_t blocklength = 0;  // 0: subcommand default
  std::size_t k = 1;
  std::size_t n = 2;
  std::size_t outcomes = 2;
  std::size_t restarts = 8;
  std::size_t trials = 0;
  std::size_t dim = 0;
  double eta = 0.25;
  std::uint64_t seed = 0;

  std::string format;  // json | csv; empty picks the subcommand default
  std::optional<double> tol;
  std::optional<std::size_t> dim_cap;
  std::size_t word_cap = 1u << 16;
};

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qmerge::cli
