#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hports/errors.hpp"

namespace hports::cli {

enum ExitCode : int { ok = 0, check_failed = 1, numerical_failure = 2, io_failure = 3 };

/// Exit status for a library error.
ExitCode exit_code_for(ErrorCode code);

struct CommandResult {
  int exit_code = ok;
  nlohmann::ordered_json report;
  std::vector<std::string> summary;  // human-readable lines
};

/// Reads HARMONIC_PORTS_TOL_SCALE; 1 when unset. Throws InvalidInput on a
/// non-positive or unparsable value.
double tolerance_scale();

struct GenOptions {
  std::string shape;
  int resolution = 0;
  std::string out;  // defaults to <shape>-<resolution>.json
  std::uint64_t seed = 0;
};

struct MeshOptions {
  std::string mesh;
  std::uint64_t seed = 0;
};

struct DecomposeOptions {
  std::string mesh;
  std::string state;
  std::string out;  // optional: full components and harmonic bases
  std::uint64_t seed = 0;
};

struct VerifyOptions {
  std::string mesh;
  int p = 0, q = 0;
  std::string state;  // SD state JSON; random states otherwise
  int random_states = 10;
  std::uint64_t seed = 0;
  std::string out;
};

struct SimulateOptions {
  std::string mesh;
  int p = 0, q = 0;
  double dt = 0.01;
  int steps = 1000;
  std::string init = "random";
  std::uint64_t seed = 0;
  int stride = 0;
  std::string out = "trace.csv";  // snapshots go to <out>.snapshots/
};

// Each command throws hports::Error on failure; run() maps errors to exit codes.
CommandResult cmd_gen(const GenOptions& o);
CommandResult cmd_analyze(const MeshOptions& o);
CommandResult cmd_decompose(const DecomposeOptions& o);
CommandResult cmd_sd_verify(const VerifyOptions& o);
CommandResult cmd_simulate(const SimulateOptions& o);

/// Parses arguments (without the program name), runs one subcommand, prints
/// its JSON report to `out` and summary lines to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hports::cli
