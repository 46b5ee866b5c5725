#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "table.hpp"

namespace qheng::cli {

enum ExitCode : int { kExitOk = 0, kExitDomain = 1, kExitUsage = 2, kExitIo = 3 };

struct GridAxis {
  std::string key;
  double start = 0.0;
  double stop = 0.0;
  std::size_t count = 0;
};

struct RunConfig {
  std::string command;

  // substance (carnot, otto)
  std::string substance = "tls";
  double param = 1.0;
  std::size_t levels = 0;
  std::vector<double> custom_levels;

  double th = 2.0;
  double tl = 1.0;

  // carnot
  double za = 2.0;
  double zb = 1.0;
  std::size_t steps = 4096;
  std::optional<double> lambda;

  // otto, limit-otto
  double dh = 2.0;
  double dl = 1.0;

  // compare, limit-carnot
  double ph = 0.3;
  double pl = 0.2;
  std::vector<std::size_t> n = {1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024};

  // demon, swap
  double ds = 2.0;
  double dd = 1.0;
  double ts = 4.0;
  double td = 1.0;
  double theta = 1.5707963267948966;

  // entropy-balance
  double gap = 1.0;
  double t_start = 1.0;
  double t_end = 2.0;
  double tol = 1e-11;

  // sweep
  std::string engine = "otto";
  std::vector<GridAxis> grid;
  std::size_t random = 0;
  std::uint64_t seed = 1;

  std::string format = "csv";
  std::string out;
};

struct ParseOutcome {
  std::optional<RunConfig> config;
  int exit_code = kExitOk;
  /// Error text, or help text when exit_code is 0 and config is empty.
  std::string message;
};

/// Parses flags (args excludes the program name) and an optional
/// --config FILE of flat key = value lines. Flags win over file keys.
ParseOutcome parse_config(const std::vector<std::string>& args);

/// First violated precondition for the command, naming the key.
std::optional<std::string> validate(const RunConfig& config);

/// Executes a validated config. Domain problems surface as exceptions.
Table run(const RunConfig& config);

/// Worker count for a sweep of `jobs` points: QHENG_THREADS when set to a
/// positive integer, hardware concurrency otherwise, never more than jobs.
std::size_t worker_count(std::size_t jobs);

/// Full command-line behaviour, returning the process exit code.
int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qheng::cli
