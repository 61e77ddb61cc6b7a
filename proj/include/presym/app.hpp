#ifndef PRESYM_APP_HPP
#define PRESYM_APP_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace presym::app {

enum ExitCode : int { kOk = 0, kInputError = 1, kRankViolation = 2, kInfeasible = 3 };

enum class Command { Analyze, Symmetries, Reduce, Integrate };

struct RunConfig {
  Command command = Command::Analyze;
  std::string problem_path;
  std::uint64_t seed = 0;
  std::vector<std::string> boxes;  // "name=lo,hi", overrides the file's domain

  // ladder / regularity
  std::size_t samples = 32;
  double zero_tol = 1e-9;
  int max_levels = 8;
  int regularity_trials = 32;

  // symmetry checks
  int symmetry_trials = 100;
  double symmetry_tol = 1e-10;

  // reduce
  std::string mu = "auto";       // "auto" or comma-separated values
  std::string restrict_to = "none";  // "none" or "ladder"
  std::size_t level_samples = 16;

  // integrate
  std::string from = "auto";  // "auto" or comma-separated (q, p, u) values
  double t0 = 0.0;
  double t1 = 1.0;
  double step = 1e-3;
  std::string retraction = "auto";  // auto | on | off
  std::string gauge = "error";      // error | zero
  int record_every = 1;
};

struct RunResult {
  int exit_code = kOk;
  std::string output;  // JSON or CSV
  std::string error;   // human-readable diagnostic
};

RunResult run(const RunConfig& cfg);

std::string command_name(Command c);

}  // namespace presym::app

#endif
