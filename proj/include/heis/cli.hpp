#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

namespace heis {

/// Command-line front end, usable in-process for tests.
struct RunOptions {
  std::string command;    // validate | analyze | normal-form | simulate | certify
  std::string spec_path;
  bool json_output = true;
  double horizon = 10.0;
  int samples = 1;
  double amplitude = 10.0;
  std::uint64_t seed = 0;
  double step = 1e-3;
  int budget = 64;
  std::string out_path;   // trajectory CSV target for `simulate`
};

/// Runs one command. Reports go to `out`, diagnostics to `err`.
/// Exit codes: 0 success, 1 input error, 2 internal inconsistency.
int run_command(const RunOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace heis
