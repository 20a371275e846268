#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "qbell/types.hpp"

namespace qbell {

enum class Command {
  kIdealScan,
  kNoisyScan,
  kSimulate,
  kWitness,
  kAngles,
  kLhvBound,
  kTomo,
};

std::string command_name(Command command);

// Invalid parameter combinations; mapped to exit code 1.
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct RunConfig {
  Command command = Command::kIdealScan;
  double fidelity = 0.982;
  int n_max = 4;
  int d = 2;                         // angles / lhv-bound
  std::int64_t events = 100000;
  std::uint64_t seed = kDefaultSeed;
  int bootstrap_resamples = 200;
  double angle_jitter = 0.0;         // radians
  std::string output;                // empty: default file name per command
  std::string format = "csv";        // "csv" | "json"
  std::string record_in;             // tomo: reconstruct from this CSV instead
  std::string record_out;            // tomo: also export the simulated record
};

// Executes the configured command: writes the artifact file atomically and
// prints a one-line summary per dimension. The QBELL_OUTPUT_DIR environment
// variable redirects relative output paths. Returns 0 on success, 1 on a
// usage error, 2 on a runtime or I/O failure.
int run(const RunConfig& config);

}  // namespace qbell
