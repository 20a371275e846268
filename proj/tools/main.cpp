// qbell command-line front end: CGLMP Bell-test predictions, bounds,
// witnesses, waveplate schedules, and Monte-Carlo experiment simulation for
// bipartite d = 2^N systems built from entangled qubit pairs.

#include <CLI11.hpp>

#include "qbell/cli.hpp"

namespace {

void add_common_output(CLI::App* cmd, qbell::RunConfig& config) {
  cmd->add_option("-o,--out", config.output, "Output file (default: <command>.<format>)");
  cmd->add_option("--format", config.format, "Output format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bell-CGLMP test engine for qudits composed of entangled qubit pairs"};
  app.require_subcommand(1);

  qbell::RunConfig config;
  std::vector<std::pair<CLI::App*, qbell::Command>> commands;

  auto* ideal = app.add_subcommand("ideal-scan", "Ideal Bell values I_d for d = 2..2^N");
  ideal->add_option("--nmax", config.n_max, "Largest pair count N (d = 2^N)");
  add_common_output(ideal, config);
  commands.emplace_back(ideal, qbell::Command::kIdealScan);

  auto* noisy = app.add_subcommand("noisy-scan", "Bell values for a Werner pair of given fidelity");
  noisy->add_option("--fidelity", config.fidelity, "Pair fidelity with the Bell state");
  noisy->add_option("--nmax", config.n_max, "Largest pair count N");
  add_common_output(noisy, config);
  commands.emplace_back(noisy, qbell::Command::kNoisyScan);

  auto* simulate = app.add_subcommand("simulate", "Finite-count Bell estimates with bootstrap errors");
  simulate->add_option("--fidelity", config.fidelity, "Pair fidelity with the Bell state");
  simulate->add_option("--nmax", config.n_max, "Largest pair count N");
  simulate->add_option("--events", config.events, "Events per setting pair");
  simulate->add_option("--seed", config.seed, "RNG seed");
  simulate->add_option("--jitter", config.angle_jitter, "Waveplate angle error sigma (rad)");
  simulate->add_option("--resamples", config.bootstrap_resamples, "Bootstrap resamples");
  add_common_output(simulate, config);
  commands.emplace_back(simulate, qbell::Command::kSimulate);

  auto* witness = app.add_subcommand("witness", "Schmidt-number lower bounds from pair fidelity");
  witness->add_option("--fidelity", config.fidelity, "Pair fidelity with the Bell state");
  witness->add_option("--nmax", config.n_max, "Largest pair count N");
  add_common_output(witness, config);
  commands.emplace_back(witness, qbell::Command::kWitness);

  auto* angles = app.add_subcommand("angles", "Waveplate schedule for all settings and outcomes");
  angles->add_option("--d", config.d, "Dimension d = 2^N");
  add_common_output(angles, config);
  commands.emplace_back(angles, qbell::Command::kAngles);

  auto* lhv = app.add_subcommand("lhv-bound", "Exhaustive local-deterministic maximum of I_d");
  lhv->add_option("--d", config.d, "Dimension d (any integer >= 2)");
  add_common_output(lhv, config);
  commands.emplace_back(lhv, qbell::Command::kLhvBound);

  auto* tomo = app.add_subcommand("tomo", "Bell scan from simulated pair tomography");
  tomo->add_option("--fidelity", config.fidelity, "Pair fidelity with the Bell state");
  tomo->add_option("--nmax", config.n_max, "Largest pair count N");
  tomo->add_option("--events", config.events, "Events per tomography setting");
  tomo->add_option("--seed", config.seed, "RNG seed");
  tomo->add_option("--resamples", config.bootstrap_resamples, "Tomography replicates for stderr");
  tomo->add_option("--record-in", config.record_in, "Reconstruct from this record CSV");
  tomo->add_option("--record-out", config.record_out, "Also write the simulated record CSV");
  add_common_output(tomo, config);
  commands.emplace_back(tomo, qbell::Command::kTomo);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // usage errors exit 1, --help exits 0
  }

  for (const auto& [cmd, command] : commands)
    if (cmd->parsed()) {
      config.command = command;
      return qbell::run(config);
    }
  return 1;
}
