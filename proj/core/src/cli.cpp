#include "qbell/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "qbell/experiment.hpp"
#include "qbell/io.hpp"
#include "qbell/rng.hpp"
#include "qbell/witness.hpp"

namespace qbell {

namespace {

struct KeyValue {
  std::string key, value;
};

std::string header_comment(const RunConfig& config, const std::vector<KeyValue>& entries) {
  std::ostringstream os;
  os << "# qbell " << command_name(config.command) << "\n# schema_version=" << io::kSchemaVersion;
  for (const auto& [key, value] : entries) os << ' ' << key << '=' << value;
  os << " format=" << config.format << '\n';
  return os.str();
}

nlohmann::json config_json(const RunConfig& config, const std::vector<KeyValue>& entries) {
  nlohmann::json j;
  for (const auto& [key, value] : entries) j[key] = value;
  return j;
}

std::vector<KeyValue> effective_config(const RunConfig& c) {
  std::vector<KeyValue> kv;
  switch (c.command) {
    case Command::kIdealScan:
      kv = {{"nmax", std::to_string(c.n_max)}};
      break;
    case Command::kNoisyScan:
      kv = {{"fidelity", io::format_double(c.fidelity)}, {"nmax", std::to_string(c.n_max)}};
      break;
    case Command::kSimulate:
      kv = {{"fidelity", io::format_double(c.fidelity)},
            {"nmax", std::to_string(c.n_max)},
            {"events", std::to_string(c.events)},
            {"seed", std::to_string(c.seed)},
            {"jitter", io::format_double(c.angle_jitter)},
            {"resamples", std::to_string(c.bootstrap_resamples)}};
      break;
    case Command::kWitness:
      kv = {{"fidelity", io::format_double(c.fidelity)}, {"nmax", std::to_string(c.n_max)}};
      break;
    case Command::kAngles:
      kv = {{"d", std::to_string(c.d)}};
      break;
    case Command::kLhvBound:
      kv = {{"d", std::to_string(c.d)}};
      break;
    case Command::kTomo:
      kv = {{"fidelity", io::format_double(c.fidelity)},
            {"nmax", std::to_string(c.n_max)},
            {"events", std::to_string(c.events)},
            {"seed", std::to_string(c.seed)},
            {"resamples", std::to_string(c.bootstrap_resamples)}};
      if (!c.record_in.empty()) kv.push_back({"record_in", c.record_in});
      break;
  }
  return kv;
}

void validate(const RunConfig& c) {
  if (c.format != "csv" && c.format != "json")
    throw UsageError("format must be 'csv' or 'json'");
  switch (c.command) {
    case Command::kIdealScan:
    case Command::kNoisyScan:
    case Command::kWitness:
    case Command::kSimulate:
    case Command::kTomo:
      if (c.n_max < 1 || c.n_max > kTableCapN)
        throw UsageError("nmax must lie in [1, " + std::to_string(kTableCapN) + "]");
      break;
    case Command::kAngles:
    case Command::kLhvBound:
      break;
  }
  if (c.command == Command::kNoisyScan || c.command == Command::kSimulate ||
      c.command == Command::kTomo) {
    if (!(c.fidelity >= 0.25 && c.fidelity <= 1.0))
      throw UsageError("fidelity must lie in [0.25, 1]");
  }
  if (c.command == Command::kWitness && !(c.fidelity >= 0.0 && c.fidelity <= 1.0))
    throw UsageError("fidelity must lie in [0, 1]");
  if (c.command == Command::kSimulate || c.command == Command::kTomo) {
    if (c.events < 1) throw UsageError("events must be >= 1");
    if (c.bootstrap_resamples < 0) throw UsageError("resamples must be >= 0");
  }
  if (c.command == Command::kSimulate && c.angle_jitter < 0.0)
    throw UsageError("jitter must be >= 0");
  if (c.command == Command::kAngles && (!is_power_of_two(c.d) || c.d < 2))
    throw UsageError("angles: d must be a power of two >= 2");
  if (c.command == Command::kLhvBound && (c.d < 2 || c.d > kLrtDimCap))
    throw UsageError("lhv-bound: d must lie in [2, " + std::to_string(kLrtDimCap) + "]");
}

// Relative artifact paths land under QBELL_OUTPUT_DIR when it is set.
std::filesystem::path resolve_artifact_path(const std::string& name) {
  std::filesystem::path path(name);
  if (path.is_relative()) {
    if (const char* dir = std::getenv("QBELL_OUTPUT_DIR"); dir && *dir)
      path = std::filesystem::path(dir) / path;
  }
  return path;
}

std::filesystem::path resolve_output(const RunConfig& c) {
  std::string name = c.output;
  if (name.empty()) {
    std::string stem = command_name(c.command);
    for (auto& ch : stem)
      if (ch == '-') ch = '_';
    name = stem + "." + c.format;
  }
  return resolve_artifact_path(name);
}

void print_bell_summaries(const std::vector<BellReport>& reports) {
  for (const auto& r : reports) {
    std::cout << "d=" << r.d << " I_d=" << io::format_double(r.value);
    if (r.std_error) std::cout << " stderr=" << io::format_double(*r.std_error);
    std::cout << " violation=" << (r.violation ? "yes" : "no") << '\n';
  }
}

std::string render_bell(const RunConfig& c, const std::vector<BellReport>& reports,
                        const std::vector<KeyValue>& kv) {
  if (c.format == "json") {
    nlohmann::json j{{"schema_version", io::kSchemaVersion},
                     {"command", command_name(c.command)},
                     {"config", config_json(c, kv)}};
    auto results = nlohmann::json::array();
    for (const auto& r : reports) results.push_back(io::bell_report_json(r));
    j["results"] = std::move(results);
    return j.dump(2) + "\n";
  }
  return header_comment(c, kv) + io::bell_reports_csv(reports);
}

ExperimentConfig experiment_config(const RunConfig& c) {
  ExperimentConfig ec;
  ec.pair_model = NoiseModel::werner_fidelity(c.fidelity);
  ec.events_per_setting = c.events;
  ec.seed = c.seed;
  ec.angle_jitter_sigma = c.angle_jitter;
  ec.bootstrap_resamples = c.bootstrap_resamples;
  return ec;
}

int execute(const RunConfig& c) {
  const auto kv = effective_config(c);
  const auto out_path = resolve_output(c);

  switch (c.command) {
    case Command::kIdealScan:
    case Command::kNoisyScan: {
      const PairState pair = c.command == Command::kIdealScan
                                 ? NoiseModel::ideal().pair_state()
                                 : werner_from_fidelity(c.fidelity);
      const auto reports = scan_dimensions(pair, c.n_max);
      io::write_file_atomic(out_path, render_bell(c, reports, kv));
      print_bell_summaries(reports);
      break;
    }
    case Command::kSimulate: {
      const auto reports = simulate_bell_measurements(experiment_config(c), c.n_max);
      io::write_file_atomic(out_path, render_bell(c, reports, kv));
      print_bell_summaries(reports);
      break;
    }
    case Command::kWitness: {
      const auto results = witness_sweep(c.fidelity, c.n_max);
      std::string content;
      if (c.format == "json") {
        nlohmann::json j{{"schema_version", io::kSchemaVersion},
                         {"command", command_name(c.command)},
                         {"config", config_json(c, kv)}};
        auto arr = nlohmann::json::array();
        for (const auto& r : results) arr.push_back(io::witness_result_json(r));
        j["results"] = std::move(arr);
        content = j.dump(2) + "\n";
      } else {
        content = header_comment(c, kv) + io::witness_csv(results);
      }
      io::write_file_atomic(out_path, content);
      for (const auto& r : results)
        std::cout << "d=" << r.d << " fidelity=" << io::format_double(r.fidelity)
                  << " S_L=" << r.bound << " certified=" << (r.certified ? "yes" : "no") << '\n';
      break;
    }
    case Command::kAngles: {
      std::string content;
      if (c.format == "json") {
        nlohmann::json j{{"schema_version", io::kSchemaVersion},
                         {"command", command_name(c.command)},
                         {"config", config_json(c, kv)}};
        auto rows = nlohmann::json::array();
        const int n = log2_exact(c.d);
        for (Party party : {Party::A, Party::B})
          for (int setting = 1; setting <= 2; ++setting)
            for (int outcome = 0; outcome < c.d; ++outcome)
              for (int m = 1; m <= n; ++m) {
                const auto w = compile_angles(SettingSpec(party, setting), outcome, m);
                rows.push_back({{"party", party == Party::A ? "A" : "B"},
                                {"setting", setting},
                                {"outcome", outcome},
                                {"qubit_m", m},
                                {"theta_hwp_rad", w.theta_hwp},
                                {"gamma_qwp_rad", w.gamma_qwp}});
              }
        j["results"] = std::move(rows);
        content = j.dump(2) + "\n";
      } else {
        content = header_comment(c, kv) + io::angles_csv(c.d);
      }
      io::write_file_atomic(out_path, content);
      std::cout << "d=" << c.d
                << " settings_per_operator_pair=" << waveplate_settings_count(c.d)
                << " rows=" << 4 * c.d * log2_exact(c.d) << '\n';
      break;
    }
    case Command::kLhvBound: {
      const LrtResult result = lrt_max(c.d);
      std::string content;
      if (c.format == "json") {
        nlohmann::json j{{"schema_version", io::kSchemaVersion},
                         {"command", command_name(c.command)},
                         {"config", config_json(c, kv)},
                         {"max", result.max_value},
                         {"strategy",
                          {{"A1", result.argmax.a1},
                           {"A2", result.argmax.a2},
                           {"B1", result.argmax.b1},
                           {"B2", result.argmax.b2}}}};
        content = j.dump(2) + "\n";
      } else {
        std::ostringstream os;
        os << header_comment(c, kv) << "d,max,A1,A2,B1,B2\n"
           << c.d << ',' << io::format_double(result.max_value) << ',' << result.argmax.a1 << ','
           << result.argmax.a2 << ',' << result.argmax.b1 << ',' << result.argmax.b2 << '\n';
        content = os.str();
      }
      io::write_file_atomic(out_path, content);
      char line[64];
      std::snprintf(line, sizeof(line), "max = %.6f", result.max_value);
      std::cout << line << '\n'
                << "strategy: A1=" << result.argmax.a1 << " A2=" << result.argmax.a2
                << " B1=" << result.argmax.b1 << " B2=" << result.argmax.b2 << '\n';
      break;
    }
    case Command::kTomo: {
      std::vector<BellReport> reports;
      TomographyRecord record;
      if (!c.record_in.empty()) {
        std::ifstream is(c.record_in, std::ios::binary);
        if (!is) throw std::runtime_error("cannot open record file " + c.record_in);
        std::stringstream buffer;
        buffer << is.rdbuf();
        record = io::tomography_from_csv(buffer.str());
        const PairState state = reconstruct_state(record);
        reports = scan_dimensions(state, c.n_max);
      } else {
        const ExperimentConfig ec = experiment_config(c);
        record = simulate_tomography(ec.pair_model.pair_state(), ec.events_per_setting,
                                     derive_seed(ec.seed, 0));
        reports = scan_from_tomography(ec, c.n_max);
      }
      io::write_file_atomic(out_path, render_bell(c, reports, kv));
      if (!c.record_out.empty()) {
        io::write_file_atomic(resolve_artifact_path(c.record_out),
                              header_comment(c, kv) + io::tomography_csv(record));
      }
      print_bell_summaries(reports);
      break;
    }
  }
  return 0;
}

}  // namespace

std::string command_name(Command command) {
  switch (command) {
    case Command::kIdealScan: return "ideal-scan";
    case Command::kNoisyScan: return "noisy-scan";
    case Command::kSimulate: return "simulate";
    case Command::kWitness: return "witness";
    case Command::kAngles: return "angles";
    case Command::kLhvBound: return "lhv-bound";
    case Command::kTomo: return "tomo";
  }
  return "unknown";
}

int run(const RunConfig& config) {
  try {
    validate(config);
    return execute(config);
  } catch (const UsageError& e) {
    std::cerr << "qbell: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "qbell: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "qbell: error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace qbell
