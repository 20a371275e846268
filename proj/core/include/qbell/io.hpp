#pragma once

#include <filesystem>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "qbell/bell.hpp"
#include "qbell/experiment.hpp"
#include "qbell/witness.hpp"

namespace qbell::io {

inline constexpr int kSchemaVersion = 1;

// Shortest round-trip decimal representation, locale independent.
std::string format_double(double x);

// Writes via a temporary file in the target directory plus rename, so a
// partially written artifact is never observable under `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

nlohmann::json bell_report_json(const BellReport& report);
nlohmann::json witness_result_json(const WitnessResult& result);

// CSV bodies (callers prepend the config header comment).
// Columns: d,I_d,stderr (stderr blank when absent).
std::string bell_reports_csv(const std::vector<BellReport>& reports);
// Columns: d,fidelity,S_L.
std::string witness_csv(const std::vector<WitnessResult>& results);
// Columns: party,setting,outcome,qubit_m,theta_hwp_rad,gamma_qwp_rad;
// the full waveplate schedule for dimension d.
std::string angles_csv(int d);
// Columns: setting_label,count.
std::string tomography_csv(const TomographyRecord& record);
TomographyRecord tomography_from_csv(const std::string& text);

}  // namespace qbell::io
