#include "qbell/io.hpp"

#include <unistd.h>

#include <charconv>
#include <fstream>
#include <sstream>

#include "qbell/measurement.hpp"
#include "qbell/rng.hpp"

namespace qbell::io {

namespace {

[[noreturn]] void fail(const std::string& what) { throw std::runtime_error(what); }

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, sep)) out.push_back(field);
  return out;
}

}  // namespace

std::string format_double(double x) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc()) fail("format_double: conversion failed");
  return std::string(buf, ptr);
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  const auto dir = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  const auto tmp = dir / (path.filename().string() + ".tmp." +
                          std::to_string(derive_seed(
                              static_cast<std::uint64_t>(
                                  std::hash<std::string>{}(path.string())),
                              static_cast<std::uint64_t>(::getpid()))));
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) fail("cannot open temporary file " + tmp.string());
    os << content;
    os.flush();
    if (!os) fail("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    fail("atomic rename to " + path.string() + " failed: " + ec.message());
  }
}

nlohmann::json bell_report_json(const BellReport& report) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& t : report.terms) {
    terms.push_back({{"k", t.k},
                     {"weight", t.weight},
                     {"positive", t.positive},
                     {"negative", t.negative}});
  }
  nlohmann::json j{{"d", report.d},
                   {"value", report.value},
                   {"terms", std::move(terms)},
                   {"classical_bound", report.classical_bound},
                   {"violation", report.violation}};
  j["stderr"] = report.std_error ? nlohmann::json(*report.std_error) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json witness_result_json(const WitnessResult& result) {
  return {{"d", result.d},
          {"fidelity", result.fidelity},
          {"S_L", result.bound},
          {"certified", result.certified}};
}

std::string bell_reports_csv(const std::vector<BellReport>& reports) {
  std::ostringstream os;
  os << "d,I_d,stderr\n";
  for (const auto& r : reports) {
    os << r.d << ',' << format_double(r.value) << ','
       << (r.std_error ? format_double(*r.std_error) : "") << '\n';
  }
  return os.str();
}

std::string witness_csv(const std::vector<WitnessResult>& results) {
  std::ostringstream os;
  os << "d,fidelity,S_L\n";
  for (const auto& r : results)
    os << r.d << ',' << format_double(r.fidelity) << ',' << r.bound << '\n';
  return os.str();
}

std::string angles_csv(int d) {
  const int n = log2_exact(d);
  std::ostringstream os;
  os << "party,setting,outcome,qubit_m,theta_hwp_rad,gamma_qwp_rad\n";
  for (Party party : {Party::A, Party::B})
    for (int setting = 1; setting <= 2; ++setting)
      for (int outcome = 0; outcome < d; ++outcome)
        for (int m = 1; m <= n; ++m) {
          const SettingSpec spec(party, setting);
          const WaveplateSetting w = compile_angles(spec, outcome, m);
          os << (party == Party::A ? 'A' : 'B') << ',' << setting << ',' << outcome << ',' << m
             << ',' << format_double(w.theta_hwp) << ',' << format_double(w.gamma_qwp) << '\n';
        }
  return os.str();
}

std::string tomography_csv(const TomographyRecord& record) {
  std::ostringstream os;
  os << "setting_label,count\n";
  for (const auto& [label, count] : record.counts) os << label << ',' << count << '\n';
  return os.str();
}

TomographyRecord tomography_from_csv(const std::string& text) {
  TomographyRecord record;
  std::istringstream is(text);
  std::string line;
  bool header_seen = false;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      if (line != "setting_label,count") fail("tomography CSV: unexpected header '" + line + "'");
      header_seen = true;
      continue;
    }
    const auto fields = split(line, ',');
    if (fields.size() != 2) fail("tomography CSV: malformed row '" + line + "'");
    std::int64_t count = 0;
    const auto& digits = fields[1];
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), count);
    if (ec != std::errc() || ptr != digits.data() + digits.size())
      fail("tomography CSV: bad count in row '" + line + "'");
    record.counts.emplace_back(fields[0], count);
  }
  if (!header_seen) fail("tomography CSV: missing header");
  return record;
}

}  // namespace qbell::io
