#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "h2kin/constants.hpp"
#include "h2kin/flame1d.hpp"
#include "h2kin/mechanism.hpp"
#include "h2kin/reactor0d.hpp"

namespace h2kin {

/// Order-of-magnitude flame speed from thermal diffusivity and a chemical
/// time, u = sqrt(alpha / tau) (unity Lewis number assumed).
struct ZfkEstimate {
  double alpha = 0.0;       // m^2/s
  double tau = 0.0;         // s
  double u_estimate = 0.0;  // m/s
};

/// sqrt(alpha / tau). Throws DomainError unless both are positive.
double zfk_speed(double alpha, double tau);

/// alpha of the unburned mixture evaluated at T_ref and P, tau the 0D
/// ignition delay from T_ref. Throws DomainError if the mixture does not
/// ignite.
ZfkEstimate zfk_estimate(const Mechanism& m, double phi, double T_ref = 2000.0, double P = kOneAtmosphere);

/// Flame-speed ratio u1/u2 = sqrt(tau_2 / tau_1) of two kinetic models.
/// The delays are meant to be taken at flame temperature.
double speed_ratio(double tau_1, double tau_2);

/// Shortest round-trip decimal form; "nan"/"inf" for non-finite values.
std::string format_number(double v);

struct IgnitionTable {
  std::string name;
  nlohmann::json config;
  std::vector<IgnitionRow> rows;
};

struct FlameTable {
  std::string name;
  nlohmann::json config;
  std::vector<FlameRow> rows;
};

struct GridTable {
  std::string name;
  nlohmann::json config;
  std::vector<GridRow> rows;
};

std::string to_csv(const std::vector<IgnitionRow>& rows);
std::string to_csv(const std::vector<FlameRow>& rows);
std::string to_csv(const std::vector<GridRow>& rows);

nlohmann::json to_json(const IgnitionRow& r);
nlohmann::json to_json(const FlameRow& r);
nlohmann::json to_json(const GridRow& r);

struct ReportInput {
  std::vector<IgnitionTable> ignition;
  std::vector<FlameTable> flames;
  std::vector<GridTable> grids;
  std::optional<ZfkEstimate> zfk;
};

/// Check evaluated on the report data. `passed` is empty when the data
/// needed for the check is missing.
struct Verdict {
  std::string name;
  std::optional<bool> passed;
  std::string detail;
};

/// Grid-study checks: 2.5/5 um plateau within 2%, 40 um off by more than
/// 20% (or failed), cpu_time increasing with refinement, and
/// cpu(0.5 um)/cpu(5 um) >= 5.
std::vector<Verdict> grid_verdicts(const std::vector<GridRow>& rows);
/// Single interior maximum of u_lam located at phi > 1.
Verdict flame_peak_verdict(const std::vector<FlameRow>& rows);
/// Delays strictly decreasing with T0 over ignited rows.
Verdict ignition_monotone_verdict(const std::vector<IgnitionRow>& rows);

struct Report {
  nlohmann::json document;
  /// (file name, contents) per dataset.
  std::vector<std::pair<std::string, std::string>> csv;

  std::string json_text() const;
  /// Writes report.json and the CSV files into `dir` (created if needed).
  void write(const std::filesystem::path& dir) const;
};

/// Throws DomainError when the input holds no table.
Report make_report(const ReportInput& in);

}  // namespace h2kin
