#include "h2kin/analysis.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "h2kin/error.hpp"
#include "h2kin/transport.hpp"

namespace h2kin {

using nlohmann::json;

double zfk_speed(double alpha, double tau) {
  if (!(alpha > 0.0) || !(tau > 0.0)) throw DomainError("ZFK estimate needs positive alpha and tau");
  return std::sqrt(alpha / tau);
}

ZfkEstimate zfk_estimate(const Mechanism& m, double phi, double T_ref, double P) {
  Eigen::VectorXd X = h2_air_mole_fractions(m, phi);
  ThermoState s = state_from_TPX(m, T_ref, P, X);
  ZfkEstimate z;
  z.alpha = transport_coefficients(m, s).alpha;
  ReactorTrajectory traj = integrate(m, h2_air_reactor(m, T_ref, P, phi));
  if (!traj.ignition_delay) throw DomainError("mixture does not ignite at the reference temperature");
  z.tau = *traj.ignition_delay;
  z.u_estimate = zfk_speed(z.alpha, z.tau);
  return z;
}

double speed_ratio(double tau_1, double tau_2) {
  if (!(tau_1 > 0.0) || !(tau_2 > 0.0)) throw DomainError("speed ratio needs positive delays");
  return std::sqrt(tau_2 / tau_1);
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string optional_number(const std::optional<double>& v) { return v ? format_number(*v) : ""; }

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

std::string to_csv(const std::vector<IgnitionRow>& rows) {
  std::string out = "T0_K,delay_s,status,T_final_K,accepted_steps,rejected_steps,rhs_evaluations\r\n";
  for (const auto& r : rows) {
    out += format_number(r.T0) + "," + optional_number(r.delay) + "," + csv_field(r.status) + "," +
           format_number(r.T_final) + "," + std::to_string(r.stats.accepted_steps) + "," +
           std::to_string(r.stats.rejected_steps) + "," + std::to_string(r.stats.rhs_evaluations) + "\r\n";
  }
  return out;
}

std::string to_csv(const std::vector<FlameRow>& rows) {
  std::string out = "phi,status,u_lam_m_s,thickness_m,T_outlet_K,simulated_time_s,steps,message\r\n";
  for (const auto& r : rows) {
    out += format_number(r.phi) + "," + to_string(r.status) + "," + format_number(r.u_lam) + "," +
           format_number(r.thickness) + "," + format_number(r.T_burned) + "," + format_number(r.simulated_time) + "," +
           std::to_string(r.steps) + "," + csv_field(r.message) + "\r\n";
  }
  return out;
}

std::string to_csv(const std::vector<GridRow>& rows) {
  std::string out = "dx_m,n_cells,status,cost_only,u_lam_m_s,cpu_time_s_per_ms,message\r\n";
  for (const auto& r : rows) {
    out += format_number(r.dx) + "," + std::to_string(r.n_cells) + "," + to_string(r.status) + "," +
           (r.cost_only ? "true" : "false") + "," + format_number(r.u_lam) + "," + format_number(r.cpu_time) + "," +
           csv_field(r.message) + "\r\n";
  }
  return out;
}

json to_json(const IgnitionRow& r) {
  return {{"T0_K", r.T0},
          {"delay_s", r.delay ? json(*r.delay) : json(nullptr)},
          {"status", r.status},
          {"T_final_K", number_or_null(r.T_final)},
          {"accepted_steps", r.stats.accepted_steps},
          {"rejected_steps", r.stats.rejected_steps},
          {"rhs_evaluations", r.stats.rhs_evaluations}};
}

json to_json(const FlameRow& r) {
  return {{"phi", r.phi},
          {"status", to_string(r.status)},
          {"u_lam_m_s", number_or_null(r.u_lam)},
          {"thickness_m", number_or_null(r.thickness)},
          {"T_outlet_K", number_or_null(r.T_burned)},
          {"simulated_time_s", number_or_null(r.simulated_time)},
          {"steps", r.steps},
          {"message", r.message}};
}

json to_json(const GridRow& r) {
  return {{"dx_m", r.dx},
          {"n_cells", r.n_cells},
          {"status", to_string(r.status)},
          {"cost_only", r.cost_only},
          {"u_lam_m_s", number_or_null(r.u_lam)},
          {"cpu_time_s_per_ms", number_or_null(r.cpu_time)},
          {"message", r.message}};
}

namespace {

const GridRow* find_spacing(const std::vector<GridRow>& rows, double dx) {
  for (const auto& r : rows)
    if (std::abs(r.dx - dx) <= 1e-3 * dx) return &r;
  return nullptr;
}

}  // namespace

std::vector<Verdict> grid_verdicts(const std::vector<GridRow>& rows) {
  std::vector<Verdict> out;
  const GridRow* fine = find_spacing(rows, 2.5e-6);
  const GridRow* base = find_spacing(rows, 5e-6);
  const GridRow* coarse = find_spacing(rows, 40e-6);
  const GridRow* finest = find_spacing(rows, 0.5e-6);

  Verdict plateau{"grid_plateau_2.5um_5um_within_2pct", std::nullopt, "rows for 2.5 um and 5 um required"};
  const bool have_plateau =
      fine && base && fine->status == FlameStatus::Steady && base->status == FlameStatus::Steady && base->u_lam > 0.0;
  if (fine && base) {
    if (have_plateau) {
      double rel = std::abs(fine->u_lam - base->u_lam) / base->u_lam;
      plateau.passed = rel <= 0.02;
      plateau.detail = "relative difference " + format_number(rel);
    } else {
      plateau.passed = false;
      plateau.detail = "a plateau run did not reach steady state";
    }
  }
  out.push_back(plateau);

  Verdict limit{"grid_limit_40um_off_by_20pct_or_failed", std::nullopt, "rows for 5 um and 40 um required"};
  if (coarse && base) {
    if (coarse->status != FlameStatus::Steady) {
      limit.passed = true;
      limit.detail = "40 um run failed: " + to_string(coarse->status);
    } else if (have_plateau) {
      double ref = 0.5 * (fine->u_lam + base->u_lam);
      double rel = std::abs(coarse->u_lam - ref) / ref;
      limit.passed = rel > 0.20;
      limit.detail = "relative deviation " + format_number(rel);
    }
  }
  out.push_back(limit);

  Verdict mono{"grid_cost_increases_with_refinement", std::nullopt, "at least two timed rows required"};
  std::vector<const GridRow*> timed;
  for (const auto& r : rows)
    if (r.cpu_time > 0.0) timed.push_back(&r);
  std::sort(timed.begin(), timed.end(), [](const GridRow* a, const GridRow* b) { return a->dx < b->dx; });
  if (timed.size() >= 2) {
    bool ok = true;
    for (std::size_t i = 1; i < timed.size(); ++i) ok = ok && timed[i - 1]->cpu_time > timed[i]->cpu_time;
    mono.passed = ok;
    mono.detail = std::to_string(timed.size()) + " timed rows";
  }
  out.push_back(mono);

  Verdict ratio{"grid_cost_ratio_0.5um_over_5um_at_least_5", std::nullopt, "timed rows for 0.5 um and 5 um required"};
  if (finest && base && finest->cpu_time > 0.0 && base->cpu_time > 0.0) {
    double r = finest->cpu_time / base->cpu_time;
    ratio.passed = r >= 5.0;
    ratio.detail = "ratio " + format_number(r);
  }
  out.push_back(ratio);
  return out;
}

Verdict flame_peak_verdict(const std::vector<FlameRow>& rows) {
  Verdict v{"flame_speed_single_interior_peak_rich", std::nullopt, "at least three steady rows required"};
  std::vector<const FlameRow*> ok;
  for (const auto& r : rows)
    if (r.status == FlameStatus::Steady) ok.push_back(&r);
  std::sort(ok.begin(), ok.end(), [](const FlameRow* a, const FlameRow* b) { return a->phi < b->phi; });
  if (ok.size() < 3) return v;
  std::size_t peak = 0;
  int local_maxima = 0;
  for (std::size_t i = 0; i < ok.size(); ++i) {
    if (ok[i]->u_lam > ok[peak]->u_lam) peak = i;
    bool left = i == 0 || ok[i]->u_lam > ok[i - 1]->u_lam;
    bool right = i + 1 == ok.size() || ok[i]->u_lam > ok[i + 1]->u_lam;
    if (left && right) ++local_maxima;
  }
  const bool interior = peak > 0 && peak + 1 < ok.size();
  v.passed = interior && local_maxima == 1 && ok[peak]->phi > 1.0;
  v.detail = "peak at phi " + format_number(ok[peak]->phi) + " (u_lam " + format_number(ok[peak]->u_lam) + " m/s), " +
             std::to_string(local_maxima) + " local maxima";
  return v;
}

Verdict ignition_monotone_verdict(const std::vector<IgnitionRow>& rows) {
  Verdict v{"ignition_delay_decreases_with_T0", std::nullopt, "at least two ignited rows required"};
  std::vector<const IgnitionRow*> ok;
  for (const auto& r : rows)
    if (r.delay) ok.push_back(&r);
  std::sort(ok.begin(), ok.end(), [](const IgnitionRow* a, const IgnitionRow* b) { return a->T0 < b->T0; });
  if (ok.size() < 2) return v;
  bool mono = true;
  for (std::size_t i = 1; i < ok.size(); ++i) mono = mono && *ok[i]->delay < *ok[i - 1]->delay;
  v.passed = mono;
  v.detail = std::to_string(ok.size()) + " ignited rows";
  return v;
}

std::string Report::json_text() const { return document.dump(2) + "\n"; }

void Report::write(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  auto put = [&](const std::filesystem::path& p, const std::string& text) {
    std::ofstream os(p, std::ios::binary);
    if (!os) throw Error("cannot write " + p.string());
    os << text;
  };
  put(dir / "report.json", json_text());
  for (const auto& [name, text] : csv) put(dir / name, text);
}

Report make_report(const ReportInput& in) {
  if (in.ignition.empty() && in.flames.empty() && in.grids.empty()) throw DomainError("report needs at least one table");
  Report rep;
  json doc;
  doc["tool"] = "h2kin";
  doc["version"] = H2KIN_VERSION;
  json datasets = json::array();
  json verdicts = json::array();
  auto add_verdict = [&](const Verdict& v, const std::string& dataset) {
    verdicts.push_back({{"name", v.name},
                        {"dataset", dataset},
                        {"passed", v.passed ? json(*v.passed) : json(nullptr)},
                        {"detail", v.detail}});
  };

  for (const auto& t : in.ignition) {
    json rows = json::array();
    for (const auto& r : t.rows) rows.push_back(to_json(r));
    std::string file = "ignition_" + t.name + ".csv";
    datasets.push_back({{"name", t.name}, {"kind", "ignition-delay"}, {"csv", file}, {"config", t.config}, {"rows", rows}});
    rep.csv.emplace_back(file, to_csv(t.rows));
    add_verdict(ignition_monotone_verdict(t.rows), t.name);
  }
  for (const auto& t : in.flames) {
    json rows = json::array();
    for (const auto& r : t.rows) rows.push_back(to_json(r));
    std::string file = "flame_" + t.name + ".csv";
    datasets.push_back({{"name", t.name}, {"kind", "flame-speed"}, {"csv", file}, {"config", t.config}, {"rows", rows}});
    rep.csv.emplace_back(file, to_csv(t.rows));
    add_verdict(flame_peak_verdict(t.rows), t.name);
  }
  for (const auto& t : in.grids) {
    json rows = json::array();
    for (const auto& r : t.rows) rows.push_back(to_json(r));
    std::string file = "grid_" + t.name + ".csv";
    datasets.push_back({{"name", t.name}, {"kind", "grid-study"}, {"csv", file}, {"config", t.config}, {"rows", rows}});
    rep.csv.emplace_back(file, to_csv(t.rows));
    for (const auto& v : grid_verdicts(t.rows)) add_verdict(v, t.name);
  }
  doc["datasets"] = datasets;
  doc["verdicts"] = verdicts;
  if (in.zfk) {
    doc["zfk"] = {{"alpha_m2_s", in.zfk->alpha},
                  {"tau_s", in.zfk->tau},
                  {"u_estimate_m_s", in.zfk->u_estimate},
                  {"note", "order-of-magnitude estimate assuming unit Lewis number; delays taken at flame temperature"}};
  }
  rep.document = std::move(doc);
  return rep;
}

}  // namespace h2kin
