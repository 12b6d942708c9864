// h2kin command-line front end: mechanism inspection, 0D ignition runs and
// sweeps, 1D flame runs, sweeps and grid studies, and report assembly.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "h2kin/analysis.hpp"
#include "h2kin/error.hpp"
#include "h2kin/flame1d.hpp"
#include "h2kin/mechanism.hpp"
#include "h2kin/reactor0d.hpp"
#include "h2kin/thermo.hpp"
#include "units.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace h2kin;
using cli::Quantity;

namespace {

enum ExitCode { kOk = 0, kParse = 2, kValidation = 3, kRuntime = 4, kExtinction = 5, kBlowOff = 6, kFlashback = 7 };

struct Common {
  std::string mech = "skeletal";
  std::string out = ".";
  int jobs = 1;
};

struct MixtureOptions {
  std::string phi = "1.0";
  std::string X;  // "H2:2,O2:1,N2:3.76"; overrides phi
};

std::vector<std::pair<std::string, double>> parse_pairs(const std::string& text) {
  std::vector<std::pair<std::string, double>> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto colon = item.find(':');
    if (colon == std::string::npos) throw cli::UnitError("composition entry '" + item + "' must be name:value");
    out.emplace_back(item.substr(0, colon), cli::parse_quantity(item.substr(colon + 1), Quantity::Dimensionless));
  }
  return out;
}

json composition_json(const Mechanism& m, const Eigen::VectorXd& X) {
  json j = json::object();
  for (int k = 0; k < m.n_species(); ++k)
    if (X(k) > 0.0) j[m.species(k).name] = X(k);
  return j;
}

void write_text(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream os(p, std::ios::binary);
  if (!os) throw Error("cannot write " + p.string());
  os << text;
}

void write_json(const fs::path& p, const json& j) { write_text(p, j.dump(2) + "\n"); }

// Resolves a builtin name or file. Missing files are input errors; a
// mechanism failing validation is rejected before any compute.
Mechanism load_mechanism_checked(const std::string& name, bool require_valid = true) {
  if (name != "skeletal" && name != "builtin:skeletal" && !fs::is_regular_file(name))
    throw cli::UnitError("mechanism '" + name + "' is neither a builtin name nor a readable file");
  Mechanism m = resolve_mechanism(name);
  if (require_valid) {
    ValidationReport rep = validate_mechanism(m);
    for (const auto& issue : rep.issues)
      if (issue.severity == Severity::Error) throw MechanismError("mechanism validation failed: " + issue.message);
  }
  return m;
}

json envelope(const std::string& kind, const json& config) {
  return {{"tool", "h2kin"}, {"version", H2KIN_VERSION}, {"kind", kind}, {"config", config}};
}

// ---------------------------------------------------------------- mech-info

int cmd_mech_info(const std::string& mech) {
  Mechanism m = load_mechanism_checked(mech, false);
  std::printf("mechanism %s\n", m.name().c_str());
  std::printf("elements %d, species %d, reactions %d, bath gas %s\n", m.n_elements(), m.n_species(), m.n_reactions(),
              m.bath_gas().c_str());
  std::printf("species:");
  for (const auto& s : m.species()) std::printf(" %s", s.name.c_str());
  std::printf("\n");
  std::printf("%-6s %-28s %14s %8s %12s  %s\n", "label", "equation", "A [cgs]", "n", "Ea [kcal]", "notes");
  for (int r = 0; r < m.n_reactions(); ++r) {
    const Reaction& rx = m.reaction(r);
    ArrheniusParams p = arrhenius_to_cgs_kcal(rx.rate, rx.molecularity());
    std::string notes = rx.reversible() ? "reverse from equilibrium" : "";
    if (rx.third_body && !rx.third_body->efficiencies.empty()) {
      std::string eff;
      for (const auto& [name, v] : rx.third_body->efficiencies) eff += " " + name + ":" + format_number(v);
      notes += (notes.empty() ? "" : "; ") + std::string("efficiencies") + eff;
    }
    std::printf("%-6s %-28s %14.4g %8.4g %12.5g  %s\n", rx.label.c_str(), equation_string(m, rx).c_str(), p.A, p.n, p.Ea,
                notes.c_str());
  }
  ValidationReport rep = validate_mechanism(m);
  for (const auto& issue : rep.issues)
    std::printf("%s: %s\n", issue.severity == Severity::Error ? "error" : "warning", issue.message.c_str());
  std::printf("validation: %s\n", rep.has_errors() ? "FAILED" : "ok");
  return rep.has_errors() ? kValidation : kOk;
}

// ------------------------------------------------------------------ ignite

struct IgniteOptions {
  std::string T0 = "1200K";
  std::string P = "1atm";
  MixtureOptions mix;
  std::string t_end = "1s";
  std::string delay_dT = "500K";
  double rtol = 1e-8;
  double atol_Y = 1e-14;
  std::string atol_T = "1e-6K";
  int output_every = 1;
};

ReactorConfig reactor_config(const Mechanism& m, const IgniteOptions& o) {
  ReactorConfig c;
  c.T0 = cli::parse_quantity(o.T0, Quantity::Temperature);
  c.P0 = cli::parse_quantity(o.P, Quantity::Pressure);
  c.X0 = o.mix.X.empty() ? h2_air_mole_fractions(m, cli::parse_quantity(o.mix.phi, Quantity::Dimensionless))
                         : mole_fractions_from_pairs(m, parse_pairs(o.mix.X));
  c.t_end = cli::parse_quantity(o.t_end, Quantity::Time);
  c.delay_criterion_dT = cli::parse_quantity(o.delay_dT, Quantity::Temperature);
  c.rtol = o.rtol;
  c.atol_Y = o.atol_Y;
  c.atol_T = cli::parse_quantity(o.atol_T, Quantity::Temperature);
  c.output_every = o.output_every;
  return c;
}

json reactor_config_json(const Mechanism& m, const std::string& mech, const ReactorConfig& c) {
  return {{"mechanism", mech},
          {"T0_K", c.T0},
          {"P_Pa", c.P0},
          {"X0", composition_json(m, c.X0)},
          {"t_end_s", c.t_end},
          {"delay_criterion_dT_K", c.delay_criterion_dT},
          {"rtol", c.rtol},
          {"atol_Y", c.atol_Y},
          {"atol_T_K", c.atol_T},
          {"tail_factor", c.tail_factor},
          {"output_every", c.output_every}};
}

int cmd_ignite(const Common& com, const IgniteOptions& o) {
  Mechanism m = load_mechanism_checked(com.mech);
  ReactorConfig c = reactor_config(m, o);
  validate(c, m);
  ReactorTrajectory traj = integrate(m, c);

  std::string csv = "t_s,T_K,P_Pa";
  for (const auto& s : m.species()) csv += ",Y_" + s.name;
  csv += "\r\n";
  for (std::size_t i = 0; i < traj.t.size(); ++i) {
    const ThermoState& s = traj.states[i];
    csv += format_number(traj.t[i]) + "," + format_number(s.T) + "," + format_number(pressure(m, s));
    for (int k = 0; k < m.n_species(); ++k) csv += "," + format_number(s.Y(k));
    csv += "\r\n";
  }
  IgnitionRow row;
  row.T0 = c.T0;
  row.delay = traj.ignition_delay;
  row.status = traj.ignition_delay ? "ignited" : "not-ignited";
  row.stats = traj.stats;
  row.T_final = traj.states.back().T;
  json j = envelope("ignition", reactor_config_json(m, com.mech, c));
  j["result"] = to_json(row);
  write_json(fs::path(com.out) / "ignite.json", j);
  write_text(fs::path(com.out) / "ignite_trajectory.csv", csv);
  if (traj.ignition_delay)
    std::printf("T0 %s K: ignition delay %s s\n", format_number(c.T0).c_str(), format_number(*traj.ignition_delay).c_str());
  else
    std::printf("T0 %s K: not ignited by %s s\n", format_number(c.T0).c_str(), format_number(c.t_end).c_str());
  return kOk;
}

int cmd_ignite_sweep(const Common& com, const IgniteOptions& o) {
  Mechanism m = load_mechanism_checked(com.mech);
  std::vector<double> T0s = cli::parse_list(o.T0, Quantity::Temperature);
  IgniteOptions single = o;
  single.T0 = "1000K";
  ReactorConfig base = reactor_config(m, single);
  base.output_every = std::max(base.output_every, 1);
  for (double T : T0s) {
    ReactorConfig c = base;
    c.T0 = T;
    validate(c, m);
  }
  std::vector<IgnitionRow> rows = sweep_ignition(m, T0s, base, com.jobs);
  json config = reactor_config_json(m, com.mech, base);
  config.erase("T0_K");
  config["T0_list_K"] = T0s;
  std::sort(config["T0_list_K"].begin(), config["T0_list_K"].end());
  json j = envelope("ignition-sweep", config);
  j["rows"] = json::array();
  for (const auto& r : rows) j["rows"].push_back(to_json(r));
  write_json(fs::path(com.out) / "ignite_sweep.json", j);
  write_text(fs::path(com.out) / "ignite_sweep.csv", to_csv(rows));
  std::fputs(to_csv(rows).c_str(), stdout);
  return kOk;
}

// ------------------------------------------------------------------- flame

struct FlameOptions {
  MixtureOptions mix;
  std::string dx = "5um";
  int cells = 400;
  std::string u_in = "1m/s";
  std::string T_in = "298K";
  std::string P = "1atm";
  std::string kernel_width = "300um";
  std::string kernel_T = "2200K";
  double kernel_position = 0.6;
  std::string t_end = "20ms";
  double cfl = 0.4;
  std::string convection = "upwind";
  bool no_follow = false;
  double steady_tolerance = 0.01;
};

FlameConfig flame_config(const Mechanism& m, const FlameOptions& o) {
  FlameConfig c;
  c.phi = cli::parse_quantity(o.mix.phi, Quantity::Dimensionless);
  if (!o.mix.X.empty()) c.X_in = mole_fractions_from_pairs(m, parse_pairs(o.mix.X));
  c.dx = cli::parse_quantity(o.dx, Quantity::Length);
  c.n_cells = o.cells;
  c.u_in = cli::parse_quantity(o.u_in, Quantity::Velocity);
  c.T_in = cli::parse_quantity(o.T_in, Quantity::Temperature);
  c.P = cli::parse_quantity(o.P, Quantity::Pressure);
  c.kernel.width = cli::parse_quantity(o.kernel_width, Quantity::Length);
  c.kernel.temperature = cli::parse_quantity(o.kernel_T, Quantity::Temperature);
  c.kernel.position = o.kernel_position;
  c.t_end = cli::parse_quantity(o.t_end, Quantity::Time);
  c.cfl = o.cfl;
  if (o.convection == "upwind")
    c.convection = ConvectionScheme::Upwind;
  else if (o.convection == "muscl")
    c.convection = ConvectionScheme::Muscl;
  else
    throw cli::UnitError("convection scheme must be 'upwind' or 'muscl'");
  c.follow_front = !o.no_follow;
  c.steady_tolerance = o.steady_tolerance;
  return c;
}

json flame_config_json(const Mechanism& m, const std::string& mech, const FlameConfig& c) {
  json j = {{"mechanism", mech},
            {"dx_m", c.dx},
            {"n_cells", c.n_cells},
            {"T_in_K", c.T_in},
            {"P_Pa", c.P},
            {"u_in_m_s", c.u_in},
            {"kernel", {{"position", c.kernel.position}, {"width_m", c.kernel.width}, {"temperature_K", c.kernel.temperature}}},
            {"t_end_s", c.t_end},
            {"cfl", c.cfl},
            {"max_dT_rel", c.max_dT_rel},
            {"dt_max_s", c.dt_max},
            {"convection", c.convection == ConvectionScheme::Muscl ? "muscl" : "upwind"},
            {"follow_front", c.follow_front},
            {"steady_window_thicknesses", c.steady_window_thicknesses},
            {"steady_tolerance", c.steady_tolerance},
            {"extinction_speed_m_s", c.extinction_speed},
            {"extinction_check_time_s", c.extinction_check_time},
            {"chem_rtol", c.chem_rtol},
            {"chem_atol", c.chem_atol}};
  if (c.X_in.size())
    j["X_in"] = composition_json(m, c.X_in / c.X_in.sum());
  else
    j["phi"] = c.phi;
  return j;
}

int flame_exit_code(FlameStatus s) {
  switch (s) {
    case FlameStatus::Steady: return kOk;
    case FlameStatus::Extinction: return kExtinction;
    case FlameStatus::BlowOff: return kBlowOff;
    case FlameStatus::Flashback: return kFlashback;
    case FlameStatus::NotConverged:
    case FlameStatus::Diverged: return kRuntime;
  }
  return kRuntime;
}

int cmd_flame(const Common& com, const FlameOptions& o) {
  Mechanism m = load_mechanism_checked(com.mech);
  FlameConfig c = flame_config(m, o);
  validate(c, m);
  FlameSolver solver(m, c);
  FlameResult r = solver.run();

  const FlameField& f = r.field;
  std::string profile = "x_m,T_K,rho_kg_m3,u_m_s";
  for (const auto& s : m.species()) profile += ",Y_" + s.name;
  profile += "\r\n";
  for (int k = 0; k < f.n_cells(); ++k) {
    profile += format_number(f.x(k)) + "," + format_number(f.T(k)) + "," + format_number(f.rho(k)) + "," +
               format_number(f.velocity(k));
    for (int i = 0; i < m.n_species(); ++i) profile += "," + format_number(f.Y(i, k));
    profile += "\r\n";
  }
  std::string front = "t_s,x_front_m\r\n";
  for (const auto& s : r.front_history) front += format_number(s.t) + "," + format_number(s.x) + "\r\n";

  json j = envelope("flame", flame_config_json(m, com.mech, c));
  j["result"] = {{"status", to_string(r.status)},
                 {"steady", r.steady},
                 {"u_lam_m_s", r.u_lam},
                 {"consumption_speed_m_s", r.consumption_speed},
                 {"thickness_m", r.thickness},
                 {"T_outlet_K", r.T_burned},
                 {"simulated_time_s", r.simulated_time},
                 {"steps", r.steps},
                 {"rejected_steps", r.rejected_steps},
                 {"message", r.message}};
  write_json(fs::path(com.out) / "flame.json", j);
  write_text(fs::path(com.out) / "flame_profile.csv", profile);
  write_text(fs::path(com.out) / "flame_front.csv", front);
  std::printf("status %s, u_lam %s m/s, thickness %s m", to_string(r.status).c_str(), format_number(r.u_lam).c_str(),
              format_number(r.thickness).c_str());
  if (!r.message.empty()) std::printf(" (%s)", r.message.c_str());
  std::printf("\n");
  return flame_exit_code(r.status);
}

int cmd_flame_sweep(const Common& com, const FlameOptions& o) {
  Mechanism m = load_mechanism_checked(com.mech);
  std::vector<double> phis = cli::parse_list(o.mix.phi, Quantity::Dimensionless);
  FlameOptions single = o;
  single.mix.phi = "1";
  single.mix.X.clear();
  FlameConfig base = flame_config(m, single);
  for (double phi : phis) {
    FlameConfig c = base;
    c.phi = phi;
    validate(c, m);
  }
  std::vector<FlameRow> rows = sweep_flame(m, phis, base, com.jobs);
  json config = flame_config_json(m, com.mech, base);
  config.erase("phi");
  std::sort(phis.begin(), phis.end());
  config["phi_list"] = phis;
  json j = envelope("flame-sweep", config);
  j["rows"] = json::array();
  for (const auto& r : rows) j["rows"].push_back(to_json(r));
  write_json(fs::path(com.out) / "flame_sweep.json", j);
  write_text(fs::path(com.out) / "flame_sweep.csv", to_csv(rows));
  std::fputs(to_csv(rows).c_str(), stdout);
  return kOk;
}

int cmd_grid_study(const Common& com, const FlameOptions& o, const std::string& spacings, double cost_only_below,
                   long timing_steps) {
  Mechanism m = load_mechanism_checked(com.mech);
  std::vector<double> dxs = cli::parse_spacing_list(spacings);
  for (double dx : dxs)
    if (!(dx > 0.0)) throw DomainError("grid spacings must be positive");
  FlameConfig base = flame_config(m, o);
  validate(base, m);
  GridStudyOptions opt;
  opt.cost_only_below = cost_only_below;
  opt.timing_steps = timing_steps;
  std::vector<GridRow> rows = grid_study(m, dxs, base, opt);
  json config = flame_config_json(m, com.mech, base);
  config["domain_length_m"] = base.dx * base.n_cells;
  std::sort(dxs.begin(), dxs.end());
  config["dx_list_m"] = dxs;
  config["cost_only_below_m"] = opt.cost_only_below;
  config["timing_steps"] = opt.timing_steps;
  json j = envelope("grid-study", config);
  j["rows"] = json::array();
  for (const auto& r : rows) j["rows"].push_back(to_json(r));
  json verdicts = json::array();
  for (const auto& v : grid_verdicts(rows))
    verdicts.push_back({{"name", v.name}, {"passed", v.passed ? json(*v.passed) : json(nullptr)}, {"detail", v.detail}});
  j["verdicts"] = verdicts;
  write_json(fs::path(com.out) / "grid_study.json", j);
  write_text(fs::path(com.out) / "grid_study.csv", to_csv(rows));
  std::fputs(to_csv(rows).c_str(), stdout);
  return kOk;
}

// ------------------------------------------------------------------ report

FlameStatus status_from_string(const std::string& s) {
  for (FlameStatus st : {FlameStatus::Steady, FlameStatus::NotConverged, FlameStatus::Extinction, FlameStatus::BlowOff,
                         FlameStatus::Flashback, FlameStatus::Diverged})
    if (to_string(st) == s) return st;
  throw cli::UnitError("unknown flame status '" + s + "'");
}

double num(const json& j, const char* key) { return j.at(key).is_null() ? 0.0 : j.at(key).get<double>(); }

int cmd_report(const Common& com, const std::vector<std::string>& inputs, bool zfk, const std::string& phi,
               const std::string& T_ref) {
  ReportInput in;
  for (const auto& path : inputs) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw cli::UnitError("cannot read " + path);
    json j;
    try {
      j = json::parse(is);
    } catch (const json::exception& e) {
      throw cli::UnitError(path + ": " + e.what());
    }
    const std::string kind = j.value("kind", "");
    const std::string name = fs::path(path).stem().string();
    if (kind == "ignition-sweep") {
      IgnitionTable t{name, j.at("config"), {}};
      for (const auto& r : j.at("rows")) {
        IgnitionRow row;
        row.T0 = r.at("T0_K").get<double>();
        if (!r.at("delay_s").is_null()) row.delay = r.at("delay_s").get<double>();
        row.status = r.at("status").get<std::string>();
        row.T_final = num(r, "T_final_K");
        row.stats.accepted_steps = r.at("accepted_steps").get<long>();
        row.stats.rejected_steps = r.at("rejected_steps").get<long>();
        row.stats.rhs_evaluations = r.at("rhs_evaluations").get<long>();
        t.rows.push_back(row);
      }
      in.ignition.push_back(std::move(t));
    } else if (kind == "flame-sweep") {
      FlameTable t{name, j.at("config"), {}};
      for (const auto& r : j.at("rows")) {
        FlameRow row;
        row.phi = r.at("phi").get<double>();
        row.status = status_from_string(r.at("status").get<std::string>());
        row.u_lam = num(r, "u_lam_m_s");
        row.thickness = num(r, "thickness_m");
        row.T_burned = num(r, "T_outlet_K");
        row.simulated_time = num(r, "simulated_time_s");
        row.steps = r.at("steps").get<long>();
        row.message = r.at("message").get<std::string>();
        t.rows.push_back(row);
      }
      in.flames.push_back(std::move(t));
    } else if (kind == "grid-study") {
      GridTable t{name, j.at("config"), {}};
      for (const auto& r : j.at("rows")) {
        GridRow row;
        row.dx = r.at("dx_m").get<double>();
        row.n_cells = r.at("n_cells").get<int>();
        row.status = status_from_string(r.at("status").get<std::string>());
        row.cost_only = r.at("cost_only").get<bool>();
        row.u_lam = num(r, "u_lam_m_s");
        row.cpu_time = num(r, "cpu_time_s_per_ms");
        row.message = r.at("message").get<std::string>();
        t.rows.push_back(row);
      }
      in.grids.push_back(std::move(t));
    } else {
      throw cli::UnitError(path + ": not a sweep or grid-study output (kind '" + kind + "')");
    }
  }
  if (zfk) {
    Mechanism m = load_mechanism_checked(com.mech);
    in.zfk = zfk_estimate(m, cli::parse_quantity(phi, Quantity::Dimensionless),
                          cli::parse_quantity(T_ref, Quantity::Temperature));
  }
  Report rep = make_report(in);
  rep.write(com.out);
  for (const auto& v : rep.document["verdicts"]) {
    std::string state = v["passed"].is_null() ? "n/a" : (v["passed"].get<bool>() ? "pass" : "fail");
    std::printf("%-45s %-5s %s\n", v["name"].get<std::string>().c_str(), state.c_str(),
                v["detail"].get<std::string>().c_str());
  }
  return kOk;
}

void add_common(CLI::App* sub, Common& com, bool jobs) {
  sub->add_option("--mech", com.mech, "builtin name (skeletal) or mechanism file")->capture_default_str();
  sub->add_option("--out", com.out, "output directory")->capture_default_str();
  if (jobs) sub->add_option("--jobs", com.jobs, "worker threads for independent runs")->check(CLI::PositiveNumber);
}

void add_mixture(CLI::App* sub, MixtureOptions& mix, const char* phi_help) {
  sub->add_option("--phi", mix.phi, phi_help)->capture_default_str();
  sub->add_option("--X", mix.X, "mole fractions as name:value pairs, e.g. H2:2,O2:1,N2:3.76");
}

void add_ignite(CLI::App* sub, IgniteOptions& o, const char* T0_help) {
  sub->add_option("--T0", o.T0, T0_help)->capture_default_str();
  sub->add_option("--P", o.P, "initial pressure")->capture_default_str();
  sub->add_option("--t-end", o.t_end, "end time")->capture_default_str();
  sub->add_option("--delay-dT", o.delay_dT, "temperature rise defining ignition")->capture_default_str();
  sub->add_option("--rtol", o.rtol, "relative tolerance")->capture_default_str();
  sub->add_option("--atol-Y", o.atol_Y, "absolute tolerance on mass fractions")->capture_default_str();
  sub->add_option("--atol-T", o.atol_T, "absolute tolerance on temperature")->capture_default_str();
}

void add_flame(CLI::App* sub, FlameOptions& o, bool grid_options = true) {
  if (grid_options) {
    sub->add_option("--dx", o.dx, "grid spacing")->capture_default_str();
    sub->add_option("--cells", o.cells, "number of cells")->capture_default_str();
  }
  sub->add_option("--u-in", o.u_in, "inlet velocity")->capture_default_str();
  sub->add_option("--T-in", o.T_in, "inlet temperature")->capture_default_str();
  sub->add_option("--P", o.P, "pressure")->capture_default_str();
  sub->add_option("--kernel-width", o.kernel_width, "ignition kernel width")->capture_default_str();
  sub->add_option("--kernel-T", o.kernel_T, "ignition kernel temperature")->capture_default_str();
  sub->add_option("--kernel-position", o.kernel_position, "kernel centre as a fraction of the domain")
      ->capture_default_str();
  sub->add_option("--t-end", o.t_end, "simulated time limit")->capture_default_str();
  sub->add_option("--cfl", o.cfl, "convective CFL number")->capture_default_str();
  sub->add_option("--convection", o.convection, "upwind or muscl")->capture_default_str();
  sub->add_flag("--no-follow", o.no_follow, "keep the grid fixed (reports blow-off and flashback)");
  sub->add_option("--steady-tol", o.steady_tolerance, "relative front-speed tolerance for steady state")
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"H2/O2 combustion kinetics: 0D ignition delays and 1D premixed flame speeds", "h2kin"};
  app.set_version_flag("--version", std::string(H2KIN_VERSION));
  app.require_subcommand(1);

  Common com;
  std::string info_mech;
  std::string info_builtin;
  auto* info = app.add_subcommand("mech-info", "print a mechanism summary and validation report");
  info->add_option("--mech", info_mech, "builtin name or mechanism file");
  info->add_option("--builtin", info_builtin, "builtin mechanism name");

  IgniteOptions ign;
  auto* ignite = app.add_subcommand("ignite", "constant-volume adiabatic ignition run");
  add_common(ignite, com, false);
  add_mixture(ignite, ign.mix, "equivalence ratio of H2-air");
  add_ignite(ignite, ign, "initial temperature");
  ignite->add_option("--output-every", ign.output_every, "keep every n-th step in the trajectory")
      ->check(CLI::PositiveNumber);

  IgniteOptions isw;
  isw.T0 = "1000K:1400K:50K";
  auto* ignite_sweep = app.add_subcommand("ignite-sweep", "ignition delays over a temperature list");
  add_common(ignite_sweep, com, true);
  add_mixture(ignite_sweep, isw.mix, "equivalence ratio of H2-air");
  add_ignite(ignite_sweep, isw, "temperatures, start:stop:step or a,b,c");

  FlameOptions fl;
  auto* flame = app.add_subcommand("flame", "freely propagating premixed flame run");
  add_common(flame, com, false);
  add_mixture(flame, fl.mix, "equivalence ratio of H2-air");
  add_flame(flame, fl);

  FlameOptions fsw;
  fsw.mix.phi = "0.5:4.5:0.5";
  auto* flame_sweep = app.add_subcommand("flame-sweep", "flame speeds over an equivalence-ratio list");
  add_common(flame_sweep, com, true);
  flame_sweep->add_option("--phi", fsw.mix.phi, "equivalence ratios, start:stop:step or a,b,c")->capture_default_str();
  add_flame(flame_sweep, fsw);

  FlameOptions gs;
  std::string spacings = "2.5um,5um,40um";
  double cost_only_below_um = 2.0;
  long timing_steps = 100;
  auto* grid = app.add_subcommand("grid-study", "flame speed and cost over grid spacings at fixed domain length");
  add_common(grid, com, false);
  add_mixture(grid, gs.mix, "equivalence ratio of H2-air");
  add_flame(grid, gs, false);
  std::string grid_length = "2mm";
  grid->add_option("--length", grid_length, "domain length, fixed across spacings")->capture_default_str();
  grid->add_option("--dx", spacings, "spacings: a,b,c or a:b (1-2-2.5-4-5 ladder per decade)")->capture_default_str();
  grid->add_option("--cost-only-below", cost_only_below_um, "spacings below this (um) are timed only")
      ->capture_default_str();
  grid->add_option("--timing-steps", timing_steps, "steps in the cost-measurement segment")->capture_default_str();

  std::vector<std::string> inputs;
  bool with_zfk = false;
  std::string zfk_phi = "1.0";
  std::string zfk_T = "2000K";
  auto* report = app.add_subcommand("report", "combine sweep and grid-study outputs into one report");
  report->add_option("inputs", inputs, "JSON outputs of ignite-sweep, flame-sweep or grid-study")->required();
  report->add_option("--out", com.out, "output directory")->capture_default_str();
  report->add_option("--mech", com.mech, "mechanism for the ZFK estimate")->capture_default_str();
  report->add_flag("--zfk", with_zfk, "add a ZFK flame-speed estimate");
  report->add_option("--zfk-phi", zfk_phi, "equivalence ratio for the ZFK estimate")->capture_default_str();
  report->add_option("--zfk-T", zfk_T, "reference temperature for the ZFK estimate")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kParse;
  }

  try {
    if (*info) {
      if (!info_builtin.empty() && !info_mech.empty()) throw cli::UnitError("give either --mech or --builtin");
      std::string name = !info_builtin.empty() ? info_builtin : (info_mech.empty() ? "skeletal" : info_mech);
      return cmd_mech_info(name);
    }
    if (*ignite) return cmd_ignite(com, ign);
    if (*ignite_sweep) return cmd_ignite_sweep(com, isw);
    if (*flame) return cmd_flame(com, fl);
    if (*flame_sweep) return cmd_flame_sweep(com, fsw);
    if (*grid) {
      const double L = cli::parse_quantity(grid_length, Quantity::Length);
      gs.dx = "5um";
      gs.cells = static_cast<int>(std::lround(L / 5e-6));
      if (gs.cells < 1) throw DomainError("domain length must be at least 5 um");
      return cmd_grid_study(com, gs, spacings, cost_only_below_um * 1e-6, timing_steps);
    }
    if (*report) return cmd_report(com, inputs, with_zfk, zfk_phi, zfk_T);
  } catch (const cli::UnitError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kParse;
  } catch (const ParseError& e) {
    std::fprintf(stderr, "parse error: %s\n", e.what());
    return kParse;
  } catch (const DomainError& e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return kValidation;
  } catch (const MechanismError& e) {
    std::fprintf(stderr, "invalid mechanism: %s\n", e.what());
    return kValidation;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kRuntime;
  }
  return kRuntime;
}
