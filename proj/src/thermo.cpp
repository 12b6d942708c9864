#include "h2kin/thermo.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>

#include "h2kin/error.hpp"

namespace h2kin {

namespace {

std::atomic<bool> g_extrapolation_warned{false};

void warn_extrapolation(double T, const NasaPoly& p) {
  if (!g_extrapolation_warned.exchange(true)) {
    std::fprintf(stderr, "warning: thermo polynomial evaluated at T = %.1f K outside [%.0f, %.0f] K; extrapolating cp linearly\n",
                 T, p.T_low, p.T_high);
  }
}

void check_T(double T) {
  if (!std::isfinite(T) || T <= 0.0) throw DomainError("temperature must be finite and positive, got " + std::to_string(T));
}

const std::array<double, 7>& branch(const NasaPoly& p, double T) { return T < p.T_mid ? p.low : p.high; }

// Bound and coefficient set used for extrapolation, or nullptr in range.
const std::array<double, 7>* outside(const NasaPoly& p, double T, double& Tb) {
  if (T < p.T_low) {
    Tb = p.T_low;
    warn_extrapolation(T, p);
    return &p.low;
  }
  if (T > p.T_high) {
    Tb = p.T_high;
    warn_extrapolation(T, p);
    return &p.high;
  }
  return nullptr;
}

}  // namespace

bool thermo_extrapolation_warned() { return g_extrapolation_warned.load(); }
void reset_thermo_extrapolation_warning() { g_extrapolation_warned.store(false); }

double cp_R(const NasaPoly& p, double T) {
  check_T(T);
  double Tb = 0.0;
  if (const auto* a = outside(p, T, Tb)) return nasa_cp_R(*a, Tb) + nasa_dcp_R_dT(*a, Tb) * (T - Tb);
  return nasa_cp_R(branch(p, T), T);
}

double h_RT(const NasaPoly& p, double T) {
  check_T(T);
  double Tb = 0.0;
  if (const auto* a = outside(p, T, Tb)) {
    double c0 = nasa_cp_R(*a, Tb);
    double c1 = nasa_dcp_R_dT(*a, Tb);
    double dT = T - Tb;
    return (nasa_h_RT(*a, Tb) * Tb + c0 * dT + 0.5 * c1 * dT * dT) / T;
  }
  return nasa_h_RT(branch(p, T), T);
}

double s_R(const NasaPoly& p, double T) {
  check_T(T);
  double Tb = 0.0;
  if (const auto* a = outside(p, T, Tb)) {
    double c0 = nasa_cp_R(*a, Tb);
    double c1 = nasa_dcp_R_dT(*a, Tb);
    // integral of (c0 + c1 (T' - Tb)) / T' dT'
    return nasa_s_R(*a, Tb) + (c0 - c1 * Tb) * std::log(T / Tb) + c1 * (T - Tb);
  }
  return nasa_s_R(branch(p, T), T);
}

void check_state(const ThermoState& s, const Mechanism& m) {
  if (!(s.T > 0.0) || !std::isfinite(s.T)) throw DomainError("state temperature must be positive");
  if (!(s.density > 0.0) || !std::isfinite(s.density)) throw DomainError("state density must be positive");
  if (s.Y.size() != m.n_species()) throw DomainError("mass fraction vector has the wrong length");
  for (int k = 0; k < m.n_species(); ++k) {
    if (!(s.Y(k) >= -1e-12 && s.Y(k) <= 1.0 + 1e-12))
      throw DomainError("mass fraction of " + m.species(k).name + " outside [0, 1]");
  }
  if (std::abs(s.Y.sum() - 1.0) > 1e-9) throw DomainError("mass fractions do not sum to 1");
}

double mean_molar_mass(const Mechanism& m, const Eigen::VectorXd& Y) {
  return 1.0 / Y.cwiseQuotient(m.molar_masses()).sum();
}

Eigen::VectorXd mole_fractions(const Mechanism& m, const Eigen::VectorXd& Y) {
  Eigen::VectorXd n = Y.cwiseQuotient(m.molar_masses());
  return n / n.sum();
}

Eigen::VectorXd mass_fractions(const Mechanism& m, const Eigen::VectorXd& X) {
  Eigen::VectorXd w = X.cwiseProduct(m.molar_masses());
  return w / w.sum();
}

Eigen::VectorXd concentrations(const Mechanism& m, const ThermoState& s) {
  return s.density * s.Y.cwiseQuotient(m.molar_masses());
}

double pressure(const Mechanism& m, const ThermoState& s) {
  return s.density * kGasConstant * s.T / mean_molar_mass(m, s.Y);
}

double density_from_TPY(const Mechanism& m, double T, double P, const Eigen::VectorXd& Y) {
  return P * mean_molar_mass(m, Y) / (kGasConstant * T);
}

ThermoState state_from_TPX(const Mechanism& m, double T, double P, const Eigen::VectorXd& X) {
  ThermoState s;
  s.T = T;
  s.Y = mass_fractions(m, X);
  s.density = density_from_TPY(m, T, P, s.Y);
  return s;
}

namespace {

template <class F>
Eigen::VectorXd per_species(const Mechanism& m, double T, F f) {
  Eigen::VectorXd out(m.n_species());
  for (int k = 0; k < m.n_species(); ++k) {
    const auto& sp = m.species(k);
    if (!sp.thermo) throw MechanismError("species '" + sp.name + "' has no thermo data");
    out(k) = f(*sp.thermo, T);
  }
  return out;
}

}  // namespace

Eigen::VectorXd species_cp_R(const Mechanism& m, double T) {
  return per_species(m, T, [](const NasaPoly& p, double t) { return cp_R(p, t); });
}

Eigen::VectorXd species_h_RT(const Mechanism& m, double T) {
  return per_species(m, T, [](const NasaPoly& p, double t) { return h_RT(p, t); });
}

Eigen::VectorXd species_s_R(const Mechanism& m, double T) {
  return per_species(m, T, [](const NasaPoly& p, double t) { return s_R(p, t); });
}

Eigen::VectorXd species_g_RT(const Mechanism& m, double T) {
  return per_species(m, T, [](const NasaPoly& p, double t) { return h_RT(p, t) - s_R(p, t); });
}

Eigen::VectorXd species_h_mass(const Mechanism& m, double T) {
  return (kGasConstant * T) * species_h_RT(m, T).cwiseQuotient(m.molar_masses());
}

Eigen::VectorXd species_u_mass(const Mechanism& m, double T) {
  Eigen::VectorXd u = species_h_RT(m, T).array() - 1.0;
  return (kGasConstant * T) * u.cwiseQuotient(m.molar_masses());
}

double mixture_h(const Mechanism& m, double T, const Eigen::VectorXd& Y) { return species_h_mass(m, T).dot(Y); }

double mixture_u(const Mechanism& m, double T, const Eigen::VectorXd& Y) {
  return mixture_h(m, T, Y) - kGasConstant * T * Y.cwiseQuotient(m.molar_masses()).sum();
}

double mixture_cp(const Mechanism& m, double T, const Eigen::VectorXd& Y) {
  return kGasConstant * species_cp_R(m, T).cwiseQuotient(m.molar_masses()).dot(Y);
}

double mixture_cv(const Mechanism& m, double T, const Eigen::VectorXd& Y) {
  return mixture_cp(m, T, Y) - kGasConstant * Y.cwiseQuotient(m.molar_masses()).sum();
}

namespace {

template <class Value, class Slope>
double invert_temperature(double target, double T_guess, Value value, Slope slope, const char* what) {
  double T = std::isfinite(T_guess) && T_guess > 0.0 ? T_guess : 1000.0;
  for (int it = 0; it < 100; ++it) {
    double f = value(T) - target;
    double dT = -f / slope(T);
    // Damp large jumps; cp varies slowly so a few iterations suffice.
    dT = std::clamp(dT, -0.5 * T, 0.5 * T);
    T += dT;
    if (std::abs(dT) <= 1e-12 * T) break;
  }
  double resid = std::abs(value(T) - target);
  if (!std::isfinite(T) || T < 50.0 || T > 10000.0 || resid > 1e-8 * std::max(1.0, std::abs(target)) + 1e-6)
    throw NumericalError(std::string("temperature inversion from ") + what + " failed");
  return T;
}

}  // namespace

double temperature_from_h(const Mechanism& m, double h, const Eigen::VectorXd& Y, double T_guess) {
  return invert_temperature(
      h, T_guess, [&](double T) { return mixture_h(m, T, Y); }, [&](double T) { return mixture_cp(m, T, Y); },
      "enthalpy");
}

double temperature_from_u(const Mechanism& m, double u, const Eigen::VectorXd& Y, double T_guess) {
  return invert_temperature(
      u, T_guess, [&](double T) { return mixture_u(m, T, Y); }, [&](double T) { return mixture_cv(m, T, Y); },
      "internal energy");
}

double equilibrium_kc(const Reaction& r, const Eigen::VectorXd& g_RT, double T) {
  double dg = 0.0;
  for (const auto& t : r.products) dg += t.nu * g_RT(t.species);
  for (const auto& t : r.reactants) dg -= t.nu * g_RT(t.species);
  double c0 = kReferencePressure / (kGasConstant * T);
  return std::exp(-dg) * std::pow(c0, r.delta_nu());
}

double equilibrium_kc(const Mechanism& m, const Reaction& r, double T) {
  check_T(T);
  return equilibrium_kc(r, species_g_RT(m, T), T);
}

Eigen::VectorXd h2_air_mole_fractions(const Mechanism& m, double phi) {
  if (!(phi > 0.0) || !std::isfinite(phi)) throw DomainError("equivalence ratio must be positive");
  Eigen::VectorXd X = Eigen::VectorXd::Zero(m.n_species());
  double o2 = 1.0;
  X(m.species_index("H2")) = 2.0 * phi * o2;
  X(m.species_index("O2")) = o2;
  X(m.species_index("N2")) = o2 * 0.79 / 0.21;
  return X / X.sum();
}

Eigen::VectorXd mole_fractions_from_pairs(const Mechanism& m,
                                          const std::vector<std::pair<std::string, double>>& pairs) {
  Eigen::VectorXd X = Eigen::VectorXd::Zero(m.n_species());
  for (const auto& [name, value] : pairs) {
    if (!(value >= 0.0) || !std::isfinite(value)) throw DomainError("mole fraction of " + name + " must be non-negative");
    X(m.species_index(name)) += value;
  }
  double sum = X.sum();
  if (!(sum > 0.0)) throw DomainError("composition is empty");
  return X / sum;
}

}  // namespace h2kin
