#pragma once

#include <array>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "h2kin/constants.hpp"
#include "h2kin/mechanism.hpp"

namespace h2kin {

// Single-range NASA-7 evaluations. Templated so the same code serves
// double and extended precision oracles.

template <class Scalar>
Scalar nasa_cp_R(const std::array<double, 7>& a, Scalar T) {
  return a[0] + T * (a[1] + T * (a[2] + T * (a[3] + T * a[4])));
}

template <class Scalar>
Scalar nasa_h_RT(const std::array<double, 7>& a, Scalar T) {
  return a[0] + T * (a[1] / 2 + T * (a[2] / 3 + T * (a[3] / 4 + T * a[4] / 5))) + a[5] / T;
}

template <class Scalar>
Scalar nasa_s_R(const std::array<double, 7>& a, Scalar T) {
  using std::log;
  return a[0] * log(T) + T * (a[1] + T * (a[2] / 2 + T * (a[3] / 3 + T * a[4] / 4))) + a[6];
}

template <class Scalar>
Scalar nasa_dcp_R_dT(const std::array<double, 7>& a, Scalar T) {
  return a[1] + T * (2 * a[2] + T * (3 * a[3] + T * 4 * a[4]));
}

/// Two-range evaluations. Outside [T_low, T_high] cp is extended linearly
/// from the nearest bound with h and s integrated consistently; the first
/// such evaluation in a process prints a warning to stderr.
double cp_R(const NasaPoly& p, double T);
double h_RT(const NasaPoly& p, double T);
double s_R(const NasaPoly& p, double T);

/// True once any out-of-range evaluation has happened.
bool thermo_extrapolation_warned();
void reset_thermo_extrapolation_warning();

/// Homogeneous parcel: temperature (K), density (kg/m^3), mass fractions.
struct ThermoState {
  double T = 0.0;
  double density = 0.0;
  Eigen::VectorXd Y;
};

/// Throws DomainError unless T > 0, density > 0, every Y in
/// [-1e-12, 1 + 1e-12] and sum(Y) = 1 within 1e-9.
void check_state(const ThermoState& s, const Mechanism& m);

double mean_molar_mass(const Mechanism& m, const Eigen::VectorXd& Y);
Eigen::VectorXd mole_fractions(const Mechanism& m, const Eigen::VectorXd& Y);
Eigen::VectorXd mass_fractions(const Mechanism& m, const Eigen::VectorXd& X);
/// Molar concentrations, mol/m^3.
Eigen::VectorXd concentrations(const Mechanism& m, const ThermoState& s);
double pressure(const Mechanism& m, const ThermoState& s);
double density_from_TPY(const Mechanism& m, double T, double P, const Eigen::VectorXd& Y);
ThermoState state_from_TPX(const Mechanism& m, double T, double P, const Eigen::VectorXd& X);

/// Species properties at T, dimensionless.
Eigen::VectorXd species_cp_R(const Mechanism& m, double T);
Eigen::VectorXd species_h_RT(const Mechanism& m, double T);
Eigen::VectorXd species_s_R(const Mechanism& m, double T);
/// Standard-state Gibbs energy g/RT = h/RT - s/R.
Eigen::VectorXd species_g_RT(const Mechanism& m, double T);

/// Specific (per mass) species properties in J/kg and J/(kg K).
Eigen::VectorXd species_h_mass(const Mechanism& m, double T);
Eigen::VectorXd species_u_mass(const Mechanism& m, double T);

/// Mixture properties per unit mass.
double mixture_h(const Mechanism& m, double T, const Eigen::VectorXd& Y);
double mixture_u(const Mechanism& m, double T, const Eigen::VectorXd& Y);
double mixture_cp(const Mechanism& m, double T, const Eigen::VectorXd& Y);
double mixture_cv(const Mechanism& m, double T, const Eigen::VectorXd& Y);
inline double mixture_h(const Mechanism& m, const ThermoState& s) { return mixture_h(m, s.T, s.Y); }
inline double mixture_u(const Mechanism& m, const ThermoState& s) { return mixture_u(m, s.T, s.Y); }
inline double mixture_cp(const Mechanism& m, const ThermoState& s) { return mixture_cp(m, s.T, s.Y); }
inline double mixture_cv(const Mechanism& m, const ThermoState& s) { return mixture_cv(m, s.T, s.Y); }

/// Newton inversion of h(T, Y) = h and u(T, Y) = u. Throws NumericalError
/// if no temperature in [50, 10000] K matches.
double temperature_from_h(const Mechanism& m, double h, const Eigen::VectorXd& Y, double T_guess);
double temperature_from_u(const Mechanism& m, double u, const Eigen::VectorXd& Y, double T_guess);

/// Concentration-based equilibrium constant of reaction r, in
/// (mol/m^3)^delta_nu. Kp = exp(-dG/RT), Kc = Kp (P0/RT)^delta_nu.
double equilibrium_kc(const Mechanism& m, const Reaction& r, double T);
/// Same, reusing precomputed g/RT of all species at T.
double equilibrium_kc(const Reaction& r, const Eigen::VectorXd& g_RT, double T);

/// Mole fractions of H2 + (0.21 O2 + 0.79 N2) at equivalence ratio phi,
/// stoichiometry 2 H2 + O2. The mechanism must contain H2, O2 and N2.
Eigen::VectorXd h2_air_mole_fractions(const Mechanism& m, double phi);

/// Mole fractions from "name:value" pairs, normalised to sum 1.
Eigen::VectorXd mole_fractions_from_pairs(const Mechanism& m,
                                          const std::vector<std::pair<std::string, double>>& pairs);

}  // namespace h2kin
