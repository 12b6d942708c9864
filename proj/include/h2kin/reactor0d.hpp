#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "h2kin/bdf.hpp"
#include "h2kin/mechanism.hpp"
#include "h2kin/thermo.hpp"

namespace h2kin {

struct ReactorConfig {
  double T0 = 1200.0;                   // K
  double P0 = kOneAtmosphere;           // Pa
  Eigen::VectorXd X0;                   // initial mole fractions
  double t_end = 1.0;                   // s
  double delay_criterion_dT = 500.0;    // K above T0
  double rtol = 1e-8;
  double atol_Y = 1e-14;
  double atol_T = 1e-6;                 // K
  double max_step = std::numeric_limits<double>::infinity();
  /// After ignition, stop at min(t_end, tail_factor * delay).
  double tail_factor = 3.0;
  /// Keep every n-th accepted step in the trajectory (the initial state,
  /// the criterion crossing and the final state are always kept).
  int output_every = 1;
};

/// Throws DomainError for an inconsistent configuration.
void validate(const ReactorConfig& c, const Mechanism& m);

/// Stoichiometry-based config: H2-air at equivalence ratio phi.
ReactorConfig h2_air_reactor(const Mechanism& m, double T0, double P0, double phi);

struct ReactorTrajectory {
  std::vector<double> t;
  std::vector<ThermoState> states;
  std::optional<double> ignition_delay;
  BdfStats stats;
  double T0 = 0.0;
};

/// Time derivatives of (T, Y_1..Y_n) at constant density.
Eigen::VectorXd rhs_const_volume(const Mechanism& m, const ThermoState& s);

/// Adaptive BDF integration of the constant-volume adiabatic reactor.
/// Internal energy is restored exactly after each step by adjusting T.
/// Throws NumericalError on step-size underflow or a non-physical state.
ReactorTrajectory integrate(const Mechanism& m, const ReactorConfig& c);

/// First time T reaches T0 + dT, linearly interpolated between samples.
std::optional<double> ignition_delay(const ReactorTrajectory& traj, double T0, double dT);
inline std::optional<double> ignition_delay(const ReactorTrajectory& traj, const ReactorConfig& c) {
  return ignition_delay(traj, c.T0, c.delay_criterion_dT);
}

struct IgnitionRow {
  double T0 = 0.0;
  std::optional<double> delay;
  std::string status;  // "ignited", "not-ignited" or "failed: <reason>"
  BdfStats stats;
  double T_final = 0.0;
};

/// Independent runs per T0, sorted by T0. Failures are recorded per row.
/// `jobs` > 1 runs cases on worker threads; results do not depend on it.
std::vector<IgnitionRow> sweep_ignition(const Mechanism& m, std::vector<double> T0_list, const ReactorConfig& base,
                                        int jobs = 1);

}  // namespace h2kin
