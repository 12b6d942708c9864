// Fixed-step RK4 reference for constant-volume ignition delays. Writes the
// golden file consumed by the reactor and acceptance tests:
//   ignition_rk4 <out.json> [dt]
// The right-hand side is assembled here from the public thermo and kinetics
// functions, not from the reactor module.

#include <cstdio>
#include <fstream>
#include <string>

#include <json.hpp>

#include "h2kin/kinetics.hpp"
#include "h2kin/mechanism.hpp"
#include "h2kin/thermo.hpp"

using namespace h2kin;

namespace {

Eigen::VectorXd rhs(const Mechanism& m, double rho, const Eigen::VectorXd& y) {
  const int n = m.n_species();
  ThermoState s{y(0), rho, y.tail(n)};
  Eigen::VectorXd wdot = production_rates(m, s);
  Eigen::VectorXd mass_rate = wdot.cwiseProduct(m.molar_masses());
  Eigen::VectorXd f(n + 1);
  f(0) = -species_u_mass(m, s.T).dot(mass_rate) / (rho * mixture_cv(m, s));
  f.tail(n) = mass_rate / rho;
  return f;
}

// First crossing of T0 + dT, linearly interpolated; negative if none by t_end.
double delay_rk4(const Mechanism& m, double T0, double dt, double t_end) {
  const int n = m.n_species();
  ThermoState s0 = state_from_TPX(m, T0, kOneAtmosphere, h2_air_mole_fractions(m, 1.0));
  Eigen::VectorXd y(n + 1);
  y(0) = T0;
  y.tail(n) = s0.Y;
  const double target = T0 + 500.0;
  for (double t = 0.0; t < t_end; t += dt) {
    Eigen::VectorXd k1 = rhs(m, s0.density, y);
    Eigen::VectorXd k2 = rhs(m, s0.density, y + 0.5 * dt * k1);
    Eigen::VectorXd k3 = rhs(m, s0.density, y + 0.5 * dt * k2);
    Eigen::VectorXd k4 = rhs(m, s0.density, y + dt * k3);
    Eigen::VectorXd next = y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (next(0) >= target) return t + dt * (target - y(0)) / (next(0) - y(0));
    y = next;
  }
  return -1.0;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: %s out.json [dt]\n", argv[0]);
    return 2;
  }
  const double dt = argc > 2 ? std::stod(argv[2]) : 1e-9;
  const Mechanism& m = builtin_skeletal();
  nlohmann::json rows = nlohmann::json::array();
  for (double T0 : {1000.0, 1100.0, 1200.0, 1300.0, 1400.0}) {
    const double coarse = delay_rk4(m, T0, dt, 1e-3);
    const double fine = delay_rk4(m, T0, 0.5 * dt, 1e-3);
    std::printf("T0 %.0f  delay %.10e  (dt/2: %.10e)\n", T0, coarse, fine);
    rows.push_back({{"T0_K", T0}, {"delay_s", fine}, {"delay_coarse_s", coarse}});
  }
  nlohmann::json doc = {{"integrator", "rk4"},
                        {"dt_s", 0.5 * dt},
                        {"mixture", "H2-air, phi = 1"},
                        {"P_Pa", kOneAtmosphere},
                        {"criterion_dT_K", 500.0},
                        {"rows", rows}};
  std::ofstream(argv[1]) << doc.dump(2) << "\n";
  return 0;
}
