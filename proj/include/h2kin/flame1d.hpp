#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "h2kin/constants.hpp"
#include "h2kin/mechanism.hpp"
#include "h2kin/thermo.hpp"

namespace h2kin {

/// Hot ignition kernel. The temperature profile is
/// T_in + (temperature - T_in) g(x) with g = exp(-((x - xc) / width)^2),
/// and the composition is blended, by the same Gaussian scaled to the
/// kernel amplitude, toward the inlet mixture ignited at constant pressure
/// from the kernel temperature (taken at peak heat release).
struct KernelSpec {
  double position = 0.6;       // centre as a fraction of the domain length
  double width = 300e-6;       // m
  double temperature = 2200.0; // K
};

enum class ConvectionScheme { Upwind, Muscl };

struct FlameConfig {
  double dx = 5e-6;  // m
  int n_cells = 400;
  double T_in = 298.0;
  double P = kOneAtmosphere;
  double phi = 1.0;
  /// Inlet mole fractions; empty selects H2-air at `phi`.
  Eigen::VectorXd X_in;
  double u_in = 1.0;  // m/s
  KernelSpec kernel;

  // Run control.
  double t_end = 0.02;  // s, simulated
  long max_steps = 2'000'000;
  double cfl = 0.4;
  /// Residual target: largest relative temperature change per step.
  double max_dT_rel = 0.02;
  double dt_max = 1e-5;
  ConvectionScheme convection = ConvectionScheme::Upwind;

  // Front handling and steady-state detection.
  bool follow_front = true;  // otherwise a front within 10% of a boundary is blow-off or flashback
  double steady_window_thicknesses = 5.0;
  double steady_tolerance = 0.01;
  /// Extinction when the consumption speed falls below this (m/s)
  /// after `extinction_check_time`.
  double extinction_speed = 0.02;
  double extinction_check_time = 2e-4;

  // Chemistry substep tolerances.
  double chem_rtol = 1e-6;
  double chem_atol = 1e-12;
};

/// Throws DomainError for an inconsistent configuration.
void validate(const FlameConfig& c, const Mechanism& m);

/// Cell-centred state on a uniform grid whose left edge sits at `x0` in
/// the lab frame. Face mass fluxes (kg/(m^2 s)) are stored for the
/// n_cells + 1 faces, the first being the inlet.
struct FlameField {
  double x0 = 0.0;
  double dx = 0.0;
  double time = 0.0;
  double P = kOneAtmosphere;
  Eigen::VectorXd T;
  Eigen::VectorXd rho;
  Eigen::VectorXd h;          // specific enthalpy, J/kg
  Eigen::MatrixXd Y;          // n_species x n_cells
  Eigen::VectorXd mass_flux;  // n_cells + 1

  int n_cells() const { return static_cast<int>(T.size()); }
  double x(int k) const { return x0 + (k + 0.5) * dx; }
  double length() const { return n_cells() * dx; }
  ThermoState cell(int k) const { return {T(k), rho(k), Y.col(k)}; }
  /// Cell-centred velocity from the average of the two face fluxes.
  double velocity(int k) const { return 0.5 * (mass_flux(k) + mass_flux(k + 1)) / rho(k); }
};

/// Time-integrated boundary and frame-shift exchanges. All quantities are
/// per unit cross-section, positive into the domain.
struct ConservationLedger {
  Eigen::VectorXd species_mass;  // kg/m^2 per species
  double energy = 0.0;           // J/m^2 (enthalpy)
};

/// Domain content per unit cross-section: species masses and enthalpy.
ConservationLedger field_content(const FlameField& f);

enum class FlameStatus { Steady, NotConverged, Extinction, BlowOff, Flashback, Diverged };
std::string to_string(FlameStatus s);

struct FrontSample {
  double t;
  double x;  // lab frame, m
};

struct FlameResult {
  FlameStatus status = FlameStatus::NotConverged;
  bool steady = false;
  double u_lam = 0.0;              // m/s
  double consumption_speed = 0.0;  // m/s, from deficient-reactant consumption
  double thickness = 0.0;          // thermal thickness, m
  double T_burned = 0.0;
  double simulated_time = 0.0;
  long steps = 0;
  long rejected_steps = 0;
  std::vector<FrontSample> front_history;
  FlameField field;
  ConservationLedger initial_content;
  ConservationLedger exchanged;
  std::string message;
};

/// Transient low-Mach solver for a freely propagating premixed flame.
/// Each step is split as diffusion(dt/2), chemistry(dt), diffusion(dt/2),
/// convection(dt). Diffusion is backward Euler at fixed density with the
/// bath species closing sum(Y) = 1. Chemistry integrates every cell at
/// constant pressure and enthalpy with BDF. Convection is an explicit
/// conservative update whose face mass fluxes are marched from the inlet
/// so that every cell satisfies the equation of state after the step.
class FlameSolver {
 public:
  FlameSolver(const Mechanism& m, FlameConfig config);
  ~FlameSolver();
  FlameSolver(const FlameSolver&) = delete;
  FlameSolver& operator=(const FlameSolver&) = delete;

  const FlameConfig& config() const { return config_; }
  const Mechanism& mechanism() const { return m_; }

  /// Inlet state.
  const ThermoState& inlet() const { return inlet_; }
  /// Adiabatic complete-combustion state at the inlet enthalpy.
  const ThermoState& products() const { return products_; }

  FlameField initialize() const;

  /// Advances `f` by dt. Returns false (leaving `f` untouched) when the
  /// step violates the convective limit. Boundary exchanges are added to
  /// `ledger` when given. Throws NumericalError on a non-finite field.
  bool step(FlameField& f, double dt, ConservationLedger* ledger = nullptr) const;

  /// Largest stable convective step for the current face fluxes.
  double cfl_dt(const FlameField& f) const;

  /// Lab-frame position of the steepest positive temperature gradient.
  std::optional<double> front_position(const FlameField& f) const;
  double thermal_thickness(const FlameField& f) const;
  /// Integrated consumption of the deficient reactant (H2 when lean, O2
  /// when rich) divided by its inlet partial density.
  double consumption_speed(const FlameField& f) const;

  /// Moves the window by `cells` (positive: toward the outlet), dropping
  /// cells at one end and filling the other with the inlet state or a copy
  /// of the outlet cell. Exchanges are added to `ledger`.
  void shift(FlameField& f, int cells, ConservationLedger* ledger = nullptr) const;

  /// Integrates until the front speed is steady or a failure is detected.
  FlameResult run(const FlameField* initial = nullptr) const;

 private:
  struct Impl;
  const Mechanism& m_;
  FlameConfig config_;
  ThermoState inlet_;
  ThermoState products_;
  std::unique_ptr<Impl> impl_;
};

FlameField initialize(const Mechanism& m, const FlameConfig& c);
FlameField step(const Mechanism& m, const FlameField& f, const FlameConfig& c, double dt);
FlameResult run_to_steady(const Mechanism& m, const FlameConfig& c, const FlameField* initial = nullptr);

/// Linear interpolation of `f` onto a grid of n cells of width dx sharing
/// the same left edge; density and enthalpy are recomputed from T and Y.
FlameField regrid(const Mechanism& m, const FlameField& f, double dx, int n_cells);

struct FlameRow {
  double phi = 0.0;
  FlameStatus status = FlameStatus::NotConverged;
  double u_lam = 0.0;
  double thickness = 0.0;
  double T_burned = 0.0;
  double simulated_time = 0.0;
  long steps = 0;
  std::string message;
};

/// Independent steady runs per equivalence ratio, sorted by phi.
std::vector<FlameRow> sweep_flame(const Mechanism& m, std::vector<double> phis, const FlameConfig& base, int jobs = 1);

struct GridStudyOptions {
  /// Spacings below this get a cost measurement only (no steady run).
  double cost_only_below = 2.0e-6;
  /// Steps in the timing segment used for cpu_time.
  long timing_steps = 100;
};

struct GridRow {
  double dx = 0.0;
  int n_cells = 0;
  FlameStatus status = FlameStatus::NotConverged;
  bool cost_only = false;
  double u_lam = 0.0;
  double cpu_time = 0.0;  // wall-clock seconds per simulated millisecond
  std::string message;
};

/// One run per spacing with the domain length of `base` held fixed.
/// Spacings are processed from the base spacing outward and each run
/// starts from the nearest converged solution. Rows are sorted by dx.
std::vector<GridRow> grid_study(const Mechanism& m, std::vector<double> spacings, const FlameConfig& base,
                                const GridStudyOptions& options = {});

}  // namespace h2kin
