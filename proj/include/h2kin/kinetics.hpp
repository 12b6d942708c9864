#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "h2kin/constants.hpp"
#include "h2kin/mechanism.hpp"
#include "h2kin/thermo.hpp"

namespace h2kin {

/// k = A T^n exp(-Ea / (R T)) in the units of `p`.
template <class Scalar>
Scalar arrhenius(const ArrheniusParams& p, Scalar T) {
  using std::exp;
  using std::pow;
  return p.A * pow(T, Scalar(p.n)) * exp(-Scalar(p.Ea) / (Scalar(kGasConstant) * T));
}

/// Per-reaction rate constants and rates of progress. Third-body
/// concentration is folded into q, not into k_f or k_r.
struct RateVector {
  Eigen::VectorXd kf;  // forward rate constants, SI
  Eigen::VectorXd kr;  // reverse rate constants, 0 for irreversible
  Eigen::VectorXd qf;  // forward progress, mol/(m^3 s)
  Eigen::VectorXd qr;  // reverse progress
  Eigen::VectorXd q;   // net progress qf - qr
};

/// [M] = sum_i eps_i c_i, mol/m^3. Equals the total concentration for a
/// reaction without third-body efficiencies.
double third_body_concentration(const Mechanism& m, int r, const Eigen::VectorXd& c);

/// Forward rate constant and, for reverse-from-equilibrium reactions,
/// k_r = k_f / Kc. Throws NumericalError on overflow.
void rate_constants(const Mechanism& m, double T, Eigen::VectorXd& kf, Eigen::VectorXd& kr);

/// Mass-action rates at temperature T and concentrations c (mol/m^3).
/// Negative concentrations are treated as zero.
RateVector rates_of_progress(const Mechanism& m, double T, const Eigen::VectorXd& c);
RateVector rates_of_progress(const Mechanism& m, const ThermoState& s);

/// Net molar production rates, mol/(m^3 s).
Eigen::VectorXd production_rates(const Mechanism& m, double T, const Eigen::VectorXd& c);
Eigen::VectorXd production_rates(const Mechanism& m, const ThermoState& s);

/// Net stoichiometric matrix, n_species x n_reactions.
Eigen::MatrixXd stoichiometric_matrix(const Mechanism& m);

/// Gross destruction rates per species, mol/(m^3 s): reactant side of
/// the forward direction plus product side of the reverse direction.
Eigen::VectorXd destruction_rates(const Mechanism& m, double T, const Eigen::VectorXd& c);

/// max_i tau_i / min_i tau_i with tau_i = c_i / destruction_i over species
/// with nonzero destruction. Throws DomainError with fewer than two.
double stiffness_ratio(const Mechanism& m, const ThermoState& s);

/// Allocation-free evaluator of net production rates for hot loops.
/// Same rate laws as production_rates(); safe for concurrent use. Keeps a
/// pointer to `m`, which must outlive it.
class KineticsEvaluator {
 public:
  explicit KineticsEvaluator(const Mechanism& m);

  int n_species() const { return n_species_; }
  /// wdot (mol/(m^3 s)) from T and concentrations c (mol/m^3).
  void production_rates(double T, const double* c, double* wdot) const;

 private:
  struct Term {
    int species;
    int nu;
  };
  struct Rxn {
    std::vector<Term> reactants;
    std::vector<Term> products;
    double A, n, Ea_R;
    bool reversible;
    int delta_nu;
    int third_body;  // row in eff_, or -1
  };
  const Mechanism* m_;
  int n_species_;
  std::vector<Rxn> rxns_;
  std::vector<double> eff_;  // n_third_body x n_species
  std::vector<int> thermo_species_;  // species needed for equilibrium constants
};

}  // namespace h2kin
