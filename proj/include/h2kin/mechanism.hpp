#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace h2kin {

struct Element {
  std::string symbol;
  double atomic_mass = 0.0;  // g/mol
};

/// Two-range NASA-7 polynomial set. Coefficients are dimensionless
/// (cp/R, h/RT, s/R forms).
struct NasaPoly {
  double T_low = 0.0;
  double T_mid = 0.0;
  double T_high = 0.0;
  std::array<double, 7> low{};
  std::array<double, 7> high{};
};

struct LennardJones {
  double sigma = 0.0;       // collision diameter, Angstrom
  double eps_over_k = 0.0;  // well depth, K
  double dipole = 0.0;      // Debye
};

/// Modified Arrhenius parameters in SI: A in (m^3/mol)^(order-1)/s,
/// Ea in J/mol.
struct ArrheniusParams {
  double A = 0.0;
  double n = 0.0;
  double Ea = 0.0;
};

struct SpeciesDef {
  std::string name;
  std::map<std::string, int> composition;  // element symbol -> atom count
  double molar_mass = 0.0;                 // kg/mol, derived from composition
  std::optional<NasaPoly> thermo;
  std::optional<LennardJones> transport;
};

enum class Reversibility { Irreversible, FromEquilibrium };

struct StoichTerm {
  int species = -1;
  int nu = 0;
};

struct ThirdBody {
  /// Explicit efficiency entries as written; names may be unknown to the
  /// mechanism (validation reports them). Unlisted species default to 1.
  std::vector<std::pair<std::string, double>> efficiencies;
};

struct Reaction {
  std::string label;
  std::vector<StoichTerm> reactants;
  std::vector<StoichTerm> products;
  ArrheniusParams rate;
  Reversibility reversibility = Reversibility::Irreversible;
  std::optional<ThirdBody> third_body;

  /// Sum of reactant coefficients plus one for a third body.
  int molecularity() const;
  /// Sum of product minus reactant coefficients (third body excluded).
  int delta_nu() const;
  bool reversible() const { return reversibility == Reversibility::FromEquilibrium; }
};

/// Immutable reaction mechanism. Construction resolves derived data
/// (molar masses, element matrix, third-body efficiency vectors) and
/// checks the structural invariants: species referenced by reactions
/// exist, bath gas exists, species names are unique, at least one
/// reaction. Element balance is left to validate_mechanism().
class Mechanism {
 public:
  Mechanism(std::string name, std::vector<Element> elements, std::vector<SpeciesDef> species,
            std::vector<Reaction> reactions, std::string bath_gas);

  const std::string& name() const { return name_; }
  std::span<const Element> elements() const { return elements_; }
  std::span<const SpeciesDef> species() const { return species_; }
  std::span<const Reaction> reactions() const { return reactions_; }
  const SpeciesDef& species(int k) const { return species_[static_cast<std::size_t>(k)]; }
  const Reaction& reaction(int r) const { return reactions_[static_cast<std::size_t>(r)]; }

  int n_elements() const { return static_cast<int>(elements_.size()); }
  int n_species() const { return static_cast<int>(species_.size()); }
  int n_reactions() const { return static_cast<int>(reactions_.size()); }

  std::optional<int> find_species(std::string_view name) const;
  /// Throws MechanismError when absent.
  int species_index(std::string_view name) const;
  std::optional<int> find_element(std::string_view symbol) const;

  const std::string& bath_gas() const { return species_[static_cast<std::size_t>(bath_)].name; }
  int bath_index() const { return bath_; }

  /// Species molar masses, kg/mol.
  const Eigen::VectorXd& molar_masses() const { return molar_masses_; }
  /// Atom counts, n_elements x n_species.
  const Eigen::MatrixXd& element_matrix() const { return element_matrix_; }
  /// Dense third-body efficiencies for reaction r (all ones when the
  /// reaction has no third body).
  const Eigen::VectorXd& efficiencies(int r) const { return efficiencies_[static_cast<std::size_t>(r)]; }

 private:
  std::string name_;
  std::vector<Element> elements_;
  std::vector<SpeciesDef> species_;
  std::vector<Reaction> reactions_;
  int bath_ = -1;
  Eigen::VectorXd molar_masses_;
  Eigen::MatrixXd element_matrix_;
  std::vector<Eigen::VectorXd> efficiencies_;
};

/// Parses the line-oriented mechanism format (see docs/mechanism-format.md).
/// Throws ParseError with line/column on syntax errors, unknown species,
/// element imbalance and duplicate species.
Mechanism parse_mechanism(std::string_view text);
Mechanism load_mechanism(const std::string& path);

/// Writes `m` in the mechanism format with SI units and round-trip exact
/// number formatting.
std::string serialize(const Mechanism& m);

/// The 14-reaction skeletal H2/O2 scheme with N2 bath gas.
const Mechanism& builtin_skeletal();
/// Embedded text of the skeletal mechanism file.
std::string_view builtin_skeletal_text();

/// Resolves "skeletal" (builtin) or a file path.
Mechanism resolve_mechanism(const std::string& name_or_path);

/// Unit conversion between the file convention (mol, cm^3, s, K, kcal/mol)
/// and internal SI.
ArrheniusParams arrhenius_from_cgs_kcal(double A, double n, double Ea_kcal, int molecularity);
ArrheniusParams arrhenius_to_cgs_kcal(const ArrheniusParams& si, int molecularity);

enum class Severity { Warning, Error };

struct ValidationIssue {
  enum class Kind {
    ElementImbalance,
    DuplicateReaction,
    MissingThermo,
    MissingTransport,
    UnknownEfficiencySpecies,
    NegativeEfficiency,
    InvalidRate,
    InvalidThermoRange,
    InvalidTransport,
  };
  Kind kind;
  Severity severity;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;

  bool empty() const { return issues.empty(); }
  bool has_errors() const;
};

ValidationReport validate_mechanism(const Mechanism& m);

/// Human-readable reaction equation, e.g. "H2 + M <=> H + H + M".
std::string equation_string(const Mechanism& m, const Reaction& r);

}  // namespace h2kin
