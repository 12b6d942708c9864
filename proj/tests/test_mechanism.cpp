#include <doctest.h>

#include <cmath>
#include <map>
#include <string>

#include "h2kin/error.hpp"
#include "h2kin/mechanism.hpp"

using namespace h2kin;

namespace {

struct Triple {
  const char* label;
  double A, n, Ea;
};

// Rate parameters as tabulated for the skeletal scheme (mol, cm^3, s, K, kcal).
const Triple kTable[] = {
    {"R1", 1.91e14, 0.0, 16.44},   {"R2", 5.08e4, 2.67, 6.292},   {"R3", 2.16e8, 1.51, 3.43},
    {"R5", 4.57e19, -1.4, 105.1},  {"R6", 6.17e15, -0.5, 0.0},    {"R7", 4.72e18, -1.0, 0.0},
    {"R8", 4.5e22, -2.0, 0.0},     {"R9", 6.17e9, -1.42, 0.0},    {"R10", 1.66e13, 0.0, 0.82},
    {"R-10", 3.68e13, 0.203, 54.46}, {"R11", 1.69e14, 0.0, 0.87}, {"R13", 2.89e13, 0.0, -0.5},
    {"R15", 1.2e17, 0.0, 45.5},    {"R-17", 3.42e12, 0.202, 27.12},
};

const std::map<std::string, std::map<std::string, double>> kEfficiencies = {
    {"R5", {{"H", 1.0}, {"H2", 2.5}, {"H2O", 12}, {"H2O2", 1.0}, {"HO2", 1.0}, {"O", 1.0}, {"O2", 1.0}, {"OH", 1.0}}},
    {"R6", {{"H", 0.83}, {"H2", 2.5}, {"H2O", 12}, {"H2O2", 1.0}, {"HO2", 1.0}, {"O", 0.83}, {"O2", 1.0}, {"OH", 1.0}}},
    {"R7", {{"H", 0.75}, {"H2", 2.5}, {"H2O", 12}, {"H2O2", 1.0}, {"HO2", 1.0}, {"O", 0.75}, {"O2", 1.0}, {"OH", 1.0}}},
    {"R8", {{"H", 1.0}, {"H2", 0.73}, {"H2O", 12}, {"H2O2", 1.0}, {"HO2", 1.0}, {"O", 1.0}, {"O2", 1.0}, {"OH", 1.0}}},
    {"R9", {{"H", 1.0}, {"H2", 2.5}, {"H2O", 12}, {"H2O2", 1.0}, {"HO2", 1.0}, {"O", 1.0}, {"O2", 1.0}, {"OH", 1.0}}},
    {"R15", {{"H", 1.0}, {"H2", 2.5}, {"H2O", 12}, {"H2O2", 1.0}, {"HO2", 1.0}, {"O", 1.0}, {"O2", 1.0}, {"OH", 1.0}}},
};

std::string replace(std::string s, const std::string& from, const std::string& to) {
  auto pos = s.find(from);
  REQUIRE(pos != std::string::npos);
  return s.replace(pos, from.size(), to);
}

}  // namespace

TEST_CASE("skeletal scheme carries the tabulated Arrhenius triples") {
  const Mechanism& m = builtin_skeletal();
  REQUIRE(m.n_reactions() == 14);
  CHECK(m.n_species() == 9);
  CHECK(m.bath_gas() == "N2");
  for (int r = 0; r < m.n_reactions(); ++r) {
    const Reaction& rx = m.reaction(r);
    CAPTURE(rx.label);
    CHECK(rx.label == kTable[r].label);
    ArrheniusParams p = arrhenius_to_cgs_kcal(rx.rate, rx.molecularity());
    CHECK(p.A == doctest::Approx(kTable[r].A).epsilon(1e-14));
    CHECK(p.n == kTable[r].n);
    CHECK(p.Ea == doctest::Approx(kTable[r].Ea).epsilon(1e-14));
  }
}

TEST_CASE("SI conversion matches a hand-derived factor") {
  // Bimolecular: cm^3/(mol s) -> m^3/(mol s) is 1e-6; Ea kcal -> J with 4184.
  ArrheniusParams si = arrhenius_from_cgs_kcal(1.91e14, 0.0, 16.44, 2);
  CHECK(si.A == doctest::Approx(1.91e8).epsilon(1e-15));
  CHECK(si.Ea == doctest::Approx(16.44 * 4184.0).epsilon(1e-15));
  // Termolecular: (cm^3/mol)^2/s -> 1e-12.
  si = arrhenius_from_cgs_kcal(4.5e22, -2.0, 0.0, 3);
  CHECK(si.A == doctest::Approx(4.5e10).epsilon(1e-15));
  // Unimolecular rate constant has no concentration unit.
  si = arrhenius_from_cgs_kcal(1.2e17, 0.0, 45.5, 1);
  CHECK(si.A == doctest::Approx(1.2e17).epsilon(1e-15));
}

TEST_CASE("third-body efficiencies match the table; unlisted species default to one") {
  const Mechanism& m = builtin_skeletal();
  int third_body_reactions = 0;
  for (int r = 0; r < m.n_reactions(); ++r) {
    const Reaction& rx = m.reaction(r);
    auto it = kEfficiencies.find(rx.label);
    if (it == kEfficiencies.end()) {
      CHECK_FALSE(rx.third_body.has_value());
      continue;
    }
    ++third_body_reactions;
    REQUIRE(rx.third_body.has_value());
    for (const auto& [name, value] : it->second) {
      CAPTURE(rx.label);
      CAPTURE(name);
      CHECK(m.efficiencies(r)(m.species_index(name)) == value);
    }
    CHECK(m.efficiencies(r)(m.species_index("N2")) == 1.0);
  }
  CHECK(third_body_reactions == 6);
}

TEST_CASE("only R5 and R6 are reverse-from-equilibrium") {
  const Mechanism& m = builtin_skeletal();
  for (const Reaction& rx : m.reactions()) {
    CAPTURE(rx.label);
    CHECK(rx.reversible() == (rx.label == "R5" || rx.label == "R6"));
  }
}

TEST_CASE("element balance holds for every reaction") {
  const Mechanism& m = builtin_skeletal();
  const Eigen::MatrixXd& E = m.element_matrix();
  for (const Reaction& rx : m.reactions()) {
    Eigen::VectorXd net = Eigen::VectorXd::Zero(m.n_elements());
    for (const auto& t : rx.reactants) net -= t.nu * E.col(t.species);
    for (const auto& t : rx.products) net += t.nu * E.col(t.species);
    CAPTURE(rx.label);
    CHECK(net.cwiseAbs().maxCoeff() == 0.0);
  }
  CHECK(validate_mechanism(m).empty());
}

TEST_CASE("molar masses are the composition-weighted atomic masses") {
  const Mechanism& m = builtin_skeletal();
  for (const auto& s : m.species()) {
    double W = 0.0;
    for (const auto& [el, count] : s.composition) W += count * m.elements()[*m.find_element(el)].atomic_mass * 1e-3;
    CAPTURE(s.name);
    CHECK(s.molar_mass == doctest::Approx(W).epsilon(1e-12));
  }
  CHECK(m.species(m.species_index("H2O")).molar_mass == doctest::Approx(0.01801528).epsilon(1e-9));
}

TEST_CASE("serialize and parse round-trip exactly") {
  const Mechanism& m = builtin_skeletal();
  Mechanism back = parse_mechanism(serialize(m));
  REQUIRE(back.n_reactions() == m.n_reactions());
  REQUIRE(back.n_species() == m.n_species());
  for (int r = 0; r < m.n_reactions(); ++r) {
    CHECK(back.reaction(r).rate.A == m.reaction(r).rate.A);
    CHECK(back.reaction(r).rate.n == m.reaction(r).rate.n);
    CHECK(back.reaction(r).rate.Ea == m.reaction(r).rate.Ea);
    CHECK(back.efficiencies(r) == m.efficiencies(r));
    CHECK(back.reaction(r).reversibility == m.reaction(r).reversibility);
  }
  for (int k = 0; k < m.n_species(); ++k) {
    CHECK(back.species(k).thermo->low == m.species(k).thermo->low);
    CHECK(back.species(k).thermo->high == m.species(k).thermo->high);
    CHECK(back.species(k).transport->sigma == m.species(k).transport->sigma);
  }
  CHECK(serialize(back) == serialize(m));
}

TEST_CASE("parse errors carry a line number") {
  const std::string text(builtin_skeletal_text());

  SUBCASE("unknown species in a reaction") {
    std::string bad = replace(text, "H2 + O => H + OH", "H2 + Q => H + OH");
    try {
      parse_mechanism(bad);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 72);
      CHECK(std::string(e.what()).find("Q") != std::string::npos);
    }
  }
  SUBCASE("element imbalance") {
    CHECK_THROWS_AS(parse_mechanism(replace(text, "H2 + O => H + OH", "H2 + O => H + H2O")), ParseError);
  }
  SUBCASE("malformed number") {
    CHECK_THROWS_AS(parse_mechanism(replace(text, "5.08e+4", "5.08q4")), ParseError);
  }
  SUBCASE("duplicate species") {
    CHECK_THROWS_AS(parse_mechanism(replace(text, "  O2    O:2", "  H2    O:2")), ParseError);
  }
}

TEST_CASE("validation reports duplicate reactions and unknown efficiency species as issues") {
  const std::string text(builtin_skeletal_text());
  std::string dup = replace(text, "  R2:   H2 + O => H + OH              5.08e+4    2.67    6.292",
                            "  R2:   H2 + O => H + OH              5.08e+4    2.67    6.292\n"
                            "  R2b:  H2 + O => H + OH              5.08e+4    2.67    6.292");
  ValidationReport rep = validate_mechanism(parse_mechanism(dup));
  bool found = false;
  for (const auto& issue : rep.issues) found |= issue.kind == ValidationIssue::Kind::DuplicateReaction;
  CHECK(found);
}

TEST_CASE("resolve_mechanism finds the builtin and rejects missing files") {
  CHECK(resolve_mechanism("skeletal").n_reactions() == 14);
  CHECK_THROWS(resolve_mechanism("/nonexistent/file.mech"));
}

TEST_CASE("equation strings render third bodies and reversibility") {
  const Mechanism& m = builtin_skeletal();
  CHECK(equation_string(m, m.reaction(3)) == "H2 + M <=> H + H + M");
  CHECK(equation_string(m, m.reaction(0)) == "H + O2 => OH + O");
}
