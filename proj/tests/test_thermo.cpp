#include <doctest.h>

#include <cmath>
#include <random>

#include "h2kin/error.hpp"
#include "h2kin/mechanism.hpp"
#include "h2kin/thermo.hpp"

using namespace h2kin;

namespace {

// Direct NASA-7 evaluation, written out term by term.
double cp_R_ref(const NasaPoly& p, double T) {
  const auto& a = T < p.T_mid ? p.low : p.high;
  return a[0] + a[1] * T + a[2] * T * T + a[3] * T * T * T + a[4] * T * T * T * T;
}
double h_RT_ref(const NasaPoly& p, double T) {
  const auto& a = T < p.T_mid ? p.low : p.high;
  return a[0] + a[1] * T / 2 + a[2] * T * T / 3 + a[3] * T * T * T / 4 + a[4] * T * T * T * T / 5 + a[5] / T;
}
double s_R_ref(const NasaPoly& p, double T) {
  const auto& a = T < p.T_mid ? p.low : p.high;
  return a[0] * std::log(T) + a[1] * T + a[2] * T * T / 2 + a[3] * T * T * T / 3 + a[4] * T * T * T * T / 4 + a[6];
}

Eigen::VectorXd random_Y(const Mechanism& m, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::VectorXd Y(m.n_species());
  for (int k = 0; k < m.n_species(); ++k) Y(k) = u(rng);
  return Y / Y.sum();
}

}  // namespace

TEST_CASE("species properties match direct polynomial evaluation") {
  const Mechanism& m = builtin_skeletal();
  for (double T : {300.0, 999.0, 1500.0, 2500.0}) {
    Eigen::VectorXd cp = species_cp_R(m, T), h = species_h_RT(m, T), s = species_s_R(m, T);
    for (int k = 0; k < m.n_species(); ++k) {
      const NasaPoly& p = *m.species(k).thermo;
      CAPTURE(m.species(k).name);
      CAPTURE(T);
      CHECK(cp(k) == doctest::Approx(cp_R_ref(p, T)).epsilon(1e-13));
      CHECK(h(k) == doctest::Approx(h_RT_ref(p, T)).epsilon(1e-13));
      CHECK(s(k) == doctest::Approx(s_R_ref(p, T)).epsilon(1e-13));
    }
  }
}

TEST_CASE("cp/R is continuous at the range midpoint") {
  const Mechanism& m = builtin_skeletal();
  for (const auto& sp : m.species()) {
    const NasaPoly& p = *sp.thermo;
    CAPTURE(sp.name);
    CHECK(p.T_low < p.T_mid);
    CHECK(p.T_mid < p.T_high);
    CHECK(cp_R(p, p.T_mid * (1 - 1e-12)) == doctest::Approx(cp_R(p, p.T_mid * (1 + 1e-12))).epsilon(1e-4));
  }
}

TEST_CASE("monatomic hydrogen has cp = 5/2 R") {
  const Mechanism& m = builtin_skeletal();
  int h = m.species_index("H");
  for (double T : {300.0, 1000.0, 3000.0}) CHECK(species_cp_R(m, T)(h) == doctest::Approx(2.5).epsilon(1e-8));
}

TEST_CASE("ideal-gas state relations") {
  const Mechanism& m = builtin_skeletal();
  ThermoState s = state_from_TPX(m, 1200.0, kOneAtmosphere, h2_air_mole_fractions(m, 1.0));
  CHECK(pressure(m, s) == doctest::Approx(kOneAtmosphere).epsilon(1e-14));
  CHECK(s.density == doctest::Approx(kOneAtmosphere * mean_molar_mass(m, s.Y) / (kGasConstant * 1200.0)).epsilon(1e-14));
  CHECK(concentrations(m, s).sum() == doctest::Approx(kOneAtmosphere / (kGasConstant * 1200.0)).epsilon(1e-13));
  CHECK(mole_fractions(m, mass_fractions(m, h2_air_mole_fractions(m, 2.0))).isApprox(h2_air_mole_fractions(m, 2.0), 1e-14));
}

TEST_CASE("H2-air composition by equivalence ratio") {
  const Mechanism& m = builtin_skeletal();
  Eigen::VectorXd X = h2_air_mole_fractions(m, 1.0);
  const double xH2 = X(m.species_index("H2")), xO2 = X(m.species_index("O2")), xN2 = X(m.species_index("N2"));
  CHECK(xH2 / xO2 == doctest::Approx(2.0));
  CHECK(xN2 / xO2 == doctest::Approx(0.79 / 0.21));
  CHECK(X.sum() == doctest::Approx(1.0));
  CHECK(xH2 == doctest::Approx(2.0 / (2.0 + 1.0 / 0.21)));
  X = h2_air_mole_fractions(m, 0.5);
  CHECK(X(m.species_index("H2")) / X(m.species_index("O2")) == doctest::Approx(1.0));
  CHECK_THROWS_AS(h2_air_mole_fractions(m, 0.0), DomainError);
}

TEST_CASE("mole fractions from name/value pairs") {
  const Mechanism& m = builtin_skeletal();
  Eigen::VectorXd X = mole_fractions_from_pairs(m, {{"H2", 2.0}, {"O2", 1.0}, {"N2", 3.76}});
  CHECK(X.sum() == doctest::Approx(1.0));
  CHECK(X(m.species_index("H2")) == doctest::Approx(2.0 / 6.76));
  CHECK_THROWS(mole_fractions_from_pairs(m, {{"XX", 1.0}}));
}

TEST_CASE("temperature inversion round-trips over random states") {
  const Mechanism& m = builtin_skeletal();
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> uT(250.0, 3400.0);
  for (int i = 0; i < 200; ++i) {
    Eigen::VectorXd Y = random_Y(m, rng);
    double T = uT(rng);
    CHECK(temperature_from_h(m, mixture_h(m, T, Y), Y, 1000.0) == doctest::Approx(T).epsilon(1e-10));
    CHECK(temperature_from_u(m, mixture_u(m, T, Y), Y, 1000.0) == doctest::Approx(T).epsilon(1e-10));
  }
}

TEST_CASE("mixture cp - cv equals R / W") {
  const Mechanism& m = builtin_skeletal();
  std::mt19937 rng(11);
  for (int i = 0; i < 50; ++i) {
    Eigen::VectorXd Y = random_Y(m, rng);
    double diff = mixture_cp(m, 1500.0, Y) - mixture_cv(m, 1500.0, Y);
    CHECK(diff == doctest::Approx(kGasConstant / mean_molar_mass(m, Y)).epsilon(1e-10));
  }
}

TEST_CASE("equilibrium constant from Gibbs energies") {
  const Mechanism& m = builtin_skeletal();
  // R5: H2 + M <=> 2H + M, delta_nu = +1.
  const Reaction& r5 = m.reaction(3);
  REQUIRE(r5.label == "R5");
  const int iH2 = m.species_index("H2"), iH = m.species_index("H");
  for (double T : {800.0, 1500.0, 2500.0}) {
    const NasaPoly& pH2 = *m.species(iH2).thermo;
    const NasaPoly& pH = *m.species(iH).thermo;
    double dG_RT = 2 * (h_RT_ref(pH, T) - s_R_ref(pH, T)) - (h_RT_ref(pH2, T) - s_R_ref(pH2, T));
    double Kc = std::exp(-dG_RT) * kReferencePressure / (kGasConstant * T);
    CAPTURE(T);
    CHECK(equilibrium_kc(m, r5, T) == doctest::Approx(Kc).epsilon(1e-11));
  }
}

TEST_CASE("state checks reject non-physical states") {
  const Mechanism& m = builtin_skeletal();
  ThermoState s = state_from_TPX(m, 1000.0, kOneAtmosphere, h2_air_mole_fractions(m, 1.0));
  CHECK_NOTHROW(check_state(s, m));
  ThermoState bad = s;
  bad.T = -1.0;
  CHECK_THROWS_AS(check_state(bad, m), DomainError);
  bad = s;
  bad.Y(0) += 1e-6;
  CHECK_THROWS_AS(check_state(bad, m), DomainError);
  bad = s;
  bad.density = 0.0;
  CHECK_THROWS_AS(check_state(bad, m), DomainError);
}
