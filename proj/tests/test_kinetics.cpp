#include <doctest.h>

#include <cmath>
#include <random>

#include "h2kin/error.hpp"
#include "h2kin/kinetics.hpp"

using namespace h2kin;

namespace {

ThermoState random_state(const Mechanism& m, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0), uT(600.0, 3000.0), uP(0.2, 5.0);
  Eigen::VectorXd X(m.n_species());
  for (int k = 0; k < m.n_species(); ++k) X(k) = std::pow(u(rng), 3.0);
  return state_from_TPX(m, uT(rng), uP(rng) * kOneAtmosphere, X / X.sum());
}

}  // namespace

TEST_CASE("forward rate constants equal the CGS Arrhenius form") {
  const Mechanism& m = builtin_skeletal();
  const double R_kcal = 1.9872e-3;
  struct Case {
    int r;
    double A, n, Ea, order;
  };
  // R1, R5, R8, R13, R15 in mol, cm^3, s, kcal.
  const Case cases[] = {{0, 1.91e14, 0.0, 16.44, 2}, {3, 4.57e19, -1.4, 105.1, 2}, {6, 4.5e22, -2.0, 0.0, 3},
                        {11, 2.89e13, 0.0, -0.5, 2}, {12, 1.2e17, 0.0, 45.5, 2}};
  Eigen::VectorXd kf, kr;
  for (double T : {900.0, 1500.0, 2400.0}) {
    rate_constants(m, T, kf, kr);
    for (const Case& c : cases) {
      // M counts towards the order of the units of A.
      double cgs = c.A * std::pow(T, c.n) * std::exp(-c.Ea / (R_kcal * T));
      double si = cgs * std::pow(1e-6, c.order - 1);
      CAPTURE(m.reaction(c.r).label);
      CAPTURE(T);
      CHECK(kf(c.r) == doctest::Approx(si).epsilon(2e-4));
    }
  }
}

TEST_CASE("negative activation energy gives a rate decreasing with temperature") {
  const Mechanism& m = builtin_skeletal();
  Eigen::VectorXd kf1, kr1, kf2, kr2;
  rate_constants(m, 1000.0, kf1, kr1);
  rate_constants(m, 2000.0, kf2, kr2);
  CHECK(kf2(11) < kf1(11));
}

TEST_CASE("reverse rates only for equilibrium reactions, with kf/kr = Kc") {
  const Mechanism& m = builtin_skeletal();
  Eigen::VectorXd kf, kr;
  rate_constants(m, 1800.0, kf, kr);
  for (int r = 0; r < m.n_reactions(); ++r) {
    CAPTURE(m.reaction(r).label);
    if (m.reaction(r).reversible())
      CHECK(kf(r) / kr(r) == doctest::Approx(equilibrium_kc(m, m.reaction(r), 1800.0)).epsilon(1e-12));
    else
      CHECK(kr(r) == 0.0);
  }
}

TEST_CASE("mass-action rates of progress by hand") {
  const Mechanism& m = builtin_skeletal();
  std::mt19937 rng(3);
  ThermoState s = random_state(m, rng);
  Eigen::VectorXd c = concentrations(m, s);
  RateVector q = rates_of_progress(m, s);
  const int H = m.species_index("H"), O2 = m.species_index("O2"), H2 = m.species_index("H2");
  CHECK(q.qf(0) == doctest::Approx(q.kf(0) * c(H) * c(O2)).epsilon(1e-13));
  // R5 with efficiencies: [M] = sum eps_i c_i.
  double M = c.dot(m.efficiencies(3));
  CHECK(third_body_concentration(m, 3, c) == doctest::Approx(M).epsilon(1e-14));
  CHECK(q.q(3) == doctest::Approx(q.kf(3) * c(H2) * M - q.kr(3) * c(H) * c(H) * M).epsilon(1e-12));
}

TEST_CASE("production rates conserve elements and mass") {
  const Mechanism& m = builtin_skeletal();
  std::mt19937 rng(42);
  for (int i = 0; i < 300; ++i) {
    ThermoState s = random_state(m, rng);
    Eigen::VectorXd w = production_rates(m, s);
    const double scale = std::max(w.cwiseAbs().maxCoeff(), 1e-300);
    Eigen::VectorXd elements = m.element_matrix() * w;
    CHECK(elements.cwiseAbs().maxCoeff() <= 1e-10 * scale * 16.0);
    double mass = w.dot(m.molar_masses());
    CHECK(std::abs(mass) <= 1e-10 * (w.cwiseAbs().dot(m.molar_masses())));
  }
}

TEST_CASE("allocation-free evaluator agrees with production_rates") {
  const Mechanism& m = builtin_skeletal();
  KineticsEvaluator eval(m);
  std::mt19937 rng(5);
  for (int i = 0; i < 100; ++i) {
    ThermoState s = random_state(m, rng);
    Eigen::VectorXd c = concentrations(m, s);
    Eigen::VectorXd w = production_rates(m, s.T, c);
    Eigen::VectorXd w2(m.n_species());
    eval.production_rates(s.T, c.data(), w2.data());
    for (int k = 0; k < m.n_species(); ++k) CHECK(w2(k) == doctest::Approx(w(k)).epsilon(1e-10).scale(1e-20));
  }
}

TEST_CASE("stoichiometric matrix times q equals production rates") {
  const Mechanism& m = builtin_skeletal();
  std::mt19937 rng(9);
  ThermoState s = random_state(m, rng);
  Eigen::VectorXd w = stoichiometric_matrix(m) * rates_of_progress(m, s).q;
  CHECK(w.isApprox(production_rates(m, s), 1e-12));
}

TEST_CASE("inert bath gas is neither produced nor destroyed") {
  const Mechanism& m = builtin_skeletal();
  std::mt19937 rng(13);
  for (int i = 0; i < 20; ++i) CHECK(production_rates(m, random_state(m, rng))(m.bath_index()) == 0.0);
}

TEST_CASE("stiffness ratio is large for an igniting mixture") {
  const Mechanism& m = builtin_skeletal();
  ThermoState s = state_from_TPX(m, 1200.0, kOneAtmosphere, h2_air_mole_fractions(m, 1.0));
  s.Y(m.species_index("H")) = 1e-6;
  s.Y(m.species_index("OH")) = 1e-6;
  s.Y /= s.Y.sum();
  CHECK(stiffness_ratio(m, s) > 1e3);
}
