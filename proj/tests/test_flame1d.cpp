#include <doctest.h>

#include <cmath>

#include "h2kin/error.hpp"
#include "h2kin/flame1d.hpp"
#include "h2kin/transport.hpp"

using namespace h2kin;

namespace {

// The skeletal species set with a single reaction that cannot proceed in
// the absence of H2O2, so that the flame operators act on inert gas.
Mechanism inert_mechanism() {
  const Mechanism& s = builtin_skeletal();
  std::vector<Element> elements(s.elements().begin(), s.elements().end());
  std::vector<SpeciesDef> species(s.species().begin(), s.species().end());
  Reaction r = s.reaction(12);  // H2O2 + M => OH + OH + M
  r.rate.A = 1e-30;
  return Mechanism("inert", elements, species, {r}, "N2");
}

void refresh(const Mechanism& m, FlameField& f) {
  for (int k = 0; k < f.n_cells(); ++k) {
    f.rho(k) = density_from_TPY(m, f.T(k), f.P, f.Y.col(k));
    f.h(k) = mixture_h(m, f.T(k), f.Y.col(k));
  }
}

FlameConfig cold_config() {
  FlameConfig c;
  c.kernel.temperature = c.T_in;
  return c;
}

}  // namespace

TEST_CASE("configuration validation") {
  const Mechanism& m = builtin_skeletal();
  FlameConfig c;
  CHECK_NOTHROW(validate(c, m));
  auto expect_domain_error = [&](auto mutate) {
    FlameConfig bad = c;
    mutate(bad);
    CHECK_THROWS_AS(validate(bad, m), DomainError);
  };
  expect_domain_error([](FlameConfig& b) { b.dx = 0.0; });
  expect_domain_error([](FlameConfig& b) { b.n_cells = 49; });
  expect_domain_error([](FlameConfig& b) { b.phi = 0.0; });
  expect_domain_error([](FlameConfig& b) { b.u_in = -0.1; });
  expect_domain_error([](FlameConfig& b) { b.kernel.width = 3e-3; });
  expect_domain_error([](FlameConfig& b) { b.kernel.position = 1.0; });
  expect_domain_error([](FlameConfig& b) { b.cfl = 1.5; });
  expect_domain_error([](FlameConfig& b) { b.X_in = Eigen::VectorXd::Ones(3); });
  CHECK_THROWS_AS(FlameSolver(m, [] {
                    FlameConfig b;
                    b.n_cells = 10;
                    return b;
                  }()),
                  DomainError);
}

TEST_CASE("default initial field: kernel at 60% of the domain, cold inlet, ideal-gas density") {
  const Mechanism& m = builtin_skeletal();
  FlameSolver solver(m, FlameConfig{});
  FlameField f = solver.initialize();
  REQUIRE(f.n_cells() == 400);
  Eigen::Index kmax;
  f.T.maxCoeff(&kmax);
  CHECK(std::abs(f.x(static_cast<int>(kmax)) - 0.6 * f.length()) <= f.dx);
  CHECK(f.T.maxCoeff() == doctest::Approx(2200.0).epsilon(1e-3));
  CHECK(f.T(0) == doctest::Approx(298.0).epsilon(1e-6));
  CHECK((f.Y.col(0) - solver.inlet().Y).cwiseAbs().maxCoeff() < 1e-6);
  for (int k = 0; k < f.n_cells(); ++k) {
    CHECK(f.rho(k) == doctest::Approx(density_from_TPY(m, f.T(k), f.P, f.Y.col(k))).epsilon(1e-12));
    CHECK(std::abs(f.Y.col(k).sum() - 1.0) < 1e-12);
    CHECK(f.Y.col(k).minCoeff() >= 0.0);
    if (k > 0) CHECK(f.x(k) > f.x(k - 1));
  }
  // The kernel carries a radical pool.
  CHECK(f.Y(m.species_index("H"), static_cast<int>(kmax)) > 1e-5);
}

TEST_CASE("zero-amplitude kernel gives a uniform cold field") {
  const Mechanism& m = builtin_skeletal();
  FlameSolver solver(m, cold_config());
  FlameField f = solver.initialize();
  CHECK((f.T.array() == 298.0).all());
  for (int k = 0; k < f.n_cells(); ++k) CHECK((f.Y.col(k) - solver.inlet().Y).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("a step of a uniform cold field is the identity up to round-off") {
  const Mechanism& m = builtin_skeletal();
  FlameSolver solver(m, cold_config());
  FlameField f = solver.initialize();
  FlameField g = f;
  REQUIRE(solver.step(g, 1e-6));
  CHECK(g.time == doctest::Approx(1e-6));
  CHECK((g.T - f.T).cwiseAbs().maxCoeff() <= 1e-9 * 298.0);
  CHECK((g.Y - f.Y).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((g.rho - f.rho).cwiseAbs().maxCoeff() <= 1e-12 * f.rho.maxCoeff());
  CHECK((g.mass_flux - f.mass_flux).cwiseAbs().maxCoeff() <= 1e-12 * f.mass_flux.maxCoeff());
}

TEST_CASE("pure diffusion of a trace step approaches the erf solution") {
  Mechanism m = inert_mechanism();
  const int H2 = m.species_index("H2"), N2 = m.species_index("N2");
  const double y_left = 1e-3;
  Eigen::VectorXd Y_left = Eigen::VectorXd::Zero(m.n_species());
  Y_left(H2) = y_left;
  Y_left(N2) = 1.0 - y_left;

  FlameConfig c = cold_config();
  c.u_in = 0.0;
  c.follow_front = false;
  c.X_in = mole_fractions(m, Y_left);
  FlameSolver solver(m, c);
  FlameField f = solver.initialize();
  const double x_step = 0.5 * f.length();
  for (int k = 0; k < f.n_cells(); ++k) {
    if (f.x(k) > x_step) {
      f.Y.col(k).setZero();
      f.Y(N2, k) = 1.0;
    }
  }
  refresh(m, f);

  const double dt = 1e-6;
  const int steps = 250;
  for (int i = 0; i < steps; ++i) REQUIRE(solver.step(f, dt));

  Eigen::VectorXd Y_mid = 0.5 * (Y_left + Eigen::VectorXd::Unit(m.n_species(), N2));
  const double D = mixture_diffusion(m, c.T_in, c.P, Y_mid)(H2);
  const double t = steps * dt;
  double err2 = 0.0, ref2 = 0.0;
  for (int k = 0; k < f.n_cells(); ++k) {
    double exact = 0.5 * y_left * std::erfc((f.x(k) - x_step) / (2.0 * std::sqrt(D * t)));
    err2 += (f.Y(H2, k) - exact) * (f.Y(H2, k) - exact);
    ref2 += exact * exact;
  }
  CHECK(std::sqrt(err2 / ref2) < 0.02);
  CHECK(std::abs(f.T.maxCoeff() - c.T_in) < 1e-3);
  CHECK(std::abs(f.T.minCoeff() - c.T_in) < 1e-3);
}

TEST_CASE("steps conserve mass, elements and enthalpy against boundary exchanges") {
  const Mechanism& m = builtin_skeletal();
  FlameSolver solver(m, FlameConfig{});
  FlameField f = solver.initialize();
  const ConservationLedger start = field_content(f);
  ConservationLedger exchanged{Eigen::VectorXd::Zero(m.n_species()), 0.0};
  double dt = 1e-8;
  for (int i = 0; i < 30; ++i) {
    REQUIRE(solver.step(f, dt, &exchanged));
    dt = std::min(1.3 * dt, solver.cfl_dt(f));
  }
  solver.shift(f, 3, &exchanged);
  const ConservationLedger end = field_content(f);
  Eigen::VectorXd species_err = end.species_mass - start.species_mass - exchanged.species_mass;
  CHECK(std::abs(species_err.sum()) <= 1e-12 * start.species_mass.sum());
  CHECK(std::abs(end.energy - start.energy - exchanged.energy) <= 1e-10 * std::abs(start.energy));

  // Reactions move mass between species but not between elements.
  Eigen::VectorXd el = m.element_matrix() * species_err.cwiseQuotient(m.molar_masses());
  Eigen::VectorXd el0 = m.element_matrix() * start.species_mass.cwiseQuotient(m.molar_masses());
  CHECK(el.cwiseAbs().maxCoeff() <= 1e-12 * el0.cwiseAbs().maxCoeff());

  for (int k = 0; k < f.n_cells(); ++k) {
    CHECK(std::abs(f.Y.col(k).sum() - 1.0) < 1e-9);
    CHECK(f.Y.col(k).minCoeff() > -1e-10);
  }
}

TEST_CASE("a step above the convective limit is refused and leaves the field unchanged") {
  const Mechanism& m = builtin_skeletal();
  FlameConfig c = cold_config();
  c.u_in = 3.0;
  FlameSolver solver(m, c);
  FlameField f = solver.initialize();
  FlameField g = f;
  const double limit = c.dx / 3.0;
  CHECK(solver.cfl_dt(f) <= c.cfl * limit * 1.0001);
  CHECK_FALSE(solver.step(g, 5.0 * limit));
  CHECK(g.T == f.T);
  CHECK(g.time == f.time);
}

TEST_CASE("front locator and thermal thickness on a tanh profile") {
  const Mechanism& m = builtin_skeletal();
  FlameSolver solver(m, cold_config());
  FlameField f = solver.initialize();
  const double delta = 60e-6, Tb = 2100.0;
  for (double xf : {0.9e-3, 1.0013e-3, 1.3027e-3}) {
    for (int k = 0; k < f.n_cells(); ++k) f.T(k) = 298.0 + (Tb - 298.0) * 0.5 * (1.0 + std::tanh((f.x(k) - xf) / delta));
    auto front = solver.front_position(f);
    REQUIRE(front.has_value());
    CHECK(std::abs(*front - xf) < 0.1 * f.dx);
    CHECK(solver.thermal_thickness(f) == doctest::Approx(2.0 * delta).epsilon(0.01));
  }
  f.T.setConstant(298.0);
  CHECK_FALSE(solver.front_position(f).has_value());
}

TEST_CASE("regrid interpolates linearly and keeps the left edge") {
  const Mechanism& m = builtin_skeletal();
  FlameSolver solver(m, FlameConfig{});
  FlameField f = solver.initialize();
  f.x0 = 1.5e-3;
  for (int k = 0; k < f.n_cells(); ++k) f.T(k) = 300.0 + 1e6 * (f.x(k) - f.x0);
  refresh(m, f);
  FlameField g = regrid(m, f, 2.5e-6, 800);
  CHECK(g.x0 == f.x0);
  CHECK(g.length() == doctest::Approx(f.length()));
  for (int k = 2; k < g.n_cells() - 2; ++k) {
    CHECK(g.T(k) == doctest::Approx(300.0 + 1e6 * (g.x(k) - g.x0)).epsilon(1e-10));
    CHECK(g.rho(k) == doctest::Approx(density_from_TPY(m, g.T(k), g.P, g.Y.col(k))).epsilon(1e-12));
  }
  CHECK_THROWS_AS(regrid(m, f, -1.0, 40), DomainError);
}

TEST_CASE("status names") {
  CHECK(to_string(FlameStatus::Steady) == "steady");
  CHECK(to_string(FlameStatus::BlowOff) == "blow-off");
  CHECK(to_string(FlameStatus::Flashback) == "flashback");
  CHECK(to_string(FlameStatus::Extinction) == "extinction");
}

TEST_CASE("far below the flammability limit the kernel dies") {
  const Mechanism& m = builtin_skeletal();
  FlameConfig c;
  c.phi = 0.05;
  FlameResult r = run_to_steady(m, c);
  CHECK(r.status == FlameStatus::Extinction);
  CHECK_FALSE(r.steady);
}

TEST_CASE("without front following a slow mixture in a fast stream blows off") {
  const Mechanism& m = builtin_skeletal();
  FlameConfig c;
  c.phi = 0.5;
  c.u_in = 3.5;
  c.follow_front = false;
  FlameResult r = run_to_steady(m, c);
  CHECK(r.status == FlameStatus::BlowOff);
}
