// Converged flames. Each case runs a full flame to steady state, so this
// binary takes tens of minutes on a single core.

#include <doctest.h>

#include <cmath>
#include <fstream>
#include <map>

#include <json.hpp>

#include "h2kin/flame1d.hpp"

using namespace h2kin;

namespace {

const FlameResult& flame(double phi, double u_in = 1.0, KernelSpec kernel = {}) {
  static std::map<std::tuple<double, double, double, double>, FlameResult> cache;
  auto key = std::make_tuple(phi, u_in, kernel.width, kernel.temperature);
  auto it = cache.find(key);
  if (it == cache.end()) {
    FlameConfig c;
    c.phi = phi;
    c.u_in = u_in;
    c.kernel = kernel;
    it = cache.emplace(key, run_to_steady(builtin_skeletal(), c)).first;
    MESSAGE("phi " << phi << ", u_in " << u_in << ", kernel " << kernel.width << " m / " << kernel.temperature
                   << " K: " << to_string(it->second.status) << ", u_lam " << it->second.u_lam << " m/s");
  }
  return it->second;
}

}  // namespace

TEST_CASE("stoichiometric flame: speed, thickness and structure") {
  const Mechanism& m = builtin_skeletal();
  const FlameResult& r = flame(1.0);
  REQUIRE(r.status == FlameStatus::Steady);
  CHECK(r.u_lam > 0.0);
  CHECK(r.consumption_speed == doctest::Approx(r.u_lam).epsilon(0.05));
  CHECK(r.thickness > 30e-6);
  CHECK(r.thickness < 1e-3);
  CHECK(r.T_burned > 2000.0);

  const FlameField& f = r.field;
  FlameConfig c;
  Eigen::VectorXd Y_in = mass_fractions(m, h2_air_mole_fractions(m, 1.0));
  CHECK((f.Y.col(0) - Y_in).cwiseAbs().maxCoeff() < 1e-6);
  CHECK(std::abs(f.T(0) - c.T_in) < 1e-3);

  // Element content change over the whole run equals the net boundary exchange.
  const Eigen::VectorXd& W = m.molar_masses();
  Eigen::VectorXd el_change =
      m.element_matrix() * (field_content(f).species_mass - r.initial_content.species_mass).cwiseQuotient(W);
  Eigen::VectorXd el_exchanged = m.element_matrix() * r.exchanged.species_mass.cwiseQuotient(W);
  Eigen::VectorXd el_content = m.element_matrix() * r.initial_content.species_mass.cwiseQuotient(W);
  for (int e = 0; e < el_change.size(); ++e)
    CHECK(std::abs(el_change(e) - el_exchanged(e)) <= 1e-6 * el_content(e));

  // Hydrogen is consumed monotonically across the front, and its steepest
  // change over 10 um stays within a factor of 4, so 5 um cells resolve it.
  const int H2 = m.species_index("H2");
  const int stride = static_cast<int>(std::lround(10e-6 / f.dx));
  Eigen::VectorXd xh2(f.n_cells());
  for (int k = 0; k < f.n_cells(); ++k) xh2(k) = mole_fractions(m, f.Y.col(k))(H2);
  for (int k = 1; k < f.n_cells(); ++k) CHECK(xh2(k) <= xh2(k - 1) * (1.0 + 1e-9));
  CHECK(xh2(f.n_cells() - 1) < 1e-3 * xh2(0));
  double steepest = 0.0;
  for (int k = 0; k + stride < f.n_cells(); ++k) steepest = std::max(steepest, xh2(k) / xh2(k + stride));
  MESSAGE("steepest H2 ratio per 10 um: " << steepest);
  CHECK(steepest > 1.0);
  CHECK(steepest <= 4.0);
}

TEST_CASE("flame speed does not depend on the inflow velocity") {
  const double ref = flame(1.0).u_lam;
  for (double u : {0.5, 3.5}) {
    const FlameResult& r = flame(1.0, u);
    REQUIRE(r.status == FlameStatus::Steady);
    CHECK(r.u_lam == doctest::Approx(ref).epsilon(0.01));
  }
}

TEST_CASE("flame speed does not depend on the ignition kernel") {
  const double ref = flame(1.0).u_lam;
  const KernelSpec base;
  for (double s : {0.5, 1.5}) {
    KernelSpec wide = base, hot = base;
    wide.width *= s;
    hot.temperature = base.temperature * s;
    for (const KernelSpec& k : {wide, hot}) {
      const FlameResult& r = flame(1.0, 1.0, k);
      REQUIRE(r.status == FlameStatus::Steady);
      CHECK(r.u_lam == doctest::Approx(ref).epsilon(0.01));
    }
  }
}

TEST_CASE("5 um grid agrees with the 1 um reference") {
  std::ifstream is(std::string(H2KIN_GOLDEN_DIR) + "/flame_reference.json");
  REQUIRE(is.good());
  auto golden = nlohmann::json::parse(is);
  for (const auto& row : golden["rows"]) {
    const double phi = row["phi"].get<double>();
    CAPTURE(phi);
    REQUIRE(row["status"] == "steady");
    const FlameResult& r = flame(phi);
    REQUIRE(r.status == FlameStatus::Steady);
    CHECK(r.u_lam == doctest::Approx(row["u_lam_m_s"].get<double>()).epsilon(0.03));
  }
}
