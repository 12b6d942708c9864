#include "h2kin/transport.hpp"

#include <cmath>

#include "h2kin/error.hpp"

namespace h2kin {

namespace {

// mu^2 / (2 eps sigma^3) with mu in Debye, eps/k in K, sigma in Angstrom.
constexpr double kDeltaStarFactor = 1e-36 / (2.0 * 1.380649e-16 * 1e-24);

const LennardJones& lj(const Mechanism& m, int k) {
  const auto& sp = m.species(k);
  if (!sp.transport) throw MechanismError("species '" + sp.name + "' has no transport data");
  return *sp.transport;
}

double delta_star(const LennardJones& p) {
  return kDeltaStarFactor * p.dipole * p.dipole / (p.eps_over_k * p.sigma * p.sigma * p.sigma);
}

struct Pair {
  double sigma;
  double eps_over_k;
  double delta;
};

Pair combine(const LennardJones& a, const LennardJones& b) {
  return {0.5 * (a.sigma + b.sigma), std::sqrt(a.eps_over_k * b.eps_over_k), std::sqrt(delta_star(a) * delta_star(b))};
}

double molar_mass_g(const Mechanism& m, int k) { return m.molar_masses()(k) * 1e3; }

}  // namespace

double omega11(double T_star, double delta_star) {
  double o = 1.06036 / std::pow(T_star, 0.15610) + 0.19300 / std::exp(0.47635 * T_star) +
             1.03587 / std::exp(1.52996 * T_star) + 1.76474 / std::exp(3.89411 * T_star);
  return o + 0.19 * delta_star * delta_star / T_star;
}

double omega22(double T_star, double delta_star) {
  double o = 1.16145 / std::pow(T_star, 0.14874) + 0.52487 / std::exp(0.77320 * T_star) +
             2.16178 / std::exp(2.43787 * T_star) -
             6.435e-4 * std::pow(T_star, 0.14874) * std::sin(18.0323 * std::pow(T_star, -0.76830) - 7.27371);
  return o + 0.2 * delta_star * delta_star / T_star;
}

double binary_diffusion(const Mechanism& m, int i, int j, double T, double P) {
  if (!(T > 0.0) || !(P > 0.0)) throw DomainError("binary diffusion needs T > 0 and P > 0");
  Pair p = combine(lj(m, i), lj(m, j));
  double inv_w = 1.0 / molar_mass_g(m, i) + 1.0 / molar_mass_g(m, j);
  double om = omega11(T / p.eps_over_k, p.delta);
  double D_cgs = 0.0018583 * std::sqrt(T * T * T * inv_w) / ((P / kOneAtmosphere) * p.sigma * p.sigma * om);
  return D_cgs * 1e-4;
}

Eigen::MatrixXd binary_diffusion_matrix(const Mechanism& m, double T, double P) {
  const int n = m.n_species();
  Eigen::MatrixXd D(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      D(i, j) = binary_diffusion(m, i, j, T, P);
      D(j, i) = D(i, j);
    }
  }
  return D;
}

Eigen::VectorXd species_viscosities(const Mechanism& m, double T) {
  Eigen::VectorXd mu(m.n_species());
  for (int k = 0; k < m.n_species(); ++k) {
    const auto& p = lj(m, k);
    double om = omega22(T / p.eps_over_k, delta_star(p));
    mu(k) = 2.6693e-6 * std::sqrt(molar_mass_g(m, k) * T) / (p.sigma * p.sigma * om);
  }
  return mu;
}

Eigen::VectorXd species_conductivities(const Mechanism& m, double T) {
  Eigen::VectorXd mu = species_viscosities(m, T);
  Eigen::VectorXd cp = kGasConstant * species_cp_R(m, T);
  return mu.cwiseProduct((cp.array() + 1.25 * kGasConstant).matrix()).cwiseQuotient(m.molar_masses());
}

Eigen::VectorXd mixture_diffusion(const Mechanism& m, const Eigen::VectorXd& Y, const Eigen::MatrixXd& Dij,
                                  int* substituted) {
  const int n = m.n_species();
  Eigen::VectorXd Yc = Y.cwiseMax(0.0);
  Eigen::VectorXd X = mole_fractions(m, Yc);
  Eigen::VectorXd D(n);
  int subs = 0;
  for (int i = 0; i < n; ++i) {
    double sum = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j != i) sum += X(j) / Dij(i, j);
    }
    if (sum > 0.0) {
      D(i) = (1.0 - Yc(i)) / sum;
    } else {
      D(i) = Dij(i, i);
      ++subs;
    }
  }
  if (substituted) *substituted = subs;
  return D;
}

Eigen::VectorXd mixture_diffusion(const Mechanism& m, double T, double P, const Eigen::VectorXd& Y, int* substituted) {
  return mixture_diffusion(m, Y, binary_diffusion_matrix(m, T, P), substituted);
}

namespace {

// Wilke / Mason-Saxena weighted combination sum_i X_i p_i / sum_j X_j Phi_ij.
double combine_wilke(const Mechanism& m, const Eigen::VectorXd& X, const Eigen::VectorXd& mu,
                     const Eigen::VectorXd& prop) {
  const int n = m.n_species();
  const Eigen::VectorXd& W = m.molar_masses();
  double out = 0.0;
  for (int i = 0; i < n; ++i) {
    if (X(i) <= 0.0) continue;
    double denom = 0.0;
    for (int j = 0; j < n; ++j) {
      if (X(j) <= 0.0) continue;
      double a = 1.0 + std::sqrt(mu(i) / mu(j)) * std::pow(W(j) / W(i), 0.25);
      double phi = a * a / std::sqrt(8.0 * (1.0 + W(i) / W(j)));
      denom += X(j) * phi;
    }
    out += X(i) * prop(i) / denom;
  }
  return out;
}

}  // namespace

double mixture_viscosity(const Mechanism& m, double T, const Eigen::VectorXd& Y) {
  Eigen::VectorXd X = mole_fractions(m, Y.cwiseMax(0.0));
  Eigen::VectorXd mu = species_viscosities(m, T);
  return combine_wilke(m, X, mu, mu);
}

double mixture_conductivity(const Mechanism& m, double T, const Eigen::VectorXd& Y) {
  Eigen::VectorXd X = mole_fractions(m, Y.cwiseMax(0.0));
  Eigen::VectorXd mu = species_viscosities(m, T);
  Eigen::VectorXd lambda = species_conductivities(m, T);
  return combine_wilke(m, X, mu, lambda);
}

TransportCoefficients transport_coefficients(const Mechanism& m, const ThermoState& s) {
  TransportCoefficients tc;
  double P = pressure(m, s);
  tc.D = mixture_diffusion(m, s.T, P, s.Y);
  tc.mu = mixture_viscosity(m, s.T, s.Y);
  tc.lambda = mixture_conductivity(m, s.T, s.Y);
  tc.alpha = tc.lambda / (s.density * mixture_cp(m, s));
  return tc;
}

}  // namespace h2kin
