#include "h2kin/kinetics.hpp"

#include <algorithm>
#include <limits>

#include "h2kin/error.hpp"

namespace h2kin {

double third_body_concentration(const Mechanism& m, int r, const Eigen::VectorXd& c) {
  return m.efficiencies(r).dot(c.cwiseMax(0.0));
}

void rate_constants(const Mechanism& m, double T, Eigen::VectorXd& kf, Eigen::VectorXd& kr) {
  const int nr = m.n_reactions();
  kf.resize(nr);
  kr.setZero(nr);
  Eigen::VectorXd g_RT;
  for (int r = 0; r < nr; ++r) {
    const Reaction& rx = m.reaction(r);
    kf(r) = arrhenius(rx.rate, T);
    if (!std::isfinite(kf(r))) throw NumericalError("rate constant of " + rx.label + " is not finite at T = " + std::to_string(T));
    if (rx.reversible()) {
      if (g_RT.size() == 0) g_RT = species_g_RT(m, T);
      kr(r) = kf(r) / equilibrium_kc(rx, g_RT, T);
      if (!std::isfinite(kr(r)))
        throw NumericalError("reverse rate constant of " + rx.label + " is not finite at T = " + std::to_string(T));
    }
  }
}

RateVector rates_of_progress(const Mechanism& m, double T, const Eigen::VectorXd& c) {
  const int nr = m.n_reactions();
  RateVector out;
  rate_constants(m, T, out.kf, out.kr);
  out.qf.resize(nr);
  out.qr.resize(nr);
  const Eigen::VectorXd cc = c.cwiseMax(0.0);
  for (int r = 0; r < nr; ++r) {
    const Reaction& rx = m.reaction(r);
    double f = out.kf(r);
    for (const auto& t : rx.reactants) f *= t.nu == 1 ? cc(t.species) : std::pow(cc(t.species), t.nu);
    double b = out.kr(r);
    if (b != 0.0) {
      for (const auto& t : rx.products) b *= t.nu == 1 ? cc(t.species) : std::pow(cc(t.species), t.nu);
    }
    if (rx.third_body) {
      double M = m.efficiencies(r).dot(cc);
      f *= M;
      b *= M;
    }
    out.qf(r) = f;
    out.qr(r) = b;
  }
  out.q = out.qf - out.qr;
  return out;
}

RateVector rates_of_progress(const Mechanism& m, const ThermoState& s) {
  return rates_of_progress(m, s.T, concentrations(m, s));
}

Eigen::VectorXd production_rates(const Mechanism& m, double T, const Eigen::VectorXd& c) {
  RateVector rv = rates_of_progress(m, T, c);
  Eigen::VectorXd wdot = Eigen::VectorXd::Zero(m.n_species());
  for (int r = 0; r < m.n_reactions(); ++r) {
    const Reaction& rx = m.reaction(r);
    for (const auto& t : rx.reactants) wdot(t.species) -= t.nu * rv.q(r);
    for (const auto& t : rx.products) wdot(t.species) += t.nu * rv.q(r);
  }
  return wdot;
}

Eigen::VectorXd production_rates(const Mechanism& m, const ThermoState& s) {
  return production_rates(m, s.T, concentrations(m, s));
}

Eigen::MatrixXd stoichiometric_matrix(const Mechanism& m) {
  Eigen::MatrixXd N = Eigen::MatrixXd::Zero(m.n_species(), m.n_reactions());
  for (int r = 0; r < m.n_reactions(); ++r) {
    for (const auto& t : m.reaction(r).reactants) N(t.species, r) -= t.nu;
    for (const auto& t : m.reaction(r).products) N(t.species, r) += t.nu;
  }
  return N;
}

Eigen::VectorXd destruction_rates(const Mechanism& m, double T, const Eigen::VectorXd& c) {
  RateVector rv = rates_of_progress(m, T, c);
  Eigen::VectorXd d = Eigen::VectorXd::Zero(m.n_species());
  for (int r = 0; r < m.n_reactions(); ++r) {
    const Reaction& rx = m.reaction(r);
    for (const auto& t : rx.reactants) d(t.species) += t.nu * rv.qf(r);
    for (const auto& t : rx.products) d(t.species) += t.nu * rv.qr(r);
  }
  return d;
}

double stiffness_ratio(const Mechanism& m, const ThermoState& s) {
  Eigen::VectorXd c = concentrations(m, s).cwiseMax(0.0);
  Eigen::VectorXd d = destruction_rates(m, s.T, c);
  double tmin = std::numeric_limits<double>::infinity();
  double tmax = 0.0;
  int count = 0;
  for (int k = 0; k < m.n_species(); ++k) {
    if (d(k) > 0.0 && c(k) > 0.0) {
      double tau = c(k) / d(k);
      tmin = std::min(tmin, tau);
      tmax = std::max(tmax, tau);
      ++count;
    }
  }
  if (count < 2) throw DomainError("stiffness ratio needs at least two species with nonzero destruction rates");
  return tmax / tmin;
}

KineticsEvaluator::KineticsEvaluator(const Mechanism& m) : m_(&m), n_species_(m.n_species()) {
  std::vector<bool> need(static_cast<std::size_t>(n_species_), false);
  for (int r = 0; r < m.n_reactions(); ++r) {
    const Reaction& rx = m.reaction(r);
    Rxn e;
    for (const auto& t : rx.reactants) e.reactants.push_back({t.species, t.nu});
    for (const auto& t : rx.products) e.products.push_back({t.species, t.nu});
    e.A = rx.rate.A;
    e.n = rx.rate.n;
    e.Ea_R = rx.rate.Ea / kGasConstant;
    e.reversible = rx.reversible();
    e.delta_nu = rx.delta_nu();
    e.third_body = -1;
    if (rx.third_body) {
      e.third_body = static_cast<int>(eff_.size()) / n_species_;
      for (int k = 0; k < n_species_; ++k) eff_.push_back(m.efficiencies(r)(k));
    }
    if (e.reversible) {
      for (const auto& t : rx.reactants) need[static_cast<std::size_t>(t.species)] = true;
      for (const auto& t : rx.products) need[static_cast<std::size_t>(t.species)] = true;
    }
    rxns_.push_back(std::move(e));
  }
  for (int k = 0; k < n_species_; ++k) {
    if (need[static_cast<std::size_t>(k)]) {
      if (!m.species(k).thermo) throw MechanismError("species '" + m.species(k).name + "' has no thermo data");
      thermo_species_.push_back(k);
    }
  }
}

void KineticsEvaluator::production_rates(double T, const double* c_in, double* wdot) const {
  thread_local std::vector<double> work;
  const std::size_t ns = static_cast<std::size_t>(n_species_);
  const std::size_t nthird = ns ? eff_.size() / ns : 0;
  work.resize(2 * ns + nthird);
  double* c = work.data();
  double* g = c + ns;
  double* M = g + ns;
  for (std::size_t k = 0; k < ns; ++k) {
    c[k] = c_in[k] > 0.0 ? c_in[k] : 0.0;
    wdot[k] = 0.0;
  }
  for (std::size_t j = 0; j < nthird; ++j) {
    const double* e = eff_.data() + j * ns;
    double s = 0.0;
    for (std::size_t k = 0; k < ns; ++k) s += e[k] * c[k];
    M[j] = s;
  }
  for (int k : thermo_species_) {
    const NasaPoly& p = *m_->species(k).thermo;
    g[k] = h_RT(p, T) - s_R(p, T);
  }
  const double logT = std::log(T);
  const double invT = 1.0 / T;
  const double c0 = kReferencePressure / (kGasConstant * T);
  for (const Rxn& r : rxns_) {
    double kf = r.A * std::exp(r.n * logT - r.Ea_R * invT);
    double f = kf;
    for (const Term& t : r.reactants) f *= t.nu == 1 ? c[t.species] : std::pow(c[t.species], t.nu);
    double b = 0.0;
    if (r.reversible) {
      double dg = 0.0;
      for (const Term& t : r.products) dg += t.nu * g[t.species];
      for (const Term& t : r.reactants) dg -= t.nu * g[t.species];
      double kc = std::exp(-dg) * std::pow(c0, r.delta_nu);
      b = kf / kc;
      for (const Term& t : r.products) b *= t.nu == 1 ? c[t.species] : std::pow(c[t.species], t.nu);
    }
    double q = f - b;
    if (r.third_body >= 0) q *= M[r.third_body];
    for (const Term& t : r.reactants) wdot[t.species] -= t.nu * q;
    for (const Term& t : r.products) wdot[t.species] += t.nu * q;
  }
}

}  // namespace h2kin
