#include "h2kin/flame1d.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <thread>

#include "h2kin/bdf.hpp"
#include "h2kin/error.hpp"
#include "h2kin/kinetics.hpp"
#include "h2kin/transport.hpp"

namespace h2kin {

namespace {

// Allocation-free mixture thermodynamics for the per-cell loops.
class CellThermo {
 public:
  explicit CellThermo(const Mechanism& m) : n_(m.n_species()), W_(m.molar_masses()) {
    for (int k = 0; k < n_; ++k) {
      if (!m.species(k).thermo) throw MechanismError("species '" + m.species(k).name + "' has no thermo data");
      poly_.push_back(&*m.species(k).thermo);
    }
  }

  int n() const { return n_; }
  const Eigen::VectorXd& W() const { return W_; }

  // Species enthalpies, J/kg.
  void species_h(double T, double* h) const {
    for (int k = 0; k < n_; ++k) h[k] = h_RT(*poly_[k], T) * kGasConstant * T / W_(k);
  }

  void h_cp(double T, const double* Y, double& h, double& cp) const {
    h = 0.0;
    cp = 0.0;
    for (int k = 0; k < n_; ++k) {
      double r = kGasConstant / W_(k);
      h += Y[k] * h_RT(*poly_[k], T) * r * T;
      cp += Y[k] * cp_R(*poly_[k], T) * r;
    }
  }

  double mean_W(const double* Y) const {
    double s = 0.0;
    for (int k = 0; k < n_; ++k) s += Y[k] / W_(k);
    return 1.0 / s;
  }

  double T_from_h(double h, const double* Y, double T) const {
    for (int it = 0; it < 60; ++it) {
      double hh, cp;
      h_cp(T, Y, hh, cp);
      double dT = (h - hh) / cp;
      dT = std::clamp(dT, -500.0, 500.0);
      T += dT;
      if (std::abs(dT) <= 1e-11 * T) {
        if (!(T > 50.0 && T < 10000.0) || !std::isfinite(T)) break;
        return T;
      }
    }
    throw NumericalError("temperature inversion failed for h = " + std::to_string(h));
  }

 private:
  int n_;
  Eigen::VectorXd W_;
  std::vector<const NasaPoly*> poly_;
};

// Pure-species and pair transport properties tabulated in temperature at
// the flame pressure, linearly interpolated. Outside the table range the
// end values are used.
class TransportTable {
 public:
  static constexpr double kTmin = 200.0;
  static constexpr double kTmax = 3500.0;
  static constexpr double kStep = 2.0;

  TransportTable(const Mechanism& m, double P) : n_(m.n_species()) {
    nT_ = static_cast<int>(std::lround((kTmax - kTmin) / kStep)) + 1;
    const std::size_t nn = static_cast<std::size_t>(n_ * n_);
    D_.resize(static_cast<std::size_t>(nT_) * nn);
    phi_.resize(static_cast<std::size_t>(nT_) * nn);
    lam_.resize(static_cast<std::size_t>(nT_ * n_));
    const Eigen::VectorXd& W = m.molar_masses();
    for (int t = 0; t < nT_; ++t) {
      double T = kTmin + kStep * t;
      Eigen::MatrixXd Dij = binary_diffusion_matrix(m, T, P);
      Eigen::VectorXd mu = species_viscosities(m, T);
      Eigen::VectorXd lam = species_conductivities(m, T);
      double* D = D_.data() + static_cast<std::size_t>(t) * nn;
      double* ph = phi_.data() + static_cast<std::size_t>(t) * nn;
      for (int i = 0; i < n_; ++i) {
        lam_[static_cast<std::size_t>(t * n_ + i)] = lam(i);
        for (int j = 0; j < n_; ++j) {
          D[i * n_ + j] = Dij(i, j);
          double a = 1.0 + std::sqrt(mu(i) / mu(j)) * std::pow(W(j) / W(i), 0.25);
          ph[i * n_ + j] = a * a / std::sqrt(8.0 * (1.0 + W(i) / W(j)));
        }
      }
    }
  }

  // Mixture-averaged diffusivities (m^2/s) and conductivity (W/(m K)).
  void mixture(double T, const double* Y_in, const Eigen::VectorXd& W, double* Dmix, double& lambda) const {
    thread_local std::vector<double> work;
    work.resize(static_cast<std::size_t>(2 * n_));
    double* Y = work.data();
    double* X = Y + n_;
    double sumX = 0.0;
    for (int k = 0; k < n_; ++k) {
      Y[k] = std::max(Y_in[k], 0.0);
      X[k] = Y[k] / W(k);
      sumX += X[k];
    }
    for (int k = 0; k < n_; ++k) X[k] /= sumX;

    double s = (std::clamp(T, kTmin, kTmax) - kTmin) / kStep;
    int t0 = std::min(static_cast<int>(s), nT_ - 2);
    double w = s - t0;
    const std::size_t nn = static_cast<std::size_t>(n_ * n_);
    const double* Da = D_.data() + static_cast<std::size_t>(t0) * nn;
    const double* Db = Da + nn;
    const double* Pa = phi_.data() + static_cast<std::size_t>(t0) * nn;
    const double* Pb = Pa + nn;
    const double* La = lam_.data() + static_cast<std::size_t>(t0 * n_);
    const double* Lb = La + n_;

    lambda = 0.0;
    for (int i = 0; i < n_; ++i) {
      double sum = 0.0;
      double denom = 0.0;
      for (int j = 0; j < n_; ++j) {
        const int ij = i * n_ + j;
        if (j != i) sum += X[j] / (Da[ij] + w * (Db[ij] - Da[ij]));
        denom += X[j] * (Pa[ij] + w * (Pb[ij] - Pa[ij]));
      }
      const int ii = i * n_ + i;
      Dmix[i] = sum > 0.0 ? (1.0 - Y[i]) / sum : Da[ii] + w * (Db[ii] - Da[ii]);
      if (X[i] > 0.0) lambda += X[i] * (La[i] + w * (Lb[i] - La[i])) / denom;
    }
  }

 private:
  int n_;
  int nT_ = 0;
  std::vector<double> D_;
  std::vector<double> phi_;
  std::vector<double> lam_;
};

// Solves a_k x_{k-1} + b_k x_k + c_k x_{k+1} = d_k in place (x returned in d).
void thomas(std::vector<double>& a, std::vector<double>& b, std::vector<double>& c, std::vector<double>& d) {
  const std::size_t n = d.size();
  for (std::size_t k = 1; k < n; ++k) {
    double w = a[k] / b[k - 1];
    b[k] -= w * c[k - 1];
    d[k] -= w * d[k - 1];
  }
  d[n - 1] /= b[n - 1];
  for (std::size_t k = n - 1; k-- > 0;) d[k] = (d[k] - c[k] * d[k + 1]) / b[k];
}

double minmod(double a, double b) {
  if (a * b <= 0.0) return 0.0;
  return std::abs(a) < std::abs(b) ? a : b;
}

void add(ConservationLedger& into, const ConservationLedger& d) {
  if (into.species_mass.size() == 0) into.species_mass = Eigen::VectorXd::Zero(d.species_mass.size());
  into.species_mass += d.species_mass;
  into.energy += d.energy;
}

// d(T, Y)/dt of an adiabatic constant-pressure reactor.
class ConstPressureRhs {
 public:
  ConstPressureRhs(const CellThermo& thermo, const KineticsEvaluator& kin, double P)
      : thermo_(thermo), kin_(kin), P_(P), c_(thermo.n()), wdot_(thermo.n()), hs_(thermo.n()) {}

  void operator()(const Eigen::VectorXd& y, Eigen::VectorXd& out) {
    const int n = thermo_.n();
    const Eigen::VectorXd& W = thermo_.W();
    const double T = y(0);
    if (!(T > 0.0) || !std::isfinite(T)) throw NumericalError("non-physical temperature in chemistry");
    const double* Y = y.data() + 1;
    double rho = P_ * thermo_.mean_W(Y) / (kGasConstant * T);
    for (int i = 0; i < n; ++i) c_(i) = rho * Y[i] / W(i);
    kin_.production_rates(T, c_.data(), wdot_.data());
    double h, cp;
    thermo_.h_cp(T, Y, h, cp);
    thermo_.species_h(T, hs_.data());
    out.resize(n + 1);
    double q = 0.0;
    for (int i = 0; i < n; ++i) {
      double r = wdot_(i) * W(i) / rho;
      out(i + 1) = r;
      q += hs_(i) * r;
    }
    out(0) = -q / cp;
  }

 private:
  const CellThermo& thermo_;
  const KineticsEvaluator& kin_;
  double P_;
  Eigen::VectorXd c_, wdot_, hs_;
};

}  // namespace

std::string to_string(FlameStatus s) {
  switch (s) {
    case FlameStatus::Steady: return "steady";
    case FlameStatus::NotConverged: return "not-converged";
    case FlameStatus::Extinction: return "extinction";
    case FlameStatus::BlowOff: return "blow-off";
    case FlameStatus::Flashback: return "flashback";
    case FlameStatus::Diverged: return "diverged";
  }
  return "unknown";
}

void validate(const FlameConfig& c, const Mechanism& m) {
  if (!(c.dx > 0.0) || !std::isfinite(c.dx)) throw DomainError("grid spacing must be positive");
  if (c.n_cells < 50) throw DomainError("flame grid needs at least 50 cells");
  if (!(c.T_in > 0.0)) throw DomainError("inlet temperature must be positive");
  if (!(c.P > 0.0)) throw DomainError("pressure must be positive");
  if (c.X_in.size() == 0) {
    if (!(c.phi > 0.0) || !std::isfinite(c.phi)) throw DomainError("equivalence ratio must be positive");
  } else if (c.X_in.size() != m.n_species() || (c.X_in.array() < 0.0).any() || !(c.X_in.sum() > 0.0)) {
    throw DomainError("inlet composition must be non-negative with one entry per species");
  }
  if (!(c.u_in >= 0.0) || !std::isfinite(c.u_in)) throw DomainError("inlet velocity must be non-negative");
  if (!(c.kernel.position > 0.0 && c.kernel.position < 1.0)) throw DomainError("kernel position must lie inside the domain");
  if (!(c.kernel.width > 0.0)) throw DomainError("kernel width must be positive");
  if (!(c.kernel.temperature > 0.0)) throw DomainError("kernel temperature must be positive");
  if (c.kernel.width > c.dx * c.n_cells) throw DomainError("ignition kernel is wider than the domain");
  if (!(c.t_end > 0.0)) throw DomainError("t_end must be positive");
  if (c.max_steps < 1) throw DomainError("max_steps must be positive");
  if (!(c.cfl > 0.0 && c.cfl <= 1.0)) throw DomainError("CFL number must lie in (0, 1]");
  if (c.convection == ConvectionScheme::Muscl && c.cfl > 0.5) throw DomainError("MUSCL convection needs CFL <= 0.5");
  if (!(c.max_dT_rel > 0.0)) throw DomainError("temperature residual target must be positive");
  if (!(c.dt_max > 0.0)) throw DomainError("dt_max must be positive");
  if (!(c.steady_window_thicknesses > 0.0) || !(c.steady_tolerance > 0.0))
    throw DomainError("steady-state detector settings must be positive");
  if (!(c.chem_rtol > 0.0 && c.chem_rtol < 1.0) || !(c.chem_atol > 0.0 && c.chem_atol < 1.0))
    throw DomainError("chemistry tolerances must lie in (0, 1)");
}

ConservationLedger field_content(const FlameField& f) {
  ConservationLedger c;
  c.species_mass = Eigen::VectorXd::Zero(f.Y.rows());
  for (int k = 0; k < f.n_cells(); ++k) {
    c.species_mass += f.rho(k) * f.dx * f.Y.col(k);
    c.energy += f.rho(k) * f.dx * f.h(k);
  }
  return c;
}

struct FlameSolver::Impl {
  Impl(const Mechanism& m, double P) : thermo(m), table(m, P), kin(m) {}

  CellThermo thermo;
  TransportTable table;
  KineticsEvaluator kin;
  int bath = -1;
  int fuel = -1;
  int deficient = -1;  // H2 when lean or stoichiometric, O2 when rich
  double rho_in = 0.0;
  double h_in = 0.0;
  double m_in = 0.0;
  Eigen::VectorXd Y_in;
  Eigen::VectorXd Y_kernel;
  Eigen::VectorXd hs_in;  // species enthalpies at T_in
  Eigen::VectorXd D_in;
  double lambda_in = 0.0;
};

FlameSolver::FlameSolver(const Mechanism& m, FlameConfig config) : m_(m), config_(std::move(config)) {
  validate(config_, m_);
  const int n = m_.n_species();
  impl_ = std::make_unique<Impl>(m_, config_.P);
  Impl& I = *impl_;
  I.bath = m_.bath_index();
  I.fuel = m_.species_index("H2");
  Eigen::VectorXd X = config_.X_in.size() ? Eigen::VectorXd(config_.X_in / config_.X_in.sum())
                                          : h2_air_mole_fractions(m_, config_.phi);
  inlet_ = state_from_TPX(m_, config_.T_in, config_.P, X);
  I.Y_in = inlet_.Y;
  I.rho_in = inlet_.density;
  I.h_in = mixture_h(m_, inlet_);
  I.m_in = I.rho_in * config_.u_in;
  I.hs_in.resize(n);
  I.thermo.species_h(config_.T_in, I.hs_in.data());
  I.D_in.resize(n);
  I.table.mixture(config_.T_in, I.Y_in.data(), I.thermo.W(), I.D_in.data(), I.lambda_in);
  if (!(I.Y_in(I.fuel) > 0.0)) throw DomainError("inlet mixture contains no H2");

  // Complete combustion H2 + 1/2 O2 -> H2O at the inlet enthalpy.
  const int o2 = m_.species_index("O2");
  const int h2o = m_.species_index("H2O");
  const Eigen::VectorXd& W = m_.molar_masses();
  Eigen::VectorXd N = I.Y_in.cwiseQuotient(W);
  double xi = std::min(N(I.fuel), 2.0 * N(o2));
  I.deficient = N(I.fuel) <= 2.0 * N(o2) ? I.fuel : o2;
  N(I.fuel) -= xi;
  N(o2) -= 0.5 * xi;
  N(h2o) += xi;
  products_.Y = N.cwiseProduct(W);
  products_.Y /= products_.Y.sum();
  products_.T = I.thermo.T_from_h(I.h_in, products_.Y.data(), 2000.0);
  products_.density = density_from_TPY(m_, products_.T, config_.P, products_.Y);

  // Kernel composition: the inlet mixture ignited at constant pressure from
  // the kernel temperature, taken at peak heat release so that it carries a
  // radical pool.
  I.Y_kernel = products_.Y;
  if (config_.kernel.temperature > config_.T_in) {
    ConstPressureRhs rhs(I.thermo, I.kin, config_.P);
    Eigen::VectorXd y(n + 1), ydot;
    y(0) = config_.kernel.temperature;
    y.tail(n) = I.Y_in;
    double hk, cpk;
    I.thermo.h_cp(y(0), I.Y_in.data(), hk, cpk);
    BdfOptions opt;
    opt.rtol = 1e-6;
    opt.atol = Eigen::VectorXd::Constant(n + 1, 1e-12);
    opt.atol(0) = 1e-4;
    BdfIntegrator bdf([&](double, const Eigen::VectorXd& yy, Eigen::VectorXd& out) { rhs(yy, out); }, 0.0, y, 1e-2,
                      opt);
    bdf.set_projection([&](double, Eigen::VectorXd& yy) { yy(0) = I.thermo.T_from_h(hk, yy.data() + 1, yy(0)); });
    double best = 0.0;
    while (bdf.step() == BdfIntegrator::Status::Running) {
      rhs(bdf.y(), ydot);
      if (ydot(0) > best) {
        best = ydot(0);
        I.Y_kernel = bdf.y().tail(n);
      } else if (best > 0.0 && ydot(0) < 0.5 * best) {
        break;
      }
    }
    I.Y_kernel = I.Y_kernel.cwiseMax(0.0);
    I.Y_kernel /= I.Y_kernel.sum();
  }
}

FlameSolver::~FlameSolver() = default;

FlameField FlameSolver::initialize() const {
  const Impl& I = *impl_;
  const int N = config_.n_cells;
  const int n = m_.n_species();
  FlameField f;
  f.dx = config_.dx;
  f.P = config_.P;
  f.T.resize(N);
  f.rho.resize(N);
  f.h.resize(N);
  f.Y.resize(n, N);
  f.mass_flux = Eigen::VectorXd::Constant(N + 1, I.m_in);

  const double L = f.dx * N;
  const double xc = config_.kernel.position * L;
  const double w = config_.kernel.width;
  const double amp = config_.kernel.temperature - config_.T_in;
  const double rise = products_.T - config_.T_in;
  const double blend = rise > 0.0 ? std::clamp(amp / rise, 0.0, 1.0) : 0.0;
  for (int k = 0; k < N; ++k) {
    double s = (f.x(k) - xc) / w;
    double g = std::exp(-s * s);
    f.T(k) = config_.T_in + g * amp;
    f.Y.col(k) = (1.0 - g * blend) * I.Y_in + g * blend * I.Y_kernel;
    f.rho(k) = density_from_TPY(m_, f.T(k), f.P, f.Y.col(k));
    double cp;
    I.thermo.h_cp(f.T(k), f.Y.col(k).data(), f.h(k), cp);
  }
  return f;
}

double FlameSolver::cfl_dt(const FlameField& f) const {
  double umax = 0.0;
  const int N = f.n_cells();
  for (int j = 0; j <= N; ++j) {
    double m = f.mass_flux(j);
    double rho = m >= 0.0 ? (j > 0 ? f.rho(j - 1) : impl_->rho_in) : f.rho(std::min(j, N - 1));
    umax = std::max(umax, std::abs(m) / rho);
  }
  if (umax <= 0.0) return config_.dt_max;
  return std::min(config_.dt_max, config_.cfl * f.dx / umax);
}

namespace {

struct StepWork {
  std::vector<double> a, b, c, d;
};

}  // namespace

bool FlameSolver::step(FlameField& f, double dt, ConservationLedger* ledger) const {
  const Impl& I = *impl_;
  const int N = f.n_cells();
  const int n = m_.n_species();
  const double dx = f.dx;
  const Eigen::VectorXd& W = I.thermo.W();
  ConservationLedger d;
  d.species_mass = Eigen::VectorXd::Zero(n);

  // Backward Euler diffusion over tau at fixed density.
  Eigen::MatrixXd rhoD(n, N);
  Eigen::VectorXd lam(N), cp(N);
  Eigen::MatrixXd hs(n, N);
  Eigen::MatrixXd J(n, N + 1);
  StepWork sw;
  auto diffuse = [&](double tau) {
    for (int k = 0; k < N; ++k) {
      double hk;
      I.table.mixture(f.T(k), f.Y.col(k).data(), W, rhoD.col(k).data(), lam(k));
      rhoD.col(k) *= f.rho(k);
      I.thermo.h_cp(f.T(k), f.Y.col(k).data(), hk, cp(k));
      I.thermo.species_h(f.T(k), hs.col(k).data());
    }
    auto G_species = [&](int i, int j) {
      if (j == 0) return (I.rho_in * I.D_in(i) + rhoD(i, 0)) / dx;  // half-cell distance
      return 0.5 * (rhoD(i, j - 1) + rhoD(i, j)) / dx;
    };
    auto G_heat = [&](int j) {
      if (j == 0) return (I.lambda_in + lam(0)) / dx;
      return 0.5 * (lam(j - 1) + lam(j)) / dx;
    };

    Eigen::MatrixXd Ynew = f.Y;
    J.setZero();
    for (int i = 0; i < n; ++i) {
      if (i == I.bath) continue;
      sw.a.assign(N, 0.0);
      sw.b.assign(N, 0.0);
      sw.c.assign(N, 0.0);
      sw.d.assign(N, 0.0);
      for (int k = 0; k < N; ++k) {
        double cap = f.rho(k) * dx / tau;
        double gl = G_species(i, k);
        double gr = k + 1 < N ? G_species(i, k + 1) : 0.0;
        sw.b[k] = cap + gl + gr;
        sw.a[k] = -gl;
        sw.c[k] = -gr;
        sw.d[k] = cap * f.Y(i, k);
      }
      sw.d[0] += G_species(i, 0) * I.Y_in(i);
      sw.a[0] = 0.0;
      thomas(sw.a, sw.b, sw.c, sw.d);
      for (int k = 0; k < N; ++k) Ynew(i, k) = sw.d[k];
      J(i, 0) = -G_species(i, 0) * (Ynew(i, 0) - I.Y_in(i));
      for (int j = 1; j < N; ++j) J(i, j) = -G_species(i, j) * (Ynew(i, j) - Ynew(i, j - 1));
    }
    for (int k = 0; k < N; ++k) {
      double change = 0.0;
      for (int i = 0; i < n; ++i)
        if (i != I.bath) change += Ynew(i, k) - f.Y(i, k);
      Ynew(I.bath, k) = f.Y(I.bath, k) - change;
    }
    for (int j = 0; j < N; ++j) {
      double s = 0.0;
      for (int i = 0; i < n; ++i)
        if (i != I.bath) s += J(i, j);
      J(I.bath, j) = -s;
    }

    // Species enthalpy transport at faces.
    std::vector<double> H(static_cast<std::size_t>(N + 1), 0.0);
    for (int i = 0; i < n; ++i) H[0] += I.hs_in(i) * J(i, 0);
    for (int j = 1; j < N; ++j) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += 0.5 * (hs(i, j - 1) + hs(i, j)) * J(i, j);
      H[static_cast<std::size_t>(j)] = s;
    }

    // Linearized temperature predictor, then conservative enthalpy update.
    sw.a.assign(N, 0.0);
    sw.b.assign(N, 0.0);
    sw.c.assign(N, 0.0);
    sw.d.assign(N, 0.0);
    for (int k = 0; k < N; ++k) {
      double cap = f.rho(k) * cp(k) * dx / tau;
      double gl = G_heat(k);
      double gr = k + 1 < N ? G_heat(k + 1) : 0.0;
      double dYh = 0.0;
      for (int i = 0; i < n; ++i) dYh += hs(i, k) * (Ynew(i, k) - f.Y(i, k));
      sw.b[k] = cap + gl + gr;
      sw.a[k] = -gl;
      sw.c[k] = -gr;
      sw.d[k] = cap * f.T(k) - (H[static_cast<std::size_t>(k + 1)] - H[static_cast<std::size_t>(k)]) -
                f.rho(k) * dx * dYh / tau;
    }
    sw.d[0] += G_heat(0) * config_.T_in;
    sw.a[0] = 0.0;
    thomas(sw.a, sw.b, sw.c, sw.d);
    const std::vector<double>& Ts = sw.d;
    std::vector<double> Q(static_cast<std::size_t>(N + 1), 0.0);
    Q[0] = -G_heat(0) * (Ts[0] - config_.T_in) + H[0];
    for (int j = 1; j < N; ++j)
      Q[static_cast<std::size_t>(j)] =
          -G_heat(j) * (Ts[static_cast<std::size_t>(j)] - Ts[static_cast<std::size_t>(j - 1)]) +
          H[static_cast<std::size_t>(j)];
    for (int k = 0; k < N; ++k) {
      f.h(k) += tau * (Q[static_cast<std::size_t>(k)] - Q[static_cast<std::size_t>(k + 1)]) / (f.rho(k) * dx);
      f.Y.col(k) = Ynew.col(k);
      f.T(k) = I.thermo.T_from_h(f.h(k), f.Y.col(k).data(), Ts[static_cast<std::size_t>(k)]);
    }
    d.species_mass += tau * J.col(0);
    d.energy += tau * Q[0];
  };

  // Constant-pressure, constant-enthalpy chemistry over dt in every cell.
  auto react = [&]() {
    Eigen::VectorXd y(n + 1), ydot(n + 1);
    ConstPressureRhs rhs(I.thermo, I.kin, f.P);
    for (int k = 0; k < N; ++k) {
      const double hk = f.h(k);
      y(0) = f.T(k);
      y.tail(n) = f.Y.col(k);
      rhs(y, ydot);
      bool quiet = std::abs(ydot(0)) * dt <= 1e-3;
      for (int i = 0; i < n && quiet; ++i) quiet = std::abs(ydot(i + 1)) * dt <= 1e-3 * std::abs(y(i + 1)) + 1e-13;
      if (quiet) {
        y.tail(n) += dt * ydot.tail(n);
      } else {
        BdfOptions opt;
        opt.rtol = config_.chem_rtol;
        opt.atol = Eigen::VectorXd::Constant(n + 1, config_.chem_atol);
        opt.atol(0) = 1e-4;
        BdfIntegrator bdf([&](double, const Eigen::VectorXd& yy, Eigen::VectorXd& out) { rhs(yy, out); }, 0.0, y, dt,
                          opt);
        bdf.set_projection([&](double, Eigen::VectorXd& yy) {
          yy(0) = I.thermo.T_from_h(hk, yy.data() + 1, yy(0));
        });
        BdfIntegrator::Status st;
        do {
          st = bdf.step();
        } while (st == BdfIntegrator::Status::Running);
        if (st == BdfIntegrator::Status::Failed)
          throw NumericalError("chemistry failed in cell " + std::to_string(k) + ": " + bdf.message());
        y = bdf.y();
      }
      f.Y.col(k) = y.tail(n);
      f.T(k) = I.thermo.T_from_h(hk, f.Y.col(k).data(), y(0));
    }
  };

  // Explicit conservative convection; face fluxes marched from the inlet so
  // that each cell ends on the equation of state.
  auto convect = [&]() -> bool {
    const bool muscl = config_.convection == ConvectionScheme::Muscl;
    const int nv = n + 1;  // Y..., h
    Eigen::MatrixXd phi(nv, N);
    phi.topRows(n) = f.Y;
    phi.row(n) = f.h.transpose();
    Eigen::VectorXd phi_in(nv);
    phi_in.head(n) = I.Y_in;
    phi_in(n) = I.h_in;
    Eigen::MatrixXd left = phi, right = phi;
    if (muscl) {
      for (int k = 0; k < N; ++k) {
        for (int v = 0; v < nv; ++v) {
          double pm = k > 0 ? phi(v, k - 1) : phi_in(v);
          double pp = k + 1 < N ? phi(v, k + 1) : phi(v, k);
          double s = 0.5 * minmod(phi(v, k) - pm, pp - phi(v, k));
          left(v, k) = phi(v, k) - s;
          right(v, k) = phi(v, k) + s;
        }
        double sl = left.col(k).head(n).sum();
        double sr = right.col(k).head(n).sum();
        left.col(k).head(n) /= sl;
        right.col(k).head(n) /= sr;
      }
    }
    const double a = dt / dx;
    Eigen::VectorXd mflux(N + 1);
    mflux(0) = I.m_in;
    Eigen::VectorXd cons(nv), donor_l(nv), trial(nv);
    Eigen::MatrixXd newY(n, N);
    Eigen::VectorXd newT(N), newh(N), newrho(N);
    for (int k = 0; k < N; ++k) {
      const double mL = mflux(k);
      donor_l = mL >= 0.0 ? (k > 0 ? Eigen::VectorXd(right.col(k - 1)) : phi_in) : Eigen::VectorXd(left.col(k));
      const double rk = f.rho(k);
      cons = rk * phi.col(k) + a * mL * donor_l;
      double T_new = f.T(k);
      auto residual = [&](double mR) {
        const auto donor_r = mR >= 0.0 ? right.col(k) : (k + 1 < N ? left.col(k + 1) : phi.col(k));
        double rho_new = rk + a * (mL - mR);
        if (!(rho_new > 0.0)) return std::numeric_limits<double>::quiet_NaN();
        trial = (cons - a * mR * donor_r) / rho_new;
        T_new = I.thermo.T_from_h(trial(n), trial.data(), T_new);
        double rho_eos = f.P * I.thermo.mean_W(trial.data()) / (kGasConstant * T_new);
        return rho_new - rho_eos;
      };
      double m0 = mL + (f.mass_flux(k + 1) - f.mass_flux(k));
      double m1 = m0 + 1e-6 * std::abs(m0) + 1e-9;
      double r0 = residual(m0);
      double r1 = residual(m1);
      if (!std::isfinite(r0) || !std::isfinite(r1)) return false;
      bool converged = std::abs(r0) <= 1e-13 * rk;
      double m = m0;
      for (int it = 0; it < 50 && !converged; ++it) {
        if (r1 == r0) break;
        m = m1 - r1 * (m1 - m0) / (r1 - r0);
        m0 = m1;
        r0 = r1;
        m1 = m;
        r1 = residual(m1);
        if (!std::isfinite(r1)) return false;
        converged = std::abs(r1) <= 1e-13 * rk;
      }
      if (!converged) {
        if (std::abs(r1) > 1e-9 * rk) return false;
        m = m1;
      }
      residual(m);  // leaves the accepted state in trial and T_new
      mflux(k + 1) = m;
      double retained = rk - a * (std::max(m, 0.0) + std::max(-mL, 0.0));
      if (retained < 0.0) return false;
      newrho(k) = rk + a * (mL - m);
      newY.col(k) = trial.head(n);
      newh(k) = trial(n);
      newT(k) = T_new;
      if ((newY.col(k).array() < -1e-10).any()) return false;
    }
    const double m_out = mflux(N);
    Eigen::VectorXd out_donor = m_out >= 0.0 ? Eigen::VectorXd(right.col(N - 1)) : Eigen::VectorXd(phi.col(N - 1));
    d.species_mass += dt * (I.m_in * I.Y_in - m_out * out_donor.head(n));
    d.energy += dt * (I.m_in * I.h_in - m_out * out_donor(n));
    f.Y = newY;
    f.h = newh;
    f.T = newT;
    f.rho = newrho;
    f.mass_flux = mflux;
    return true;
  };

  FlameField saved = f;
  try {
    diffuse(0.5 * dt);
    react();
    diffuse(0.5 * dt);
    if (!convect()) {
      f = std::move(saved);
      return false;
    }
  } catch (const NumericalError&) {
    f = std::move(saved);
    throw;
  }
  for (int k = 0; k < N; ++k) {
    if (!std::isfinite(f.T(k)) || !std::isfinite(f.rho(k)) || !f.Y.col(k).allFinite()) {
      std::string where = "cell " + std::to_string(k) + " (x = " + std::to_string(f.x(k)) + " m)";
      f = std::move(saved);
      throw NumericalError("non-finite state in " + where);
    }
  }
  f.time += dt;
  if (ledger) add(*ledger, d);
  return true;
}

std::optional<double> FlameSolver::front_position(const FlameField& f) const {
  const int N = f.n_cells();
  int best = -1;
  double gmax = 0.0;
  for (int j = 1; j < N; ++j) {
    double g = f.T(j) - f.T(j - 1);
    if (g > gmax) {
      gmax = g;
      best = j;
    }
  }
  if (best < 0) return std::nullopt;
  double offset = 0.0;
  if (best > 1 && best < N - 1) {
    double gm = f.T(best - 1) - f.T(best - 2);
    double gp = f.T(best + 1) - f.T(best);
    double curv = gm - 2.0 * gmax + gp;
    if (curv < 0.0) offset = std::clamp(0.5 * (gm - gp) / curv, -0.5, 0.5);
  }
  return f.x0 + (best + offset) * f.dx;
}

double FlameSolver::thermal_thickness(const FlameField& f) const {
  double gmax = 0.0;
  for (int j = 1; j < f.n_cells(); ++j) gmax = std::max(gmax, (f.T(j) - f.T(j - 1)) / f.dx);
  if (gmax <= 0.0) return 0.0;
  return (f.T.maxCoeff() - config_.T_in) / gmax;
}

double FlameSolver::consumption_speed(const FlameField& f) const {
  const Impl& I = *impl_;
  const int n = m_.n_species();
  const Eigen::VectorXd& W = I.thermo.W();
  Eigen::VectorXd c(n), wdot(n);
  double total = 0.0;
  for (int k = 0; k < f.n_cells(); ++k) {
    double rho = f.P * I.thermo.mean_W(f.Y.col(k).data()) / (kGasConstant * f.T(k));
    for (int i = 0; i < n; ++i) c(i) = rho * f.Y(i, k) / W(i);
    I.kin.production_rates(f.T(k), c.data(), wdot.data());
    total -= wdot(I.deficient) * W(I.deficient) * f.dx;
  }
  if (!(I.Y_in(I.deficient) > 0.0)) throw DomainError("consumption speed needs O2 in the inlet mixture");
  return total / (I.rho_in * I.Y_in(I.deficient));
}

void FlameSolver::shift(FlameField& f, int cells, ConservationLedger* ledger) const {
  const int N = f.n_cells();
  if (cells == 0) return;
  if (std::abs(cells) >= N) throw DomainError("shift larger than the domain");
  const Impl& I = *impl_;
  ConservationLedger d;
  d.species_mass = Eigen::VectorXd::Zero(f.Y.rows());
  FlameField g = f;
  if (cells > 0) {
    const int s = cells;
    for (int k = 0; k < s; ++k) {
      d.species_mass -= f.rho(k) * f.dx * f.Y.col(k);
      d.energy -= f.rho(k) * f.dx * f.h(k);
    }
    for (int k = 0; k < N; ++k) {
      int src = std::min(k + s, N - 1);
      g.T(k) = f.T(src);
      g.rho(k) = f.rho(src);
      g.h(k) = f.h(src);
      g.Y.col(k) = f.Y.col(src);
      if (k + s >= N) {
        d.species_mass += f.rho(src) * f.dx * f.Y.col(src);
        d.energy += f.rho(src) * f.dx * f.h(src);
      }
    }
    for (int j = 0; j <= N; ++j) g.mass_flux(j) = f.mass_flux(std::min(j + s, N));
    g.mass_flux(0) = I.m_in;
    g.x0 = f.x0 + s * f.dx;
  } else {
    const int s = -cells;
    for (int k = N - s; k < N; ++k) {
      d.species_mass -= f.rho(k) * f.dx * f.Y.col(k);
      d.energy -= f.rho(k) * f.dx * f.h(k);
    }
    for (int k = 0; k < N; ++k) {
      if (k < s) {
        g.T(k) = config_.T_in;
        g.rho(k) = I.rho_in;
        g.h(k) = I.h_in;
        g.Y.col(k) = I.Y_in;
        d.species_mass += I.rho_in * f.dx * I.Y_in;
        d.energy += I.rho_in * f.dx * I.h_in;
      } else {
        g.T(k) = f.T(k - s);
        g.rho(k) = f.rho(k - s);
        g.h(k) = f.h(k - s);
        g.Y.col(k) = f.Y.col(k - s);
      }
    }
    for (int j = 0; j <= N; ++j) g.mass_flux(j) = j <= s ? I.m_in : f.mass_flux(j - s);
    g.x0 = f.x0 - s * f.dx;
  }
  f = std::move(g);
  if (ledger) add(*ledger, d);
}

namespace {

// Least-squares slope of x(t) over samples [lo, hi).
double slope(const std::vector<FrontSample>& h, std::size_t lo, std::size_t hi) {
  const double n = static_cast<double>(hi - lo);
  double st = 0.0, sx = 0.0;
  for (std::size_t i = lo; i < hi; ++i) {
    st += h[i].t;
    sx += h[i].x;
  }
  st /= n;
  sx /= n;
  double num = 0.0, den = 0.0;
  for (std::size_t i = lo; i < hi; ++i) {
    num += (h[i].t - st) * (h[i].x - sx);
    den += (h[i].t - st) * (h[i].t - st);
  }
  return den > 0.0 ? num / den : 0.0;
}

}  // namespace

FlameResult FlameSolver::run(const FlameField* initial) const {
  FlameResult res;
  FlameField f = initial ? *initial : initialize();
  if (f.n_cells() != config_.n_cells || f.Y.rows() != m_.n_species())
    throw DomainError("initial field does not match the configuration");
  f.time = 0.0;
  res.initial_content = field_content(f);
  res.exchanged.species_mass = Eigen::VectorXd::Zero(m_.n_species());

  const double L = f.length();
  const double target = config_.kernel.position * L;
  double dt = initial ? 0.1 * cfl_dt(f) : 1e-9;
  const int check_every = 10;

  auto finish = [&](FlameStatus st, std::string msg) {
    res.status = st;
    res.message = std::move(msg);
    res.steady = st == FlameStatus::Steady;
    res.simulated_time = f.time;
    res.thickness = thermal_thickness(f);
    res.T_burned = f.T(f.n_cells() - 1);
    res.field = f;
    return res;
  };

  try {
    while (f.time < config_.t_end && res.steps < config_.max_steps) {
      dt = std::min({dt, cfl_dt(f), config_.t_end - f.time});
      FlameField trial = f;
      ConservationLedger d;
      if (!step(trial, dt, &d)) {
        ++res.rejected_steps;
        dt *= 0.5;
        if (dt < 1e-16) return finish(FlameStatus::Diverged, "time step underflow at t = " + std::to_string(f.time));
        continue;
      }
      double change = ((trial.T - f.T).cwiseAbs().array() / f.T.array()).maxCoeff();
      if (change > 2.0 * config_.max_dT_rel) {
        ++res.rejected_steps;
        dt *= 0.5;
        continue;
      }
      f = std::move(trial);
      add(res.exchanged, d);
      ++res.steps;
      double grow = change > 0.0 ? 0.9 * config_.max_dT_rel / change : 1.1;
      dt *= std::clamp(grow, 0.5, 1.1);

      auto xf = front_position(f);
      if (!xf) continue;
      res.front_history.push_back({f.time, *xf});
      const double local = *xf - f.x0;
      if (config_.follow_front) {
        int s = static_cast<int>(std::lround((local - target) / f.dx));
        if (std::abs(s) >= 2) shift(f, s, &res.exchanged);
      } else {
        // The max-gradient front stalls short of a boundary as the flame
        // leaves through it, so the boundary zones are a tenth of the domain.
        const double margin = std::max(5.0 * f.dx, 0.1 * L);
        if (local > L - margin) return finish(FlameStatus::BlowOff, "flame front reached the outlet");
        if (local < margin) return finish(FlameStatus::Flashback, "flame front reached the inlet");
      }

      if (res.steps % check_every != 0) continue;
      double sc = consumption_speed(f);
      res.consumption_speed = sc;
      if (f.time >= config_.extinction_check_time && sc < config_.extinction_speed)
        return finish(FlameStatus::Extinction,
                      "consumption speed " + std::to_string(sc) + " m/s at t = " + std::to_string(f.time) + " s");

      // Steady when the front speed over the two halves of the last window agree.
      double thick = thermal_thickness(f);
      if (!(thick > 0.0) || !(sc > 0.0)) continue;
      double window = config_.steady_window_thicknesses * thick / sc;
      const auto& h = res.front_history;
      if (h.back().t - h.front().t < window) continue;
      double t0 = h.back().t - window;
      std::size_t lo = static_cast<std::size_t>(
          std::lower_bound(h.begin(), h.end(), t0, [](const FrontSample& s, double t) { return s.t < t; }) - h.begin());
      std::size_t hi = h.size();
      if (hi - lo < 20) continue;
      std::size_t mid = (lo + hi) / 2;
      double u1 = config_.u_in - slope(h, lo, mid);
      double u2 = config_.u_in - slope(h, mid, hi);
      double u = config_.u_in - slope(h, lo, hi);
      if (u > 0.0 && std::abs(u1 - u2) <= config_.steady_tolerance * u) {
        res.u_lam = u;
        return finish(FlameStatus::Steady, "");
      }
      res.u_lam = u;
    }
  } catch (const NumericalError& e) {
    return finish(FlameStatus::Diverged, e.what());
  }
  return finish(FlameStatus::NotConverged, "steady state not reached by t = " + std::to_string(f.time) + " s");
}

FlameField initialize(const Mechanism& m, const FlameConfig& c) { return FlameSolver(m, c).initialize(); }

FlameField step(const Mechanism& m, const FlameField& f, const FlameConfig& c, double dt) {
  FlameSolver solver(m, c);
  FlameField g = f;
  if (!solver.step(g, dt)) throw NumericalError("time step exceeds the convective limit");
  return g;
}

FlameResult run_to_steady(const Mechanism& m, const FlameConfig& c, const FlameField* initial) {
  return FlameSolver(m, c).run(initial);
}

FlameField regrid(const Mechanism& m, const FlameField& f, double dx, int n_cells) {
  if (!(dx > 0.0) || n_cells < 1) throw DomainError("invalid target grid");
  const int n = m.n_species();
  const int N0 = f.n_cells();
  FlameField g;
  g.x0 = f.x0;
  g.dx = dx;
  g.time = f.time;
  g.P = f.P;
  g.T.resize(n_cells);
  g.rho.resize(n_cells);
  g.h.resize(n_cells);
  g.Y.resize(n, n_cells);
  g.mass_flux.resize(n_cells + 1);
  auto locate = [&](double x, int& k, double& w) {
    double s = (x - f.x0) / f.dx - 0.5;
    if (s <= 0.0) {
      k = 0;
      w = 0.0;
    } else if (s >= N0 - 1) {
      k = N0 - 2;
      w = 1.0;
    } else {
      k = static_cast<int>(s);
      w = s - k;
    }
  };
  for (int j = 0; j < n_cells; ++j) {
    int k;
    double w;
    locate(g.x(j), k, w);
    g.T(j) = (1.0 - w) * f.T(k) + w * f.T(k + 1);
    g.Y.col(j) = (1.0 - w) * f.Y.col(k) + w * f.Y.col(k + 1);
    g.Y.col(j) /= g.Y.col(j).sum();
    g.rho(j) = density_from_TPY(m, g.T(j), g.P, g.Y.col(j));
    g.h(j) = mixture_h(m, g.T(j), g.Y.col(j));
  }
  for (int j = 0; j <= n_cells; ++j) {
    double s = std::clamp(j * dx / f.dx, 0.0, static_cast<double>(N0));
    int k = std::min(static_cast<int>(s), N0 - 1);
    double w = s - k;
    g.mass_flux(j) = (1.0 - w) * f.mass_flux(k) + w * f.mass_flux(k + 1);
  }
  return g;
}

std::vector<FlameRow> sweep_flame(const Mechanism& m, std::vector<double> phis, const FlameConfig& base, int jobs) {
  if (phis.empty()) throw DomainError("empty equivalence-ratio list");
  std::sort(phis.begin(), phis.end());
  std::vector<FlameRow> rows(phis.size());
  auto run = [&](std::size_t i) {
    FlameRow& row = rows[i];
    row.phi = phis[i];
    try {
      FlameConfig c = base;
      c.phi = phis[i];
      c.X_in.resize(0);
      FlameResult r = run_to_steady(m, c);
      row.status = r.status;
      row.u_lam = r.u_lam;
      row.thickness = r.thickness;
      row.T_burned = r.T_burned;
      row.simulated_time = r.simulated_time;
      row.steps = r.steps;
      row.message = r.message;
    } catch (const std::exception& e) {
      row.status = FlameStatus::Diverged;
      row.message = e.what();
    }
  };
  const std::size_t workers = static_cast<std::size_t>(std::max(1, jobs));
  if (workers == 1 || rows.size() == 1) {
    for (std::size_t i = 0; i < rows.size(); ++i) run(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < std::min(workers, rows.size()); ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < rows.size(); i = next++) run(i);
      });
    }
    for (auto& th : pool) th.join();
  }
  return rows;
}

std::vector<GridRow> grid_study(const Mechanism& m, std::vector<double> spacings, const FlameConfig& base,
                                const GridStudyOptions& options) {
  if (spacings.empty()) throw DomainError("empty spacing list");
  for (double s : spacings)
    if (!(s > 0.0)) throw DomainError("grid spacings must be positive");
  const double L = base.dx * base.n_cells;
  // Nearest to the base spacing first so each run can continue from a neighbour.
  std::vector<double> order = spacings;
  std::sort(order.begin(), order.end(), [&](double a, double b) {
    double da = std::abs(std::log(a / base.dx));
    double db = std::abs(std::log(b / base.dx));
    return da != db ? da < db : a < b;
  });
  order.erase(std::unique(order.begin(), order.end()), order.end());

  struct Converged {
    double dx;
    FlameField field;
  };
  std::vector<Converged> converged;
  auto nearest = [&](double dx) -> const FlameField* {
    const Converged* best = nullptr;
    for (const auto& c : converged)
      if (!best || std::abs(std::log(c.dx / dx)) < std::abs(std::log(best->dx / dx))) best = &c;
    return best ? &best->field : nullptr;
  };

  std::vector<GridRow> rows;
  for (double dx : order) {
    GridRow row;
    row.dx = dx;
    row.n_cells = static_cast<int>(std::lround(L / dx));
    row.cost_only = dx < options.cost_only_below;
    try {
      FlameConfig c = base;
      c.dx = dx;
      c.n_cells = row.n_cells;
      FlameSolver solver(m, c);
      std::optional<FlameField> start;
      if (const FlameField* near = nearest(dx)) {
        start = regrid(m, *near, dx, row.n_cells);
        start->x0 = 0.0;
        start->time = 0.0;
      }

      FlameField timing_start;
      if (row.cost_only) {
        timing_start = start ? *start : solver.initialize();
        row.status = FlameStatus::NotConverged;
        row.message = "cost measurement only";
      } else {
        FlameResult r = solver.run(start ? &*start : nullptr);
        row.status = r.status;
        row.u_lam = r.u_lam;
        row.message = r.message;
        timing_start = r.field;
        if (r.status == FlameStatus::Steady) {
          FlameField keep = r.field;
          keep.x0 = 0.0;
          converged.push_back({dx, std::move(keep)});
        }
      }

      // Fixed-length timing segment from the solution (or start) state.
      FlameField f = timing_start;
      f.time = 0.0;
      double dt = 0.5 * solver.cfl_dt(f);
      auto t0 = std::chrono::steady_clock::now();
      long taken = 0;
      for (long s = 0; s < options.timing_steps * 4 && taken < options.timing_steps; ++s) {
        dt = std::min(dt * 1.1, solver.cfl_dt(f));
        if (solver.step(f, dt)) {
          ++taken;
        } else {
          dt *= 0.5;
        }
      }
      double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      if (f.time > 0.0) row.cpu_time = wall / (f.time * 1e3);
    } catch (const std::exception& e) {
      row.status = FlameStatus::Diverged;
      row.message = e.what();
    }
    rows.push_back(row);
  }
  std::sort(rows.begin(), rows.end(), [](const GridRow& a, const GridRow& b) { return a.dx < b.dx; });
  return rows;
}

}  // namespace h2kin
