#include "h2kin/reactor0d.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "h2kin/error.hpp"
#include "h2kin/kinetics.hpp"

namespace h2kin {

void validate(const ReactorConfig& c, const Mechanism& m) {
  if (!(c.T0 > 0.0) || !std::isfinite(c.T0)) throw DomainError("initial temperature must be positive");
  if (!(c.P0 > 0.0) || !std::isfinite(c.P0)) throw DomainError("initial pressure must be positive");
  if (c.X0.size() != m.n_species()) throw DomainError("initial composition has the wrong length");
  if ((c.X0.array() < 0.0).any() || !(c.X0.sum() > 0.0)) throw DomainError("initial composition must be non-negative");
  if (!(c.t_end > 0.0)) throw DomainError("t_end must be positive");
  if (!(c.delay_criterion_dT > 0.0)) throw DomainError("delay criterion must be positive");
  if (!(c.rtol > 0.0 && c.rtol < 1.0)) throw DomainError("rtol must lie in (0, 1)");
  if (!(c.atol_Y > 0.0 && c.atol_Y < 1.0) || !(c.atol_T > 0.0 && c.atol_T < 1.0))
    throw DomainError("absolute tolerances must lie in (0, 1)");
  if (!(c.max_step > 0.0)) throw DomainError("max_step must be positive");
  if (!(c.tail_factor >= 1.0)) throw DomainError("tail factor must be at least 1");
  if (c.output_every < 1) throw DomainError("output cadence must be at least 1");
}

ReactorConfig h2_air_reactor(const Mechanism& m, double T0, double P0, double phi) {
  ReactorConfig c;
  c.T0 = T0;
  c.P0 = P0;
  c.X0 = h2_air_mole_fractions(m, phi);
  return c;
}

namespace {

// Right-hand side on the packed vector y = (T, Y).
class ConstVolumeRhs {
 public:
  ConstVolumeRhs(const Mechanism& m, double density) : m_(m), kin_(m), rho_(density), W_(m.molar_masses()) {}

  void operator()(const Eigen::VectorXd& y, Eigen::VectorXd& dydt) const {
    const int n = m_.n_species();
    const double T = y(0);
    if (!(T > 0.0) || !std::isfinite(T)) throw NumericalError("non-physical temperature " + std::to_string(T));
    Eigen::VectorXd Y = y.tail(n);
    Eigen::VectorXd c = rho_ * Y.cwiseQuotient(W_);
    Eigen::VectorXd wdot(n);
    kin_.production_rates(T, c.data(), wdot.data());
    Eigen::VectorXd u = species_u_mass(m_, T);
    double cv = mixture_cv(m_, T, Y);
    dydt.resize(n + 1);
    Eigen::VectorXd mass_rate = wdot.cwiseProduct(W_);
    dydt.tail(n) = mass_rate / rho_;
    dydt(0) = -u.dot(mass_rate) / (rho_ * cv);
    if (!dydt.allFinite()) {
      for (int k = 0; k < n; ++k)
        if (!std::isfinite(dydt(k + 1))) throw NumericalError("non-finite production rate for " + m_.species(k).name);
      throw NumericalError("non-finite temperature derivative");
    }
  }

 private:
  const Mechanism& m_;
  KineticsEvaluator kin_;
  double rho_;
  Eigen::VectorXd W_;
};

ThermoState unpack(const Eigen::VectorXd& y, double rho) {
  ThermoState s;
  s.T = y(0);
  s.density = rho;
  s.Y = y.tail(y.size() - 1);
  return s;
}

}  // namespace

Eigen::VectorXd rhs_const_volume(const Mechanism& m, const ThermoState& s) {
  Eigen::VectorXd y(m.n_species() + 1);
  y(0) = s.T;
  y.tail(m.n_species()) = s.Y;
  Eigen::VectorXd dydt;
  ConstVolumeRhs(m, s.density)(y, dydt);
  return dydt;
}

ReactorTrajectory integrate(const Mechanism& m, const ReactorConfig& c) {
  validate(c, m);
  const int n = m.n_species();
  ThermoState s0 = state_from_TPX(m, c.T0, c.P0, c.X0 / c.X0.sum());
  const double rho = s0.density;
  const double u0 = mixture_u(m, s0);
  const double T_cross = c.T0 + c.delay_criterion_dT;

  Eigen::VectorXd y0(n + 1);
  y0(0) = s0.T;
  y0.tail(n) = s0.Y;

  BdfOptions opt;
  opt.rtol = c.rtol;
  opt.atol = Eigen::VectorXd::Constant(n + 1, c.atol_Y);
  opt.atol(0) = c.atol_T;
  opt.max_step = c.max_step;

  ConstVolumeRhs f(m, rho);
  BdfIntegrator bdf([&f](double, const Eigen::VectorXd& y, Eigen::VectorXd& dydt) { f(y, dydt); }, 0.0, y0, c.t_end,
                    opt);
  auto restore_energy = [&](Eigen::VectorXd& y) {
    y(0) = temperature_from_u(m, u0, y.tail(n), y(0));
  };
  bdf.set_projection([&](double, Eigen::VectorXd& y) { restore_energy(y); });

  ReactorTrajectory traj;
  traj.T0 = c.T0;
  traj.t.push_back(0.0);
  traj.states.push_back(s0);

  double t_stop = c.t_end;
  long since_output = 0;
  while (true) {
    auto status = bdf.step();
    if (status == BdfIntegrator::Status::Failed) throw NumericalError(bdf.message());
    Eigen::VectorXd y = bdf.y();
    if (!y.allFinite() || y(0) < 50.0 || y(0) > 10000.0)
      throw NumericalError("non-physical state at t = " + std::to_string(bdf.t()));

    if (!traj.ignition_delay && y(0) >= T_cross) {
      // Energy-consistent temperature of the dense interpolant.
      auto T_at = [&](double t) {
        Eigen::VectorXd yi = bdf.dense(t);
        restore_energy(yi);
        return yi;
      };
      double a = bdf.t_old();
      double b = bdf.t();
      double fa = T_at(a)(0) - T_cross;
      double fb = T_at(b)(0) - T_cross;
      // Illinois false position on a bracketed crossing.
      int side = 0;
      double tc = b;
      for (int it = 0; it < 200 && fa < 0.0 && fb >= 0.0; ++it) {
        tc = (a * fb - b * fa) / (fb - fa);
        double fc = T_at(tc)(0) - T_cross;
        if (fc == 0.0 || (b - a) <= 4.0 * std::numeric_limits<double>::epsilon() * b) break;
        if (fc < 0.0) {
          a = tc;
          fa = fc;
          if (side == -1) fb *= 0.5;
          side = -1;
        } else {
          b = tc;
          fb = fc;
          if (side == 1) fa *= 0.5;
          side = 1;
        }
      }
      if (tc > traj.t.back()) {
        traj.t.push_back(tc);
        traj.states.push_back(unpack(T_at(tc), rho));
      }
      traj.ignition_delay = tc;
      t_stop = std::min(c.t_end, c.tail_factor * tc);
    }

    const bool done = status == BdfIntegrator::Status::Finished || bdf.t() >= t_stop;
    if (done) {
      double t_final = std::min(bdf.t(), t_stop);
      Eigen::VectorXd yf = t_final < bdf.t() ? bdf.dense(t_final) : y;
      restore_energy(yf);
      if (t_final > traj.t.back()) {
        traj.t.push_back(t_final);
        traj.states.push_back(unpack(yf, rho));
      }
      break;
    }
    if (++since_output >= c.output_every && bdf.t() > traj.t.back()) {
      since_output = 0;
      traj.t.push_back(bdf.t());
      traj.states.push_back(unpack(y, rho));
    }
  }
  traj.stats = bdf.stats();
  return traj;
}

std::optional<double> ignition_delay(const ReactorTrajectory& traj, double T0, double dT) {
  if (traj.t.empty()) throw DomainError("empty trajectory");
  const double target = T0 + dT;
  if (traj.states.front().T >= target) return traj.t.front();
  for (std::size_t i = 1; i < traj.t.size(); ++i) {
    double Ta = traj.states[i - 1].T;
    double Tb = traj.states[i].T;
    if (Tb >= target) {
      if (Tb == Ta) return traj.t[i];
      double w = (target - Ta) / (Tb - Ta);
      return traj.t[i - 1] + w * (traj.t[i] - traj.t[i - 1]);
    }
  }
  return std::nullopt;
}

std::vector<IgnitionRow> sweep_ignition(const Mechanism& m, std::vector<double> T0_list, const ReactorConfig& base,
                                        int jobs) {
  if (T0_list.empty()) throw DomainError("empty temperature list");
  std::sort(T0_list.begin(), T0_list.end());
  std::vector<IgnitionRow> rows(T0_list.size());
  auto run = [&](std::size_t i) {
    IgnitionRow& row = rows[i];
    row.T0 = T0_list[i];
    try {
      ReactorConfig c = base;
      c.T0 = T0_list[i];
      ReactorTrajectory traj = integrate(m, c);
      row.delay = traj.ignition_delay;
      row.status = traj.ignition_delay ? "ignited" : "not-ignited";
      row.stats = traj.stats;
      row.T_final = traj.states.back().T;
    } catch (const std::exception& e) {
      row.status = std::string("failed: ") + e.what();
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

}  // namespace h2kin
