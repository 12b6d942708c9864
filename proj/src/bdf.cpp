#include "h2kin/bdf.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "h2kin/error.hpp"

namespace h2kin {

namespace {

constexpr int kMaxOrder = 5;
constexpr int kNewtonMaxIter = 4;
constexpr double kMinFactor = 0.2;
constexpr double kMaxFactor = 10.0;
constexpr double kEps = std::numeric_limits<double>::epsilon();

struct Coefficients {
  std::array<double, kMaxOrder + 1> gamma{};
  std::array<double, kMaxOrder + 1> alpha{};
  std::array<double, kMaxOrder + 2> error_const{};

  Coefficients() {
    const std::array<double, kMaxOrder + 1> kappa{0.0, -0.1850, -1.0 / 9.0, -0.0823, -0.0415, 0.0};
    gamma[0] = 0.0;
    for (int k = 1; k <= kMaxOrder; ++k) gamma[static_cast<std::size_t>(k)] = gamma[static_cast<std::size_t>(k) - 1] + 1.0 / k;
    for (int k = 0; k <= kMaxOrder; ++k) {
      auto i = static_cast<std::size_t>(k);
      alpha[i] = (1.0 - kappa[i]) * gamma[i];
      error_const[i] = kappa[i] * gamma[i] + 1.0 / (k + 1);
    }
    error_const[kMaxOrder + 1] = 1.0 / (kMaxOrder + 2);
  }
};

const Coefficients& coeffs() {
  static const Coefficients c;
  return c;
}

double rms(const Eigen::VectorXd& v) { return v.norm() / std::sqrt(static_cast<double>(v.size())); }

Eigen::MatrixXd compute_R(int order, double factor) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(order + 1, order + 1);
  M.row(0).setOnes();
  for (int i = 1; i <= order; ++i)
    for (int j = 1; j <= order; ++j) M(i, j) = (i - 1 - factor * j) / i;
  for (int i = 1; i <= order; ++i) M.row(i) = M.row(i).cwiseProduct(M.row(i - 1));
  return M;
}

}  // namespace

BdfIntegrator::BdfIntegrator(Rhs rhs, double t0, const Eigen::VectorXd& y0, double t_bound, BdfOptions options)
    : rhs_(std::move(rhs)),
      opt_(std::move(options)),
      n_(static_cast<int>(y0.size())),
      t_(t0),
      t_old_(t0),
      t_bound_(t_bound),
      y_(y0) {
  if (!(t_bound > t0)) throw DomainError("integration interval must be positive");
  if (!(opt_.rtol > 0.0 && opt_.rtol < 1.0)) throw DomainError("rtol must lie in (0, 1)");
  opt_.rtol = std::max(opt_.rtol, 100.0 * kEps);
  if (opt_.atol.size() == 1) {
    atol_ = Eigen::VectorXd::Constant(n_, opt_.atol(0));
  } else if (opt_.atol.size() == n_) {
    atol_ = opt_.atol;
  } else {
    throw DomainError("atol has the wrong length");
  }
  if ((atol_.array() <= 0.0).any()) throw DomainError("atol must be positive");
  if (!(opt_.max_step > 0.0)) throw DomainError("max_step must be positive");

  Eigen::VectorXd f(n_);
  eval(t_, y_, f);
  h_abs_ = opt_.first_step > 0.0 ? std::min(opt_.first_step, t_bound_ - t_) : select_initial_step(f);
  newton_tol_ = std::max(10.0 * kEps / opt_.rtol, std::min(0.03, std::sqrt(opt_.rtol)));

  compute_jacobian(t_, y_, f);

  D_ = Eigen::MatrixXd::Zero(kMaxOrder + 3, n_);
  D_.row(0) = y_.transpose();
  D_.row(1) = (f * h_abs_).transpose();
  order_ = 1;
}

void BdfIntegrator::eval(double t, const Eigen::VectorXd& y, Eigen::VectorXd& f) {
  f.resize(n_);
  rhs_(t, y, f);
  ++stats_.rhs_evaluations;
}

void BdfIntegrator::compute_jacobian(double t, const Eigen::VectorXd& y, const Eigen::VectorXd& f) {
  J_.resize(n_, n_);
  Eigen::VectorXd yp = y;
  Eigen::VectorXd fp(n_);
  const double sqrt_eps = std::sqrt(kEps);
  for (int j = 0; j < n_; ++j) {
    double delta = sqrt_eps * std::max(std::abs(y(j)), atol_(j) / opt_.rtol);
    yp(j) = y(j) + delta;
    delta = yp(j) - y(j);
    eval(t, yp, fp);
    J_.col(j) = (fp - f) / delta;
    yp(j) = y(j);
  }
  ++stats_.jacobian_evaluations;
  lu_valid_ = false;
}

void BdfIntegrator::change_D(int order, double factor) {
  Eigen::MatrixXd R = compute_R(order, factor);
  Eigen::MatrixXd U = compute_R(order, 1.0);
  Eigen::MatrixXd RU = R * U;
  D_.topRows(order + 1) = (RU.transpose() * D_.topRows(order + 1)).eval();
}

double BdfIntegrator::select_initial_step(const Eigen::VectorXd& f0) {
  const double interval = t_bound_ - t_;
  Eigen::VectorXd scale = atol_ + opt_.rtol * y_.cwiseAbs();
  double d0 = rms(y_.cwiseQuotient(scale));
  double d1 = rms(f0.cwiseQuotient(scale));
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h0 = std::min(h0, interval);
  Eigen::VectorXd y1 = y_ + h0 * f0;
  Eigen::VectorXd f1(n_);
  eval(t_ + h0, y1, f1);
  double d2 = rms((f1 - f0).cwiseQuotient(scale)) / h0;
  double h1 = (d1 <= 1e-15 && d2 <= 1e-15) ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / std::max(d1, d2), 0.5);
  return std::min({100.0 * h0, h1, interval, opt_.max_step});
}

bool BdfIntegrator::solve_system(double t_new, const Eigen::VectorXd& y_predict, double c, const Eigen::VectorXd& psi,
                                 const Eigen::VectorXd& scale, int& n_iter, Eigen::VectorXd& y, Eigen::VectorXd& d) {
  d = Eigen::VectorXd::Zero(n_);
  y = y_predict;
  double dy_norm_old = -1.0;
  Eigen::VectorXd f(n_);
  n_iter = 0;
  for (int k = 0; k < kNewtonMaxIter; ++k) {
    n_iter = k + 1;
    eval(t_new, y, f);
    if (!f.allFinite()) return false;
    Eigen::VectorXd dy = lu_.solve(c * f - psi - d);
    double dy_norm = rms(dy.cwiseQuotient(scale));
    double rate = dy_norm_old < 0.0 ? -1.0 : dy_norm / dy_norm_old;
    if (rate >= 0.0 && (rate >= 1.0 || std::pow(rate, kNewtonMaxIter - k) / (1.0 - rate) * dy_norm > newton_tol_))
      return false;
    y += dy;
    d += dy;
    if (dy_norm == 0.0 || (rate >= 0.0 && rate / (1.0 - rate) * dy_norm < newton_tol_)) return true;
    dy_norm_old = dy_norm;
  }
  return false;
}

BdfIntegrator::Status BdfIntegrator::step() {
  if (status_ != Status::Running) return status_;
  if (stats_.accepted_steps >= opt_.max_steps) {
    status_ = Status::Failed;
    message_ = "maximum number of steps reached at t = " + std::to_string(t_);
    return status_;
  }
  const Coefficients& C = coeffs();
  const double t = t_;
  const double min_step = 10.0 * std::abs(std::nextafter(t, std::numeric_limits<double>::infinity()) - t);
  double h_abs = h_abs_;
  if (h_abs > opt_.max_step) {
    h_abs = opt_.max_step;
    change_D(order_, opt_.max_step / h_abs_);
    n_equal_steps_ = 0;
    lu_valid_ = false;
  } else if (h_abs < min_step) {
    h_abs = min_step;
    change_D(order_, min_step / h_abs_);
    n_equal_steps_ = 0;
    lu_valid_ = false;
  }

  const int order = order_;
  jac_current_ = false;
  Eigen::VectorXd y_new;
  Eigen::VectorXd d;
  Eigen::VectorXd scale;
  double t_new = t;
  double error_norm = 0.0;
  double safety = 0.0;
  double lu_c = std::numeric_limits<double>::quiet_NaN();

  while (true) {
    if (h_abs < min_step) {
      status_ = Status::Failed;
      message_ = "step size underflow at t = " + std::to_string(t);
      return status_;
    }
    double h = h_abs;
    t_new = t + h;
    if (t_new > t_bound_) {
      t_new = t_bound_;
      change_D(order, std::abs(t_new - t) / h_abs);
      n_equal_steps_ = 0;
      lu_valid_ = false;
    }
    h = t_new - t;
    h_abs = std::abs(h);

    Eigen::VectorXd y_predict = D_.topRows(order + 1).colwise().sum().transpose();
    scale = atol_ + opt_.rtol * y_predict.cwiseAbs();
    Eigen::VectorXd psi = Eigen::VectorXd::Zero(n_);
    for (int j = 1; j <= order; ++j) psi += C.gamma[static_cast<std::size_t>(j)] * D_.row(j).transpose();
    psi /= C.alpha[static_cast<std::size_t>(order)];

    const double c = h / C.alpha[static_cast<std::size_t>(order)];
    bool converged = false;
    int n_iter = 0;
    while (!converged) {
      if (!lu_valid_ || lu_c != c) {
        lu_.compute(Eigen::MatrixXd::Identity(n_, n_) - c * J_);
        ++stats_.lu_decompositions;
        lu_valid_ = true;
        lu_c = c;
      }
      converged = solve_system(t_new, y_predict, c, psi, scale, n_iter, y_new, d);
      if (!converged) {
        if (jac_current_) break;
        Eigen::VectorXd fp(n_);
        eval(t_new, y_predict, fp);
        compute_jacobian(t_new, y_predict, fp);
        jac_current_ = true;
      }
    }

    if (!converged) {
      const double factor = 0.5;
      h_abs *= factor;
      change_D(order, factor);
      n_equal_steps_ = 0;
      lu_valid_ = false;
      ++stats_.rejected_steps;
      continue;
    }

    safety = 0.9 * (2 * kNewtonMaxIter + 1) / (2 * kNewtonMaxIter + n_iter);
    scale = atol_ + opt_.rtol * y_new.cwiseAbs();
    Eigen::VectorXd error = C.error_const[static_cast<std::size_t>(order)] * d;
    error_norm = rms(error.cwiseQuotient(scale));
    if (!std::isfinite(error_norm)) error_norm = 1e10;

    if (error_norm > 1.0) {
      const double factor = std::max(kMinFactor, safety * std::pow(error_norm, -1.0 / (order + 1)));
      h_abs *= factor;
      change_D(order, factor);
      n_equal_steps_ = 0;
      lu_valid_ = false;
      ++stats_.rejected_steps;
    } else {
      break;
    }
  }

  ++stats_.accepted_steps;
  ++n_equal_steps_;
  t_old_ = t;
  t_ = t_new;
  h_abs_ = h_abs;

  D_.row(order + 2) = d.transpose() - D_.row(order + 1);
  D_.row(order + 1) = d.transpose();
  for (int i = order; i >= 0; --i) D_.row(i) += D_.row(i + 1);

  if (projection_) {
    Eigen::VectorXd projected = y_new;
    projection_(t_new, projected);
    Eigen::RowVectorXd delta = (projected - y_new).transpose();
    if (delta.squaredNorm() > 0.0) {
      for (int i = 0; i <= order + 2; ++i) D_.row(i) += delta;
      y_new = projected;
    }
  }
  y_ = y_new;

  dense_order_ = order;
  dense_h_ = h_abs;
  dense_D_ = D_.topRows(order + 1);

  if (t_ >= t_bound_) {
    status_ = Status::Finished;
    return status_;
  }

  if (n_equal_steps_ < order + 1) return status_;

  double error_m_norm = std::numeric_limits<double>::infinity();
  double error_p_norm = std::numeric_limits<double>::infinity();
  if (order > 1) {
    Eigen::VectorXd e = C.error_const[static_cast<std::size_t>(order) - 1] * D_.row(order).transpose();
    error_m_norm = rms(e.cwiseQuotient(scale));
  }
  if (order < kMaxOrder) {
    Eigen::VectorXd e = C.error_const[static_cast<std::size_t>(order) + 1] * D_.row(order + 2).transpose();
    error_p_norm = rms(e.cwiseQuotient(scale));
  }
  const std::array<double, 3> norms{error_m_norm, error_norm, error_p_norm};
  std::array<double, 3> factors{};
  for (int i = 0; i < 3; ++i) {
    double nrm = norms[static_cast<std::size_t>(i)];
    factors[static_cast<std::size_t>(i)] =
        nrm == 0.0 ? std::numeric_limits<double>::infinity() : std::pow(nrm, -1.0 / (order + i));
  }
  int best = static_cast<int>(std::max_element(factors.begin(), factors.end()) - factors.begin());
  order_ = order + best - 1;
  const double factor = std::min(kMaxFactor, safety * factors[static_cast<std::size_t>(best)]);
  h_abs_ *= factor;
  change_D(order_, factor);
  n_equal_steps_ = 0;
  lu_valid_ = false;
  return status_;
}

Eigen::VectorXd BdfIntegrator::dense(double t) const {
  if (dense_order_ == 0) return y_;
  Eigen::VectorXd y = dense_D_.row(0).transpose();
  double p = 1.0;
  for (int j = 0; j < dense_order_; ++j) {
    double t_shift = t_ - dense_h_ * j;
    double denom = dense_h_ * (1 + j);
    p *= (t - t_shift) / denom;
    y += p * dense_D_.row(j + 1).transpose();
  }
  return y;
}

}  // namespace h2kin
