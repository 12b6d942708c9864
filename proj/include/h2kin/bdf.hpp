#pragma once

#include <functional>
#include <limits>
#include <string>

#include <Eigen/Dense>

namespace h2kin {

struct BdfOptions {
  double rtol = 1e-8;
  /// Absolute tolerance per component; a size-1 vector is broadcast.
  Eigen::VectorXd atol = Eigen::VectorXd::Constant(1, 1e-12);
  double max_step = std::numeric_limits<double>::infinity();
  /// 0 selects the first step automatically.
  double first_step = 0.0;
  long max_steps = 5'000'000;
};

struct BdfStats {
  long accepted_steps = 0;
  long rejected_steps = 0;
  long rhs_evaluations = 0;
  long jacobian_evaluations = 0;
  long lu_decompositions = 0;
};

/// Variable-order (1-5), variable-step BDF in the fixed-leading-coefficient
/// difference form (Shampine & Reichelt, as in scipy.integrate.BDF), with a
/// finite-difference dense Jacobian refreshed only when Newton stalls.
class BdfIntegrator {
 public:
  using Rhs = std::function<void(double t, const Eigen::VectorXd& y, Eigen::VectorXd& dydt)>;
  /// Called after each accepted step; may modify y in place (e.g. to
  /// restore an invariant). The history is shifted by the same amount.
  using Projection = std::function<void(double t, Eigen::VectorXd& y)>;

  enum class Status { Running, Finished, Failed };

  BdfIntegrator(Rhs rhs, double t0, const Eigen::VectorXd& y0, double t_bound, BdfOptions options);

  void set_projection(Projection p) { projection_ = std::move(p); }

  /// Advances one accepted step (or finishes / fails).
  Status step();

  double t() const { return t_; }
  double t_old() const { return t_old_; }
  const Eigen::VectorXd& y() const { return y_; }
  int order() const { return order_; }
  Status status() const { return status_; }
  const std::string& message() const { return message_; }
  const BdfStats& stats() const { return stats_; }

  /// Interpolant over the last accepted step, valid for t in [t_old, t].
  Eigen::VectorXd dense(double t) const;

 private:
  void eval(double t, const Eigen::VectorXd& y, Eigen::VectorXd& f);
  void compute_jacobian(double t, const Eigen::VectorXd& y, const Eigen::VectorXd& f);
  void change_D(int order, double factor);
  double select_initial_step(const Eigen::VectorXd& f0);
  bool solve_system(double t_new, const Eigen::VectorXd& y_predict, double c, const Eigen::VectorXd& psi,
                    const Eigen::VectorXd& scale, int& n_iter, Eigen::VectorXd& y, Eigen::VectorXd& d);

  Rhs rhs_;
  Projection projection_;
  BdfOptions opt_;
  int n_;
  double t_;
  double t_old_;
  double t_bound_;
  Eigen::VectorXd y_;
  Eigen::VectorXd atol_;
  double h_abs_ = 0.0;
  double newton_tol_ = 0.0;
  int order_ = 1;
  int n_equal_steps_ = 0;
  Eigen::MatrixXd D_;  // (MAX_ORDER + 3) x n difference array
  Eigen::MatrixXd J_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  bool lu_valid_ = false;
  bool jac_current_ = false;
  Status status_ = Status::Running;
  std::string message_;
  BdfStats stats_;

  // Dense output of the last step.
  int dense_order_ = 0;
  double dense_h_ = 0.0;
  Eigen::MatrixXd dense_D_;
};

}  // namespace h2kin
