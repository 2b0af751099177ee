#pragma once

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>
#include <vector>

namespace cfmimo {

/// Constraint rows s_i(z) > 0, each concave. Linear rows are stored densely;
/// nonlinear rows supply value and derivatives through callbacks.
class RowProblem {
 public:
  struct ConcaveRow {
    std::function<double(const Eigen::VectorXd&)> value;
    // Gradient and Hessian of the row at z (Hessian negative semidefinite).
    std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&, Eigen::MatrixXd&)> derivatives;
  };

  explicit RowProblem(int dimension) : dim_(dimension) {}

  int dimension() const { return dim_; }
  int size() const { return static_cast<int>(linear_b_.size() + concave_.size()); }

  void add_linear(const Eigen::VectorXd& a, double b);
  void add_concave(ConcaveRow row);

  /// Row values; false when any row is non-positive or non-finite.
  bool values(const Eigen::VectorXd& z, Eigen::VectorXd& s) const;

  /// Accumulates the derivatives of -sum log s_i(z).
  void add_barrier_terms(const Eigen::VectorXd& z, const Eigen::VectorXd& s, Eigen::VectorXd& grad,
                         Eigen::MatrixXd& hess) const;

 private:
  int dim_;
  std::vector<Eigen::VectorXd> linear_a_;
  std::vector<double> linear_b_;
  std::vector<ConcaveRow> concave_;
};

struct BarrierOptions {
  double tolerance = 1e-7;  // duality-gap bound m / tau at exit
  double tau0 = 1.0;
  double growth = 10.0;
  int max_newton = 200;     // across all centering steps
};

struct BarrierResult {
  Eigen::VectorXd z;
  int newton_steps = 0;
  bool converged = false;
  double gap = 0.0;
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Maximizes c^T z over {z : s_i(z) > 0} from a strictly feasible z0 with
/// the standard barrier path. Throws SolverError if z0 is not strictly feasible.
BarrierResult barrier_maximize(const RowProblem& problem, const Eigen::VectorXd& c, Eigen::VectorXd z0,
                               const BarrierOptions& options = {});

}  // namespace cfmimo
