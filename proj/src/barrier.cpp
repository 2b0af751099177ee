#include "cfmimo/barrier.hpp"

#include <cmath>

namespace cfmimo {

void RowProblem::add_linear(const Eigen::VectorXd& a, double b) {
  linear_a_.push_back(a);
  linear_b_.push_back(b);
}

void RowProblem::add_concave(ConcaveRow row) { concave_.push_back(std::move(row)); }

bool RowProblem::values(const Eigen::VectorXd& z, Eigen::VectorXd& s) const {
  s.resize(size());
  Eigen::Index i = 0;
  for (std::size_t r = 0; r < linear_b_.size(); ++r, ++i) {
    s(i) = linear_a_[r].dot(z) + linear_b_[r];
    if (!(s(i) > 0.0) || !std::isfinite(s(i))) return false;
  }
  for (const auto& row : concave_) {
    s(i) = row.value(z);
    if (!(s(i) > 0.0) || !std::isfinite(s(i))) return false;
    ++i;
  }
  return true;
}

void RowProblem::add_barrier_terms(const Eigen::VectorXd& z, const Eigen::VectorXd& s, Eigen::VectorXd& grad,
                                   Eigen::MatrixXd& hess) const {
  Eigen::Index i = 0;
  for (std::size_t r = 0; r < linear_b_.size(); ++r, ++i) {
    const Eigen::VectorXd& a = linear_a_[r];
    grad.noalias() -= a / s(i);
    hess.noalias() += (a * a.transpose()) / (s(i) * s(i));
  }
  Eigen::VectorXd g(dim_);
  Eigen::MatrixXd h(dim_, dim_);
  for (const auto& row : concave_) {
    g.setZero();
    h.setZero();
    row.derivatives(z, g, h);
    grad.noalias() -= g / s(i);
    hess.noalias() += (g * g.transpose()) / (s(i) * s(i)) - h / s(i);
    ++i;
  }
}

namespace {

// Change of -sum log s, without forming the two large sums.
double barrier_change(const Eigen::VectorXd& from, const Eigen::VectorXd& to) {
  return -(to.array() / from.array()).log().sum();
}

}  // namespace

BarrierResult barrier_maximize(const RowProblem& problem, const Eigen::VectorXd& c, Eigen::VectorXd z0,
                               const BarrierOptions& options) {
  const int n = problem.dimension();
  const double m = problem.size();
  BarrierResult out;
  Eigen::VectorXd s, s_trial;
  if (!problem.values(z0, s)) throw SolverError("barrier start point is not strictly feasible");

  Eigen::VectorXd z = std::move(z0);
  double tau = options.tau0;
  Eigen::VectorXd grad(n);
  Eigen::MatrixXd hess(n, n);
  while (true) {
    // Centering.
    while (true) {
      grad = -tau * c;
      hess.setZero();
      problem.add_barrier_terms(z, s, grad, hess);
      // Jacobi scaling keeps the solve accurate when slacks span many decades.
      const Eigen::VectorXd scale = hess.diagonal().cwiseAbs().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
      const Eigen::MatrixXd scaled = scale.asDiagonal() * hess * scale.asDiagonal();
      Eigen::LDLT<Eigen::MatrixXd> ldlt(scaled);
      Eigen::VectorXd step = -scale.cwiseProduct(ldlt.solve(scale.cwiseProduct(grad)));
      if (ldlt.info() != Eigen::Success || !step.allFinite()) {
        const Eigen::MatrixXd ridged = scaled + 1e-12 * Eigen::MatrixXd::Identity(n, n);
        step = -scale.cwiseProduct(ridged.ldlt().solve(scale.cwiseProduct(grad)));
      }
      const double decrement = -grad.dot(step);
      if (!(decrement > 2e-10)) break;

      double alpha = 1.0;
      bool accepted = false;
      while (alpha > 1e-16) {
        const Eigen::VectorXd trial = z + alpha * step;
        if (problem.values(trial, s_trial)) {
          const double change = -tau * alpha * c.dot(step) + barrier_change(s, s_trial);
          if (change <= -0.25 * alpha * decrement) {
            z = trial;
            s.swap(s_trial);
            accepted = true;
            break;
          }
        }
        alpha *= 0.5;
      }
      ++out.newton_steps;
      // Damped steps at a small decrement only chase rounding noise; the
      // objective error left behind is about decrement / (2 tau).
      if (!accepted || (alpha < 1.0 && decrement < 1e-3)) break;
      if (out.newton_steps >= options.max_newton) {
        out.z = z;
        out.gap = m / tau;
        return out;
      }
    }
    if (m / tau < options.tolerance) break;
    tau *= options.growth;
  }
  out.z = z;
  out.gap = m / tau;
  out.converged = true;
  return out;
}

}  // namespace cfmimo
