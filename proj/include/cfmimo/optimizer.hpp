#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cfmimo/barrier.hpp"
#include "cfmimo/config.hpp"
#include "cfmimo/rates.hpp"
#include "cfmimo/scenario.hpp"

namespace cfmimo {

class OptimizerError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Value, gradient and Hessian with respect to the stacked theta = (p, q).
struct SurrogateEval {
  double value = 0.0;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd hessian;
};

/// Bounds on the device rate terms around an expansion point theta_bar.
///   C~ = log2(1 + r) + (r / ln 2)(2 sqrt(q / q_bar) - y / y_bar - 1)
///   D~ = (D(r) / 2)(y_bar / y + q / q_bar)
/// with y = lambda q + varrho (total received power) and r the SINR at theta_bar.
class RateSurrogate {
 public:
  RateSurrogate(const MomentSet& moments, const Eigen::VectorXd& theta_bar, int device);

  int device() const { return d_; }
  /// Coefficients of y(theta) = w . theta + chi.
  const Eigen::VectorXd& power_weights() const { return w_; }
  double sinr_bar() const { return r_bar_; }

  double capacity(const Eigen::VectorXd& theta) const;
  double dispersion(const Eigen::VectorXd& theta) const;
  SurrogateEval capacity_eval(const Eigen::VectorXd& theta) const;
  SurrogateEval dispersion_eval(const Eigen::VectorXd& theta) const;

  /// Exact log2(1 + rho) and sqrt(2 rho / (1 + rho)) at theta.
  double true_capacity(const Eigen::VectorXd& theta) const;
  double true_dispersion(const Eigen::VectorXd& theta) const;

 private:
  double sinr(const Eigen::VectorXd& theta) const;

  int d_;
  int q_index_;
  double lambda_, chi_;
  Eigen::VectorXd w_;
  double q_bar_, y_bar_, r_bar_, d_bar_;
};

SurrogateEval capacity_surrogate(const Eigen::VectorXd& theta, const Eigen::VectorXd& theta_bar,
                                 const MomentSet& moments, int device);
SurrogateEval dispersion_surrogate(const Eigen::VectorXd& theta, const Eigen::VectorXd& theta_bar,
                                   const MomentSet& moments, int device);

/// gain theta[index] >= threshold (interference . theta + noise), interference >= 0.
struct SinrFloor {
  std::string constraint;  // "C3", "C4", "C5"
  int terminal = 0;
  int index = 0;           // position of the own power in theta
  double gain = 0.0;
  Eigen::VectorXd interference;
  double noise = 0.0;
  double threshold = 0.0;

  double slack(const Eigen::VectorXd& theta) const;
};

/// C1-C5 in theta space. In the FBL regime the C3 floors carry the exact SINR
/// equivalent of the rate target; the solver replaces them by the surrogate form.
struct ConstraintSet {
  Regime regime = Regime::Shannon;
  int K_u = 0, K_d = 0;
  Eigen::VectorXd theta_max;
  double embb_threshold = 0.0;  // 2^(R_embb / psi) - 1
  double mmtc_threshold = 0.0;  // 2^((N / psi) R_mmtc) - 1
  double mmtc_target = 0.0;     // (N / psi) R_mmtc, bit/s/Hz
  double sinr_floor = 0.0;      // S
  Eigen::VectorXd v;            // FBL scale per device
  std::vector<SinrFloor> floors;
};

ConstraintSet build_constraints(const ScenarioConfig& config, const MomentSet& moments, Regime regime);

/// Smallest SINR above the dip of log2(1+x) - v sqrt(2x/(1+x)) reaching `target`.
double fbl_sinr_threshold(double target, double v);

/// Maximizes the smallest normalized slack of the linear floors and boxes.
/// Returns normalized powers x = theta / theta_max, or nothing if infeasible.
std::optional<Eigen::VectorXd> find_feasible_point(const ConstraintSet& constraints, const BarrierOptions& options = {});

struct InnerResult {
  Eigen::VectorXd theta;
  double F = 0.0;          // max over theta of min_d f_d - vartheta g_d, bit/s/Hz
  int newton_steps = 0;
};

/// Epigraph subproblem at (theta_bar, vartheta). vartheta is in bit/s/Hz per W
/// (EE divided by psi / N). `start` must be strictly feasible.
InnerResult solve_inner(const Eigen::VectorXd& theta_bar, double vartheta, const ConstraintSet& constraints,
                        const MomentSet& moments, const EEParams& params, const Eigen::VectorXd& start,
                        const BarrierOptions& options = {});

template <typename Point>
struct DinkelbachResult {
  Point point{};
  double vartheta = 0.0;
  std::vector<double> F_trace;
  std::vector<double> vartheta_trace;
  int iterations = 0;
  bool converged = false;
};

/// Generalized Dinkelbach. `solve(vartheta)` returns {point, F(vartheta)};
/// `ratio(point)` returns min_d f_d / g_d. Stops at F <= F0, at the cap, or
/// when the ratio stops increasing.
template <typename Point, typename Solve, typename Ratio>
DinkelbachResult<Point> dinkelbach(Solve&& solve, Ratio&& ratio, double vartheta0, double F0, int max_iter = 50) {
  DinkelbachResult<Point> out;
  double vartheta = vartheta0;
  for (int it = 0; it < max_iter; ++it) {
    auto [point, F] = solve(vartheta);
    ++out.iterations;
    out.F_trace.push_back(F);
    out.vartheta_trace.push_back(vartheta);
    out.point = std::move(point);
    const double next = ratio(out.point);
    out.vartheta = std::max(next, vartheta);
    if (F <= F0) {
      out.converged = true;
      break;
    }
    if (!(next > vartheta)) break;
    vartheta = next;
  }
  return out;
}

struct SolveOptions {
  double theta_tol = 1e-4;  // ||theta - theta_bar||^2 / ||theta||^2
  double F_tol = 1e-6;      // times psi / N
  int max_outer = 100;
  int max_dinkelbach = 50;
  // Start search: each benchmark policy with user and device powers scaled by
  // 10^(-k / start_steps_per_decade), k = 0 .. start_decades * steps.
  int start_decades = 8;
  int start_steps_per_decade = 4;
  BarrierOptions barrier;
};

struct TraceRow {
  int iteration = 0;
  double vartheta = 0.0;       // bits/J
  double objective = 0.0;      // true min-EE, bits/J
  double max_violation = 0.0;  // relative
};

struct SolveResult {
  PowerVector theta_star;
  double objective = 0.0;  // min-EE, bits/J; 0 when infeasible
  bool feasible = false;
  int outer_iters = 0;
  int inner_iters = 0;       // Dinkelbach iterations, summed
  int subproblem_iters = 0;  // Newton steps, summed
  std::vector<double> trace;                  // true objective per outer iteration
  std::vector<std::vector<double>> F_traces;  // per outer iteration
  std::vector<TraceRow> rows;
  std::string start;   // heuristic or "phase1"
  std::string status;  // "converged", "outer_cap", "stalled", "infeasible"

  Eigen::VectorXd user_rate, user_sinr;                  // bit/s
  Eigen::VectorXd device_rate, device_sinr, device_ee;  // bit/s, bits/J
};

/// Sequential FP around Dinkelbach, starting from the best feasible benchmark
/// policy (or the phase-1 point when none is feasible).
SolveResult sequential_fp(const ScenarioConfig& config, const Deployment& dep, const MomentSet& moments,
                          Regime regime, const SolveOptions& options = {});

/// Per-terminal rates, SINRs and EE at theta, as reported in SolveResult.
void fill_terminal_metrics(const ScenarioConfig& config, const MomentSet& moments, Regime regime, SolveResult& out);

/// True min-EE (bits/J) at theta, ignoring feasibility.
double min_energy_efficiency(const ScenarioConfig& config, const MomentSet& moments, Regime regime,
                             const PowerVector& theta);

/// One JSON object per outer iteration.
std::string trace_jsonl(const SolveResult& result, long long instance);

}  // namespace cfmimo
