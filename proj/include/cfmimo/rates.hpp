#pragma once

#include <Eigen/Dense>

#include "cfmimo/channel_stats.hpp"
#include "cfmimo/config.hpp"
#include "cfmimo/scenario.hpp"

namespace cfmimo {

/// Deterministic SINR coefficients of both services.
///
/// User side (per PRB): gamma_u = delta p_u / (upsilon p_u + sum kappa p + sum varkappa q + xi).
/// Device side (after despreading): rho_d = lambda q_d / varrho_d(theta).
/// Diagonals of kappa and eps_dd are zero and never read.
struct MomentSet {
  Eigen::VectorXd delta, upsilon, xi;  // K_u
  Eigen::MatrixXd kappa;               // K_u x K_u
  Eigen::MatrixXd varkappa;            // K_u x K_d
  Eigen::VectorXd lambda, nu, chi;     // K_d
  Eigen::MatrixXd eps_dd;              // K_d x K_d
  Eigen::MatrixXd eps_du;              // K_d x K_u

  int num_users() const { return static_cast<int>(delta.size()); }
  int num_devices() const { return static_cast<int>(lambda.size()); }
};

/// Decision variable: user powers p and device powers q, in watts.
struct PowerVector {
  Eigen::VectorXd p;
  Eigen::VectorXd q;

  /// Stacked (p, q).
  Eigen::VectorXd stacked() const;
  static PowerVector unstack(const Eigen::VectorXd& theta, int num_users);
};

/// Constants of the energy-efficiency objective.
struct EEParams {
  double psi = 0.0;       // Hz
  int N = 1;              // pre-log divisor of the device rate
  Eigen::VectorXd v;      // FBL scale per device
  double mu = 1.0;
  double Theta = 0.0;     // W
};

void embb_moments(const EstimationStats& stats, const Deployment& dep, const ScenarioConfig& config,
                  MomentSet& out);
void mmtc_moments(const EstimationStats& stats, const Deployment& dep, const ScenarioConfig& config,
                  MomentSet& out);
MomentSet compute_moments(const EstimationStats& stats, const Deployment& dep, const ScenarioConfig& config);

Eigen::VectorXd embb_sinr(const MomentSet& m, const PowerVector& theta);
Eigen::VectorXd mmtc_sinr(const MomentSet& m, const PowerVector& theta);

/// varrho_d(theta): device interference plus noise.
double device_interference(const MomentSet& m, const PowerVector& theta, int d);

double shannon_rate(double sinr);
/// Normal-approximation rate, clamped below at zero.
double fbl_rate(double sinr, double v);
/// Unclamped normal-approximation rate.
double fbl_rate_raw(double sinr, double v);
/// sqrt(2 x / (1 + x)).
double dispersion_penalty(double sinr);

/// Gaussian Q-function and its inverse (bisection, |error| < 1e-12).
double q_function(double x);
double q_inverse(double p);

/// (log2 e / sqrt(n)) Q^{-1}(per).
double fbl_scale(int n_symbols, double per);

EEParams ee_params(const ScenarioConfig& config);

/// EE_d = (psi / N) R_d / (mu q_d + Theta), bits per joule.
Eigen::VectorXd energy_efficiency(const PowerVector& theta, const Eigen::VectorXd& device_rates,
                                  const EEParams& params);

/// Device rates in bit/s/Hz for the requested regime (Shannon ignores v).
Eigen::VectorXd device_rates(const Eigen::VectorXd& rho, const EEParams& params, Regime regime);

}  // namespace cfmimo
