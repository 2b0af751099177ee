#pragma once

#include <Eigen/Dense>
#include <vector>

#include "cfmimo/config.hpp"
#include "cfmimo/scenario.hpp"

namespace cfmimo {

/// MMSE estimation statistics under uncorrelated fading (R = alpha I, Q = beta I).
///
/// The per-link MMSE matrix is A = (alpha / c) I; `a_user` stores the
/// dimensionless shrinkage eta * alpha / c in (0, 1]. Device quantities follow
/// the same pattern with beta_hat = beta / beta_bar.
struct EstimationStats {
  Eigen::MatrixXd c_user;     // M x K_u, LS observation variance per antenna
  Eigen::MatrixXd a_user;     // M x K_u, eta_u alpha / c
  Eigen::MatrixXd beta_hat;   // M x K_d, beta / beta_bar
  Eigen::MatrixXd beta_bar;   // M x K_d, LS observation variance for devices
  std::vector<Eigen::MatrixXd> beta_tilde;   // [m](d, k) = zeta beta_{m,k} |pi_k^H pi_d|^2
  std::vector<Eigen::MatrixXd> alpha_tilde;  // [m](d, u) = eta alpha_{m,u} |phi_u^H pi_d|^2
  double sigma2 = 0.0;
};

EstimationStats compute_stats(const Deployment& dep, const ScenarioConfig& config);

}  // namespace cfmimo
