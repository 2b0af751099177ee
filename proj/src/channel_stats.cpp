#include "cfmimo/channel_stats.hpp"

namespace cfmimo {

EstimationStats compute_stats(const Deployment& dep, const ScenarioConfig& config) {
  const int M = dep.num_aps();
  const int Ku = dep.num_users();
  const int Kd = dep.num_devices();
  const double eta = config.eta_u;
  const double zeta = config.zeta_d;

  EstimationStats s;
  s.sigma2 = config.noise_power();
  s.c_user.resize(M, Ku);
  s.a_user.resize(M, Ku);
  s.beta_hat.resize(M, Kd);
  s.beta_bar.resize(M, Kd);
  s.beta_tilde.assign(M, Eigen::MatrixXd::Zero(Kd, Kd));
  s.alpha_tilde.assign(M, Eigen::MatrixXd::Zero(Kd, Ku));

  for (int m = 0; m < M; ++m) {
    for (int u = 0; u < Ku; ++u) {
      double c = s.sigma2;
      for (int k = 0; k < Ku; ++k) c += eta * dep.alpha(m, k) * dep.user_user_overlap(k, u);
      for (int d = 0; d < Kd; ++d) c += zeta * dep.beta(m, d) * dep.user_device_overlap(u, d);
      s.c_user(m, u) = c;
      s.a_user(m, u) = eta * dep.alpha(m, u) / c;
    }
    for (int d = 0; d < Kd; ++d) {
      double bar = s.sigma2;
      for (int k = 0; k < Kd; ++k) {
        const double tilde = zeta * dep.beta(m, k) * dep.device_device_overlap(k, d);
        s.beta_tilde[m](d, k) = tilde;
        bar += tilde;
      }
      for (int u = 0; u < Ku; ++u) {
        const double tilde = eta * dep.alpha(m, u) * dep.user_device_overlap(u, d);
        s.alpha_tilde[m](d, u) = tilde;
        bar += tilde;
      }
      s.beta_bar(m, d) = bar;
      s.beta_hat(m, d) = dep.beta(m, d) / bar;
    }
  }
  return s;
}

}  // namespace cfmimo
