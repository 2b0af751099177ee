#include "cfmimo/rates.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cfmimo {

Eigen::VectorXd PowerVector::stacked() const {
  Eigen::VectorXd out(p.size() + q.size());
  out << p, q;
  return out;
}

PowerVector PowerVector::unstack(const Eigen::VectorXd& theta, int num_users) {
  PowerVector out;
  out.p = theta.head(num_users);
  out.q = theta.tail(theta.size() - num_users);
  return out;
}

void embb_moments(const EstimationStats& stats, const Deployment& dep, const ScenarioConfig& config,
                  MomentSet& out) {
  const int M = dep.num_aps();
  const int Ku = dep.num_users();
  const int Kd = dep.num_devices();
  const double L = config.L;
  const double eta = config.eta_u;
  const double zeta = config.zeta_d;

  out.delta = Eigen::VectorXd::Zero(Ku);
  out.upsilon = Eigen::VectorXd::Zero(Ku);
  out.xi = Eigen::VectorXd::Zero(Ku);
  out.kappa = Eigen::MatrixXd::Zero(Ku, Ku);
  out.varkappa = Eigen::MatrixXd::Zero(Ku, Kd);

  // With R = alpha I and A = (alpha / c) I:
  //   tr(A R) = L alpha^2 / c, tr(A R R_k) = L alpha^2 alpha_k / c, tr(A R_k) = L alpha alpha_k / c.
  for (int u = 0; u < Ku; ++u) {
    double coherent = 0.0;
    for (int m = 0; m < M; ++m) {
      if (!dep.a_mask(m, u)) continue;
      const double a = dep.alpha(m, u);
      const double c = stats.c_user(m, u);
      coherent += L * a * a / c;
      out.upsilon(u) += eta * L * a * a * a / c;
      out.xi(u) += eta * stats.sigma2 * L * a * a / c;
    }
    out.delta(u) = eta * eta * coherent * coherent;

    for (int k = 0; k < Ku; ++k) {
      if (k == u) continue;
      double diffuse = 0.0, mean = 0.0;
      for (int m = 0; m < M; ++m) {
        if (!dep.a_mask(m, u)) continue;
        const double a = dep.alpha(m, u);
        const double c = stats.c_user(m, u);
        diffuse += L * a * a * dep.alpha(m, k) / c;
        mean += L * a * dep.alpha(m, k) / c;
      }
      out.kappa(u, k) = eta * diffuse + eta * eta * dep.user_user_overlap(u, k) * mean * mean;
    }
    for (int d = 0; d < Kd; ++d) {
      double diffuse = 0.0, mean = 0.0;
      for (int m = 0; m < M; ++m) {
        if (!dep.a_mask(m, u)) continue;
        const double a = dep.alpha(m, u);
        const double c = stats.c_user(m, u);
        diffuse += L * a * a * dep.beta(m, d) / c;
        mean += L * a * dep.beta(m, d) / c;
      }
      out.varkappa(u, d) = eta * diffuse + eta * zeta * dep.user_device_overlap(u, d) * mean * mean;
    }
  }
}

void mmtc_moments(const EstimationStats& stats, const Deployment& dep, const ScenarioConfig& config,
                  MomentSet& out) {
  const int M = dep.num_aps();
  const int Ku = dep.num_users();
  const int Kd = dep.num_devices();
  const double L = config.L;
  const double N = config.N;
  const double zeta = config.zeta_d;
  const double eta = config.eta_u;
  const double sigma2 = stats.sigma2;

  out.lambda = Eigen::VectorXd::Zero(Kd);
  out.nu = Eigen::VectorXd::Zero(Kd);
  out.chi = Eigen::VectorXd::Zero(Kd);
  out.eps_dd = Eigen::MatrixXd::Zero(Kd, Kd);
  out.eps_du = Eigen::MatrixXd::Zero(Kd, Ku);

  for (int d = 0; d < Kd; ++d) {
    double signal = 0.0;
    for (int m = 0; m < M; ++m) {
      if (!dep.b_mask(m, d)) continue;
      const double bh = stats.beta_hat(m, d);
      const double bh2 = bh * bh;
      const double bh4 = bh2 * bh2;
      const double bb = stats.beta_bar(m, d);
      const double bt = stats.beta_tilde[m](d, d);

      signal += bh2 * bt * (bb + L * bt);
      out.nu(d) += bh4 * bt * bt *
                   ((L + 1.0) * ((L + 1.0) * bt * (L * bt + 4.0 * bb) + 2.0 * bb * bb) -
                    L * (bb + L * bt) * (bb + L * bt));
      out.chi(d) += bh4 * bt * bb * sigma2 * ((L + 1.0) * bt + bb);
    }
    out.lambda(d) = N * N * L * L * signal * signal;
    out.nu(d) *= N * L;
    out.chi(d) *= N * L * (L + 1.0) * zeta;

    // Shared by the device and user interference terms.
    auto diffuse_term = [&](int m, double lsf, double cross) {
      const double bh = stats.beta_hat(m, d);
      const double bh4 = bh * bh * bh * bh;
      const double bb = stats.beta_bar(m, d);
      const double bt = stats.beta_tilde[m](d, d);
      return bh4 * bt * lsf *
             ((L + 1.0) * bb * bb + (L + 1.0) * (L + 1.0) * bb * (bt + cross) + L * (2.0 * L + 1.0) * bt * cross);
    };
    auto coherent_term = [&](int m, double lsf) {
      const double bh = stats.beta_hat(m, d);
      return bh * bh * stats.beta_tilde[m](d, d) * lsf;
    };

    for (int k = 0; k < Kd; ++k) {
      if (k == d) continue;
      double diffuse = 0.0, mean = 0.0;
      for (int m = 0; m < M; ++m) {
        if (!dep.b_mask(m, d)) continue;
        diffuse += diffuse_term(m, dep.beta(m, k), stats.beta_tilde[m](d, k));
        mean += coherent_term(m, dep.beta(m, k));
      }
      out.eps_dd(d, k) = N * L * zeta * diffuse +
                         L * L * L * L * zeta * zeta * dep.device_device_overlap(d, k) * mean * mean;
    }
    for (int u = 0; u < Ku; ++u) {
      double diffuse = 0.0, mean = 0.0;
      for (int m = 0; m < M; ++m) {
        if (!dep.b_mask(m, d)) continue;
        diffuse += diffuse_term(m, dep.alpha(m, u), stats.alpha_tilde[m](d, u));
        mean += coherent_term(m, dep.alpha(m, u));
      }
      out.eps_du(d, u) = N * L * zeta * diffuse +
                         N * L * L * L * L * zeta * eta * dep.user_device_overlap(u, d) * mean * mean;
    }
  }
}

MomentSet compute_moments(const EstimationStats& stats, const Deployment& dep, const ScenarioConfig& config) {
  MomentSet out;
  embb_moments(stats, dep, config, out);
  mmtc_moments(stats, dep, config, out);
  return out;
}

Eigen::VectorXd embb_sinr(const MomentSet& m, const PowerVector& theta) {
  const int Ku = m.num_users();
  Eigen::VectorXd out(Ku);
  for (int u = 0; u < Ku; ++u) {
    double den = m.upsilon(u) * theta.p(u) + m.xi(u);
    for (int k = 0; k < Ku; ++k) {
      if (k != u) den += m.kappa(u, k) * theta.p(k);
    }
    den += m.varkappa.row(u).dot(theta.q);
    out(u) = m.delta(u) * theta.p(u) / den;
  }
  return out;
}

double device_interference(const MomentSet& m, const PowerVector& theta, int d) {
  double den = m.nu(d) * theta.q(d) + m.chi(d);
  for (int k = 0; k < m.num_devices(); ++k) {
    if (k != d) den += m.eps_dd(d, k) * theta.q(k);
  }
  den += m.eps_du.row(d).dot(theta.p);
  return den;
}

Eigen::VectorXd mmtc_sinr(const MomentSet& m, const PowerVector& theta) {
  const int Kd = m.num_devices();
  Eigen::VectorXd out(Kd);
  for (int d = 0; d < Kd; ++d) out(d) = m.lambda(d) * theta.q(d) / device_interference(m, theta, d);
  return out;
}

double shannon_rate(double sinr) { return std::log2(1.0 + sinr); }

double dispersion_penalty(double sinr) { return std::sqrt(2.0 * sinr / (1.0 + sinr)); }

double fbl_rate_raw(double sinr, double v) { return shannon_rate(sinr) - v * dispersion_penalty(sinr); }

double fbl_rate(double sinr, double v) { return std::max(0.0, fbl_rate_raw(sinr, v)); }

double q_function(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double q_inverse(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("q_inverse: probability outside (0, 1)");
  // Q is strictly decreasing; bracket then bisect.
  double lo = -40.0, hi = 40.0;
  while (hi - lo > 1e-13) {
    const double mid = 0.5 * (lo + hi);
    if (q_function(mid) > p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double fbl_scale(int n_symbols, double per) {
  return std::numbers::log2e / std::sqrt(static_cast<double>(n_symbols)) * q_inverse(per);
}

EEParams ee_params(const ScenarioConfig& config) {
  EEParams out;
  out.psi = config.psi();
  out.N = config.N;
  out.v = Eigen::VectorXd::Constant(config.K_d, fbl_scale(config.n_d, config.PER_d));
  out.mu = config.mu_d;
  out.Theta = config.Theta_d;
  return out;
}

Eigen::VectorXd energy_efficiency(const PowerVector& theta, const Eigen::VectorXd& device_rates,
                                  const EEParams& params) {
  const double prelog = params.psi / params.N;
  Eigen::VectorXd out(device_rates.size());
  for (Eigen::Index d = 0; d < device_rates.size(); ++d) {
    out(d) = prelog * device_rates(d) / (params.mu * theta.q(d) + params.Theta);
  }
  return out;
}

Eigen::VectorXd device_rates(const Eigen::VectorXd& rho, const EEParams& params, Regime regime) {
  Eigen::VectorXd out(rho.size());
  for (Eigen::Index d = 0; d < rho.size(); ++d) {
    out(d) = regime == Regime::Shannon ? shannon_rate(rho(d)) : fbl_rate(rho(d), params.v(d));
  }
  return out;
}

}  // namespace cfmimo
