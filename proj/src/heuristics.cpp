#include "cfmimo/heuristics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cfmimo {

PowerVector upc(const ScenarioConfig& config) {
  return {Eigen::VectorXd::Constant(config.K_u, config.P_u_max), Eigen::VectorXd::Constant(config.K_d, config.Q_d_max)};
}

namespace {

PowerVector power_law(const ScenarioConfig& config, const Eigen::VectorXd& user_gain,
                      const Eigen::VectorXd& device_gain, double kappa) {
  if (kappa < -1.0 || kappa > 1.0) throw ConfigError("kappa must lie in [-1, 1]");
  auto check = [](const Eigen::VectorXd& g) {
    for (Eigen::Index i = 0; i < g.size(); ++i) {
      if (!(g(i) > 0.0)) throw ConfigError("terminal without associated LSF; cannot apply power law");
    }
  };
  check(user_gain);
  check(device_gain);
  const Eigen::VectorXd pu = user_gain.array().pow(kappa);
  const Eigen::VectorXd qd = device_gain.array().pow(kappa);
  double c = 0.0;
  if (pu.size()) c = std::max(c, pu.maxCoeff());
  if (qd.size()) c = std::max(c, qd.maxCoeff());
  return {config.P_u_max / c * pu, config.Q_d_max / c * qd};
}

}  // namespace

PowerVector gfpc(const ScenarioConfig& config, const Deployment& dep, double kappa) {
  const Eigen::VectorXd users = (dep.a_mask.cast<double>().array() * dep.alpha.array()).colwise().sum();
  const Eigen::VectorXd devices = (dep.b_mask.cast<double>().array() * dep.beta.array()).colwise().sum();
  return power_law(config, users, devices, kappa);
}

PowerVector fpc(const ScenarioConfig& config, const Deployment& dep, double kappa) {
  const Eigen::VectorXd users = (dep.a_mask.cast<double>().array() * dep.alpha.array()).colwise().maxCoeff();
  const Eigen::VectorXd devices = (dep.b_mask.cast<double>().array() * dep.beta.array()).colwise().maxCoeff();
  return power_law(config, users, devices, kappa);
}

FeasibilityReport mark_feasible(const PowerVector& theta, const MomentSet& moments, const ScenarioConfig& config,
                                Regime regime, double tolerance) {
  FeasibilityReport out;
  auto add = [&](const char* name, int k, double slack) {
    out.slacks.push_back({name, k, slack});
    if (slack < -tolerance) out.violations.push_back({name, k, slack});
  };
  const double psi = config.psi();
  const double v = fbl_scale(config.n_d, config.PER_d);
  const Eigen::VectorXd gamma = embb_sinr(moments, theta);
  const Eigen::VectorXd rho = mmtc_sinr(moments, theta);

  for (int d = 0; d < config.K_d; ++d)
    add("C1", d, std::min(theta.q(d), config.Q_d_max - theta.q(d)) / config.Q_d_max);
  for (int u = 0; u < config.K_u; ++u)
    add("C2", u, std::min(theta.p(u), config.P_u_max - theta.p(u)) / config.P_u_max);
  for (int d = 0; d < config.K_d; ++d) {
    const double rate = regime == Regime::Shannon ? shannon_rate(rho(d)) : fbl_rate(rho(d), v);
    add("C3", d, (psi / config.N * rate - config.R_mmtc_min) / config.R_mmtc_min);
  }
  for (int u = 0; u < config.K_u; ++u)
    add("C4", u, (psi * shannon_rate(gamma(u)) - config.R_embb_min) / config.R_embb_min);
  for (int d = 0; d < config.K_d; ++d) add("C5", d, (rho(d) - config.S_min) / config.S_min);

  out.feasible = out.violations.empty();
  out.worst_slack = std::numeric_limits<double>::infinity();
  for (const auto& s : out.slacks) out.worst_slack = std::min(out.worst_slack, s.slack);
  return out;
}

}  // namespace cfmimo
