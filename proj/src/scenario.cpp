#include "cfmimo/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace cfmimo {

double path_loss_db(double distance_3d, double carrier_ghz) {
  return 36.7 * std::log10(distance_3d) + 22.7 + 26.0 * std::log10(carrier_ghz);
}

double distance_3d(const Position& a, const Position& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

std::vector<int> associate(std::span<const double> lsf_column, int serving) {
  const int m = static_cast<int>(lsf_column.size());
  if (serving > m) throw ConfigError("M_s exceeds the number of APs");
  if (serving < 0) throw ConfigError("M_s must be non-negative");
  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return lsf_column[a] > lsf_column[b]; });
  std::vector<int> mask(m, 0);
  for (int i = 0; i < serving; ++i) mask[order[i]] = 1;
  return mask;
}

std::pair<std::vector<int>, std::vector<int>> assign_pilots(const ScenarioConfig& config) {
  const int total = config.K_u + config.K_d;
  const int tau_p = config.pilot_length();
  std::vector<int> slots(total);
  std::iota(slots.begin(), slots.end(), 0);
  std::mt19937_64 rng(stream_seed(config.seed, 1));
  std::shuffle(slots.begin(), slots.end(), rng);
  std::vector<int> users(config.K_u), devices(config.K_d);
  for (int t = 0; t < total; ++t) {
    const int pilot = slots[t] % tau_p;
    if (t < config.K_u) {
      users[t] = pilot;
    } else {
      devices[t - config.K_u] = pilot;
    }
  }
  return {users, devices};
}

namespace {

Eigen::MatrixXd lsf_matrix(const ScenarioConfig& config, const std::vector<Position>& aps,
                           const std::vector<Position>& terms) {
  Eigen::MatrixXd out(aps.size(), terms.size());
  for (std::size_t m = 0; m < aps.size(); ++m) {
    for (std::size_t k = 0; k < terms.size(); ++k) {
      out(m, k) = std::pow(10.0, -path_loss_db(distance_3d(aps[m], terms[k]), config.carrier_ghz) / 10.0);
    }
  }
  return out;
}

Eigen::MatrixXi association(const Eigen::MatrixXd& lsf, int serving) {
  Eigen::MatrixXi mask(lsf.rows(), lsf.cols());
  for (Eigen::Index k = 0; k < lsf.cols(); ++k) {
    const Eigen::VectorXd column = lsf.col(k);
    const auto col = associate(std::span<const double>(column.data(), column.size()), serving);
    for (Eigen::Index m = 0; m < lsf.rows(); ++m) mask(m, k) = col[m];
  }
  return mask;
}

}  // namespace

Deployment deployment_from_positions(const ScenarioConfig& config, std::vector<Position> aps,
                                     std::vector<Position> users, std::vector<Position> devices) {
  Deployment dep;
  dep.alpha = lsf_matrix(config, aps, users);
  dep.beta = lsf_matrix(config, aps, devices);
  dep.ap_pos = std::move(aps);
  dep.user_pos = std::move(users);
  dep.device_pos = std::move(devices);
  dep.a_mask = association(dep.alpha, config.M_s);
  dep.b_mask = association(dep.beta, config.M_s);
  std::tie(dep.pilot_of_user, dep.pilot_of_device) = assign_pilots(config);
  dep.tau_p = config.pilot_length();
  return dep;
}

Deployment generate_deployment(const ScenarioConfig& config) {
  config.validate();
  std::mt19937_64 rng(stream_seed(config.seed, 0));
  std::uniform_real_distribution<double> coord(0.0, config.area_side);
  auto place = [&](int count, double height) {
    std::vector<Position> out(count);
    for (auto& p : out) {
      p.x = coord(rng);
      p.y = coord(rng);
      p.z = height;
    }
    return out;
  };
  auto aps = place(config.M, config.h_ap);
  auto users = place(config.K_u, config.h_term);
  auto devices = place(config.K_d, config.h_term);
  Deployment dep = deployment_from_positions(config, std::move(aps), std::move(users), std::move(devices));
  if (config.shadowing) {
    std::mt19937_64 shadow_rng(stream_seed(config.seed, 2));
    std::normal_distribution<double> shadow(0.0, config.shadowing_std_db);
    for (Eigen::Index k = 0; k < dep.alpha.size(); ++k) dep.alpha.data()[k] *= std::pow(10.0, shadow(shadow_rng) / 10.0);
    for (Eigen::Index k = 0; k < dep.beta.size(); ++k) dep.beta.data()[k] *= std::pow(10.0, shadow(shadow_rng) / 10.0);
    dep.a_mask = association(dep.alpha, config.M_s);
    dep.b_mask = association(dep.beta, config.M_s);
  }
  return dep;
}

void write_deployment_csv(std::ostream& out, const Deployment& dep) {
  // kind: user|device; index: terminal index; ap: AP index;
  // x,y,z: terminal position (m); lsf: linear large-scale fading; served: 0/1; pilot: pilot index
  out << "kind,index,ap,x,y,z,lsf,served,pilot\n";
  out.precision(17);
  auto emit = [&](const char* kind, const std::vector<Position>& pos, const Eigen::MatrixXd& lsf,
                  const Eigen::MatrixXi& mask, const std::vector<int>& pilots) {
    for (Eigen::Index k = 0; k < lsf.cols(); ++k) {
      for (Eigen::Index m = 0; m < lsf.rows(); ++m) {
        out << kind << ',' << k << ',' << m << ',' << pos[k].x << ',' << pos[k].y << ',' << pos[k].z << ','
            << lsf(m, k) << ',' << mask(m, k) << ',' << pilots[k] << '\n';
      }
    }
  };
  emit("user", dep.user_pos, dep.alpha, dep.a_mask, dep.pilot_of_user);
  emit("device", dep.device_pos, dep.beta, dep.b_mask, dep.pilot_of_device);
}

}  // namespace cfmimo
