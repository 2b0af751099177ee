#pragma once

#include <Eigen/Dense>
#include <ostream>
#include <span>
#include <utility>
#include <vector>

#include "cfmimo/config.hpp"

namespace cfmimo {

struct Position {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

/// Geometry, large-scale fading and association of one drop.
struct Deployment {
  std::vector<Position> ap_pos;
  std::vector<Position> user_pos;
  std::vector<Position> device_pos;
  Eigen::MatrixXd alpha;   // M x K_u, linear LSF
  Eigen::MatrixXd beta;    // M x K_d, linear LSF
  Eigen::MatrixXi a_mask;  // M x K_u, 0/1
  Eigen::MatrixXi b_mask;  // M x K_d, 0/1
  std::vector<int> pilot_of_user;
  std::vector<int> pilot_of_device;
  int tau_p = 1;

  int num_aps() const { return static_cast<int>(alpha.rows()); }
  int num_users() const { return static_cast<int>(alpha.cols()); }
  int num_devices() const { return static_cast<int>(beta.cols()); }

  // |phi^H phi'|^2 for orthonormal pilots is 1 on a shared index, 0 otherwise.
  double user_user_overlap(int u, int k) const { return pilot_of_user[u] == pilot_of_user[k] ? 1.0 : 0.0; }
  double device_device_overlap(int d, int k) const {
    return pilot_of_device[d] == pilot_of_device[k] ? 1.0 : 0.0;
  }
  double user_device_overlap(int u, int d) const {
    return pilot_of_user[u] == pilot_of_device[d] ? 1.0 : 0.0;
  }
};

/// 3GPP UMi NLOS path loss in dB at a 3D distance in metres.
double path_loss_db(double distance_3d, double carrier_ghz);

double distance_3d(const Position& a, const Position& b);

/// Mask with ones at the `serving` largest entries; ties go to the lowest index.
std::vector<int> associate(std::span<const double> lsf_column, int serving);

/// Balanced random pilot reuse over ceil((K_u + K_d) / 2) (or tau_p) pilots.
std::pair<std::vector<int>, std::vector<int>> assign_pilots(const ScenarioConfig& config);

Deployment generate_deployment(const ScenarioConfig& config);

/// Fills LSF, masks and pilots from fixed positions (used by tests and generation).
Deployment deployment_from_positions(const ScenarioConfig& config, std::vector<Position> aps,
                                     std::vector<Position> users, std::vector<Position> devices);

/// Column-documented CSV dump of every AP-terminal link.
void write_deployment_csv(std::ostream& out, const Deployment& dep);

}  // namespace cfmimo
