#pragma once

#include <cmath>

#include "cfmimo/channel_stats.hpp"
#include "cfmimo/config.hpp"
#include "cfmimo/rates.hpp"
#include "cfmimo/scenario.hpp"

namespace testing {

// The small validation drop: 3 APs, 2 antennas, 2 users, 3 devices, N = 7.
inline cfmimo::ScenarioConfig small_config() {
  cfmimo::ScenarioConfig c;
  c.M = 3;
  c.L = 2;
  c.K_u = 2;
  c.K_d = 3;
  c.N = 7;
  c.M_s = 2;
  return c;
}

// Desk-scale solver instances.
inline cfmimo::ScenarioConfig desk_config() {
  cfmimo::ScenarioConfig c;
  c.K_u = 1;
  c.K_d = 2;
  return c;
}

inline cfmimo::MomentSet moments_of(const cfmimo::Deployment& dep, const cfmimo::ScenarioConfig& c) {
  return cfmimo::compute_moments(cfmimo::compute_stats(dep, c), dep, c);
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

}  // namespace testing
