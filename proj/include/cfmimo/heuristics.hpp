#pragma once

#include <string>
#include <vector>

#include "cfmimo/config.hpp"
#include "cfmimo/rates.hpp"
#include "cfmimo/scenario.hpp"

namespace cfmimo {

/// Full budgets for everyone.
PowerVector upc(const ScenarioConfig& config);

/// Generalized FPC: p_u = (P/c) (sum_m a alpha)^kappa, q_d = (Q/c) (sum_m b beta)^kappa,
/// with c the largest power-law term over users and devices.
PowerVector gfpc(const ScenarioConfig& config, const Deployment& dep, double kappa = -0.5);

/// Classical FPC: same normalization, using the strongest serving AP's LSF only.
PowerVector fpc(const ScenarioConfig& config, const Deployment& dep, double kappa = -0.5);

struct ConstraintSlack {
  std::string constraint;  // "C1" .. "C5"
  int terminal = 0;        // device index for C1, C3, C5; user index for C2, C4
  double slack = 0.0;      // relative; negative means violated
};

struct FeasibilityReport {
  bool feasible = false;
  std::vector<ConstraintSlack> slacks;
  std::vector<ConstraintSlack> violations;
  double worst_slack = 0.0;
};

/// Checks C1-C5 at theta. C3 uses the true rate of the regime (FBL: normal
/// approximation). Relative slacks: box distance over budget, rate excess over
/// target, SINR excess over S.
FeasibilityReport mark_feasible(const PowerVector& theta, const MomentSet& moments, const ScenarioConfig& config,
                                Regime regime, double tolerance = 1e-6);

}  // namespace cfmimo
