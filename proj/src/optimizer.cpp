#include "cfmimo/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "cfmimo/heuristics.hpp"
#include "json.hpp"

namespace cfmimo {

namespace {

constexpr double kLn2 = std::numbers::ln2;

}  // namespace

RateSurrogate::RateSurrogate(const MomentSet& moments, const Eigen::VectorXd& theta_bar, int device)
    : d_(device), q_index_(moments.num_users() + device) {
  const int Ku = moments.num_users();
  const int Kd = moments.num_devices();
  if (device < 0 || device >= Kd) throw OptimizerError("device index out of range");
  if (theta_bar.size() != Ku + Kd) throw OptimizerError("theta_bar has the wrong size");
  lambda_ = moments.lambda(d_);
  chi_ = moments.chi(d_);
  w_.resize(Ku + Kd);
  for (int u = 0; u < Ku; ++u) w_(u) = moments.eps_du(d_, u);
  for (int k = 0; k < Kd; ++k) w_(Ku + k) = k == d_ ? moments.lambda(d_) + moments.nu(d_) : moments.eps_dd(d_, k);

  q_bar_ = theta_bar(q_index_);
  if (!(q_bar_ > 0.0)) throw OptimizerError("surrogate needs a positive device power at the expansion point");
  y_bar_ = w_.dot(theta_bar) + chi_;
  const double varrho_bar = y_bar_ - lambda_ * q_bar_;
  if (!(varrho_bar > 0.0)) throw OptimizerError("surrogate needs positive interference at the expansion point");
  r_bar_ = lambda_ * q_bar_ / varrho_bar;
  d_bar_ = dispersion_penalty(r_bar_);
}

double RateSurrogate::sinr(const Eigen::VectorXd& theta) const {
  const double signal = lambda_ * theta(q_index_);
  return signal / (w_.dot(theta) + chi_ - signal);
}

double RateSurrogate::true_capacity(const Eigen::VectorXd& theta) const { return shannon_rate(sinr(theta)); }

double RateSurrogate::true_dispersion(const Eigen::VectorXd& theta) const { return dispersion_penalty(sinr(theta)); }

double RateSurrogate::capacity(const Eigen::VectorXd& theta) const {
  const double y = w_.dot(theta) + chi_;
  const double q = theta(q_index_);
  return std::log2(1.0 + r_bar_) + r_bar_ / kLn2 * (2.0 * std::sqrt(q / q_bar_) - y / y_bar_ - 1.0);
}

double RateSurrogate::dispersion(const Eigen::VectorXd& theta) const {
  const double y = w_.dot(theta) + chi_;
  return 0.5 * d_bar_ * (y_bar_ / y + theta(q_index_) / q_bar_);
}

SurrogateEval RateSurrogate::capacity_eval(const Eigen::VectorXd& theta) const {
  const int n = static_cast<int>(theta.size());
  const double q = theta(q_index_);
  const double scale = r_bar_ / kLn2;
  SurrogateEval out;
  out.value = capacity(theta);
  out.gradient = -scale / y_bar_ * w_;
  out.gradient(q_index_) += scale / std::sqrt(q * q_bar_);
  out.hessian = Eigen::MatrixXd::Zero(n, n);
  out.hessian(q_index_, q_index_) = -0.5 * scale / (q * std::sqrt(q * q_bar_));
  return out;
}

SurrogateEval RateSurrogate::dispersion_eval(const Eigen::VectorXd& theta) const {
  const double y = w_.dot(theta) + chi_;
  SurrogateEval out;
  out.value = dispersion(theta);
  out.gradient = -0.5 * d_bar_ * y_bar_ / (y * y) * w_;
  out.gradient(q_index_) += 0.5 * d_bar_ / q_bar_;
  out.hessian = (d_bar_ * y_bar_ / (y * y * y)) * (w_ * w_.transpose());
  return out;
}

SurrogateEval capacity_surrogate(const Eigen::VectorXd& theta, const Eigen::VectorXd& theta_bar,
                                 const MomentSet& moments, int device) {
  return RateSurrogate(moments, theta_bar, device).capacity_eval(theta);
}

SurrogateEval dispersion_surrogate(const Eigen::VectorXd& theta, const Eigen::VectorXd& theta_bar,
                                   const MomentSet& moments, int device) {
  return RateSurrogate(moments, theta_bar, device).dispersion_eval(theta);
}

double SinrFloor::slack(const Eigen::VectorXd& theta) const {
  return gain * theta(index) - threshold * (interference.dot(theta) + noise);
}

double fbl_sinr_threshold(double target, double v) {
  if (!(target > 0.0) || !(v >= 0.0)) throw OptimizerError("FBL threshold needs a positive target");
  const double k = v * kLn2 / std::numbers::sqrt2;
  double lo = 0.5 * (-1.0 + std::sqrt(1.0 + 4.0 * k * k));
  double hi = std::max(1.0, 2.0 * lo);
  while (fbl_rate_raw(hi, v) < target) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (fbl_rate_raw(mid, v) < target ? lo : hi) = mid;
  }
  return hi;
}

ConstraintSet build_constraints(const ScenarioConfig& config, const MomentSet& moments, Regime regime) {
  const int Ku = moments.num_users();
  const int Kd = moments.num_devices();
  const int K = Ku + Kd;
  const double psi = config.psi();

  ConstraintSet cs;
  cs.regime = regime;
  cs.K_u = Ku;
  cs.K_d = Kd;
  cs.theta_max.resize(K);
  cs.theta_max << Eigen::VectorXd::Constant(Ku, config.P_u_max), Eigen::VectorXd::Constant(Kd, config.Q_d_max);
  cs.embb_threshold = std::exp2(config.R_embb_min / psi) - 1.0;
  cs.mmtc_target = config.N / psi * config.R_mmtc_min;
  cs.mmtc_threshold = std::exp2(cs.mmtc_target) - 1.0;
  cs.sinr_floor = config.S_min;
  cs.v = ee_params(config).v;

  for (int u = 0; u < Ku; ++u) {
    SinrFloor f{"C4", u, u, moments.delta(u), Eigen::VectorXd::Zero(K), moments.xi(u), cs.embb_threshold};
    for (int k = 0; k < Ku; ++k) f.interference(k) = k == u ? moments.upsilon(u) : moments.kappa(u, k);
    for (int d = 0; d < Kd; ++d) f.interference(Ku + d) = moments.varkappa(u, d);
    cs.floors.push_back(std::move(f));
  }
  for (int d = 0; d < Kd; ++d) {
    Eigen::VectorXd interference(K);
    for (int u = 0; u < Ku; ++u) interference(u) = moments.eps_du(d, u);
    for (int k = 0; k < Kd; ++k) interference(Ku + k) = k == d ? moments.nu(d) : moments.eps_dd(d, k);
    const double c3 = regime == Regime::Shannon ? cs.mmtc_threshold : fbl_sinr_threshold(cs.mmtc_target, cs.v(d));
    cs.floors.push_back({"C3", d, Ku + d, moments.lambda(d), interference, moments.chi(d), c3});
    cs.floors.push_back({"C5", d, Ku + d, moments.lambda(d), interference, moments.chi(d), config.S_min});
  }
  return cs;
}

namespace {

// Floors as rows in x = theta / theta_max, scaled to unit largest magnitude.
struct NormalizedRow {
  Eigen::VectorXd a;
  double b = 0.0;
};

NormalizedRow normalize(const SinrFloor& f, const Eigen::VectorXd& theta_max) {
  NormalizedRow row;
  row.a = -f.threshold * f.interference.cwiseProduct(theta_max);
  row.a(f.index) += f.gain * theta_max(f.index);
  row.b = -f.threshold * f.noise;
  const double scale = std::max(row.a.cwiseAbs().maxCoeff(), std::abs(row.b));
  if (scale > 0.0) {
    row.a /= scale;
    row.b /= scale;
  }
  return row;
}

bool uses_floor_in_solver(const ConstraintSet& cs, const SinrFloor& f) {
  return !(cs.regime == Regime::FiniteBlocklength && f.constraint == "C3");
}

bool strictly_feasible(const ConstraintSet& cs, const Eigen::VectorXd& x) {
  if ((x.array() <= 0.0).any() || (x.array() >= 1.0).any()) return false;
  const Eigen::VectorXd theta = x.cwiseProduct(cs.theta_max);
  for (const auto& f : cs.floors) {
    const NormalizedRow row = normalize(f, cs.theta_max);
    if (!(row.a.dot(x) + row.b > 0.0) || !(f.slack(theta) > 0.0)) return false;
  }
  return true;
}

}  // namespace

std::optional<Eigen::VectorXd> find_feasible_point(const ConstraintSet& cs, const BarrierOptions& options) {
  const int K = static_cast<int>(cs.theta_max.size());
  RowProblem problem(K + 1);
  Eigen::VectorXd z0(K + 1);
  z0.head(K).setConstant(0.5);
  double lowest = 0.5;
  auto add = [&](Eigen::VectorXd a, double b) {
    lowest = std::min(lowest, a.dot(z0.head(K)) + b);
    Eigen::VectorXd row(K + 1);
    row << a, -1.0;
    problem.add_linear(row, b);
  };
  for (int i = 0; i < K; ++i) {
    add(Eigen::VectorXd::Unit(K, i), 0.0);
    add(-Eigen::VectorXd::Unit(K, i), 1.0);
  }
  for (const auto& f : cs.floors) {
    // An unreachable target (threshold overflowed to infinity) has no feasible point.
    if (!std::isfinite(f.threshold)) return std::nullopt;
    const NormalizedRow row = normalize(f, cs.theta_max);
    add(row.a, row.b);
  }
  z0(K) = lowest - 1.0;
  const BarrierResult res = barrier_maximize(problem, Eigen::VectorXd::Unit(K + 1, K), z0, options);
  if (!(res.z(K) > 1e-9)) return std::nullopt;
  Eigen::VectorXd x = res.z.head(K);
  if (!strictly_feasible(cs, x)) return std::nullopt;
  return x;
}

namespace {

struct InnerProblem {
  const ConstraintSet& cs;
  const MomentSet& moments;
  const EEParams& params;
  std::vector<RateSurrogate> surrogates;
  int K;

  InnerProblem(const ConstraintSet& c, const MomentSet& m, const EEParams& p, const Eigen::VectorXd& theta_bar)
      : cs(c), moments(m), params(p), K(static_cast<int>(c.theta_max.size())) {
    for (int d = 0; d < cs.K_d; ++d) surrogates.emplace_back(moments, theta_bar, d);
  }

  Eigen::VectorXd theta(const Eigen::VectorXd& x) const { return x.cwiseProduct(cs.theta_max); }

  // Surrogate rate in bit/s/Hz (before the psi / N prelog).
  double rate(int d, const Eigen::VectorXd& th) const {
    const auto& s = surrogates[d];
    return cs.regime == Regime::Shannon ? s.capacity(th) : s.capacity(th) - cs.v(d) * s.dispersion(th);
  }

  void rate_derivatives(int d, const Eigen::VectorXd& th, Eigen::VectorXd& grad, Eigen::MatrixXd& hess) const {
    const auto& s = surrogates[d];
    SurrogateEval c = s.capacity_eval(th);
    grad = c.gradient;
    hess = c.hessian;
    if (cs.regime == Regime::FiniteBlocklength) {
      SurrogateEval dd = s.dispersion_eval(th);
      grad -= cs.v(d) * dd.gradient;
      hess -= cs.v(d) * dd.hessian;
    }
    // Chain rule to x.
    grad = grad.cwiseProduct(cs.theta_max);
    hess = cs.theta_max.asDiagonal() * hess * cs.theta_max.asDiagonal();
  }

  double cost(int d, const Eigen::VectorXd& th) const { return params.mu * th(cs.K_u + d) + params.Theta; }

  double ratio(const Eigen::VectorXd& th) const {
    double out = std::numeric_limits<double>::infinity();
    for (int d = 0; d < cs.K_d; ++d) out = std::min(out, rate(d, th) / cost(d, th));
    return out;
  }
};

}  // namespace

InnerResult solve_inner(const Eigen::VectorXd& theta_bar, double vartheta, const ConstraintSet& cs,
                        const MomentSet& moments, const EEParams& params, const Eigen::VectorXd& start,
                        const BarrierOptions& options) {
  InnerProblem ip(cs, moments, params, theta_bar);
  const int K = ip.K;
  const int Ku = cs.K_u;
  RowProblem problem(K + 1);

  for (int i = 0; i < K; ++i) {
    Eigen::VectorXd lo = Eigen::VectorXd::Zero(K + 1), hi = Eigen::VectorXd::Zero(K + 1);
    lo(i) = 1.0;
    hi(i) = -1.0;
    problem.add_linear(lo, 0.0);
    problem.add_linear(hi, 1.0);
  }
  for (const auto& f : cs.floors) {
    if (!uses_floor_in_solver(cs, f)) continue;
    const NormalizedRow row = normalize(f, cs.theta_max);
    Eigen::VectorXd a(K + 1);
    a << row.a, 0.0;
    problem.add_linear(a, row.b);
  }

  // Epigraph rows: rate_d - vartheta cost_d - t > 0.
  for (int d = 0; d < cs.K_d; ++d) {
    RowProblem::ConcaveRow row;
    row.value = [&ip, d, vartheta, K](const Eigen::VectorXd& z) {
      const Eigen::VectorXd th = ip.theta(z.head(K));
      return ip.rate(d, th) - vartheta * ip.cost(d, th) - z(K);
    };
    row.derivatives = [&ip, d, vartheta, K, Ku](const Eigen::VectorXd& z, Eigen::VectorXd& g, Eigen::MatrixXd& h) {
      Eigen::VectorXd gx;
      Eigen::MatrixXd hx;
      ip.rate_derivatives(d, ip.theta(z.head(K)), gx, hx);
      gx(Ku + d) -= vartheta * ip.params.mu * ip.cs.theta_max(Ku + d);
      g.head(K) = gx;
      g(K) = -1.0;
      h.topLeftCorner(K, K) = hx;
    };
    problem.add_concave(std::move(row));
  }
  // FBL C3 through the surrogate rate.
  if (cs.regime == Regime::FiniteBlocklength) {
    for (int d = 0; d < cs.K_d; ++d) {
      RowProblem::ConcaveRow row;
      row.value = [&ip, &cs, d, K](const Eigen::VectorXd& z) {
        return ip.rate(d, ip.theta(z.head(K))) - cs.mmtc_target;
      };
      row.derivatives = [&ip, d, K](const Eigen::VectorXd& z, Eigen::VectorXd& g, Eigen::MatrixXd& h) {
        Eigen::VectorXd gx;
        Eigen::MatrixXd hx;
        ip.rate_derivatives(d, ip.theta(z.head(K)), gx, hx);
        g.head(K) = gx;
        h.topLeftCorner(K, K) = hx;
      };
      problem.add_concave(std::move(row));
    }
  }

  const Eigen::VectorXd th0 = ip.theta(start);
  double lowest = std::numeric_limits<double>::infinity();
  for (int d = 0; d < cs.K_d; ++d) lowest = std::min(lowest, ip.rate(d, th0) - vartheta * ip.cost(d, th0));
  Eigen::VectorXd z0(K + 1);
  z0 << start, lowest - std::max(1e-3, 0.1 * std::abs(lowest));

  const BarrierResult res = barrier_maximize(problem, Eigen::VectorXd::Unit(K + 1, K), z0, options);
  if (!res.converged) throw SolverError("barrier iteration cap reached in the subproblem");

  InnerResult out;
  out.theta = ip.theta(res.z.head(K));
  out.newton_steps = res.newton_steps;
  out.F = std::numeric_limits<double>::infinity();
  for (int d = 0; d < cs.K_d; ++d) out.F = std::min(out.F, ip.rate(d, out.theta) - vartheta * ip.cost(d, out.theta));
  return out;
}

double min_energy_efficiency(const ScenarioConfig& config, const MomentSet& moments, Regime regime,
                             const PowerVector& theta) {
  const EEParams params = ee_params(config);
  const Eigen::VectorXd rho = mmtc_sinr(moments, theta);
  const Eigen::VectorXd ee = energy_efficiency(theta, device_rates(rho, params, regime), params);
  return ee.size() ? ee.minCoeff() : 0.0;
}

void fill_terminal_metrics(const ScenarioConfig& config, const MomentSet& moments, Regime regime, SolveResult& out) {
  const EEParams params = ee_params(config);
  const double psi = config.psi();
  out.user_sinr = embb_sinr(moments, out.theta_star);
  out.user_rate = psi * out.user_sinr.unaryExpr([](double g) { return shannon_rate(g); });
  out.device_sinr = mmtc_sinr(moments, out.theta_star);
  const Eigen::VectorXd r = device_rates(out.device_sinr, params, regime);
  out.device_rate = psi / config.N * r;
  out.device_ee = energy_efficiency(out.theta_star, r, params);
}

namespace {

double max_violation(const FeasibilityReport& report) { return std::max(0.0, -report.worst_slack); }

}  // namespace

SolveResult sequential_fp(const ScenarioConfig& config, const Deployment& dep, const MomentSet& moments,
                          Regime regime, const SolveOptions& options) {
  const int Ku = moments.num_users();
  const ConstraintSet cs = build_constraints(config, moments, regime);
  const EEParams params = ee_params(config);
  const double prelog = config.psi() / config.N;

  SolveResult out;
  out.status = "infeasible";
  out.theta_star = PowerVector::unstack(Eigen::VectorXd::Zero(cs.theta_max.size()), Ku);

  // Start: best strictly feasible benchmark policy, with user and device
  // powers scaled down separately on a log grid.
  std::optional<Eigen::VectorXd> x_start;
  double best = -1.0;
  const std::pair<const char*, PowerVector> candidates[] = {
      {"gfpc", gfpc(config, dep)}, {"upc", upc(config)}, {"fpc", fpc(config, dep)}};
  const int steps = options.start_decades * options.start_steps_per_decade;
  for (const auto& [name, pv] : candidates) {
    for (int ku = 0; ku <= steps; ++ku) {
      for (int kd = 0; kd <= steps; ++kd) {
        const PowerVector scaled{pv.p * std::pow(10.0, -double(ku) / options.start_steps_per_decade),
                                 pv.q * std::pow(10.0, -double(kd) / options.start_steps_per_decade)};
        const Eigen::VectorXd x = scaled.stacked().cwiseQuotient(cs.theta_max).cwiseMin(1.0 - 1e-9);
        if (!strictly_feasible(cs, x)) continue;
        const double ee =
            min_energy_efficiency(config, moments, regime, PowerVector::unstack(x.cwiseProduct(cs.theta_max), Ku));
        if (ee > best) {
          best = ee;
          x_start = x;
          out.start = name;
        }
      }
    }
  }
  if (!x_start) {
    x_start = find_feasible_point(cs, options.barrier);
    out.start = "phase1";
  }
  if (!x_start) return out;

  Eigen::VectorXd theta_bar = x_start->cwiseProduct(cs.theta_max);
  double objective = min_energy_efficiency(config, moments, regime, PowerVector::unstack(theta_bar, Ku));
  out.status = "outer_cap";

  for (int outer = 0; outer < options.max_outer; ++outer) {
    InnerProblem ip(cs, moments, params, theta_bar);
    const double vartheta0 = ip.ratio(theta_bar);
    Eigen::VectorXd start = theta_bar.cwiseQuotient(cs.theta_max);
    int newton = 0;
    auto solve = [&](double vartheta) {
      InnerResult r = solve_inner(theta_bar, vartheta, cs, moments, params, start, options.barrier);
      newton += r.newton_steps;
      start = r.theta.cwiseQuotient(cs.theta_max);
      return std::pair<Eigen::VectorXd, double>{r.theta, r.F};
    };
    auto ratio = [&](const Eigen::VectorXd& th) { return ip.ratio(th); };
    auto dk = dinkelbach<Eigen::VectorXd>(solve, ratio, vartheta0, options.F_tol, options.max_dinkelbach);

    ++out.outer_iters;
    out.inner_iters += dk.iterations;
    out.subproblem_iters += newton;
    out.F_traces.push_back(dk.F_trace);

    const Eigen::VectorXd theta = dk.point;
    const double next = min_energy_efficiency(config, moments, regime, PowerVector::unstack(theta, Ku));
    const bool ascent = next >= objective;
    if (ascent) objective = next;
    const Eigen::VectorXd accepted = ascent ? theta : theta_bar;
    out.trace.push_back(objective);
    const FeasibilityReport report = mark_feasible(PowerVector::unstack(accepted, Ku), moments, config, regime);
    out.rows.push_back({outer, dk.vartheta * prelog, objective, max_violation(report)});

    if (!ascent) {
      out.status = "stalled";
      break;
    }
    // Per-component relative change: the watt norm is dominated by the largest
    // power and declares convergence while small powers are still moving.
    const double change = (theta - theta_bar).cwiseQuotient(theta).cwiseAbs2().maxCoeff();
    theta_bar = theta;
    if (change <= options.theta_tol) {
      out.status = "converged";
      break;
    }
  }

  out.theta_star = PowerVector::unstack(theta_bar, Ku);
  const FeasibilityReport report = mark_feasible(out.theta_star, moments, config, regime);
  out.feasible = report.feasible;
  if (!out.feasible) out.status = "infeasible";
  out.objective = out.feasible ? objective : 0.0;
  fill_terminal_metrics(config, moments, regime, out);
  return out;
}

std::string trace_jsonl(const SolveResult& result, long long instance) {
  std::ostringstream os;
  for (const auto& row : result.rows) {
    nlohmann::json j = {{"instance", instance},
                        {"iteration", row.iteration},
                        {"vartheta", row.vartheta},
                        {"objective", row.objective},
                        {"max_violation", row.max_violation}};
    os << j.dump() << '\n';
  }
  return os.str();
}

}  // namespace cfmimo
