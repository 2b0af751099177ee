#include "doctest.h"

#include <random>
#include <sstream>

#include "cfmimo/barrier.hpp"
#include "cfmimo/heuristics.hpp"
#include "cfmimo/optimizer.hpp"
#include "support.hpp"

using namespace cfmimo;

TEST_CASE("barrier: linear objective over a disc") {
  RowProblem p(2);
  p.add_concave({[](const Eigen::VectorXd& z) { return 1.0 - z.squaredNorm(); },
                 [](const Eigen::VectorXd& z, Eigen::VectorXd& g, Eigen::MatrixXd& h) {
                   g = -2.0 * z;
                   h = -2.0 * Eigen::MatrixXd::Identity(2, 2);
                 }});
  const Eigen::Vector2d c(1.0, 1.0);
  const BarrierResult r = barrier_maximize(p, c, Eigen::Vector2d::Zero());
  CHECK(r.converged);
  CHECK(r.z(0) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-6));
  CHECK(r.z(1) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-6));
  CHECK(r.gap <= 1e-7);
}

TEST_CASE("barrier: box LP") {
  RowProblem p(2);
  p.add_linear(Eigen::Vector2d(1, 0), 0.0);   // x > 0
  p.add_linear(Eigen::Vector2d(0, 1), 0.0);   // y > 0
  p.add_linear(Eigen::Vector2d(-1, -2), 4.0); // x + 2y < 4
  p.add_linear(Eigen::Vector2d(-1, 0), 3.0);  // x < 3
  const BarrierResult r = barrier_maximize(p, Eigen::Vector2d(1.0, 1.0), Eigen::Vector2d(0.5, 0.5));
  CHECK(r.converged);
  CHECK(r.z(0) == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(r.z(1) == doctest::Approx(0.5).epsilon(1e-6));
  CHECK_THROWS_AS(barrier_maximize(p, Eigen::Vector2d(1.0, 1.0), Eigen::Vector2d(5.0, 0.5)), SolverError);
}

TEST_CASE("Dinkelbach on a linear-over-affine toy") {
  // max (2x + 1) / (x + 3) over [0, 1]: increasing, optimum 3/4 at x = 1.
  auto solve = [](double t) {
    const double x = 2.0 - t > 0.0 ? 1.0 : 0.0;
    return std::pair<double, double>{x, 2.0 * x + 1.0 - t * (x + 3.0)};
  };
  auto ratio = [](double x) { return (2.0 * x + 1.0) / (x + 3.0); };
  const auto r = dinkelbach<double>(solve, ratio, 0.0, 1e-12);
  CHECK(r.converged);
  CHECK(std::abs(r.vartheta - 0.75) < 1e-8);
  CHECK(r.vartheta == ratio(r.point));
  for (std::size_t i = 1; i < r.F_trace.size(); ++i) CHECK(r.F_trace[i] < r.F_trace[i - 1]);

  // Concave-over-affine: max sqrt(x) / (x + 1) over [0, 4], optimum 1/2 at x = 1.
  auto solve2 = [](double t) {
    // argmax sqrt(x) - t (x + 1): x = 1 / (4 t^2), clipped to the box.
    const double x = t > 0.0 ? std::min(4.0, 1.0 / (4.0 * t * t)) : 4.0;
    return std::pair<double, double>{x, std::sqrt(x) - t * (x + 1.0)};
  };
  auto ratio2 = [](double x) { return std::sqrt(x) / (x + 1.0); };
  const auto r2 = dinkelbach<double>(solve2, ratio2, 0.0, 1e-14);
  CHECK(std::abs(r2.vartheta - 0.5) < 1e-8);
  for (std::size_t i = 1; i < r2.F_trace.size(); ++i) CHECK(r2.F_trace[i] < r2.F_trace[i - 1]);
}

TEST_CASE("FBL SINR threshold") {
  const double v = fbl_scale(100, 1e-3);
  for (double target : {0.05, 0.26, 1.0, 3.0}) {
    const double rho = fbl_sinr_threshold(target, v);
    CHECK(fbl_rate_raw(rho, v) == doctest::Approx(target).epsilon(1e-10));
    CHECK(fbl_rate_raw(rho * 1.001, v) > target);
  }
  CHECK_THROWS_AS(fbl_sinr_threshold(0.0, v), OptimizerError);
}

TEST_CASE("constraint layout") {
  const ScenarioConfig c;
  const Deployment d = generate_deployment(c);
  const MomentSet m = testing::moments_of(d, c);
  const ConstraintSet cs = build_constraints(c, m, Regime::FiniteBlocklength);
  REQUIRE(cs.floors.size() == std::size_t(c.K_u + 2 * c.K_d));
  CHECK(cs.floors[0].constraint == "C4");
  CHECK(cs.floors[c.K_u].constraint == "C3");
  CHECK(cs.floors[c.K_u + 1].constraint == "C5");
  CHECK(cs.embb_threshold == doctest::Approx(std::exp2(c.R_embb_min / c.psi()) - 1.0));
  // The FBL floor is stricter than the Shannon one.
  const ConstraintSet sh = build_constraints(c, m, Regime::Shannon);
  CHECK(cs.floors[c.K_u].threshold > sh.floors[c.K_u].threshold);

  const PowerVector th = upc(c);
  const Eigen::VectorXd x = th.stacked();
  const Eigen::VectorXd rho = mmtc_sinr(m, th);
  const SinrFloor& f = cs.floors[c.K_u + 1];
  CHECK(f.slack(x) / (f.threshold * (f.interference.dot(x) + f.noise)) ==
        doctest::Approx(rho(0) / c.S_min - 1.0).epsilon(1e-10));
}

TEST_CASE("feasibility search") {
  const ScenarioConfig c;
  const Deployment d = generate_deployment(c);
  const MomentSet m = testing::moments_of(d, c);
  const ConstraintSet cs = build_constraints(c, m, Regime::Shannon);
  const auto x = find_feasible_point(cs);
  REQUIRE(x.has_value());
  const Eigen::VectorXd th = x->cwiseProduct(cs.theta_max);
  CHECK((x->array() > 0.0).all());
  CHECK((x->array() < 1.0).all());
  for (const auto& f : cs.floors) CHECK(f.slack(th) > 0.0);

  ConstraintSet hopeless = cs;
  hopeless.floors[0].threshold = 1e12;
  CHECK_FALSE(find_feasible_point(hopeless).has_value());
}

namespace {

struct Desk {
  ScenarioConfig c;
  Deployment d;
  MomentSet m;
  explicit Desk(std::uint64_t seed) {
    c = testing::desk_config();
    c.seed = seed;
    d = generate_deployment(c);
    m = testing::moments_of(d, c);
  }
};

}  // namespace

TEST_CASE("inner problem at zero price maximizes the smallest rate") {
  Desk k(3);
  const ConstraintSet cs = build_constraints(k.c, k.m, Regime::Shannon);
  const auto x0 = find_feasible_point(cs);
  REQUIRE(x0);
  const Eigen::VectorXd bar = x0->cwiseProduct(cs.theta_max);
  const InnerResult r = solve_inner(bar, 0.0, cs, k.m, ee_params(k.c), *x0);
  CHECK(r.F > 0.0);
  CHECK(r.newton_steps > 0);
  for (const auto& f : cs.floors) CHECK(f.slack(r.theta) >= -1e-9 * f.threshold * (f.interference.dot(r.theta) + f.noise));
  CHECK(((r.theta.array() >= 0.0) && (r.theta.array() <= cs.theta_max.array())).all());
}

TEST_CASE("inner problem against a 400 x 400 grid") {
  ScenarioConfig c = testing::desk_config();
  c.K_d = 1;
  for (std::uint64_t seed : {1, 2, 3}) {
    c.seed = seed;
    const Deployment d = generate_deployment(c);
    const MomentSet m = testing::moments_of(d, c);
    const ConstraintSet cs = build_constraints(c, m, Regime::Shannon);
    const EEParams ee = ee_params(c);
    const auto x0 = find_feasible_point(cs);
    REQUIRE(x0);
    const Eigen::VectorXd bar = x0->cwiseProduct(cs.theta_max);
    const RateSurrogate s(m, bar, 0);
    // Price at half the starting ratio keeps F positive.
    const double price = 0.5 * s.capacity(bar) / (ee.mu * bar(1) + ee.Theta);
    const InnerResult r = solve_inner(bar, price, cs, m, ee, *x0);

    auto objective = [&](const Eigen::Vector2d& th) {
      for (const auto& f : cs.floors)
        if (!(f.slack(th) >= 0.0)) return -1e300;
      if (th(0) > c.P_u_max || th(1) > c.Q_d_max) return -1e300;
      return s.capacity(th) - price * (ee.mu * th(1) + ee.Theta);
    };
    double grid = -1e300;
    Eigen::Vector2d best;
    const int n = 400;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const Eigen::Vector2d th(c.P_u_max * std::pow(10.0, -9.0 * i / (n - 1)),
                                 c.Q_d_max * std::pow(10.0, -9.0 * j / (n - 1)));
        const double v = objective(th);
        if (v > grid) grid = v, best = th;
      }
    }
    REQUIRE(grid > -1e300);
    // Compass search in log coordinates from the best grid point.
    for (double step = std::pow(10.0, 9.0 / (n - 1)); step > 1.0 + 1e-12; step = std::sqrt(step)) {
      for (bool moved = true; moved;) {
        moved = false;
        for (int axis = 0; axis < 2; ++axis) {
          for (double f : {step, 1.0 / step}) {
            Eigen::Vector2d t = best;
            t(axis) *= f;
            const double v = objective(t);
            if (v > grid) grid = v, best = t, moved = true;
          }
        }
      }
    }
    MESSAGE("seed " << seed << ": solver " << r.F << ", grid " << grid);
    CHECK(r.F >= grid * (1.0 - 0.005));
    CHECK(r.F <= grid * (1.0 + 0.005));
    // Convex problem: the search cannot beat the solver beyond its duality gap.
    CHECK(grid <= r.F + 1e-6 * std::abs(r.F));
  }
}

TEST_CASE("sequential FP on desk instances") {
  for (Regime regime : {Regime::Shannon, Regime::FiniteBlocklength}) {
    for (std::uint64_t seed : {11, 12, 13}) {
      Desk k(seed);
      const SolveResult r = sequential_fp(k.c, k.d, k.m, regime);
      REQUIRE(r.feasible);
      CHECK(r.status == "converged");
      CHECK(r.outer_iters >= 1);
      CHECK(r.outer_iters <= 100);
      for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i] >= r.trace[i - 1] * (1.0 - 1e-12));
      for (const auto& F : r.F_traces)
        for (std::size_t i = 1; i < F.size(); ++i) CHECK(F[i] < F[i - 1]);

      const FeasibilityReport fr = mark_feasible(r.theta_star, k.m, k.c, regime);
      CHECK(fr.feasible);
      CHECK(fr.worst_slack >= -1e-6);

      // The objective is the recomputed min-EE, exactly.
      const EEParams ee = ee_params(k.c);
      const Eigen::VectorXd rates = device_rates(mmtc_sinr(k.m, r.theta_star), ee, regime);
      const Eigen::VectorXd eff = energy_efficiency(r.theta_star, rates, ee);
      CHECK(r.device_ee == eff);
      CHECK(r.objective == eff.minCoeff());
      CHECK(r.objective == min_energy_efficiency(k.c, k.m, regime, r.theta_star));

      // No worse than any benchmark that is feasible.
      for (const PowerVector& h : {upc(k.c), fpc(k.c, k.d), gfpc(k.c, k.d)}) {
        if (mark_feasible(h, k.m, k.c, regime).feasible)
          CHECK(r.objective >= min_energy_efficiency(k.c, k.m, regime, h));
      }
      // The broadband floor is met with equality.
      CHECK(r.user_rate.minCoeff() == doctest::Approx(k.c.R_embb_min).epsilon(0.01));

      std::istringstream trace(trace_jsonl(r, 7));
      std::string line;
      int lines = 0;
      while (std::getline(trace, line)) {
        CHECK(line.find("\"instance\":7") != std::string::npos);
        ++lines;
      }
      CHECK(lines == int(r.rows.size()));
    }
  }
}

TEST_CASE("infeasible instance") {
  Desk k(4);
  k.c.R_embb_min = 1e12;
  const SolveResult r = sequential_fp(k.c, k.d, k.m, Regime::Shannon);
  CHECK_FALSE(r.feasible);
  CHECK(r.status == "infeasible");
  CHECK(r.objective == 0.0);
}
