#include "doctest.h"

#include <random>

#include "cfmimo/optimizer.hpp"
#include "support.hpp"

using namespace cfmimo;

namespace {

struct Fixture {
  ScenarioConfig c;
  Deployment dep;
  MomentSet m;
  Eigen::VectorXd theta_max;
  std::mt19937_64 rng{17};

  Fixture() : dep(generate_deployment(c)), m(testing::moments_of(dep, c)) {
    theta_max.resize(c.K_u + c.K_d);
    theta_max << Eigen::VectorXd::Constant(c.K_u, c.P_u_max), Eigen::VectorXd::Constant(c.K_d, c.Q_d_max);
  }

  // Box points, log-uniform over nine decades below the budget.
  Eigen::VectorXd point() {
    std::uniform_real_distribution<double> e(-9.0, 0.0);
    Eigen::VectorXd th(theta_max.size());
    for (Eigen::Index i = 0; i < th.size(); ++i) th(i) = theta_max(i) * std::pow(10.0, e(rng));
    return th;
  }
};

}  // namespace

TEST_CASE("surrogates touch the true terms at the expansion point") {
  Fixture f;
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::VectorXd bar = f.point();
    for (int d = 0; d < f.c.K_d; ++d) {
      const RateSurrogate s(f.m, bar, d);
      CHECK(std::abs(s.capacity(bar) - s.true_capacity(bar)) <= 1e-10 * s.true_capacity(bar));
      CHECK(std::abs(s.dispersion(bar) - s.true_dispersion(bar)) <= 1e-10 * s.true_dispersion(bar));
      const PowerVector pv = PowerVector::unstack(bar, f.c.K_u);
      CHECK(s.true_capacity(bar) == doctest::Approx(shannon_rate(mmtc_sinr(f.m, pv)(d))).epsilon(1e-12));
    }
  }
}

TEST_CASE("capacity bound below, dispersion bound above") {
  Fixture f;
  int violations = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    const Eigen::VectorXd bar = f.point();
    const Eigen::VectorXd th = f.point();
    const int d = trial % f.c.K_d;
    const RateSurrogate s(f.m, bar, d);
    violations += s.capacity(th) > s.true_capacity(th) * (1.0 + 1e-12) + 1e-15;
    violations += s.dispersion(th) < s.true_dispersion(th) * (1.0 - 1e-12);
  }
  CHECK(violations == 0);
}

TEST_CASE("gradients and Hessians match central differences") {
  // Steps are relative (1e-6 theta_i) and errors are compared on theta_i df/dtheta_i, so a
  // component nine decades below its budget is held to the same standard as a large one.
  Fixture f;
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::VectorXd bar = f.point();
    const Eigen::VectorXd th = f.point();
    const int d = trial % f.c.K_d;
    const RateSurrogate s(f.m, bar, d);
    const SurrogateEval ce = s.capacity_eval(th);
    const SurrogateEval de = s.dispersion_eval(th);
    CHECK(ce.value == s.capacity(th));
    CHECK(de.value == s.dispersion(th));
    const Eigen::Index K = th.size();
    Eigen::VectorXd gc(K), gd(K);
    for (Eigen::Index i = 0; i < K; ++i) {
      const double h = 1e-6 * th(i);
      Eigen::VectorXd up = th, dn = th;
      up(i) += h;
      dn(i) -= h;
      gc(i) = (s.capacity(up) - s.capacity(dn)) / (2 * h);
      gd(i) = (s.dispersion(up) - s.dispersion(dn)) / (2 * h);
    }
    auto close = [&](const Eigen::VectorXd& fd, const Eigen::VectorXd& exact, double value) {
      const Eigen::VectorXd e = (fd - exact).cwiseProduct(th);
      const Eigen::VectorXd x = exact.cwiseProduct(th);
      return e.norm() <= 1e-5 * x.norm() + 1e-9 * std::abs(value);
    };
    CHECK(close(gc, ce.gradient, ce.value));
    CHECK(close(gd, de.gradient, de.value));

    // Hessian-vector products along a relative direction.
    Eigen::VectorXd v(K);
    for (Eigen::Index i = 0; i < K; ++i) v(i) = th(i) * ((i + trial) % 3 == 0 ? -1.0 : 1.0);
    const double h = 1e-6;
    const Eigen::VectorXd hc = (s.capacity_eval(th + h * v).gradient - s.capacity_eval(th - h * v).gradient) / (2 * h);
    const Eigen::VectorXd hd =
        (s.dispersion_eval(th + h * v).gradient - s.dispersion_eval(th - h * v).gradient) / (2 * h);
    CHECK(close(hc, ce.hessian * v, ce.value));
    CHECK(close(hd, de.hessian * v, de.value));
    CHECK(ce.hessian.isApprox(ce.hessian.transpose()));
    CHECK(de.hessian.isApprox(de.hessian.transpose()));
  }
}

TEST_CASE("curvature: capacity concave, dispersion convex") {
  Fixture f;
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::VectorXd bar = f.point();
    const Eigen::VectorXd a = f.point(), b = f.point();
    const RateSurrogate s(f.m, bar, trial % f.c.K_d);
    const Eigen::VectorXd mid = 0.5 * (a + b);
    CHECK(s.dispersion(mid) <= 0.5 * (s.dispersion(a) + s.dispersion(b)) * (1.0 + 1e-12));
    CHECK(s.capacity(mid) >= 0.5 * (s.capacity(a) + s.capacity(b)) - 1e-12 * std::abs(s.capacity(mid)));
    const Eigen::VectorXd ec = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(s.capacity_eval(a).hessian).eigenvalues();
    const Eigen::MatrixXd hd = s.dispersion_eval(a).hessian;
    const Eigen::VectorXd ed = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(hd).eigenvalues();
    CHECK(ec.maxCoeff() <= 1e-12 * ec.cwiseAbs().maxCoeff());
    CHECK(ed.minCoeff() >= -1e-12 * ed.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("free functions agree with the class") {
  Fixture f;
  const Eigen::VectorXd bar = f.point(), th = f.point();
  const RateSurrogate s(f.m, bar, 1);
  CHECK(capacity_surrogate(th, bar, f.m, 1).value == s.capacity(th));
  CHECK(dispersion_surrogate(th, bar, f.m, 1).value == s.dispersion(th));
  Eigen::VectorXd zero_q = bar;
  zero_q(f.c.K_u + 1) = 0.0;
  CHECK_THROWS_AS(RateSurrogate(f.m, zero_q, 1), OptimizerError);
}
