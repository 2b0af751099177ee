#include "doctest.h"

#include <cstring>
#include <random>

#include "cfmimo/kernels.hpp"
#include "cfmimo/mc_oracle.hpp"
#include "support.hpp"

using namespace cfmimo;

namespace {

std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<double> v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("every variant matches the scalar kernels bit for bit") {
  const auto& ref = kernels::scalar_table();
  const auto tables = kernels::available_tables();
  REQUIRE(tables.front() == &ref);
  MESSAGE("variants: " << tables.size() << ", active: " << kernels::active_table().name);
  std::mt19937_64 rng(3);
  for (const auto* t : tables) {
    for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 64u, 67u}) {
      const auto ar = random_vector(n, rng), ai = random_vector(n, rng);
      const auto br = random_vector(n, rng), bi = random_vector(n, rng);
      const auto y0 = random_vector(n, rng), z0 = random_vector(n, rng);
      const double s = 0.37;

      auto y1 = y0, y2 = y0;
      ref.axpy(n, s, ar.data(), y1.data());
      t->axpy(n, s, ar.data(), y2.data());
      CHECK(same_bits(y1, y2));

      ref.scale(n, s, ar.data(), y1.data());
      t->scale(n, s, ar.data(), y2.data());
      CHECK(same_bits(y1, y2));

      auto cr1 = y0, ci1 = z0, cr2 = y0, ci2 = z0;
      ref.cdot_acc(n, ar.data(), ai.data(), br.data(), bi.data(), cr1.data(), ci1.data());
      t->cdot_acc(n, ar.data(), ai.data(), br.data(), bi.data(), cr2.data(), ci2.data());
      CHECK(same_bits(cr1, cr2));
      CHECK(same_bits(ci1, ci2));

      ref.cmul_conj(n, ar.data(), ai.data(), br.data(), bi.data(), cr1.data(), ci1.data());
      t->cmul_conj(n, ar.data(), ai.data(), br.data(), bi.data(), cr2.data(), ci2.data());
      CHECK(same_bits(cr1, cr2));
      CHECK(same_bits(ci1, ci2));

      auto acc1 = y0, acc2 = y0;
      ref.abs2_acc(n, ar.data(), ai.data(), acc1.data());
      t->abs2_acc(n, ar.data(), ai.data(), acc2.data());
      CHECK(same_bits(acc1, acc2));
    }
  }
}

TEST_CASE("cdot_acc computes conj(a) b") {
  const double ar[] = {1.0}, ai[] = {2.0}, br[] = {3.0}, bi[] = {-1.0};
  double cr[] = {0.5}, ci[] = {0.0};
  kernels::scalar_table().cdot_acc(1, ar, ai, br, bi, cr, ci);
  // (1 - 2i)(3 - i) = 1 - 7i
  CHECK(cr[0] == 1.5);
  CHECK(ci[0] == -7.0);
}

TEST_CASE("lookup by name") {
  CHECK(kernels::find_table("scalar") == &kernels::scalar_table());
  CHECK(kernels::find_table("sse9") == nullptr);
}

TEST_CASE("batched engine agrees with the reference path") {
  const ScenarioConfig c = testing::small_config();
  const Deployment d = generate_deployment(c);
  const long long draws = 2 * kOracleLanes + 5;  // includes a partial batch
  const OracleSums ref = reference_sums(d, c, 0, draws, 21);
  for (const auto* t : kernels::available_tables()) {
    OracleOptions o;
    o.seed = 21;
    o.table = t;
    const OracleSums got = oracle_sums(d, c, draws, o);
    REQUIRE(got.values.size() == ref.values.size());
    CHECK(got.draws == draws);
    double worst = 0.0;
    for (std::size_t i = 0; i < ref.values.size(); ++i) {
      const double scale = std::max(std::abs(ref.values[i]), 1e-300);
      worst = std::max(worst, std::abs(got.values[i] - ref.values[i]) / scale);
    }
    CHECK_MESSAGE(worst < 1e-10, t->name << " worst relative difference " << worst);
  }
}

TEST_CASE("engine output does not depend on the variant or the worker count") {
  const ScenarioConfig c = testing::small_config();
  const Deployment d = generate_deployment(c);
  OracleOptions o;
  o.seed = 4;
  o.table = &kernels::scalar_table();
  const OracleSums base = oracle_sums(d, c, 1000, o);
  for (const auto* t : kernels::available_tables()) {
    for (int w : {1, 3}) {
      o.table = t;
      o.workers = w;
      CHECK(same_bits(oracle_sums(d, c, 1000, o).values, base.values));
    }
  }
}
