#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cfmimo/harness.hpp"
#include "cfmimo/heuristics.hpp"
#include "json.hpp"
#include "support.hpp"

using namespace cfmimo;
namespace fs = std::filesystem;

namespace {

std::string csv(const CdfSeries& s) {
  std::ostringstream os;
  write_cdf_csv(os, s);
  return os.str();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("cfmimo_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("policy names") {
  for (Policy p : {Policy::OPC, Policy::UPC, Policy::FPC, Policy::GFPC}) CHECK(parse_policy(to_string(p)) == p);
  CHECK_THROWS_AS(parse_policy("max"), ConfigError);
}

TEST_CASE("CDF series") {
  const CdfSeries s = make_cdf("x", {{3.0, true}, {0.0, false}, {1.0, true}, {2.0, true}});
  CHECK(s.values == std::vector<double>{0.0, 1.0, 2.0, 3.0});
  CHECK(s.feasible == std::vector<int>{0, 1, 1, 1});
  CHECK(s.feasible_fraction == 0.75);
  CHECK(csv(s) == "value,cdf,feasible_flag\n0,0.25,0\n1,0.5,1\n2,0.75,1\n3,1,1\n");
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1e-300) == "1e-300");
}

TEST_CASE("batch outputs do not depend on the worker count") {
  ScenarioConfig c = testing::desk_config();
  c.seed = 5;
  BatchOptions o;
  o.regime = Regime::Shannon;
  for (Policy p : {Policy::OPC, Policy::GFPC}) {
    const BatchResult a = run_batch(c, p, 6, o);
    o.workers = 3;
    const BatchResult b = run_batch(c, p, 6, o);
    o.workers = 1;
    CHECK(csv(a.min_ee) == csv(b.min_ee));
    CHECK(csv(a.device_ee) == csv(b.device_ee));
    CHECK(csv(a.user_rate) == csv(b.user_rate));
    std::ostringstream ia, ib;
    write_instances_csv(ia, a);
    write_instances_csv(ib, b);
    CHECK(ia.str() == ib.str());
    CHECK(a.min_ee.values.size() == 6);
    CHECK(a.device_ee.values.size() == 12);
    CHECK(a.user_rate.values.size() == 6);
  }
}

TEST_CASE("batch instances follow their own seeds") {
  ScenarioConfig c = testing::desk_config();
  BatchOptions o;
  o.regime = Regime::Shannon;
  const BatchResult b = run_batch(c, Policy::UPC, 3, o);
  for (const auto& r : b.instances) {
    CHECK(r.seed == instance_seed(c.seed, r.index));
    ScenarioConfig one = c;
    one.seed = r.seed;
    const Deployment d = generate_deployment(one);
    const InstanceResult again = evaluate_policy(one, d, testing::moments_of(d, one), Policy::UPC, o);
    CHECK(again.feasible == r.feasible);
    CHECK(again.device_ee == r.device_ee);
  }
}

TEST_CASE("benchmark results carry the recomputed metrics") {
  ScenarioConfig c;
  const Deployment d = generate_deployment(c);
  const MomentSet m = testing::moments_of(d, c);
  BatchOptions o;
  const InstanceResult r = evaluate_policy(c, d, m, Policy::UPC, o);
  CHECK(r.feasible == mark_feasible(upc(c), m, c, o.regime).feasible);
  CHECK(r.device_ee == energy_efficiency(upc(c), device_rates(mmtc_sinr(m, upc(c)), ee_params(c), o.regime),
                                         ee_params(c)));
}

TEST_CASE("OMA setup") {
  const ScenarioConfig c;  // N = 255
  const OmaSetup s = oma_setup(c, 50, 50);
  CHECK(s.device_length == 127);
  CHECK(s.config.N == 127);
  CHECK(s.user_share == 0.5);
  CHECK(s.config.R_embb_min == 2.0 * c.R_embb_min);
  CHECK(s.config.R_mmtc_min == 2.0 * c.R_mmtc_min);
  CHECK(oma_setup(c, 90, 10).device_length == 31);
  CHECK_THROWS_AS(oma_setup(c, 100, 0), ConfigError);
  CHECK_THROWS_AS(oma_setup(c, 0, 50), ConfigError);
  CHECK_THROWS_AS(oma_setup(c, 60, 50), ConfigError);

  const Deployment d = generate_deployment(c);
  const MomentSet m = oma_moments(s, d);
  CHECK((m.varkappa.array() == 0.0).all());
  CHECK((m.eps_du.array() == 0.0).all());
  CHECK((m.lambda.array() > 0.0).all());
}

TEST_CASE("OMA comparison runs both sides on the same drops") {
  ScenarioConfig c = testing::desk_config();
  BatchOptions o;
  o.regime = Regime::Shannon;
  const OmaComparison r = compare_oma(c, 50, 50, Policy::UPC, 4, o);
  REQUIRE(r.noma.instances.size() == 4);
  REQUIRE(r.oma.instances.size() == 4);
  for (int i = 0; i < 4; ++i) CHECK(r.noma.instances[i].seed == r.oma.instances[i].seed);
  CHECK(r.oma.label.find("oma50_50") == 0);
}

TEST_CASE("validation report") {
  const ScenarioConfig c = testing::small_config();
  const ValidationReport a = validate(c, 2000, 3);
  const ValidationReport b = validate(c, 2000, 3, 2);
  REQUIRE(a.rows.size() == b.rows.size());
  // 2 users: delta, upsilon, xi, one kappa, three varkappa each; 3 devices: lambda, nu, chi,
  // two eps_dd, two eps_du each.
  CHECK(a.rows.size() == std::size_t(2 * 7 + 3 * 7));
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].empirical == b.rows[i].empirical);
    CHECK(a.rows[i].tolerance == (i < 14 ? 0.03 : 0.05));
  }
  std::ostringstream os;
  write_validation_csv(os, a);
  CHECK(os.str().rfind("moment,i,j,closed_form,empirical,rel_error,tolerance,pass\n", 0) == 0);
}

TEST_CASE("scenarios") {
  const auto grid = default_dataset_grid();
  REQUIRE(grid.size() == 5);
  CHECK(grid[0].K_u == 2);
  CHECK(grid[0].K_d == 10);
  CHECK(grid[1].M_s == 1);
  const ScenarioSpec s = parse_scenario("1,2,10,5");
  CHECK(s.K_u == 1);
  CHECK(s.K_d == 2);
  CHECK(s.M == 10);
  CHECK(s.M_s == 5);
  CHECK(s.name == "ku1_kd2_m10_ms5");
  CHECK_THROWS_AS(parse_scenario("1,2,10"), ConfigError);
}

TEST_CASE("dataset export: splits, round trip, post-check") {
  const fs::path dir = scratch("dataset");
  ScenarioConfig c;
  BatchOptions o;
  o.regime = Regime::Shannon;
  const ScenarioSpec spec = parse_scenario("1,2,10,5");
  const DatasetSummary s = export_dataset(c, spec, 100, dir.string(), o);
  CHECK(s.records == 100);
  CHECK(s.train == 80);
  CHECK(s.val == 10);
  CHECK(s.test == 10);

  const auto train = read_split((dir / "ku1_kd2_m10_ms5_train.idx").string());
  const auto val = read_split((dir / "ku1_kd2_m10_ms5_val.idx").string());
  const auto test = read_split((dir / "ku1_kd2_m10_ms5_test.idx").string());
  CHECK(train.size() == 80);
  CHECK(val.size() == 10);
  CHECK(test.size() == 10);
  std::vector<long long> all = train;
  all.insert(all.end(), val.begin(), val.end());
  all.insert(all.end(), test.begin(), test.end());
  std::sort(all.begin(), all.end());
  for (long long i = 0; i < 100; ++i) CHECK(all[i] == i);

  const Dataset ds = read_dataset(s.data_path);
  REQUIRE(ds.records.size() == 100);
  const auto header = nlohmann::json::parse(ds.header);
  CHECK(header["schema"] == kDatasetSchema);
  CHECK(header["K_d"] == 2);
  c.K_u = 1;
  c.K_d = 2;
  CHECK(header["digest"] == config_digest(c));
  CHECK(ds.records[0].digest == config_digest(c));

  for (const auto& r : ds.records) {
    ScenarioConfig one = c;
    one.seed = r.seed;
    const Deployment d = generate_deployment(one);
    REQUIRE(r.phi.size() == std::size_t(10 * 3));
    CHECK(r.phi[0] == d.alpha(0, 0));
    CHECK(r.phi[1] == d.alpha(1, 0));
    CHECK(r.phi[10] == d.beta(0, 0));
    CHECK(r.phi[11] == d.beta(0, 1));
    CHECK(r.mask[10] == d.b_mask(0, 0));
    const MomentSet m = testing::moments_of(d, one);
    CHECK(r.moments.lambda == m.lambda);
    CHECK(r.moments.eps_du == m.eps_du);
    const PowerVector th = PowerVector::unstack(Eigen::Map<const Eigen::VectorXd>(r.theta.data(), 3), 1);
    CHECK(mark_feasible(th, m, one, Regime::Shannon).feasible);
    CHECK(r.min_ee == *std::min_element(r.device_ee.begin(), r.device_ee.end()));
  }
  fs::remove_all(dir);
}

TEST_CASE("re-export is byte-identical") {
  const fs::path a = scratch("export_a"), b = scratch("export_b");
  BatchOptions o;
  o.regime = Regime::FiniteBlocklength;
  const ScenarioSpec spec = parse_scenario("1,2,5,2");
  export_dataset(ScenarioConfig{}, spec, 10, a.string(), o);
  o.workers = 2;
  export_dataset(ScenarioConfig{}, spec, 10, b.string(), o);
  for (const char* suffix : {".jsonl", "_train.idx", "_val.idx", "_test.idx"}) {
    const std::string f = spec.name + suffix;
    CHECK(slurp(a / f) == slurp(b / f));
    CHECK_FALSE(slurp(a / f).empty());
  }
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("hopeless scenarios abort the export") {
  const fs::path dir = scratch("abort");
  ScenarioConfig c;
  c.R_embb_min = 1e12;
  CHECK_THROWS_AS(export_dataset(c, parse_scenario("1,2,5,2"), 4, dir.string(), {}), HarnessError);
  fs::remove_all(dir);
}

TEST_CASE("distribution metrics") {
  std::vector<double> a;
  for (int i = 1; i <= 1000; ++i) a.push_back(i);
  const DistributionMetrics same = distribution_metrics(a, a);
  CHECK(same.kl_divergence == 0.0);
  CHECK(same.p95_loss == 0.0);

  std::vector<double> far;
  for (double x : a) far.push_back(x + 10000.0);
  const DistributionMetrics apart = distribution_metrics(a, far);
  CHECK(std::isfinite(apart.kl_divergence));
  CHECK(apart.kl_divergence > 1.0);

  // Hand-computed: two bins, reference all in bin 0, candidate split.
  const std::vector<double> ref{1.0, 1.0}, cand{1.0, 2.0};
  const DistributionMetrics two = distribution_metrics(ref, cand, 2);
  const double p0 = 3.0 / 4.0, p1 = 1.0 / 4.0, q0 = 2.0 / 4.0, q1 = 2.0 / 4.0;
  CHECK(two.kl_divergence == doctest::Approx(p0 * std::log(p0 / q0) + p1 * std::log(p1 / q1)).epsilon(1e-14));

  CHECK(percentile({1.0, 2.0, 3.0, 4.0, 5.0}, 5.0) == doctest::Approx(1.2));
  CHECK(percentile({4.0, 1.0}, 50.0) == doctest::Approx(2.5));
  const DistributionMetrics loss = distribution_metrics(std::vector<double>{10.0}, std::vector<double>{9.0});
  CHECK(loss.p95_loss == doctest::Approx(0.1));

  CHECK_THROWS_AS(distribution_metrics(std::vector<double>{}, a), HarnessError);
  CHECK_THROWS_AS(percentile({}, 5.0), HarnessError);
}

TEST_CASE("CDF CSV round trip") {
  const fs::path dir = scratch("csv");
  fs::create_directories(dir);
  const CdfSeries s = make_cdf("x", {{0.1, true}, {2.5e7, true}, {0.0, false}});
  {
    std::ofstream out(dir / "a.csv");
    write_cdf_csv(out, s);
  }
  CHECK(read_cdf_values((dir / "a.csv").string()) == s.values);
  {
    std::ofstream out(dir / "bad.csv");
    out << "1,2\n";
  }
  CHECK_THROWS_AS(read_cdf_values((dir / "bad.csv").string()), HarnessError);
  CHECK_THROWS_AS(read_cdf_values((dir / "missing.csv").string()), HarnessError);
  fs::remove_all(dir);
}
