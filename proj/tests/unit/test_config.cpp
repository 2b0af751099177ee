#include "doctest.h"

#include "cfmimo/config.hpp"

using namespace cfmimo;

TEST_CASE("defaults") {
  const ScenarioConfig c;
  CHECK(c.P_u_max == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(c.Q_d_max == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(c.pilot_length() == 6);
  CHECK(c.uplink_samples() == doctest::Approx(97.0));
  CHECK(c.noise_power() == doctest::Approx(dbm_to_watt(-174.0) * 20e6).epsilon(1e-12));
  CHECK(c.psi() == doctest::Approx(20e6 * 97.0 / 200.0));
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("odd terminal count rounds the pilot length up") {
  ScenarioConfig c;
  c.K_u = 2;
  c.K_d = 3;
  CHECK(c.pilot_length() == 3);
  c.tau_p = 5;
  CHECK(c.pilot_length() == 5);
}

TEST_CASE("dBm conversion") {
  CHECK(dbm_to_watt(30.0) == doctest::Approx(1.0));
  CHECK(dbm_to_watt(20.0) == doctest::Approx(0.1));
  CHECK(watt_to_dbm(0.01) == doctest::Approx(10.0));
}

TEST_CASE("text round trip") {
  ScenarioConfig c;
  c.M = 7;
  c.N = 63;
  c.P_u_max = 0.05;
  c.shadowing = true;
  c.seed = 99;
  const ScenarioConfig back = parse_config(format_config(c));
  CHECK(format_config(back) == format_config(c));
  CHECK(back.M == 7);
  CHECK(back.N == 63);
  CHECK(back.P_u_max == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(back.shadowing);
  CHECK(back.seed == 99u);
  CHECK(config_digest(back) == config_digest(c));
}

TEST_CASE("budgets are read in dBm") {
  const ScenarioConfig c = parse_config("# comment\nP_u_max_dbm = 23\nQ_d_max_dbm=0  # 1 mW\n");
  CHECK(c.P_u_max == doctest::Approx(dbm_to_watt(23.0)));
  CHECK(c.Q_d_max == doctest::Approx(1e-3));
}

TEST_CASE("bad input") {
  CHECK_THROWS_AS(parse_config("nonsense = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("M = three\n"), ConfigError);
  ScenarioConfig c;
  CHECK_THROWS_AS(apply_override(c, "N", ""), ConfigError);
  c.M_s = 11;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = ScenarioConfig{};
  c.PER_d = 0.5;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = ScenarioConfig{};
  c.tau_p = 250;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  CHECK_THROWS_AS(parse_regime("5g"), ConfigError);
}

TEST_CASE("overrides and digests") {
  ScenarioConfig a;
  apply_override(a, "N", "15");
  CHECK(a.N == 15);
  const ScenarioConfig b;
  CHECK(config_digest(a) != config_digest(b));
  CHECK(config_digest(b).size() == 16);
  CHECK(parse_regime(to_string(Regime::FiniteBlocklength)) == Regime::FiniteBlocklength);
  CHECK(parse_regime(to_string(Regime::Shannon)) == Regime::Shannon);
}

TEST_CASE("stream seeds differ by stream and seed") {
  CHECK(stream_seed(1, 0) != stream_seed(1, 1));
  CHECK(stream_seed(1, 0) != stream_seed(2, 0));
  CHECK(stream_seed(5, 3) == stream_seed(5, 3));
}
