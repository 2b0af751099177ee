#include "cfmimo/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace cfmimo {

std::string to_string(Regime regime) {
  return regime == Regime::Shannon ? "shannon" : "fbl";
}

Regime parse_regime(const std::string& text) {
  if (text == "shannon") return Regime::Shannon;
  if (text == "fbl") return Regime::FiniteBlocklength;
  throw ConfigError("unknown regime '" + text + "' (expected shannon or fbl)");
}

double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double watt_to_dbm(double watt) { return 10.0 * std::log10(watt) + 30.0; }

int ScenarioConfig::pilot_length() const {
  return tau_p > 0 ? tau_p : (K_u + K_d + 1) / 2;
}

double ScenarioConfig::uplink_samples() const {
  return tau_u > 0.0 ? tau_u : 0.5 * (tau_c - pilot_length());
}

double ScenarioConfig::noise_power() const { return noise_density * bandwidth; }

double ScenarioConfig::psi() const { return bandwidth * uplink_samples() / tau_c; }

void ScenarioConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(what);
  };
  require(M >= 1 && L >= 1, "M and L must be at least 1");
  require(K_u >= 0 && K_d >= 0 && K_u + K_d >= 1, "need at least one terminal");
  require(M_s >= 1 && M_s <= M, "M_s must lie in [1, M]");
  require(N >= 1, "N must be at least 1");
  require(area_side > 0.0 && h_ap >= 0.0 && h_term >= 0.0, "invalid geometry");
  require(carrier_ghz > 0.0, "carrier frequency must be positive");
  require(P_u_max > 0.0 && Q_d_max > 0.0 && eta_u > 0.0 && zeta_d > 0.0,
          "powers must be positive");
  require(noise_density > 0.0 && bandwidth > 0.0, "noise density and bandwidth must be positive");
  require(tau_c >= 1 && pilot_length() >= 1, "tau_c and tau_p must be positive");
  require(pilot_length() + uplink_samples() <= tau_c, "tau_p + tau_u exceeds tau_c");
  require(uplink_samples() > 0.0, "tau_u must be positive");
  require(R_embb_min > 0.0 && R_mmtc_min > 0.0 && S_min > 0.0, "QoS targets must be positive");
  require(n_d >= 1, "n_d must be at least 1");
  require(PER_d > 0.0 && PER_d < 0.5, "PER_d must lie in (0, 0.5)");
  require(mu_d > 0.0 && Theta_d > 0.0, "device power model must be positive");
  require(shadowing_std_db >= 0.0, "shadowing deviation must be non-negative");
}

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double to_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  const auto* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) throw ConfigError("bad number for " + key + ": '" + value + "'");
  return out;
}

long long to_int(const std::string& key, const std::string& value) {
  long long out = 0;
  const auto* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) throw ConfigError("bad integer for " + key + ": '" + value + "'");
  return out;
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("bad boolean for " + key + ": '" + value + "'");
}

std::string num(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

using Setter = std::function<void(ScenarioConfig&, const std::string&, const std::string&)>;
using Getter = std::function<std::string(const ScenarioConfig&)>;

struct Field {
  Setter set;
  Getter get;
};

#define CFG_INT(name)                                                                      \
  {#name,                                                                                  \
   {[](ScenarioConfig& c, const std::string& k, const std::string& v) {                    \
      c.name = static_cast<decltype(c.name)>(to_int(k, v));                                \
    },                                                                                     \
    [](const ScenarioConfig& c) { return std::to_string(c.name); }}}
#define CFG_DBL(name)                                                                      \
  {#name,                                                                                  \
   {[](ScenarioConfig& c, const std::string& k, const std::string& v) { c.name = to_double(k, v); }, \
    [](const ScenarioConfig& c) { return num(c.name); }}}
#define CFG_DBM(key, name)                                                                 \
  {key,                                                                                    \
   {[](ScenarioConfig& c, const std::string& k, const std::string& v) {                    \
      c.name = dbm_to_watt(to_double(k, v));                                               \
    },                                                                                     \
    [](const ScenarioConfig& c) { return num(watt_to_dbm(c.name)); }}}

// Ordered: format_config emits keys in this order.
const std::vector<std::pair<std::string, Field>>& fields() {
  static const std::vector<std::pair<std::string, Field>> table = {
      CFG_INT(M),
      CFG_INT(L),
      CFG_INT(K_u),
      CFG_INT(K_d),
      CFG_INT(M_s),
      CFG_INT(N),
      CFG_DBL(area_side),
      CFG_DBL(h_ap),
      CFG_DBL(h_term),
      CFG_DBL(carrier_ghz),
      {"shadowing",
       {[](ScenarioConfig& c, const std::string& k, const std::string& v) { c.shadowing = to_bool(k, v); },
        [](const ScenarioConfig& c) { return std::string(c.shadowing ? "true" : "false"); }}},
      CFG_DBL(shadowing_std_db),
      CFG_DBM("P_u_max_dbm", P_u_max),
      CFG_DBM("Q_d_max_dbm", Q_d_max),
      CFG_DBM("eta_u_dbm", eta_u),
      CFG_DBM("zeta_d_dbm", zeta_d),
      CFG_DBM("noise_density_dbm_hz", noise_density),
      CFG_DBL(bandwidth),
      CFG_INT(tau_c),
      CFG_INT(tau_p),
      CFG_DBL(tau_u),
      CFG_DBL(R_embb_min),
      CFG_DBL(R_mmtc_min),
      CFG_DBL(S_min),
      CFG_INT(n_d),
      CFG_DBL(PER_d),
      CFG_DBL(mu_d),
      CFG_DBL(Theta_d),
      CFG_INT(seed),
  };
  return table;
}

#undef CFG_INT
#undef CFG_DBL
#undef CFG_DBM

}  // namespace

void apply_override(ScenarioConfig& config, const std::string& key, const std::string& value) {
  for (const auto& [name, field] : fields()) {
    if (name == key) {
      field.set(config, key, value);
      return;
    }
  }
  throw ConfigError("unknown config key '" + key + "'");
}

ScenarioConfig parse_config(const std::string& text) {
  ScenarioConfig config;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    }
    apply_override(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  config.validate();
  return config;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string format_config(const ScenarioConfig& config) {
  std::string out;
  for (const auto& [name, field] : fields()) {
    out += name + " = " + field.get(config) + "\n";
  }
  return out;
}

std::string config_digest(const ScenarioConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : format_config(config)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 finalizer over a golden-ratio spaced counter
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace cfmimo
