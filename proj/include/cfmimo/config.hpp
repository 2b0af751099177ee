#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace cfmimo {

/// Raised for any invalid or inconsistent scenario parameter.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Regime { Shannon, FiniteBlocklength };

std::string to_string(Regime regime);
Regime parse_regime(const std::string& text);

double dbm_to_watt(double dbm);
double watt_to_dbm(double watt);

/// All constants of one run. Powers are held in watts; the text format
/// carries dBm for budgets and noise density and converts on load.
struct ScenarioConfig {
  // Deployment
  int M = 10;    // access points
  int L = 4;     // antennas per AP
  int K_u = 2;   // broadband users
  int K_d = 10;  // machine-type devices
  int M_s = 5;   // serving APs per terminal
  int N = 255;   // PRBs, equal to the spreading factor
  double area_side = 250.0;  // m
  double h_ap = 10.0;        // m
  double h_term = 1.65;      // m
  double carrier_ghz = 2.0;
  bool shadowing = false;
  double shadowing_std_db = 4.0;

  // Power (W)
  double P_u_max = 0.1;
  double Q_d_max = 0.01;
  double eta_u = 0.1;   // user training power
  double zeta_d = 0.01; // device training power

  // Noise and frame
  double noise_density = 3.981071705534973e-21;  // W/Hz (-174 dBm/Hz)
  double bandwidth = 20e6;                        // Hz
  int tau_c = 200;
  int tau_p = 0;       // 0 selects ceil((K_u + K_d) / 2)
  double tau_u = 0.0;  // 0 selects (tau_c - tau_p) / 2

  // QoS and device model
  double R_embb_min = 1e6;  // bit/s
  double R_mmtc_min = 1e4;  // bit/s
  double S_min = 1.0;       // linear SINR floor
  int n_d = 100;
  double PER_d = 1e-3;
  double mu_d = 2.0;       // amplifier inefficiency
  double Theta_d = 0.005;  // static power, W

  std::uint64_t seed = 1;

  int pilot_length() const;
  double uplink_samples() const;
  double noise_power() const;  // sigma^2 = N_o * B
  double psi() const;          // B * tau_u / tau_c

  /// Throws ConfigError when an invariant is broken.
  void validate() const;
};

/// Reads `key = value` lines; `#` starts a comment. Unknown keys are errors.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::string& path);

/// Inverse of parse_config (dBm keys for budgets and noise density).
std::string format_config(const ScenarioConfig& config);

/// Applies a single `key=value` override, as accepted by the text format.
void apply_override(ScenarioConfig& config, const std::string& key, const std::string& value);

/// Stable 64-bit FNV-1a digest of format_config(config), as 16 hex digits.
std::string config_digest(const ScenarioConfig& config);

/// Independent RNG stream seeds keyed by (seed, stream index).
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace cfmimo
