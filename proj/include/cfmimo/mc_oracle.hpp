#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "cfmimo/channel_stats.hpp"
#include "cfmimo/config.hpp"
#include "cfmimo/kernels.hpp"
#include "cfmimo/pn_sequence.hpp"
#include "cfmimo/rates.hpp"
#include "cfmimo/scenario.hpp"

namespace cfmimo {

using cplx = std::complex<double>;

/// One realization of every small-scale quantity over the N PRBs.
/// Flat storage, index order [n][m][terminal][l].
struct ChannelDraw {
  int M = 0, K_u = 0, K_d = 0, N = 0, L = 0, tau_p = 0;
  std::vector<cplx> h;            // user channels
  std::vector<cplx> g;            // device channels
  std::vector<cplx> pilot_noise;  // per pilot, [n][m][p][l]
  std::vector<cplx> noise;        // data noise, [n][m][l]

  std::size_t h_index(int n, int m, int u, int l) const { return ((std::size_t(n) * M + m) * K_u + u) * L + l; }
  std::size_t g_index(int n, int m, int d, int l) const { return ((std::size_t(n) * M + m) * K_d + d) * L + l; }
  std::size_t p_index(int n, int m, int p, int l) const { return ((std::size_t(n) * M + m) * tau_p + p) * L + l; }
  std::size_t w_index(int n, int m, int l) const { return (std::size_t(n) * M + m) * L + l; }
};

/// MMSE estimates with the same layout as ChannelDraw::h / ChannelDraw::g.
struct ChannelEstimates {
  std::vector<cplx> h_hat;
  std::vector<cplx> g_hat;
};

/// Number of real Gaussian draws consumed per ChannelDraw.
std::size_t normals_per_draw(const Deployment& dep, const ScenarioConfig& config);

/// Writes the scaled Gaussian components of one draw in canonical order:
/// for n, for m: users (l, re/im), devices, pilot noise, data noise.
void fill_draw_normals(const Deployment& dep, const ScenarioConfig& config, std::mt19937_64& rng, double* out);

ChannelDraw sample_channels(const Deployment& dep, const ScenarioConfig& config, std::mt19937_64& rng);

/// LS observations y_p = sum sqrt(power) channel + noise, then scalar MMSE shrinkage.
ChannelEstimates estimate_channels(const ChannelDraw& draw, const Deployment& dep, const ScenarioConfig& config,
                                   const EstimationStats& stats);
ChannelEstimates estimate_channels(const ChannelDraw& draw, const Deployment& dep, const ScenarioConfig& config);

/// Positions of the raw sums accumulated by the oracle.
struct SumLayout {
  int K_u = 0, K_d = 0;

  // Per (draw, PRB) sample.
  std::size_t x_re(int u) const { return u; }
  std::size_t x_im(int u) const { return K_u + u; }
  std::size_t x_abs2(int u) const { return 2 * K_u + u; }
  std::size_t i_uu(int u, int k) const { return 3 * K_u + u * K_u + k; }
  std::size_t i_ud(int u, int d) const { return 3 * K_u + K_u * K_u + u * K_d + d; }
  std::size_t w_u(int u) const { return 3 * K_u + K_u * K_u + K_u * K_d + u; }
  // Per draw.
  std::size_t device_base() const { return 4 * K_u + K_u * K_u + K_u * K_d; }
  std::size_t s_sum(int d) const { return device_base() + d; }
  std::size_t s_sq(int d) const { return device_base() + K_d + d; }
  std::size_t j_dd(int d, int k) const { return device_base() + 2 * K_d + d * K_d + k; }
  std::size_t j_du(int d, int u) const { return device_base() + 2 * K_d + K_d * K_d + d * K_u + u; }
  std::size_t w_d(int d) const { return device_base() + 2 * K_d + K_d * K_d + K_d * K_u + d; }
  std::size_t size() const { return device_base() + 3 * K_d + K_d * K_d + K_d * K_u; }
};

struct OracleSums {
  SumLayout layout;
  long long draws = 0;
  int N = 1;
  std::vector<double> values;
};

struct OracleOptions {
  std::uint64_t seed = 1;
  int workers = 1;
  const kernels::KernelTable* table = nullptr;  // null selects the active variant
};

/// Draws per lane batch of the engine.
inline constexpr int kOracleLanes = 64;

/// RNG stream for draw `index` under `seed`.
std::uint64_t draw_seed(std::uint64_t seed, std::uint64_t index);

/// Batched engine: draws [0, n_draws), merged in batch order.
OracleSums oracle_sums(const Deployment& dep, const ScenarioConfig& config, long long n_draws,
                       const OracleOptions& options);

/// Same sums through the std::complex reference path, draws [first, first + count).
OracleSums reference_sums(const Deployment& dep, const ScenarioConfig& config, long long first, long long count,
                          std::uint64_t seed);

/// Converts raw sums to sample moments: delta = |mean X|^2, upsilon = var X,
/// lambda = (mean S)^2, nu = var S; the rest are mean squared magnitudes.
MomentSet moments_from_sums(const OracleSums& sums);

class OracleError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Refuse fewer than 1000 draws.
MomentSet empirical_embb_moments(const Deployment& dep, const ScenarioConfig& config, long long n_draws,
                                 const OracleOptions& options = {});
MomentSet empirical_mmtc_moments(const Deployment& dep, const ScenarioConfig& config, long long n_draws,
                                 const OracleOptions& options = {});
/// Both halves from one set of draws.
MomentSet empirical_moments(const Deployment& dep, const ScenarioConfig& config, long long n_draws,
                            const OracleOptions& options = {});

}  // namespace cfmimo
