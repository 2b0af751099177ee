#include "cfmimo/mc_oracle.hpp"

#include <atomic>
#include <cmath>
#include <thread>

namespace cfmimo {

namespace {

int pilot_count(const Deployment& dep) { return dep.tau_p; }

std::size_t block_size(const Deployment& dep, const ScenarioConfig& config) {
  return 2 * std::size_t(config.L) * (dep.num_users() + dep.num_devices() + pilot_count(dep) + 1);
}

std::vector<std::vector<double>> chip_table(const ScenarioConfig& config, int num_devices) {
  std::vector<std::vector<double>> chips(num_devices);
  for (int d = 0; d < num_devices; ++d) {
    const PnSequence seq = device_sequence(config.N, d);
    chips[d].resize(config.N);
    for (int n = 0; n < config.N; ++n) chips[d][n] = seq.bipolar(n);
  }
  return chips;
}

// Estimator gains sqrt(eta) alpha / c and sqrt(zeta) beta_hat, per (m, terminal).
struct Gains {
  Eigen::MatrixXd user, device;
};

Gains estimator_gains(const Deployment& dep, const ScenarioConfig& config, const EstimationStats& stats) {
  Gains g;
  g.user = std::sqrt(config.eta_u) * dep.alpha.cwiseQuotient(stats.c_user);
  g.device = std::sqrt(config.zeta_d) * stats.beta_hat;
  return g;
}

}  // namespace

std::uint64_t draw_seed(std::uint64_t seed, std::uint64_t index) { return stream_seed(stream_seed(seed, 3), index); }

std::size_t normals_per_draw(const Deployment& dep, const ScenarioConfig& config) {
  return std::size_t(config.N) * dep.num_aps() * block_size(dep, config);
}

void fill_draw_normals(const Deployment& dep, const ScenarioConfig& config, std::mt19937_64& rng, double* out) {
  const int M = dep.num_aps();
  const int Ku = dep.num_users();
  const int Kd = dep.num_devices();
  const int L = config.L;
  const int tau_p = pilot_count(dep);
  const double noise_sd = std::sqrt(0.5 * config.noise_power());
  std::normal_distribution<double> normal(0.0, 1.0);
  auto emit = [&](double sd) {
    for (int l = 0; l < L; ++l) {
      *out++ = sd * normal(rng);
      *out++ = sd * normal(rng);
    }
  };
  for (int n = 0; n < config.N; ++n) {
    for (int m = 0; m < M; ++m) {
      for (int u = 0; u < Ku; ++u) emit(std::sqrt(0.5 * dep.alpha(m, u)));
      for (int d = 0; d < Kd; ++d) emit(std::sqrt(0.5 * dep.beta(m, d)));
      for (int p = 0; p < tau_p; ++p) emit(noise_sd);
      emit(noise_sd);
    }
  }
}

ChannelDraw sample_channels(const Deployment& dep, const ScenarioConfig& config, std::mt19937_64& rng) {
  ChannelDraw draw;
  draw.M = dep.num_aps();
  draw.K_u = dep.num_users();
  draw.K_d = dep.num_devices();
  draw.N = config.N;
  draw.L = config.L;
  draw.tau_p = pilot_count(dep);
  const std::size_t per_prb_ap = std::size_t(draw.L);
  const std::size_t slots = std::size_t(draw.N) * draw.M * per_prb_ap;
  draw.h.resize(slots * draw.K_u);
  draw.g.resize(slots * draw.K_d);
  draw.pilot_noise.resize(slots * draw.tau_p);
  draw.noise.resize(slots);

  std::vector<double> raw(normals_per_draw(dep, config));
  fill_draw_normals(dep, config, rng, raw.data());
  const double* it = raw.data();
  auto take = [&] {
    const cplx z(it[0], it[1]);
    it += 2;
    return z;
  };
  for (int n = 0; n < draw.N; ++n) {
    for (int m = 0; m < draw.M; ++m) {
      for (int u = 0; u < draw.K_u; ++u)
        for (int l = 0; l < draw.L; ++l) draw.h[draw.h_index(n, m, u, l)] = take();
      for (int d = 0; d < draw.K_d; ++d)
        for (int l = 0; l < draw.L; ++l) draw.g[draw.g_index(n, m, d, l)] = take();
      for (int p = 0; p < draw.tau_p; ++p)
        for (int l = 0; l < draw.L; ++l) draw.pilot_noise[draw.p_index(n, m, p, l)] = take();
      for (int l = 0; l < draw.L; ++l) draw.noise[draw.w_index(n, m, l)] = take();
    }
  }
  return draw;
}

ChannelEstimates estimate_channels(const ChannelDraw& draw, const Deployment& dep, const ScenarioConfig& config,
                                   const EstimationStats& stats) {
  const Gains gains = estimator_gains(dep, config, stats);
  const double sq_eta = std::sqrt(config.eta_u);
  const double sq_zeta = std::sqrt(config.zeta_d);
  ChannelEstimates est;
  est.h_hat.resize(draw.h.size());
  est.g_hat.resize(draw.g.size());
  std::vector<cplx> y(std::size_t(draw.tau_p) * draw.L);
  for (int n = 0; n < draw.N; ++n) {
    for (int m = 0; m < draw.M; ++m) {
      for (int p = 0; p < draw.tau_p; ++p)
        for (int l = 0; l < draw.L; ++l) y[p * draw.L + l] = draw.pilot_noise[draw.p_index(n, m, p, l)];
      for (int u = 0; u < draw.K_u; ++u)
        for (int l = 0; l < draw.L; ++l) y[dep.pilot_of_user[u] * draw.L + l] += sq_eta * draw.h[draw.h_index(n, m, u, l)];
      for (int d = 0; d < draw.K_d; ++d)
        for (int l = 0; l < draw.L; ++l)
          y[dep.pilot_of_device[d] * draw.L + l] += sq_zeta * draw.g[draw.g_index(n, m, d, l)];
      for (int u = 0; u < draw.K_u; ++u)
        for (int l = 0; l < draw.L; ++l)
          est.h_hat[draw.h_index(n, m, u, l)] = gains.user(m, u) * y[dep.pilot_of_user[u] * draw.L + l];
      for (int d = 0; d < draw.K_d; ++d)
        for (int l = 0; l < draw.L; ++l)
          est.g_hat[draw.g_index(n, m, d, l)] = gains.device(m, d) * y[dep.pilot_of_device[d] * draw.L + l];
    }
  }
  return est;
}

ChannelEstimates estimate_channels(const ChannelDraw& draw, const Deployment& dep, const ScenarioConfig& config) {
  return estimate_channels(draw, dep, config, compute_stats(dep, config));
}

OracleSums reference_sums(const Deployment& dep, const ScenarioConfig& config, long long first, long long count,
                          std::uint64_t seed) {
  const int M = dep.num_aps();
  const int Ku = dep.num_users();
  const int Kd = dep.num_devices();
  const int L = config.L;
  const int N = config.N;
  const EstimationStats stats = compute_stats(dep, config);
  const auto chips = chip_table(config, Kd);

  OracleSums out;
  out.layout = {Ku, Kd};
  out.N = N;
  out.draws = count;
  out.values.assign(out.layout.size(), 0.0);
  auto& v = out.values;
  const SumLayout& lay = out.layout;

  auto dot = [L](const cplx* a, const cplx* b) {
    cplx acc = 0.0;
    for (int l = 0; l < L; ++l) acc += std::conj(a[l]) * b[l];
    return acc;
  };

  for (long long i = 0; i < count; ++i) {
    std::mt19937_64 rng(draw_seed(seed, std::uint64_t(first + i)));
    const ChannelDraw draw = sample_channels(dep, config, rng);
    const ChannelEstimates est = estimate_channels(draw, dep, config, stats);

    std::vector<double> s(Kd, 0.0);
    std::vector<cplx> jdd(std::size_t(Kd) * Kd, 0.0), wd(Kd, 0.0);
    std::vector<double> edu(std::size_t(Kd) * Ku, 0.0);
    for (int n = 0; n < N; ++n) {
      std::vector<cplx> x(Ku, 0.0), iuu(std::size_t(Ku) * Ku, 0.0), iud(std::size_t(Ku) * Kd, 0.0), wu(Ku, 0.0);
      std::vector<cplx> jdu(std::size_t(Kd) * Ku, 0.0);
      for (int m = 0; m < M; ++m) {
        const cplx* w = &draw.noise[draw.w_index(n, m, 0)];
        for (int u = 0; u < Ku; ++u) {
          if (!dep.a_mask(m, u)) continue;
          const cplx* hh = &est.h_hat[draw.h_index(n, m, u, 0)];
          x[u] += dot(hh, &draw.h[draw.h_index(n, m, u, 0)]);
          for (int k = 0; k < Ku; ++k) iuu[u * Ku + k] += dot(hh, &draw.h[draw.h_index(n, m, k, 0)]);
          for (int d = 0; d < Kd; ++d) iud[u * Kd + d] += dot(hh, &draw.g[draw.g_index(n, m, d, 0)]);
          wu[u] += dot(hh, w);
        }
        for (int d = 0; d < Kd; ++d) {
          if (!dep.b_mask(m, d)) continue;
          const cplx* t = &est.g_hat[draw.g_index(n, m, d, 0)];
          const cplx tg = dot(t, &draw.g[draw.g_index(n, m, d, 0)]);
          s[d] += std::norm(tg);
          for (int k = 0; k < Kd; ++k) {
            const cplx prod = std::conj(tg) * dot(t, &draw.g[draw.g_index(n, m, k, 0)]);
            jdd[d * Kd + k] += (chips[d][n] * chips[k][n]) * prod;
          }
          for (int u = 0; u < Ku; ++u) {
            const cplx prod = std::conj(tg) * dot(t, &draw.h[draw.h_index(n, m, u, 0)]);
            jdu[d * Ku + u] += chips[d][n] * prod;
          }
          wd[d] += chips[d][n] * (std::conj(tg) * dot(t, w));
        }
      }
      for (int u = 0; u < Ku; ++u) {
        v[lay.x_re(u)] += x[u].real();
        v[lay.x_im(u)] += x[u].imag();
        v[lay.x_abs2(u)] += std::norm(x[u]);
        for (int k = 0; k < Ku; ++k) v[lay.i_uu(u, k)] += std::norm(iuu[u * Ku + k]);
        for (int d = 0; d < Kd; ++d) v[lay.i_ud(u, d)] += std::norm(iud[u * Kd + d]);
        v[lay.w_u(u)] += std::norm(wu[u]);
      }
      for (int d = 0; d < Kd; ++d)
        for (int u = 0; u < Ku; ++u) edu[d * Ku + u] += std::norm(jdu[d * Ku + u]);
    }
    for (int d = 0; d < Kd; ++d) {
      v[lay.s_sum(d)] += s[d];
      v[lay.s_sq(d)] += s[d] * s[d];
      for (int k = 0; k < Kd; ++k) v[lay.j_dd(d, k)] += std::norm(jdd[d * Kd + k]);
      for (int u = 0; u < Ku; ++u) v[lay.j_du(d, u)] += edu[d * Ku + u];
      v[lay.w_d(d)] += std::norm(wd[d]);
    }
  }
  return out;
}

namespace {

// Split complex rows of kOracleLanes doubles.
struct CRow {
  double* re;
  double* im;
};

class BatchEngine {
 public:
  BatchEngine(const Deployment& dep, const ScenarioConfig& config, const kernels::KernelTable& k,
              std::uint64_t seed)
      : dep_(dep),
        config_(config),
        k_(k),
        seed_(seed),
        M_(dep.num_aps()),
        Ku_(dep.num_users()),
        Kd_(dep.num_devices()),
        L_(config.L),
        N_(config.N),
        tau_p_(dep.tau_p),
        layout_{Ku_, Kd_},
        stats_(compute_stats(dep, config)),
        gains_(estimator_gains(dep, config, stats_)),
        chips_(chip_table(config, Kd_)),
        per_draw_(normals_per_draw(dep, config)),
        block_(block_size(dep, config)) {
    raw_.resize(per_draw_ * kOracleLanes);
    acc_.resize(layout_.size() * kOracleLanes);
  }

  // Sums of draws [first, first + count), count <= kOracleLanes.
  std::vector<double> run(long long first, int count) {
    std::vector<double> row(per_draw_);
    for (int lane = 0; lane < count; ++lane) {
      std::mt19937_64 rng(draw_seed(seed_, std::uint64_t(first + lane)));
      fill_draw_normals(dep_, config_, rng, row.data());
      for (std::size_t i = 0; i < per_draw_; ++i) raw_[i * kOracleLanes + lane] = row[i];
    }
    std::fill(acc_.begin(), acc_.end(), 0.0);
    compute(count);
    std::vector<double> out(layout_.size(), 0.0);
    for (std::size_t s = 0; s < layout_.size(); ++s) {
      double sum = 0.0;
      for (int lane = 0; lane < count; ++lane) sum += acc_[s * kOracleLanes + lane];
      out[s] = sum;
    }
    return out;
  }

 private:
  // Row helpers into scratch storage.
  class Scratch {
   public:
    explicit Scratch(std::size_t complex_rows) : data_(2 * complex_rows * kOracleLanes, 0.0) {}
    CRow row(std::size_t i) { return {&data_[2 * i * kOracleLanes], &data_[(2 * i + 1) * kOracleLanes]}; }
    void zero() { std::fill(data_.begin(), data_.end(), 0.0); }

   private:
    std::vector<double> data_;
  };

  CRow raw_row(int n, int m, std::size_t offset_pairs, int l) {
    // Component pair index inside one (n, m) block; re/im are adjacent rows.
    const std::size_t idx = (std::size_t(n) * M_ + m) * block_ + 2 * (offset_pairs * L_ + l);
    return {&raw_[idx * kOracleLanes], &raw_[(idx + 1) * kOracleLanes]};
  }
  CRow h_row(int n, int m, int u, int l) { return raw_row(n, m, u, l); }
  CRow g_row(int n, int m, int d, int l) { return raw_row(n, m, Ku_ + d, l); }
  CRow pn_row(int n, int m, int p, int l) { return raw_row(n, m, Ku_ + Kd_ + p, l); }
  CRow w_row(int n, int m, int l) { return raw_row(n, m, Ku_ + Kd_ + tau_p_, l); }
  double* acc(std::size_t s) { return &acc_[s * kOracleLanes]; }

  void compute(int count) {
    const std::size_t c = count;
    const double sq_eta = std::sqrt(config_.eta_u);
    const double sq_zeta = std::sqrt(config_.zeta_d);

    Scratch y(std::size_t(tau_p_) * L_);
    Scratch hh(std::size_t(Ku_) * L_);
    Scratch tt(std::size_t(Kd_) * L_);
    // Per-PRB user accumulators.
    Scratch x(Ku_), iuu(std::size_t(Ku_) * Ku_), iud(std::size_t(Ku_) * Kd_), wu(Ku_);
    Scratch jdu(std::size_t(Kd_) * Ku_);
    // Per-draw device accumulators.
    Scratch jdd(std::size_t(Kd_) * Kd_), wd(Kd_);
    std::vector<double> s(std::size_t(Kd_) * kOracleLanes), edu(std::size_t(Kd_) * Ku_ * kOracleLanes);
    Scratch tmp(3);
    CRow tg = tmp.row(0), tx = tmp.row(1), prod = tmp.row(2);
    std::vector<double> zeros(kOracleLanes, 0.0);
    std::fill(s.begin(), s.end(), 0.0);
    std::fill(edu.begin(), edu.end(), 0.0);
    jdd.zero();
    wd.zero();

    auto cdot = [&](CRow a, CRow b, CRow out) { k_.cdot_acc(c, a.re, a.im, b.re, b.im, out.re, out.im); };
    auto caxpy = [&](double scale, CRow xr, CRow yr) {
      k_.axpy(c, scale, xr.re, yr.re);
      k_.axpy(c, scale, xr.im, yr.im);
    };
    auto czero = [&](CRow r) {
      std::fill(r.re, r.re + c, 0.0);
      std::fill(r.im, r.im + c, 0.0);
    };

    for (int n = 0; n < N_; ++n) {
      x.zero();
      iuu.zero();
      iud.zero();
      wu.zero();
      jdu.zero();
      for (int m = 0; m < M_; ++m) {
        // Pilot observations and estimates.
        for (int p = 0; p < tau_p_; ++p) {
          for (int l = 0; l < L_; ++l) {
            CRow dst = y.row(p * L_ + l), src = pn_row(n, m, p, l);
            std::copy(src.re, src.re + c, dst.re);
            std::copy(src.im, src.im + c, dst.im);
          }
        }
        for (int u = 0; u < Ku_; ++u)
          for (int l = 0; l < L_; ++l) caxpy(sq_eta, h_row(n, m, u, l), y.row(dep_.pilot_of_user[u] * L_ + l));
        for (int d = 0; d < Kd_; ++d)
          for (int l = 0; l < L_; ++l) caxpy(sq_zeta, g_row(n, m, d, l), y.row(dep_.pilot_of_device[d] * L_ + l));
        for (int u = 0; u < Ku_; ++u) {
          for (int l = 0; l < L_; ++l) {
            CRow src = y.row(dep_.pilot_of_user[u] * L_ + l), dst = hh.row(u * L_ + l);
            k_.scale(c, gains_.user(m, u), src.re, dst.re);
            k_.scale(c, gains_.user(m, u), src.im, dst.im);
          }
        }
        for (int d = 0; d < Kd_; ++d) {
          for (int l = 0; l < L_; ++l) {
            CRow src = y.row(dep_.pilot_of_device[d] * L_ + l), dst = tt.row(d * L_ + l);
            k_.scale(c, gains_.device(m, d), src.re, dst.re);
            k_.scale(c, gains_.device(m, d), src.im, dst.im);
          }
        }

        for (int u = 0; u < Ku_; ++u) {
          if (!dep_.a_mask(m, u)) continue;
          for (int l = 0; l < L_; ++l) {
            CRow a = hh.row(u * L_ + l);
            cdot(a, h_row(n, m, u, l), x.row(u));
            for (int k = 0; k < Ku_; ++k) cdot(a, h_row(n, m, k, l), iuu.row(u * Ku_ + k));
            for (int d = 0; d < Kd_; ++d) cdot(a, g_row(n, m, d, l), iud.row(u * Kd_ + d));
            cdot(a, w_row(n, m, l), wu.row(u));
          }
        }

        for (int d = 0; d < Kd_; ++d) {
          if (!dep_.b_mask(m, d)) continue;
          auto project = [&](auto&& row_of, CRow out) {
            czero(out);
            for (int l = 0; l < L_; ++l) cdot(tt.row(d * L_ + l), row_of(l), out);
          };
          project([&](int l) { return g_row(n, m, d, l); }, tg);
          k_.abs2_acc(c, tg.re, tg.im, &s[std::size_t(d) * kOracleLanes]);
          for (int k = 0; k < Kd_; ++k) {
            project([&](int l) { return g_row(n, m, k, l); }, tx);
            k_.cmul_conj(c, tg.re, tg.im, tx.re, tx.im, prod.re, prod.im);
            caxpy(chips_[d][n] * chips_[k][n], prod, jdd.row(d * Kd_ + k));
          }
          for (int u = 0; u < Ku_; ++u) {
            project([&](int l) { return h_row(n, m, u, l); }, tx);
            k_.cmul_conj(c, tg.re, tg.im, tx.re, tx.im, prod.re, prod.im);
            caxpy(chips_[d][n], prod, jdu.row(d * Ku_ + u));
          }
          project([&](int l) { return w_row(n, m, l); }, tx);
          k_.cmul_conj(c, tg.re, tg.im, tx.re, tx.im, prod.re, prod.im);
          caxpy(chips_[d][n], prod, wd.row(d));
        }
      }

      for (int u = 0; u < Ku_; ++u) {
        CRow xr = x.row(u);
        k_.axpy(c, 1.0, xr.re, acc(layout_.x_re(u)));
        k_.axpy(c, 1.0, xr.im, acc(layout_.x_im(u)));
        k_.abs2_acc(c, xr.re, xr.im, acc(layout_.x_abs2(u)));
        for (int k = 0; k < Ku_; ++k) {
          CRow r = iuu.row(u * Ku_ + k);
          k_.abs2_acc(c, r.re, r.im, acc(layout_.i_uu(u, k)));
        }
        for (int d = 0; d < Kd_; ++d) {
          CRow r = iud.row(u * Kd_ + d);
          k_.abs2_acc(c, r.re, r.im, acc(layout_.i_ud(u, d)));
        }
        CRow r = wu.row(u);
        k_.abs2_acc(c, r.re, r.im, acc(layout_.w_u(u)));
      }
      for (int d = 0; d < Kd_; ++d) {
        for (int u = 0; u < Ku_; ++u) {
          CRow r = jdu.row(d * Ku_ + u);
          k_.abs2_acc(c, r.re, r.im, &edu[(std::size_t(d) * Ku_ + u) * kOracleLanes]);
        }
      }
    }

    for (int d = 0; d < Kd_; ++d) {
      const double* sd = &s[std::size_t(d) * kOracleLanes];
      k_.axpy(c, 1.0, sd, acc(layout_.s_sum(d)));
      k_.abs2_acc(c, sd, zeros.data(), acc(layout_.s_sq(d)));
      for (int k = 0; k < Kd_; ++k) {
        CRow r = jdd.row(d * Kd_ + k);
        k_.abs2_acc(c, r.re, r.im, acc(layout_.j_dd(d, k)));
      }
      for (int u = 0; u < Ku_; ++u)
        k_.axpy(c, 1.0, &edu[(std::size_t(d) * Ku_ + u) * kOracleLanes], acc(layout_.j_du(d, u)));
      CRow r = wd.row(d);
      k_.abs2_acc(c, r.re, r.im, acc(layout_.w_d(d)));
    }
  }

  const Deployment& dep_;
  const ScenarioConfig& config_;
  const kernels::KernelTable& k_;
  std::uint64_t seed_;
  int M_, Ku_, Kd_, L_, N_, tau_p_;
  SumLayout layout_;
  EstimationStats stats_;
  Gains gains_;
  std::vector<std::vector<double>> chips_;
  std::size_t per_draw_, block_;
  std::vector<double> raw_;
  std::vector<double> acc_;
};

}  // namespace

OracleSums oracle_sums(const Deployment& dep, const ScenarioConfig& config, long long n_draws,
                       const OracleOptions& options) {
  const kernels::KernelTable& table = options.table ? *options.table : kernels::active_table();
  const long long batches = (n_draws + kOracleLanes - 1) / kOracleLanes;
  const int workers = std::max(1, std::min<int>(options.workers, static_cast<int>(std::max(1LL, batches))));

  std::vector<std::vector<double>> partial(batches);
  std::atomic<long long> next{0};
  auto worker = [&] {
    BatchEngine engine(dep, config, table, options.seed);
    for (long long b = next++; b < batches; b = next++) {
      const long long first = b * kOracleLanes;
      const int count = static_cast<int>(std::min<long long>(kOracleLanes, n_draws - first));
      partial[b] = engine.run(first, count);
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  OracleSums out;
  out.layout = {dep.num_users(), dep.num_devices()};
  out.N = config.N;
  out.draws = n_draws;
  out.values.assign(out.layout.size(), 0.0);
  for (const auto& p : partial) {
    for (std::size_t i = 0; i < p.size(); ++i) out.values[i] += p[i];
  }
  return out;
}

MomentSet moments_from_sums(const OracleSums& sums) {
  const SumLayout& lay = sums.layout;
  const int Ku = lay.K_u;
  const int Kd = lay.K_d;
  const auto& v = sums.values;
  const double prb_samples = static_cast<double>(sums.draws) * sums.N;
  const double draws = static_cast<double>(sums.draws);

  MomentSet m;
  m.delta.resize(Ku);
  m.upsilon.resize(Ku);
  m.xi.resize(Ku);
  m.kappa = Eigen::MatrixXd::Zero(Ku, Ku);
  m.varkappa.resize(Ku, Kd);
  for (int u = 0; u < Ku; ++u) {
    const double re = v[lay.x_re(u)] / prb_samples;
    const double im = v[lay.x_im(u)] / prb_samples;
    m.delta(u) = re * re + im * im;
    m.upsilon(u) = v[lay.x_abs2(u)] / prb_samples - m.delta(u);
    for (int k = 0; k < Ku; ++k) {
      if (k != u) m.kappa(u, k) = v[lay.i_uu(u, k)] / prb_samples;
    }
    for (int d = 0; d < Kd; ++d) m.varkappa(u, d) = v[lay.i_ud(u, d)] / prb_samples;
    m.xi(u) = v[lay.w_u(u)] / prb_samples;
  }

  m.lambda.resize(Kd);
  m.nu.resize(Kd);
  m.chi.resize(Kd);
  m.eps_dd = Eigen::MatrixXd::Zero(Kd, Kd);
  m.eps_du.resize(Kd, Ku);
  for (int d = 0; d < Kd; ++d) {
    const double mean = v[lay.s_sum(d)] / draws;
    m.lambda(d) = mean * mean;
    m.nu(d) = v[lay.s_sq(d)] / draws - mean * mean;
    for (int k = 0; k < Kd; ++k) {
      if (k != d) m.eps_dd(d, k) = v[lay.j_dd(d, k)] / draws;
    }
    for (int u = 0; u < Ku; ++u) m.eps_du(d, u) = v[lay.j_du(d, u)] / draws;
    m.chi(d) = v[lay.w_d(d)] / draws;
  }
  return m;
}

MomentSet empirical_moments(const Deployment& dep, const ScenarioConfig& config, long long n_draws,
                            const OracleOptions& options) {
  if (n_draws < 1000) throw OracleError("at least 1000 draws are required for moment estimates");
  return moments_from_sums(oracle_sums(dep, config, n_draws, options));
}

MomentSet empirical_embb_moments(const Deployment& dep, const ScenarioConfig& config, long long n_draws,
                                 const OracleOptions& options) {
  MomentSet m = empirical_moments(dep, config, n_draws, options);
  m.lambda.resize(0);
  m.nu.resize(0);
  m.chi.resize(0);
  m.eps_dd.resize(0, 0);
  m.eps_du.resize(0, 0);
  return m;
}

MomentSet empirical_mmtc_moments(const Deployment& dep, const ScenarioConfig& config, long long n_draws,
                                 const OracleOptions& options) {
  MomentSet m = empirical_moments(dep, config, n_draws, options);
  m.delta.resize(0);
  m.upsilon.resize(0);
  m.xi.resize(0);
  m.kappa.resize(0, 0);
  m.varkappa.resize(0, 0);
  return m;
}

}  // namespace cfmimo
