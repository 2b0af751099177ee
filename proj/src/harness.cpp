#include "cfmimo/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <thread>

#include "cfmimo/channel_stats.hpp"
#include "cfmimo/heuristics.hpp"
#include "cfmimo/mc_oracle.hpp"
#include "cfmimo/pn_sequence.hpp"
#include "json.hpp"

namespace cfmimo {

using nlohmann::json;

std::string to_string(Policy policy) {
  switch (policy) {
    case Policy::OPC: return "opc";
    case Policy::UPC: return "upc";
    case Policy::FPC: return "fpc";
    case Policy::GFPC: return "gfpc";
  }
  return "?";
}

Policy parse_policy(const std::string& text) {
  if (text == "opc") return Policy::OPC;
  if (text == "upc") return Policy::UPC;
  if (text == "fpc") return Policy::FPC;
  if (text == "gfpc") return Policy::GFPC;
  throw ConfigError("unknown policy '" + text + "' (opc, upc, fpc, gfpc)");
}

std::uint64_t instance_seed(std::uint64_t seed, std::uint64_t index) { return stream_seed(stream_seed(seed, 4), index); }

void parallel_for(long long n, int workers, const std::function<void(long long)>& fn) {
  workers = std::max(1, workers);
  if (workers == 1 || n <= 1) {
    for (long long i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<long long> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (long long i = next++; i < n; i = next++) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

CdfSeries make_cdf(std::string label, const std::vector<std::pair<double, bool>>& samples) {
  std::vector<std::pair<double, bool>> sorted = samples;
  std::sort(sorted.begin(), sorted.end());
  CdfSeries out;
  out.label = std::move(label);
  long long feasible = 0;
  for (const auto& [v, f] : sorted) {
    out.values.push_back(v);
    out.feasible.push_back(f ? 1 : 0);
    feasible += f;
  }
  out.feasible_fraction = sorted.empty() ? 0.0 : double(feasible) / sorted.size();
  return out;
}

InstanceResult evaluate_policy(const ScenarioConfig& config, const Deployment& dep, const MomentSet& moments,
                               Policy policy, const BatchOptions& options, double user_scale,
                               double device_scale) {
  InstanceResult out;
  SolveResult metrics;
  if (policy == Policy::OPC) {
    metrics = sequential_fp(config, dep, moments, options.regime, options.solve);
    out.feasible = metrics.feasible;
    out.status = metrics.status;
    out.outer_iters = metrics.outer_iters;
    out.inner_iters = metrics.inner_iters;
    out.subproblem_iters = metrics.subproblem_iters;
  } else {
    metrics.theta_star = policy == Policy::UPC    ? upc(config)
                         : policy == Policy::FPC ? fpc(config, dep)
                                                 : gfpc(config, dep);
    fill_terminal_metrics(config, moments, options.regime, metrics);
    out.feasible = mark_feasible(metrics.theta_star, moments, config, options.regime).feasible;
    out.status = out.feasible ? "feasible" : "infeasible";
  }
  out.theta = metrics.theta_star;
  out.user_rate = metrics.user_rate * user_scale;
  out.device_rate = metrics.device_rate * device_scale;
  out.device_ee = metrics.device_ee * device_scale;
  if (out.feasible) {
    out.min_ee = out.device_ee.size() ? out.device_ee.minCoeff() : 0.0;
    out.min_user_rate = out.user_rate.size() ? out.user_rate.minCoeff() : 0.0;
  }
  if (options.keep_traces && policy == Policy::OPC) out.trace = trace_jsonl(metrics, 0);
  return out;
}

namespace {

BatchResult collect(std::string label, std::vector<InstanceResult> instances) {
  BatchResult out;
  out.label = std::move(label);
  std::vector<std::pair<double, bool>> min_ee, dev_ee, min_rate, rate;
  long long feasible = 0;
  for (const auto& r : instances) {
    feasible += r.feasible;
    min_ee.emplace_back(r.feasible ? r.min_ee : 0.0, r.feasible);
    min_rate.emplace_back(r.feasible ? r.min_user_rate : 0.0, r.feasible);
    for (Eigen::Index d = 0; d < r.device_ee.size(); ++d) dev_ee.emplace_back(r.feasible ? r.device_ee(d) : 0.0, r.feasible);
    for (Eigen::Index u = 0; u < r.user_rate.size(); ++u) rate.emplace_back(r.feasible ? r.user_rate(u) : 0.0, r.feasible);
  }
  out.min_ee = make_cdf(out.label + ":min_ee", min_ee);
  out.device_ee = make_cdf(out.label + ":device_ee", dev_ee);
  out.min_user_rate = make_cdf(out.label + ":min_user_rate", min_rate);
  out.user_rate = make_cdf(out.label + ":user_rate", rate);
  out.feasible_fraction = instances.empty() ? 0.0 : double(feasible) / instances.size();
  out.instances = std::move(instances);
  return out;
}

// Deployment and moments of instance i; `tweak` may replace the moments.
template <typename Eval>
std::vector<InstanceResult> run_instances(const ScenarioConfig& config, long long n, const BatchOptions& options,
                                          Eval&& eval) {
  std::vector<InstanceResult> results(n);
  parallel_for(n, options.workers, [&](long long i) {
    ScenarioConfig cfg = config;
    cfg.seed = instance_seed(config.seed, i);
    InstanceResult r;
    try {
      const Deployment dep = generate_deployment(cfg);
      r = eval(cfg, dep);
    } catch (const std::exception& e) {
      r = InstanceResult{};
      r.status = std::string("error: ") + e.what();
    }
    r.index = i;
    r.seed = cfg.seed;
    if (!r.trace.empty()) {
      // Re-key trace lines with the instance index.
      std::istringstream lines(r.trace);
      std::string line, rekeyed;
      while (std::getline(lines, line)) {
        json j = json::parse(line);
        j["instance"] = i;
        rekeyed += j.dump() + "\n";
      }
      r.trace = rekeyed;
    }
    results[i] = std::move(r);
  });
  return results;
}

}  // namespace

BatchResult run_batch(const ScenarioConfig& config, Policy policy, long long n_instances, const BatchOptions& options) {
  config.validate();
  auto results = run_instances(config, n_instances, options, [&](const ScenarioConfig& cfg, const Deployment& dep) {
    const MomentSet moments = compute_moments(compute_stats(dep, cfg), dep, cfg);
    return evaluate_policy(cfg, dep, moments, policy, options);
  });
  return collect(to_string(policy), std::move(results));
}

OmaSetup oma_setup(const ScenarioConfig& config, double r_u, double r_d) {
  if (!(r_u > 0.0) || !(r_d >= 0.0) || r_u + r_d > 100.0) {
    throw ConfigError("OMA shares need r_u > 0, r_d >= 0 and r_u + r_d <= 100");
  }
  const double target = r_d * config.N / 100.0;
  if (target < 0.5) throw ConfigError("OMA device share rounds to fewer than one PRB");
  OmaSetup out;
  out.config = config;
  out.user_share = r_u / 100.0;
  out.device_share = r_d / 100.0;
  out.device_length = nearest_sequence_length(target);
  out.config.N = out.device_length;
  // share * psi log2(1 + gamma) >= R  <=>  psi log2(1 + gamma) >= R / share.
  out.config.R_embb_min = config.R_embb_min / out.user_share;
  out.config.R_mmtc_min = config.R_mmtc_min / out.device_share;
  return out;
}

MomentSet oma_moments(const OmaSetup& setup, const Deployment& dep) {
  MomentSet m = compute_moments(compute_stats(dep, setup.config), dep, setup.config);
  m.varkappa.setZero();
  m.eps_du.setZero();
  return m;
}

OmaComparison compare_oma(const ScenarioConfig& config, double r_u, double r_d, Policy policy, long long n_instances,
                          const BatchOptions& options) {
  config.validate();
  const OmaSetup setup = oma_setup(config, r_u, r_d);
  OmaComparison out;
  out.noma = run_batch(config, policy, n_instances, options);
  auto results = run_instances(config, n_instances, options, [&](const ScenarioConfig& cfg, const Deployment& dep) {
    OmaSetup local = setup;
    local.config.seed = cfg.seed;
    const MomentSet moments = oma_moments(local, dep);
    return evaluate_policy(local.config, dep, moments, policy, options, local.user_share, local.device_share);
  });
  std::ostringstream label;
  label << "oma" << format_double(r_u) << "_" << format_double(r_d) << ":" << to_string(policy);
  out.oma = collect(label.str(), std::move(results));
  return out;
}

ValidationReport validate(const ScenarioConfig& config, long long n_draws, std::uint64_t seed, int workers) {
  config.validate();
  const Deployment dep = generate_deployment(config);
  const MomentSet cf = compute_moments(compute_stats(dep, config), dep, config);
  OracleOptions opts;
  opts.seed = seed;
  opts.workers = workers;
  const MomentSet mc = empirical_moments(dep, config, n_draws, opts);

  ValidationReport out;
  out.draws = n_draws;
  auto add = [&](const char* name, int i, int j, double a, double b, double tol) {
    ValidationRow row{name, i, j, a, b, 0.0, tol, false};
    if (a == 0.0) {
      row.rel_error = b == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    } else {
      row.rel_error = std::abs(b - a) / std::abs(a);
    }
    row.pass = row.rel_error <= tol;
    out.pass = out.pass && row.pass;
    out.rows.push_back(row);
  };
  const int Ku = cf.num_users(), Kd = cf.num_devices();
  for (int u = 0; u < Ku; ++u) {
    add("delta", u, -1, cf.delta(u), mc.delta(u), 0.03);
    add("upsilon", u, -1, cf.upsilon(u), mc.upsilon(u), 0.03);
    add("xi", u, -1, cf.xi(u), mc.xi(u), 0.03);
    for (int k = 0; k < Ku; ++k)
      if (k != u) add("kappa", u, k, cf.kappa(u, k), mc.kappa(u, k), 0.03);
    for (int d = 0; d < Kd; ++d) add("varkappa", u, d, cf.varkappa(u, d), mc.varkappa(u, d), 0.03);
  }
  for (int d = 0; d < Kd; ++d) {
    add("lambda", d, -1, cf.lambda(d), mc.lambda(d), 0.05);
    add("nu", d, -1, cf.nu(d), mc.nu(d), 0.05);
    add("chi", d, -1, cf.chi(d), mc.chi(d), 0.05);
    for (int k = 0; k < Kd; ++k)
      if (k != d) add("eps_dd", d, k, cf.eps_dd(d, k), mc.eps_dd(d, k), 0.05);
    for (int u = 0; u < Ku; ++u) add("eps_du", d, u, cf.eps_du(d, u), mc.eps_du(d, u), 0.05);
  }
  return out;
}

std::vector<ScenarioSpec> default_dataset_grid() {
  return {{"ku2_kd10_m10_ms5", 2, 10, 10, 5},
          {"ku2_kd10_m10_ms1", 2, 10, 10, 1},
          {"ku2_kd10_m5_ms5", 2, 10, 5, 5},
          {"ku1_kd10_m10_ms5", 1, 10, 10, 5},
          {"ku1_kd5_m10_ms5", 1, 5, 10, 5}};
}

ScenarioSpec parse_scenario(const std::string& text) {
  ScenarioSpec s;
  char c1 = 0, c2 = 0, c3 = 0;
  std::istringstream in(text);
  if (!(in >> s.K_u >> c1 >> s.K_d >> c2 >> s.M >> c3 >> s.M_s) || c1 != ',' || c2 != ',' || c3 != ',') {
    throw ConfigError("scenario must be 'K_u,K_d,M,M_s', got '" + text + "'");
  }
  std::ostringstream name;
  name << "ku" << s.K_u << "_kd" << s.K_d << "_m" << s.M << "_ms" << s.M_s;
  s.name = name.str();
  return s;
}

namespace {

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

json vector_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd vector_from(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Eigen::MatrixXd matrix_from(const json& j, Eigen::Index cols) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), cols);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = j[i][k].get<double>();
  }
  return m;
}

json moments_json(const MomentSet& m) {
  return {{"delta", vector_json(m.delta)},   {"upsilon", vector_json(m.upsilon)}, {"xi", vector_json(m.xi)},
          {"kappa", matrix_json(m.kappa)},   {"varkappa", matrix_json(m.varkappa)},
          {"lambda", vector_json(m.lambda)}, {"nu", vector_json(m.nu)},           {"chi", vector_json(m.chi)},
          {"eps_dd", matrix_json(m.eps_dd)}, {"eps_du", matrix_json(m.eps_du)}};
}

MomentSet moments_from(const json& j) {
  MomentSet m;
  m.delta = vector_from(j.at("delta"));
  m.upsilon = vector_from(j.at("upsilon"));
  m.xi = vector_from(j.at("xi"));
  m.lambda = vector_from(j.at("lambda"));
  m.nu = vector_from(j.at("nu"));
  m.chi = vector_from(j.at("chi"));
  const Eigen::Index Ku = m.delta.size(), Kd = m.lambda.size();
  m.kappa = matrix_from(j.at("kappa"), Ku);
  m.varkappa = matrix_from(j.at("varkappa"), Kd);
  m.eps_dd = matrix_from(j.at("eps_dd"), Kd);
  m.eps_du = matrix_from(j.at("eps_du"), Ku);
  return m;
}

json record_json(const DatasetRecord& r) {
  return {{"index", r.index},          {"seed", r.seed},           {"digest", r.digest},
          {"phi", r.phi},              {"mask", r.mask},           {"theta", r.theta},
          {"user_rate", r.user_rate},  {"device_rate", r.device_rate}, {"device_ee", r.device_ee},
          {"min_ee", r.min_ee},        {"moments", moments_json(r.moments)}};
}

DatasetRecord record_from(const json& j) {
  DatasetRecord r;
  r.index = j.at("index").get<long long>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.digest = j.at("digest").get<std::string>();
  r.phi = j.at("phi").get<std::vector<double>>();
  r.mask = j.at("mask").get<std::vector<int>>();
  r.theta = j.at("theta").get<std::vector<double>>();
  r.user_rate = j.at("user_rate").get<std::vector<double>>();
  r.device_rate = j.at("device_rate").get<std::vector<double>>();
  r.device_ee = j.at("device_ee").get<std::vector<double>>();
  r.min_ee = j.at("min_ee").get<double>();
  r.moments = moments_from(j.at("moments"));
  return r;
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

DatasetRecord make_record(const ScenarioConfig& cfg, const Deployment& dep, const MomentSet& moments,
                          const InstanceResult& r, const std::string& digest) {
  DatasetRecord rec;
  rec.index = r.index;
  rec.seed = r.seed;
  rec.digest = digest;
  for (int m = 0; m < dep.num_aps(); ++m)
    for (int u = 0; u < dep.num_users(); ++u) rec.phi.push_back(dep.alpha(m, u)), rec.mask.push_back(dep.a_mask(m, u));
  for (int m = 0; m < dep.num_aps(); ++m)
    for (int d = 0; d < dep.num_devices(); ++d) rec.phi.push_back(dep.beta(m, d)), rec.mask.push_back(dep.b_mask(m, d));
  rec.theta = to_std(r.theta.stacked());
  rec.user_rate = to_std(r.user_rate);
  rec.device_rate = to_std(r.device_rate);
  rec.device_ee = to_std(r.device_ee);
  rec.min_ee = r.min_ee;
  rec.moments = moments;
  (void)cfg;
  return rec;
}

// Fisher-Yates with a fixed generator, so splits do not depend on the standard library.
std::vector<long long> shuffled(long long n, std::uint64_t seed) {
  std::vector<long long> order(n);
  for (long long i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  for (long long i = n - 1; i > 0; --i) std::swap(order[i], order[rng() % static_cast<std::uint64_t>(i + 1)]);
  return order;
}

void write_split(const std::filesystem::path& path, const std::vector<long long>& order, long long first, long long count) {
  std::ofstream out(path);
  if (!out) throw HarnessError("cannot write " + path.string());
  std::vector<long long> part(order.begin() + first, order.begin() + first + count);
  std::sort(part.begin(), part.end());
  for (long long i : part) out << i << '\n';
}

}  // namespace

DatasetSummary export_dataset(const ScenarioConfig& base, const ScenarioSpec& scenario, long long n_records,
                              const std::string& dir, const BatchOptions& options) {
  if (n_records <= 0) throw ConfigError("dataset needs at least one record");
  ScenarioConfig config = base;
  config.K_u = scenario.K_u;
  config.K_d = scenario.K_d;
  config.M = scenario.M;
  config.M_s = scenario.M_s;
  config.validate();
  const std::string digest = config_digest(config);

  std::filesystem::create_directories(dir);
  const std::filesystem::path data_path = std::filesystem::path(dir) / (scenario.name + ".jsonl");
  std::ofstream data(data_path);
  if (!data) throw HarnessError("cannot write " + data_path.string());

  // Attempt instances in blocks of n_records; keep the first feasible ones in index order.
  std::vector<DatasetRecord> records;
  long long attempts = 0, infeasible = 0;
  while (static_cast<long long>(records.size()) < n_records) {
    const long long first = attempts;
    std::vector<std::optional<DatasetRecord>> block(n_records);
    parallel_for(n_records, options.workers, [&](long long k) {
      ScenarioConfig cfg = config;
      cfg.seed = instance_seed(config.seed, first + k);
      const Deployment dep = generate_deployment(cfg);
      const MomentSet moments = compute_moments(compute_stats(dep, cfg), dep, cfg);
      InstanceResult r;
      try {
        r = evaluate_policy(cfg, dep, moments, Policy::OPC, options);
      } catch (const std::exception&) {
        r.feasible = false;
      }
      r.index = first + k;
      r.seed = cfg.seed;
      if (!r.feasible) return;
      // Post-check the exported target.
      if (!mark_feasible(r.theta, moments, cfg, options.regime).feasible) return;
      block[k] = make_record(cfg, dep, moments, r, digest);
    });
    attempts += n_records;
    for (auto& rec : block) {
      if (!rec) {
        ++infeasible;
      } else if (static_cast<long long>(records.size()) < n_records) {
        records.push_back(std::move(*rec));
      }
    }
    if (2 * infeasible > attempts) {
      std::ostringstream msg;
      msg << "scenario " << scenario.name << ": " << infeasible << " of " << attempts
          << " solves infeasible (more than 50%); dataset aborted";
      throw HarnessError(msg.str());
    }
  }

  const EEParams ee = ee_params(config);
  json header = {
      {"schema", kDatasetSchema},
      {"scenario", scenario.name},
      {"K_u", config.K_u},
      {"K_d", config.K_d},
      {"M", config.M},
      {"M_s", config.M_s},
      {"regime", to_string(options.regime)},
      {"digest", digest},
      {"config", format_config(config)},
      {"records", n_records},
      {"attempts", attempts},
      {"phi_order", "alpha[m][u] for m, u (m-major), then beta[m][d]; linear LSF"},
      {"mask_order", "same as phi; 1 = AP serves the terminal"},
      {"theta_order", "p[u] then q[d]; W"},
      {"units", {{"user_rate", "bit/s"}, {"device_rate", "bit/s"}, {"device_ee", "bit/J"}, {"min_ee", "bit/J"}}},
      {"budgets", {{"P_u_max", config.P_u_max}, {"Q_d_max", config.Q_d_max}}},
      {"ee", {{"psi", ee.psi}, {"N", ee.N}, {"mu_d", ee.mu}, {"Theta_d", ee.Theta}, {"v_d", vector_json(ee.v)}}},
      {"qos",
       {{"R_embb_min", config.R_embb_min}, {"R_mmtc_min", config.R_mmtc_min}, {"S_min", config.S_min}}},
      {"fields", {"index", "seed", "digest", "phi", "mask", "theta", "user_rate", "device_rate", "device_ee",
                  "min_ee", "moments"}}};
  data << header.dump() << '\n';
  for (const auto& rec : records) data << record_json(rec).dump() << '\n';
  if (!data) throw HarnessError("write failed for " + data_path.string());

  const auto order = shuffled(n_records, stream_seed(config.seed, 5));
  DatasetSummary out;
  out.scenario = scenario.name;
  out.data_path = data_path.string();
  out.records = n_records;
  out.attempts = attempts;
  out.train = n_records * 8 / 10;
  out.val = n_records / 10;
  out.test = n_records - out.train - out.val;
  const std::filesystem::path stem = std::filesystem::path(dir) / scenario.name;
  write_split(stem.string() + "_train.idx", order, 0, out.train);
  write_split(stem.string() + "_val.idx", order, out.train, out.val);
  write_split(stem.string() + "_test.idx", order, out.train + out.val, out.test);
  return out;
}

Dataset read_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw HarnessError("cannot read " + path);
  Dataset out;
  if (!std::getline(in, out.header)) throw HarnessError("empty dataset file " + path);
  const json header = json::parse(out.header);
  if (header.value("schema", "") != kDatasetSchema) throw HarnessError("unknown dataset schema in " + path);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.records.push_back(record_from(json::parse(line)));
  }
  return out;
}

std::vector<long long> read_split(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw HarnessError("cannot read " + path);
  std::vector<long long> out;
  long long v = 0;
  while (in >> v) out.push_back(v);
  return out;
}

double percentile(std::vector<double> values, double p) {
  if (values.empty()) throw HarnessError("percentile of an empty series");
  std::sort(values.begin(), values.end());
  const double pos = p / 100.0 * (values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - lo) * (values[hi] - values[lo]);
}

DistributionMetrics distribution_metrics(std::span<const double> reference, std::span<const double> candidate,
                                         int bins) {
  if (reference.empty() || candidate.empty()) throw HarnessError("metrics need two non-empty series");
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double v : reference) lo = std::min(lo, v), hi = std::max(hi, v);
  for (double v : candidate) lo = std::min(lo, v), hi = std::max(hi, v);
  const double width = hi > lo ? (hi - lo) / bins : 1.0;
  auto histogram = [&](std::span<const double> values) {
    std::vector<double> h(bins, 1.0);  // add-one smoothing
    for (double v : values) {
      const int b = std::clamp(static_cast<int>((v - lo) / width), 0, bins - 1);
      h[b] += 1.0;
    }
    const double total = static_cast<double>(values.size()) + bins;
    for (double& x : h) x /= total;
    return h;
  };
  const auto p = histogram(reference);
  const auto q = histogram(candidate);
  DistributionMetrics out;
  for (int b = 0; b < bins; ++b) out.kl_divergence += p[b] * std::log(p[b] / q[b]);

  const double a5 = percentile({reference.begin(), reference.end()}, 5.0);
  const double b5 = percentile({candidate.begin(), candidate.end()}, 5.0);
  if (a5 == 0.0) throw HarnessError("reference 5th percentile is zero; loss undefined");
  out.p95_loss = std::abs(a5 - b5) / std::abs(a5);
  return out;
}

void write_cdf_csv(std::ostream& out, const CdfSeries& series) {
  out << "value,cdf,feasible_flag\n";
  const std::size_t n = series.values.size();
  for (std::size_t k = 0; k < n; ++k) {
    out << format_double(series.values[k]) << ',' << format_double(double(k + 1) / n) << ','
        << series.feasible[k] << '\n';
  }
}

std::vector<double> read_cdf_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw HarnessError("cannot read " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("value", 0) != 0) throw HarnessError(path + ": missing CSV header");
  std::vector<double> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    double v = 0.0;
    const auto res = std::from_chars(line.data(), line.data() + (comma == std::string::npos ? line.size() : comma), v);
    if (res.ec != std::errc()) throw HarnessError(path + ": bad value '" + line + "'");
    out.push_back(v);
  }
  return out;
}

void write_instances_csv(std::ostream& out, const BatchResult& batch) {
  out << "index,seed,feasible,min_ee,min_user_rate,outer_iters,inner_iters,subproblem_iters,status\n";
  for (const auto& r : batch.instances) {
    out << r.index << ',' << r.seed << ',' << int(r.feasible) << ',' << format_double(r.min_ee) << ','
        << format_double(r.min_user_rate) << ',' << r.outer_iters << ',' << r.inner_iters << ','
        << r.subproblem_iters << ',' << '"' << r.status << '"' << '\n';
  }
}

void write_validation_csv(std::ostream& out, const ValidationReport& report) {
  out << "moment,i,j,closed_form,empirical,rel_error,tolerance,pass\n";
  for (const auto& r : report.rows) {
    out << r.moment << ',' << r.i << ',' << r.j << ',' << format_double(r.closed_form) << ','
        << format_double(r.empirical) << ',' << format_double(r.rel_error) << ',' << format_double(r.tolerance) << ','
        << int(r.pass) << '\n';
  }
}

}  // namespace cfmimo
