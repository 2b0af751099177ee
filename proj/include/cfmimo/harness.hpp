#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cfmimo/config.hpp"
#include "cfmimo/optimizer.hpp"
#include "cfmimo/rates.hpp"
#include "cfmimo/scenario.hpp"


namespace cfmimo {

class HarnessError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Policy { OPC, UPC, FPC, GFPC };

std::string to_string(Policy policy);
Policy parse_policy(const std::string& text);

/// Seed of instance `index` in a batch keyed by `seed`.
std::uint64_t instance_seed(std::uint64_t seed, std::uint64_t index);

/// Runs fn(i) for i in [0, n) on `workers` threads; fn must write only slot i.
void parallel_for(long long n, int workers, const std::function<void(long long)>& fn);

struct InstanceResult {
  long long index = 0;
  std::uint64_t seed = 0;
  bool feasible = false;
  std::string status;  // solver status, "feasible"/"infeasible" for benchmarks, or the error text
  double min_ee = 0.0;         // bits/J, 0 if infeasible
  double min_user_rate = 0.0;  // bit/s, 0 if infeasible
  PowerVector theta;
  Eigen::VectorXd user_rate, device_rate, device_ee;
  int outer_iters = 0, inner_iters = 0, subproblem_iters = 0;
  std::string trace;  // solver JSON lines, when requested
};

/// Sorted samples; infeasible samples are 0 and flagged.
struct CdfSeries {
  std::string label;
  std::vector<double> values;
  std::vector<int> feasible;
  double feasible_fraction = 0.0;
};

CdfSeries make_cdf(std::string label, const std::vector<std::pair<double, bool>>& samples);

struct BatchOptions {
  Regime regime = Regime::FiniteBlocklength;
  int workers = 1;
  SolveOptions solve;
  bool keep_traces = false;
};

struct BatchResult {
  std::string label;
  std::vector<InstanceResult> instances;
  CdfSeries min_ee;         // one sample per instance
  CdfSeries device_ee;      // all devices pooled
  CdfSeries min_user_rate;  // one sample per instance
  CdfSeries user_rate;      // all users pooled
  double feasible_fraction = 0.0;
};

/// Evaluates one policy on given moments. The scales multiply the reported
/// user rates and device rates/EE (OMA band shares).
InstanceResult evaluate_policy(const ScenarioConfig& config, const Deployment& dep, const MomentSet& moments,
                               Policy policy, const BatchOptions& options, double user_scale = 1.0,
                               double device_scale = 1.0);

BatchResult run_batch(const ScenarioConfig& config, Policy policy, long long n_instances,
                      const BatchOptions& options = {});

struct OmaSetup {
  ScenarioConfig config;      // N replaced by the device sequence length, targets rescaled
  double user_share = 1.0;    // r_u / 100
  double device_share = 1.0;  // r_d / 100
  int device_length = 1;
};

/// Users keep their SINR without device interference on a fraction r_u/100 of
/// the band; devices spread over the m-sequence length nearest r_d N / 100
/// without user interference, on a fraction r_d/100 of the band. Rates in
/// `config` are per full band; both targets are divided by the shares.
OmaSetup oma_setup(const ScenarioConfig& config, double r_u, double r_d);
MomentSet oma_moments(const OmaSetup& setup, const Deployment& dep);

struct OmaComparison {
  BatchResult noma;
  BatchResult oma;
};

OmaComparison compare_oma(const ScenarioConfig& config, double r_u, double r_d, Policy policy, long long n_instances,
                          const BatchOptions& options = {});

struct ValidationRow {
  std::string moment;
  int i = 0, j = -1;  // j < 0 for vectors
  double closed_form = 0.0;
  double empirical = 0.0;
  double rel_error = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct ValidationReport {
  std::vector<ValidationRow> rows;
  long long draws = 0;
  bool pass = true;
};

/// Closed forms against the Monte Carlo oracle on one deployment drawn from
/// config.seed. Tolerances: 3% eMBB, 5% mMTC.
ValidationReport validate(const ScenarioConfig& config, long long n_draws, std::uint64_t seed, int workers = 1);

struct ScenarioSpec {
  std::string name;
  int K_u = 2, K_d = 10, M = 10, M_s = 5;
};

/// The five (K_u, K_d, M, M_s) scenarios of the GNN evaluation table.
std::vector<ScenarioSpec> default_dataset_grid();
ScenarioSpec parse_scenario(const std::string& text);  // "K_u,K_d,M,M_s"

struct DatasetRecord {
  long long index = 0;
  std::uint64_t seed = 0;
  std::string digest;
  std::vector<double> phi;  // alpha[m][u] (m-major), then beta[m][d]
  std::vector<int> mask;    // a_mask then b_mask, same order
  std::vector<double> theta;  // p then q, W
  std::vector<double> user_rate, device_rate, device_ee;
  double min_ee = 0.0;
  MomentSet moments;
};

struct DatasetSummary {
  std::string scenario;
  std::string data_path;
  long long records = 0;
  long long attempts = 0;
  long long train = 0, val = 0, test = 0;
};

inline constexpr const char* kDatasetSchema = "cfmimo-dataset/1";

/// Writes <dir>/<name>.jsonl (header line + records) and
/// <dir>/<name>_{train,val,test}.idx (80/10/10 after a seeded shuffle).
/// Aborts when more than half of the attempted solves are infeasible.
DatasetSummary export_dataset(const ScenarioConfig& base, const ScenarioSpec& scenario, long long n_records,
                              const std::string& dir, const BatchOptions& options);

struct Dataset {
  std::string header;  // raw JSON header line
  std::vector<DatasetRecord> records;
};

Dataset read_dataset(const std::string& path);
std::vector<long long> read_split(const std::string& path);

struct DistributionMetrics {
  double kl_divergence = 0.0;
  double p95_loss = 0.0;
};

/// Linear-interpolated percentile, p in [0, 100].
double percentile(std::vector<double> values, double p);

/// KL(reference || candidate) on 64 equal-width bins over the union support
/// with add-one smoothing; p95 loss = |a@5% - b@5%| / a@5%.
DistributionMetrics distribution_metrics(std::span<const double> reference, std::span<const double> candidate,
                                         int bins = 64);

/// Header "value,cdf,feasible_flag"; cdf = rank / count.
void write_cdf_csv(std::ostream& out, const CdfSeries& series);
std::vector<double> read_cdf_values(const std::string& path);

/// One row per instance.
void write_instances_csv(std::ostream& out, const BatchResult& batch);
void write_validation_csv(std::ostream& out, const ValidationReport& report);

/// Shortest round-trip decimal form.
std::string format_double(double value);

}  // namespace cfmimo
