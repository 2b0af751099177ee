// cfmimo: batch runs, sweeps, OMA comparison, moment validation, dataset
// export and distribution metrics.
//
// Exit codes: 0 success, 2 infeasible-dominated run (or a failed check),
// 1 error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "cfmimo/harness.hpp"
#include "json.hpp"

using namespace cfmimo;

namespace {

constexpr int kOk = 0;
constexpr int kError = 1;
constexpr int kInfeasible = 2;

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
  std::uint64_t seed = 1;
  int workers = 1;
  std::string regime = "fbl";
  int max_outer = 100;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("-c,--config", c.config_path, "Scenario file (key = value lines; budgets and noise in dBm)")
      ->check(CLI::ExistingFile);
  app->add_option("-s,--set", c.overrides, "Override one config key, e.g. --set N=63 (same units as the file)");
  app->add_option("--seed", c.seed, "Batch seed (overrides the config seed)");
  app->add_option("-j,--workers", c.workers, "Worker threads; results do not depend on it")->check(CLI::PositiveNumber);
  app->add_option("--regime", c.regime, "Device rate model: shannon or fbl (finite blocklength)")
      ->check(CLI::IsMember({"shannon", "fbl"}));
  app->add_option("--max-outer", c.max_outer, "Sequential FP outer iteration cap (OPC)")->check(CLI::PositiveNumber);
}

ScenarioConfig make_config(const Common& c, bool seed_given) {
  ScenarioConfig config = c.config_path.empty() ? ScenarioConfig{} : load_config(c.config_path);
  for (const auto& kv : c.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + kv + "' is not key=value");
    apply_override(config, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (seed_given) config.seed = c.seed;
  config.validate();
  return config;
}

BatchOptions make_options(const Common& c) {
  BatchOptions o;
  o.regime = parse_regime(c.regime);
  o.workers = c.workers;
  o.solve.max_outer = c.max_outer;
  return o;
}

void write_file(const std::string& path, const std::function<void(std::ostream&)>& fn) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw HarnessError("cannot write " + path);
  fn(out);
  if (!out) throw HarnessError("write failed for " + path);
}

void write_batch(const std::string& prefix, const BatchResult& b) {
  const CdfSeries* series[] = {&b.min_ee, &b.device_ee, &b.min_user_rate, &b.user_rate};
  for (const CdfSeries* s : series) {
    const std::string kind = s->label.substr(s->label.find(':') + 1);
    write_file(prefix + "_" + kind + ".csv", [&](std::ostream& o) { write_cdf_csv(o, *s); });
  }
  write_file(prefix + "_instances.csv", [&](std::ostream& o) { write_instances_csv(o, b); });
}

void print_batch(const BatchResult& b) {
  const auto feasible_values = [](const CdfSeries& s) {
    std::vector<double> v;
    for (std::size_t k = 0; k < s.values.size(); ++k)
      if (s.feasible[k]) v.push_back(s.values[k]);
    return v;
  };
  std::printf("%-18s feasible %.3f", b.label.c_str(), b.feasible_fraction);
  const auto ee = feasible_values(b.min_ee);
  if (!ee.empty()) {
    std::printf("  min-EE p10 %.4g  p50 %.4g bits/J  min-rate p50 %.4g bit/s", percentile(ee, 10), percentile(ee, 50),
                percentile(feasible_values(b.min_user_rate), 50));
  }
  std::printf("\n");
}

std::string join_traces(const BatchResult& b) {
  std::string out;
  for (const auto& r : b.instances) out += r.trace;
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cell-free massive MIMO eMBB+/mMTC+ coexistence toolkit"};
  app.require_subcommand(1);
  app.footer(
      "Units: powers W (budgets and noise in dBm in config files), EE bits/J, rates bit/s.\n"
      "Exit codes: 0 success, 2 infeasible-dominated run or failed check, 1 error.");

  Common common;
  std::vector<std::string> policies{"opc", "upc", "fpc", "gfpc"};
  long long n = 100;
  std::string out = "out/run";
  std::string trace_path;

  auto* run = app.add_subcommand("run", "Batch of random deployments; CDF CSVs per policy");
  add_common(run, common);
  run->add_option("-p,--policy", policies, "Policies: opc, upc, fpc, gfpc (repeatable)")
      ->check(CLI::IsMember({"opc", "upc", "fpc", "gfpc"}));
  run->add_option("-n,--instances", n, "Number of deployments")->check(CLI::PositiveNumber);
  run->add_option("-o,--out", out,
                  "Output prefix; writes <out>_<policy>_{min_ee,device_ee,min_user_rate,user_rate,instances}.csv");
  run->add_option("--trace", trace_path, "JSON-lines file for OPC solver traces");

  std::string param;
  std::vector<std::string> values;
  auto* sweep = app.add_subcommand("sweep", "Repeat `run` over values of one config key");
  add_common(sweep, common);
  sweep->add_option("-p,--policy", policies, "Policies (repeatable)")->check(CLI::IsMember({"opc", "upc", "fpc", "gfpc"}));
  sweep->add_option("-n,--instances", n, "Deployments per value")->check(CLI::PositiveNumber);
  sweep->add_option("--param", param, "Config key to sweep, e.g. N")->required();
  sweep->add_option("--values", values, "Values in config-file units, e.g. --values 15 63 255")->required();
  sweep->add_option("-o,--out", out, "Output prefix; writes <out>_<param><value>_<policy>_*.csv and <out>_summary.csv");

  double r_u = 50.0, r_d = 50.0;
  auto* oma = app.add_subcommand("oma", "NOMA against OMA with r_u% / r_d% of the PRBs");
  add_common(oma, common);
  oma->add_option("-p,--policy", policies, "Policies (repeatable)")->check(CLI::IsMember({"opc", "upc", "fpc", "gfpc"}));
  oma->add_option("-n,--instances", n, "Deployments")->check(CLI::PositiveNumber);
  oma->add_option("--ru", r_u, "eMBB+ share of PRBs, percent (> 0)");
  oma->add_option("--rd", r_d, "mMTC+ share of PRBs, percent; r_u + r_d <= 100");
  oma->add_option("-o,--out", out, "Output prefix; writes <out>_{noma,oma}_<policy>_*.csv");

  long long draws = 100000;
  auto* val = app.add_subcommand("validate", "Closed-form moments against the Monte Carlo oracle");
  add_common(val, common);
  val->add_option("-d,--draws", draws, "Monte Carlo draws (>= 1000)")->check(CLI::Range(1000LL, 1LL << 40));
  val->add_option("-o,--out", out, "Report CSV path (moment, i, j, closed_form, empirical, rel_error, tolerance, pass)");

  std::vector<std::string> scenarios;
  std::string path = "dataset";
  auto* exp = app.add_subcommand("export-dataset", "Solver-labelled datasets (OPC targets) with 80/10/10 splits");
  add_common(exp, common);
  exp->add_option("--scenario", scenarios, "K_u,K_d,M,M_s (repeatable); default: the five evaluation scenarios");
  exp->add_option("-n,--records", n, "Feasible records per scenario")->check(CLI::PositiveNumber);
  exp->add_option("--path", path, "Output directory");

  std::string csv_a, csv_b, report_path;
  int bins = 64;
  auto* met = app.add_subcommand("metrics", "KL divergence and 5th-percentile loss between two CDF CSVs");
  met->add_option("reference", csv_a, "Reference CSV (value column, e.g. analytical EE in bits/J)")
      ->required()
      ->check(CLI::ExistingFile);
  met->add_option("candidate", csv_b, "Candidate CSV (e.g. predicted EE in bits/J)")->required()->check(CLI::ExistingFile);
  met->add_option("--bins", bins, "Histogram bins over the union support")->check(CLI::PositiveNumber);
  met->add_option("--report", report_path,
                  "JSON report with analytical_ee / predicted_ee arrays (and optional kl_divergence, p95_loss) to "
                  "cross-check")
      ->check(CLI::ExistingFile);

  std::string dump_path = "deployment.csv";
  auto* dump = app.add_subcommand("dump-deployment", "One deployment as a per-link CSV");
  add_common(dump, common);
  dump->add_option("-o,--out", dump_path, "CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Help and version exit 0; usage errors use the error code.
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    const auto seed_given = [&](CLI::App* sub) { return sub->count("--seed") > 0; };
    if (run->parsed()) {
      const ScenarioConfig config = make_config(common, seed_given(run));
      BatchOptions options = make_options(common);
      options.keep_traces = !trace_path.empty();
      bool dominated = false;
      std::string traces;
      for (const auto& p : policies) {
        const BatchResult b = run_batch(config, parse_policy(p), n, options);
        write_batch(out + "_" + p, b);
        print_batch(b);
        traces += join_traces(b);
        dominated = dominated || b.feasible_fraction < 0.5;
      }
      if (!trace_path.empty()) write_file(trace_path, [&](std::ostream& o) { o << traces; });
      return dominated ? kInfeasible : kOk;
    }
    if (sweep->parsed()) {
      const ScenarioConfig base = make_config(common, seed_given(sweep));
      const BatchOptions options = make_options(common);
      bool dominated = false;
      std::ostringstream summary;
      summary << "param,value,policy,feasible_fraction,min_ee_p10,min_ee_p50\n";
      for (const auto& v : values) {
        ScenarioConfig config = base;
        apply_override(config, param, v);
        config.validate();
        for (const auto& p : policies) {
          BatchResult b = run_batch(config, parse_policy(p), n, options);
          b.label = param + "=" + v + ":" + p;
          write_batch(out + "_" + param + v + "_" + p, b);
          print_batch(b);
          std::vector<double> ee;
          for (const auto& r : b.instances)
            if (r.feasible) ee.push_back(r.min_ee);
          summary << param << ',' << v << ',' << p << ',' << format_double(b.feasible_fraction) << ','
                  << (ee.empty() ? "" : format_double(percentile(ee, 10))) << ','
                  << (ee.empty() ? "" : format_double(percentile(ee, 50))) << '\n';
          dominated = dominated || b.feasible_fraction < 0.5;
        }
      }
      write_file(out + "_summary.csv", [&](std::ostream& o) { o << summary.str(); });
      return dominated ? kInfeasible : kOk;
    }
    if (oma->parsed()) {
      const ScenarioConfig config = make_config(common, seed_given(oma));
      const BatchOptions options = make_options(common);
      bool dominated = false;
      for (const auto& p : policies) {
        const OmaComparison cmp = compare_oma(config, r_u, r_d, parse_policy(p), n, options);
        write_batch(out + "_noma_" + p, cmp.noma);
        write_batch(out + "_oma_" + p, cmp.oma);
        print_batch(cmp.noma);
        print_batch(cmp.oma);
        dominated = dominated || cmp.noma.feasible_fraction < 0.5 || cmp.oma.feasible_fraction < 0.5;
      }
      return dominated ? kInfeasible : kOk;
    }
    if (val->parsed()) {
      const ScenarioConfig config = make_config(common, false);
      const ValidationReport report = validate(config, draws, common.seed, common.workers);
      write_validation_csv(std::cout, report);
      if (val->count("--out")) write_file(out, [&](std::ostream& o) { write_validation_csv(o, report); });
      std::fprintf(stderr, "%s: %zu moments, %lld draws\n", report.pass ? "PASS" : "FAIL", report.rows.size(),
                   report.draws);
      return report.pass ? kOk : kInfeasible;
    }
    if (exp->parsed()) {
      const ScenarioConfig config = make_config(common, seed_given(exp));
      const BatchOptions options = make_options(common);
      std::vector<ScenarioSpec> grid;
      for (const auto& s : scenarios) grid.push_back(parse_scenario(s));
      if (grid.empty()) grid = default_dataset_grid();
      for (const auto& s : grid) {
        const DatasetSummary d = export_dataset(config, s, n, path, options);
        std::printf("%s: %lld records (%lld attempts) -> %s  train %lld val %lld test %lld\n", d.scenario.c_str(),
                    d.records, d.attempts, d.data_path.c_str(), d.train, d.val, d.test);
      }
      return kOk;
    }
    if (met->parsed()) {
      const auto a = read_cdf_values(csv_a);
      const auto b = read_cdf_values(csv_b);
      const DistributionMetrics m = distribution_metrics(a, b, bins);
      std::printf("kl_divergence %s\np95_loss %s\n", format_double(m.kl_divergence).c_str(),
                  format_double(m.p95_loss).c_str());
      if (report_path.empty()) return kOk;
      std::ifstream in(report_path);
      const nlohmann::json j = nlohmann::json::parse(in);
      const auto ref = j.at("analytical_ee").get<std::vector<double>>();
      const auto cand = j.at("predicted_ee").get<std::vector<double>>();
      const DistributionMetrics r = distribution_metrics(ref, cand, bins);
      std::printf("report kl_divergence %s\nreport p95_loss %s\n", format_double(r.kl_divergence).c_str(),
                  format_double(r.p95_loss).c_str());
      bool agree = true;
      const auto check = [&](const char* key, double mine) {
        if (!j.contains(key)) return;
        const double theirs = j.at(key).get<double>();
        const bool ok = std::abs(theirs - mine) <= 1e-9 * std::max(1.0, std::abs(mine));
        std::printf("report %s claims %s: %s\n", key, format_double(theirs).c_str(), ok ? "agrees" : "DISAGREES");
        agree = agree && ok;
      };
      check("kl_divergence", r.kl_divergence);
      check("p95_loss", r.p95_loss);
      return agree ? kOk : kInfeasible;
    }
    if (dump->parsed()) {
      const ScenarioConfig config = make_config(common, seed_given(dump));
      const Deployment dep = generate_deployment(config);
      write_file(dump_path, [&](std::ostream& o) { write_deployment_csv(o, dep); });
      return kOk;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kError;
  }
  return kOk;
}
