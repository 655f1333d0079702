// dosprop: estimate false-null proportions, run adaptive BH, and reproduce the
// simulation tables from a JSON experiment config.
//
// Exit codes: 0 success, 2 validation error, 3 I/O error.

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dosprop/asymptotics.hpp"
#include "dosprop/error.hpp"
#include "dosprop/estimators.hpp"
#include "dosprop/harness.hpp"
#include "dosprop/io.hpp"
#include "dosprop/testing.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

struct EstimateArgs {
  std::string input;
  std::string format = "plain";
  std::string method = "dos";
  double alpha = 1.0;
  double c = 0.0;
  double lambda = 0.5;
  std::size_t bootstrap = 100;
  std::string grid;
  std::uint64_t seed = 1;
};

struct BhArgs {
  std::string input;
  std::string format = "plain";
  double level = 0.05;
  std::string pi0_method = "dos1";
  std::uint64_t seed = 1;
};

struct SimArgs {
  std::string config;
  std::string out = "md";
  std::string output;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> reps;
  std::optional<unsigned> threads;
  std::optional<double> level;
  std::string c_values;
};

struct AsymptoticsArgs {
  std::string model;
  double alpha = 1.0;
  std::size_t grid = dosprop::kIdealCoarseGrid;
};

int run_estimate(const EstimateArgs& a) {
  using namespace dosprop;
  const auto sample = read_pvalues(a.input, PValueFormat::parse(a.format));
  const double n = static_cast<double>(sample.size());
  std::cout << "n: " << sample.size() << "\n";

  if (a.method == "dos") {
    const auto est = dos_storey(sample, DosParams{a.alpha, a.c});
    std::cout << "method: dos (alpha=" << num(a.alpha) << ", c=" << num(a.c) << ")\n"
              << "k_hat: " << est.k_hat << "\n"
              << "lambda: " << num(est.lambda) << "\n"
              << "pi1_raw: " << num(est.pi1_raw) << "\n"
              << "pi1: " << num(est.pi1) << "\n"
              << "n_pi1: " << num(n * est.pi1) << "\n";
    return 0;
  }

  ProportionEstimate est;
  if (a.method == "udos") {
    est = udos(sample, DosParams{a.alpha, a.c});
  } else if (a.method == "storey") {
    est = storey_at(sample, a.lambda);
  } else if (a.method == "st-med") {
    est = st_median(sample);
  } else if (a.method == "lsl") {
    est = lsl(sample);
  } else if (a.method == "jd") {
    JdOptions opts;
    opts.bootstrap_reps = a.bootstrap;
    if (!a.grid.empty()) opts.lambda_grid = parse_number_list(a.grid);
    Rng rng(a.seed);
    est = jd_bootstrap(sample, opts, rng);
    std::cout << "seed: " << a.seed << "\n";
  } else {
    throw Error(Errc::BadConfig, "unknown method '" + a.method + "'");
  }
  std::cout << "method: " << est.method << "\n";
  if (est.lambda_used) std::cout << "lambda: " << num(*est.lambda_used) << "\n";
  std::cout << "pi1: " << num(est.pi1) << "\n"
            << "pi0: " << num(est.pi0) << "\n"
            << "n_pi1: " << num(n * est.pi1) << "\n";
  return 0;
}

int run_adaptive_bh(const BhArgs& a) {
  using namespace dosprop;
  const auto sample = read_pvalues(a.input, PValueFormat::parse(a.format));
  const auto spec = EstimatorSpec::parse(a.pi0_method);
  if (spec.kind == EstimatorKind::oracle) {
    throw Error(Errc::BadConfig, "the oracle needs ground truth and is only available in fdr-sim");
  }
  Rng rng(a.seed);
  const auto outcome = apply_estimator(spec, sample, 0, rng);
  const auto rej = adaptive_bh(sample, a.level, outcome.pi0);
  std::cout << "n: " << sample.size() << "\n"
            << "pi0_method: " << spec.label << "\n"
            << "pi0_hat: " << num(outcome.pi0) << "\n"
            << "effective_level: " << num(rej.effective_level) << "\n"
            << "rejected: " << rej.rejected_count << "\n"
            << "indices:";
  for (auto i : rej.rejected_original_indices) std::cout << ' ' << i;
  std::cout << "\n";
  return 0;
}

dosprop::ExperimentConfig load_with_overrides(const SimArgs& a) {
  auto cfg = dosprop::load_config(a.config);
  if (a.seed) cfg.master_seed = *a.seed;
  if (a.reps) cfg.replicates = *a.reps;
  if (a.threads) cfg.threads = *a.threads;
  cfg.validate();
  return cfg;
}

void emit(const SimArgs& a, const std::string& report) {
  if (a.output.empty()) {
    std::cout << report;
  } else {
    dosprop::write_file(a.output, report);
  }
}

int run_simulate(const SimArgs& a) {
  const auto cfg = load_with_overrides(a);
  emit(a, dosprop::write_report(dosprop::run_experiment(cfg), dosprop::parse_report_format(a.out)));
  return 0;
}

int run_fdr_sim(const SimArgs& a) {
  const auto cfg = load_with_overrides(a);
  const auto level = a.level ? a.level : cfg.level;
  if (!level) throw dosprop::Error(dosprop::Errc::BadLevel, "fdr-sim needs --level (or 'level' in the config)");
  emit(a, dosprop::write_report(dosprop::run_fdr_experiment(cfg, *level), dosprop::parse_report_format(a.out)));
  return 0;
}

int run_sweep(const SimArgs& a) {
  const auto cfg = load_with_overrides(a);
  const auto rows = dosprop::sweep_c(cfg, dosprop::parse_number_list(a.c_values));
  emit(a, dosprop::write_sweep_report(rows, dosprop::parse_report_format(a.out)));
  return 0;
}

int run_asymptotics(const AsymptoticsArgs& a) {
  using namespace dosprop;
  const auto model = parse_model_spec(a.model);
  const auto report = check_a2(model, a.alpha, a.grid);
  std::cout << "model: " << model.describe() << "\n"
            << "alpha: " << num(a.alpha) << "\n"
            << "a2: " << a2_status_name(report.status) << "\n";
  if (report.status != A2Status::ok) {
    std::cout << "grid_argmax: " << num(report.t_at_max) << "\n"
              << "h_max: " << num(report.h_max) << "\n";
    return 0;
  }
  const auto q = ideal_changepoint(model, a.alpha);
  std::cout << "t_tilde: " << num(q.t_tilde) << "\n"
            << "quantile_at_t: " << num(q.quantile_at_t) << "\n"
            << "pi1_estimable: " << num(q.pi1_estimable) << "\n"
            << "h_at_max: " << num(q.h_at_max) << "\n";
  if (const auto pi1 = model.pi1(); pi1 && *pi1 > 0.0) {
    std::cout << "estimable_ratio: " << num(q.pi1_estimable / *pi1) << "\n";
  }
  return 0;
}

void add_sim_options(CLI::App* cmd, SimArgs& a, bool with_level) {
  cmd->add_option("--config", a.config, "JSON experiment config")->required();
  cmd->add_option("--out", a.out, "Report format: md or csv")->check(CLI::IsMember({"md", "markdown", "csv"}));
  cmd->add_option("--output", a.output, "Write the report to this file instead of stdout");
  cmd->add_option("--seed", a.seed, "Override the master seed");
  cmd->add_option("--reps", a.reps, "Override the replicate count");
  cmd->add_option("--threads", a.threads, "Worker threads (results do not depend on this)");
  if (with_level) cmd->add_option("--level", a.level, "FDR level");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"False-null proportion estimation with difference-of-slopes tuning of Storey's estimator"};
  app.require_subcommand(1);

  EstimateArgs est;
  auto* estimate = app.add_subcommand("estimate", "Estimate the false-null proportion of a p-value file");
  estimate->add_option("--input", est.input, "p-value file")->required();
  estimate->add_option("--format", est.format, "plain or csv:COLUMN");
  estimate->add_option("--method", est.method, "dos, udos, storey, st-med, lsl or jd")
      ->check(CLI::IsMember({"dos", "udos", "storey", "st-med", "lsl", "jd"}));
  estimate->add_option("--alpha", est.alpha, "DOS exponent in [1/2, 1]");
  estimate->add_option("--c", est.c, "Fraction of leading DOS indices to exclude");
  estimate->add_option("--lambda", est.lambda, "Storey tuning parameter");
  estimate->add_option("--B", est.bootstrap, "JD bootstrap resamples");
  estimate->add_option("--grid", est.grid, "Comma-separated JD lambda grid");
  estimate->add_option("--seed", est.seed, "Seed for JD resampling");

  BhArgs bh;
  auto* adaptive = app.add_subcommand("adaptive-bh", "Adaptive Benjamini-Hochberg with a plug-in pi0");
  adaptive->add_option("--input", bh.input, "p-value file")->required();
  adaptive->add_option("--format", bh.format, "plain or csv:COLUMN");
  adaptive->add_option("--level", bh.level, "FDR level")->required();
  adaptive->add_option("--pi0-method", bh.pi0_method, "dos1, dos05, st-half, st-med, lsl, jd or fixed:X");
  adaptive->add_option("--seed", bh.seed, "Seed for JD resampling");

  SimArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Bias/SD/RMSE of n*pi1 over simulated replicates");
  add_sim_options(simulate, sim, false);

  SimArgs fdr;
  auto* fdr_sim = app.add_subcommand("fdr-sim", "FDR and power relative to the oracle for adaptive BH");
  add_sim_options(fdr_sim, fdr, true);

  SimArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep-c", "Sensitivity of DOS estimates to the excluded fraction c");
  add_sim_options(sweep_cmd, sweep, false);
  sweep_cmd->add_option("--c-values", sweep.c_values, "Comma-separated c values")->required();

  AsymptoticsArgs asy;
  auto* asymptotics = app.add_subcommand("asymptotics", "Ideal change-point and estimable proportion of a model");
  asymptotics->add_option("--model", asy.model, "gaussian:PI1,MU1 | uniform:PI1,B | composite:PI1,MU0,MU1")
      ->required();
  asymptotics->add_option("--alpha", asy.alpha, "DOS exponent in [1/2, 1]");
  asymptotics->add_option("--grid", asy.grid, "Grid size for the shape check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*estimate) return run_estimate(est);
    if (*adaptive) return run_adaptive_bh(bh);
    if (*simulate) return run_simulate(sim);
    if (*fdr_sim) return run_fdr_sim(fdr);
    if (*sweep_cmd) return run_sweep(sweep);
    if (*asymptotics) return run_asymptotics(asy);
  } catch (const dosprop::Error& e) {
    std::cerr << "error [" << dosprop::errc_name(e.code()) << "]: " << e.what() << "\n";
    return e.is_io() ? kExitIo : kExitValidation;
  }
  return kExitValidation;
}
