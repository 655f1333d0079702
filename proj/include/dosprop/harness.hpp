#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dosprop/estimators.hpp"
#include "dosprop/models.hpp"

namespace dosprop {

enum class EstimatorKind { dos, udos, storey, st_med, lsl, jd, oracle, fixed };

struct EstimatorSpec {
  EstimatorKind kind = EstimatorKind::dos;
  DosParams dos;          // dos, udos
  double lambda = 0.5;    // storey
  JdOptions jd;           // jd
  double fixed_pi0 = 1.0; // fixed
  std::string label;

  // Shorthands: dos1, dos05, udos1, udos05, st-half (st-1/2), st-med, lsl,
  // jd, oracle, storey:X, fixed:X, dos:ALPHA[:C], udos:ALPHA[:C].
  static EstimatorSpec parse(const std::string& text);
  static std::string default_label(const EstimatorSpec& spec);

  void validate() const;
  bool uses_changepoint() const { return kind == EstimatorKind::dos || kind == EstimatorKind::udos; }
};

struct EstimatorOutcome {
  double pi1 = 0.0;
  double pi0 = 1.0;  // in [1/n, 1], ready for adaptive BH
  std::optional<std::size_t> k_hat;
};

// `false_nulls` is only consulted by the oracle; `rng` only by JD.
EstimatorOutcome apply_estimator(const EstimatorSpec& spec, const PValueSample& sample, std::size_t false_nulls,
                                 Rng& rng);

struct ExperimentConfig {
  Scenario scenario = GaussianScenario{};
  std::vector<EstimatorSpec> estimators;
  std::size_t replicates = 1000;
  std::uint64_t master_seed = 1;
  unsigned threads = 1;
  std::optional<double> level;  // default FDR level for fdr runs

  void validate() const;
};

struct EstimatorStats {
  std::string label;
  double mean_count = 0.0;  // mean of n * pi1
  double bias = 0.0;        // mean_count - n1
  double sd = 0.0;          // sample SD (N - 1)
  double rmse = 0.0;        // sqrt(mean((n pi1 - n1)^2))
  std::optional<double> mean_changepoint;
  std::optional<double> fdr;
  std::optional<double> fdr_se;
  std::optional<double> mean_power;
  std::optional<double> relative_power;  // mean power / oracle mean power, 0/0 -> 1
};

struct AggregateStats {
  std::string scenario;
  std::size_t n = 0;
  std::size_t false_nulls = 0;
  std::size_t replicate_count = 0;
  std::uint64_t seed = 0;
  std::optional<double> level;
  std::vector<EstimatorStats> estimators;

  const EstimatorStats& at(const std::string& label) const;
};

AggregateStats run_experiment(const ExperimentConfig& config);

// Adaptive BH with each estimator's pi0, scored against the labels. An oracle
// row (true pi0) is appended when the config does not already contain one.
AggregateStats run_fdr_experiment(const ExperimentConfig& config, double level);

struct SweepRow {
  double c = 0.0;
  AggregateStats stats;
};

// Re-runs the experiment with every DOS/uDOS estimator's c set to each value.
// The replicate samples are identical across values.
std::vector<SweepRow> sweep_c(const ExperimentConfig& config, const std::vector<double>& c_values);

}  // namespace dosprop
