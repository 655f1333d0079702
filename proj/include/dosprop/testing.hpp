#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "dosprop/sample.hpp"

namespace dosprop {

struct RejectionSet {
  std::size_t rejected_count = 0;
  std::vector<std::size_t> rejected_original_indices;  // ascending
  std::size_t threshold_rank = 0;                      // 0 when nothing is rejected
  double effective_level = 0.0;
  std::size_t hypothesis_count = 0;
};

struct TruthLabels {
  std::vector<bool> is_false_null;  // aligned to original (pre-sort) indices

  std::size_t size() const noexcept { return is_false_null.size(); }
  std::size_t false_null_count() const noexcept;
};

struct EvalMetrics {
  double fdp = 0.0;
  std::size_t rejections = 0;
  std::size_t true_discoveries = 0;
  double power = 0.0;
};

struct FdrPowerSummary {
  double fdr = 0.0;
  double mean_power = 0.0;
};

// Cap on the adaptive level so a tiny pi0 estimate never asks for level >= 1.
inline constexpr double kMaxEffectiveLevel = 1.0 - 1e-9;

// Step-up rule: reject the k smallest, k = max{k : p_(k) <= level k / n}.
RejectionSet bh_rejections(const PValueSample& sample, double level);

// BH at min(level / pi0_hat, 1 - 1e-9). pi0_hat must lie in [1/n, 1].
RejectionSet adaptive_bh(const PValueSample& sample, double level, double pi0_hat);

EvalMetrics confusion_metrics(const RejectionSet& rejections, const TruthLabels& truth);

// Mean FDP and mean power over replicates.
FdrPowerSummary fdr_power_summary(std::span<const EvalMetrics> per_replicate);

}  // namespace dosprop
