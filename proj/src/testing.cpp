#include "dosprop/testing.hpp"

#include <algorithm>
#include <string>

#include "dosprop/error.hpp"

namespace dosprop {

namespace {

RejectionSet step_up(const PValueSample& sample, double level) {
  const auto& p = sample.values();
  const double n = static_cast<double>(p.size());
  RejectionSet out;
  out.effective_level = level;
  out.hypothesis_count = p.size();
  for (std::size_t k = p.size(); k >= 1; --k) {
    if (p[k - 1] <= level * static_cast<double>(k) / n) {
      out.threshold_rank = k;
      break;
    }
  }
  out.rejected_count = out.threshold_rank;
  out.rejected_original_indices.reserve(out.threshold_rank);
  for (std::size_t k = 0; k < out.threshold_rank; ++k) {
    out.rejected_original_indices.push_back(sample.original_index(k));
  }
  std::sort(out.rejected_original_indices.begin(), out.rejected_original_indices.end());
  return out;
}

void require_level(double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw Error(Errc::BadLevel, "FDR level must lie in (0,1), got " + std::to_string(level));
  }
}

}  // namespace

std::size_t TruthLabels::false_null_count() const noexcept {
  return static_cast<std::size_t>(std::count(is_false_null.begin(), is_false_null.end(), true));
}

RejectionSet bh_rejections(const PValueSample& sample, double level) {
  require_level(level);
  return step_up(sample, level);
}

RejectionSet adaptive_bh(const PValueSample& sample, double level, double pi0_hat) {
  require_level(level);
  const double floor_pi0 = 1.0 / static_cast<double>(sample.size());
  if (!(pi0_hat >= floor_pi0 && pi0_hat <= 1.0)) {
    throw Error(Errc::BadPi0, "pi0 estimate must lie in [1/n, 1], got " + std::to_string(pi0_hat));
  }
  return step_up(sample, std::min(kMaxEffectiveLevel, level / pi0_hat));
}

EvalMetrics confusion_metrics(const RejectionSet& rejections, const TruthLabels& truth) {
  if (rejections.hypothesis_count != truth.size()) {
    throw Error(Errc::LengthMismatch, "rejection set covers " + std::to_string(rejections.hypothesis_count) +
                                          " hypotheses but truth has " + std::to_string(truth.size()));
  }
  EvalMetrics m;
  m.rejections = rejections.rejected_original_indices.size();
  for (std::size_t idx : rejections.rejected_original_indices) {
    if (idx >= truth.size()) {
      throw Error(Errc::LengthMismatch,
                  "rejected index " + std::to_string(idx) + " beyond truth labels of size " +
                      std::to_string(truth.size()),
                  idx);
    }
    if (truth.is_false_null[idx]) ++m.true_discoveries;
  }
  const std::size_t false_rejections = m.rejections - m.true_discoveries;
  m.fdp = static_cast<double>(false_rejections) / static_cast<double>(std::max<std::size_t>(m.rejections, 1));
  const std::size_t alternatives = truth.false_null_count();
  m.power = alternatives == 0 ? 0.0
                              : static_cast<double>(m.true_discoveries) / static_cast<double>(alternatives);
  return m;
}

FdrPowerSummary fdr_power_summary(std::span<const EvalMetrics> per_replicate) {
  if (per_replicate.empty()) {
    throw Error(Errc::EmptyInput, "no replicates to summarise");
  }
  FdrPowerSummary s;
  for (const auto& m : per_replicate) {
    s.fdr += m.fdp;
    s.mean_power += m.power;
  }
  s.fdr /= static_cast<double>(per_replicate.size());
  s.mean_power /= static_cast<double>(per_replicate.size());
  return s;
}

}  // namespace dosprop
