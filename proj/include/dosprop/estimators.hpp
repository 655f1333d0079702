#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dosprop/rng.hpp"
#include "dosprop/sample.hpp"

namespace dosprop {

// Tuning of the difference-of-slopes change-point search.
//   alpha: exponent of the index normalisation, in [1/2, 1]
//   c:     fraction of leading DOS indices excluded from the search, in [0, 1/2)
struct DosParams {
  double alpha = 1.0;
  double c = 0.0;

  void validate() const;
};

struct Changepoint {
  std::size_t k_hat = 0;  // 1-based
  double lambda = 0.0;    // p_(k_hat)
};

struct DosEstimate {
  std::size_t k_hat = 0;
  double lambda = 0.0;
  double pi1_raw = 0.0;
  double pi1 = 0.0;
  std::vector<double> dos_sequence;  // d(i) for i = 1..floor(n/2)
};

struct ProportionEstimate {
  double pi1 = 0.0;
  double pi0 = 1.0;
  double pi0_raw = 1.0;
  std::optional<double> lambda_used;
  std::string method;
};

// d(i) = (p_(2i) - 2 p_(i)) / i^alpha, i = 1..floor(n/2).
std::vector<double> dos_sequence(const PValueSample& sample, double alpha);

// First admissible DOS index: ceil(max(1, n c)).
std::size_t dos_search_start(std::size_t n, double c);

// argmax of the DOS sequence over [ceil(max(1, n c)), floor(n/2)], smallest index on ties.
Changepoint dos_changepoint(const PValueSample& sample, const DosParams& params);

// Storey's estimator tuned at lambda = p_(k_hat).
DosEstimate dos_storey(const PValueSample& sample, const DosParams& params);

// pi1 = k_hat / n; for superuniform nulls.
ProportionEstimate udos(const PValueSample& sample, const DosParams& params);

// Storey: pi0 = (1 - F_n(lambda)) / (1 - lambda), F_n closed at lambda;
// pi0 clamped to [1/n, 1].
ProportionEstimate storey_at(const PValueSample& sample, double lambda);

// Storey at lambda = p_(floor(n/2)).
ProportionEstimate st_median(const PValueSample& sample);

// Lowest-slope rule on the (rank, 1 - p) plot.
ProportionEstimate lsl(const PValueSample& sample);

// {0.05, 0.10, ..., 0.95}
std::vector<double> default_jd_grid();

struct JdOptions {
  std::vector<double> lambda_grid = default_jd_grid();
  std::size_t bootstrap_reps = 100;
};

// Bootstrap-averaged Storey estimator: keeps the grid values whose bootstrap
// MSE (against the plug-in grid mean) is at most the grid median and averages
// their pi0. Deterministic for a fixed generator state.
ProportionEstimate jd_bootstrap(const PValueSample& sample, const JdOptions& options, Rng& rng);

// pi0 usable by adaptive BH: 1 - pi1 clamped to [1/n, 1].
ProportionEstimate to_proportion(const DosEstimate& est, std::size_t n, std::string method);

}  // namespace dosprop
