#include "dosprop/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dosprop/error.hpp"

namespace dosprop {

namespace {

void require_dos_size(const PValueSample& sample) {
  if (sample.too_small_for_dos()) {
    throw Error(Errc::TooSmall, "DOS needs at least 4 p-values, got " + std::to_string(sample.size()));
  }
}

void require_alpha(double alpha) {
  if (!(alpha >= 0.5 && alpha <= 1.0)) {
    throw Error(Errc::BadAlpha, "alpha must lie in [1/2, 1], got " + std::to_string(alpha));
  }
}

// #{p_i <= lambda}
std::size_t count_at_most(const std::vector<double>& sorted, double lambda) {
  return static_cast<std::size_t>(std::upper_bound(sorted.begin(), sorted.end(), lambda) - sorted.begin());
}

double clamp_pi0(double pi0_raw, std::size_t n) {
  return std::clamp(pi0_raw, 1.0 / static_cast<double>(n), 1.0);
}

ProportionEstimate from_pi0(double pi0_raw, std::size_t n, std::optional<double> lambda, std::string method) {
  ProportionEstimate out;
  out.pi0_raw = pi0_raw;
  out.pi0 = clamp_pi0(pi0_raw, n);
  out.pi1 = 1.0 - out.pi0;
  out.lambda_used = lambda;
  out.method = std::move(method);
  return out;
}

}  // namespace

void DosParams::validate() const {
  require_alpha(alpha);
  if (!(c >= 0.0 && c < 0.5)) {
    throw Error(Errc::BadC, "c must lie in [0, 1/2), got " + std::to_string(c));
  }
}

std::vector<double> dos_sequence(const PValueSample& sample, double alpha) {
  require_dos_size(sample);
  require_alpha(alpha);
  const auto& p = sample.values();
  const std::size_t half = p.size() / 2;
  std::vector<double> d(half);
  for (std::size_t i = 1; i <= half; ++i) {
    const double scale = alpha == 1.0 ? static_cast<double>(i) : std::pow(static_cast<double>(i), alpha);
    d[i - 1] = (p[2 * i - 1] - 2.0 * p[i - 1]) / scale;
  }
  return d;
}

std::size_t dos_search_start(std::size_t n, double c) {
  double x = static_cast<double>(n) * c;
  // n*c that lands a rounding error above an integer (0.29*1000) counts as that integer
  const double r = std::round(x);
  if (std::abs(x - r) <= 1e-9 * std::max(1.0, x)) x = r;
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(x)));
}

namespace {

Changepoint argmax_changepoint(const PValueSample& sample, const std::vector<double>& d, double c) {
  const std::size_t n = sample.size();
  const std::size_t first = dos_search_start(n, c);
  const std::size_t last = n / 2;
  if (first > last) {
    throw Error(Errc::EmptySearchRange, "c = " + std::to_string(c) + " excludes every DOS index for n = " +
                                            std::to_string(n));
  }
  std::size_t best = first;
  for (std::size_t i = first + 1; i <= last; ++i) {
    if (d[i - 1] > d[best - 1]) best = i;
  }
  return {best, sample.order_stat(best)};
}

}  // namespace

Changepoint dos_changepoint(const PValueSample& sample, const DosParams& params) {
  params.validate();
  const auto d = dos_sequence(sample, params.alpha);
  return argmax_changepoint(sample, d, params.c);
}

DosEstimate dos_storey(const PValueSample& sample, const DosParams& params) {
  params.validate();
  DosEstimate est;
  est.dos_sequence = dos_sequence(sample, params.alpha);
  const auto cp = argmax_changepoint(sample, est.dos_sequence, params.c);
  est.k_hat = cp.k_hat;
  est.lambda = cp.lambda;
  if (est.lambda >= 1.0) {
    throw Error(Errc::DegenerateLambda, "change-point p-value equals 1; Storey denominator vanishes");
  }
  const double n = static_cast<double>(sample.size());
  est.pi1_raw = (static_cast<double>(est.k_hat) / n - est.lambda) / (1.0 - est.lambda);
  est.pi1 = std::clamp(est.pi1_raw, 0.0, 1.0);
  return est;
}

ProportionEstimate to_proportion(const DosEstimate& est, std::size_t n, std::string method) {
  ProportionEstimate out = from_pi0(1.0 - est.pi1, n, est.lambda, std::move(method));
  out.pi0_raw = 1.0 - est.pi1_raw;
  return out;
}

ProportionEstimate udos(const PValueSample& sample, const DosParams& params) {
  const auto cp = dos_changepoint(sample, params);
  ProportionEstimate out;
  out.pi1 = static_cast<double>(cp.k_hat) / static_cast<double>(sample.size());
  out.pi0 = 1.0 - out.pi1;
  out.pi0_raw = out.pi0;
  out.lambda_used = cp.lambda;
  out.method = "udos";
  return out;
}

ProportionEstimate storey_at(const PValueSample& sample, double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) {
    throw Error(Errc::BadLambda, "Storey lambda must lie in (0,1), got " + std::to_string(lambda));
  }
  const std::size_t n = sample.size();
  const double below = static_cast<double>(count_at_most(sample.values(), lambda)) / static_cast<double>(n);
  return from_pi0((1.0 - below) / (1.0 - lambda), n, lambda, "storey");
}

ProportionEstimate st_median(const PValueSample& sample) {
  const std::size_t k = std::max<std::size_t>(1, sample.size() / 2);
  auto out = storey_at(sample, sample.order_stat(k));
  out.method = "st-med";
  return out;
}

ProportionEstimate lsl(const PValueSample& sample) {
  const std::size_t n = sample.size();
  if (n < 2) {
    throw Error(Errc::TooSmall, "LSL needs at least 2 p-values");
  }
  const auto& p = sample.values();
  auto slope = [&](std::size_t i) { return (1.0 - p[i - 1]) / static_cast<double>(n + 1 - i); };

  double n0 = static_cast<double>(n);
  double prev = slope(1);
  for (std::size_t i = 2; i <= n; ++i) {
    const double s = slope(i);
    if (s < prev) {
      if (s > 0.0) n0 = std::min(n0, std::floor(1.0 / s) + 1.0);
      break;
    }
    prev = s;
  }
  return from_pi0(n0 / static_cast<double>(n), n, std::nullopt, "lsl");
}

std::vector<double> default_jd_grid() {
  std::vector<double> grid;
  for (int k = 1; k <= 19; ++k) grid.push_back(0.05 * k);
  return grid;
}

ProportionEstimate jd_bootstrap(const PValueSample& sample, const JdOptions& options, Rng& rng) {
  const auto& grid = options.lambda_grid;
  if (grid.empty()) {
    throw Error(Errc::BadGrid, "JD lambda grid is empty");
  }
  for (std::size_t g = 0; g < grid.size(); ++g) {
    if (!(grid[g] > 0.0 && grid[g] < 1.0)) {
      throw Error(Errc::BadGrid, "JD lambda grid value outside (0,1): " + std::to_string(grid[g]), g);
    }
  }
  if (options.bootstrap_reps < 1) {
    throw Error(Errc::BadB, "JD needs at least one bootstrap resample");
  }

  const std::size_t n = sample.size();
  const double nd = static_cast<double>(n);
  const auto& p = sample.values();

  std::vector<std::size_t> cut(grid.size());
  std::vector<double> plug_in(grid.size());
  double reference = 0.0;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    cut[g] = count_at_most(p, grid[g]);
    plug_in[g] = clamp_pi0((1.0 - static_cast<double>(cut[g]) / nd) / (1.0 - grid[g]), n);
    reference += plug_in[g];
  }
  reference /= static_cast<double>(grid.size());

  // A resample is drawn as positions in the sorted sample; position j has
  // p <= lambda exactly when j < cut(lambda).
  std::vector<double> mse(grid.size(), 0.0);
  std::vector<std::size_t> hits(n + 1);
  for (std::size_t b = 0; b < options.bootstrap_reps; ++b) {
    std::fill(hits.begin(), hits.end(), 0);
    for (std::size_t j = 0; j < n; ++j) ++hits[rng.below(n) + 1];
    for (std::size_t j = 1; j <= n; ++j) hits[j] += hits[j - 1];
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const double below = static_cast<double>(hits[cut[g]]) / nd;
      const double boot = clamp_pi0((1.0 - below) / (1.0 - grid[g]), n);
      mse[g] += (boot - reference) * (boot - reference);
    }
  }

  std::vector<double> sorted_mse = mse;
  std::sort(sorted_mse.begin(), sorted_mse.end());
  const std::size_t m = sorted_mse.size();
  const double median = m % 2 == 1 ? sorted_mse[m / 2] : 0.5 * (sorted_mse[m / 2 - 1] + sorted_mse[m / 2]);

  double pi0 = 0.0;
  std::size_t kept = 0;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    if (mse[g] <= median) {
      pi0 += plug_in[g];
      ++kept;
    }
  }
  pi0 /= static_cast<double>(kept);
  auto out = from_pi0(pi0, n, std::nullopt, "jd");
  return out;
}

}  // namespace dosprop
