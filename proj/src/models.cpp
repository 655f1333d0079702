#include "dosprop/models.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <type_traits>
#include <utility>
#include <vector>

#include "dosprop/error.hpp"
#include "dosprop/normal.hpp"

namespace dosprop {

namespace {

[[noreturn]] void bad_scenario(const std::string& what) { throw Error(Errc::BadScenario, what); }

// Fisher-Yates over values and labels together.
void shuffle_labeled(std::vector<double>& values, std::vector<bool>& labels, Rng& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    const std::size_t j = rng.below(i);
    std::swap(values[i - 1], values[j]);
    const bool tmp = labels[i - 1];
    labels[i - 1] = labels[j];
    labels[j] = tmp;
  }
}

LabeledSample finish(std::vector<double> values, std::vector<bool> labels, Rng& rng, std::uint64_t seed) {
  shuffle_labeled(values, labels, rng);
  return LabeledSample{PValueSample::from(values), TruthLabels{std::move(labels)}, seed};
}

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

std::size_t false_null_count(std::size_t n, double pi1) {
  const double x = static_cast<double>(n) * pi1;
  const double r = std::round(x);
  if (std::abs(x - r) <= 1e-9 * std::max(1.0, x)) return static_cast<std::size_t>(r);
  return static_cast<std::size_t>(std::floor(x));
}

void GaussianScenario::validate() const {
  if (n < 1) bad_scenario("gaussian scenario needs n >= 1");
  if (!(pi1 >= 0.0 && pi1 <= 0.5)) bad_scenario("gaussian scenario needs pi1 in [0, 0.5], got " + fmt(pi1));
  if (!(mu1 > 0.0)) bad_scenario("gaussian scenario needs mu1 > 0, got " + fmt(mu1));
  if (!(mu0 <= 0.0)) bad_scenario("gaussian scenario needs mu0 <= 0, got " + fmt(mu0));
  if (!(rho >= 0.0 && rho < 1.0)) bad_scenario("gaussian scenario needs rho in [0,1), got " + fmt(rho));
}

std::size_t GaussianScenario::false_null_count() const { return dosprop::false_null_count(n, pi1); }

std::string GaussianScenario::describe() const {
  return "gaussian(n=" + std::to_string(n) + ", pi1=" + fmt(pi1) + ", mu1=" + fmt(mu1) + ", mu0=" + fmt(mu0) +
         ", rho=" + fmt(rho) + ")";
}

void UniformMixtureScenario::validate() const {
  if (n < 1) bad_scenario("uniform mixture needs n >= 1");
  if (!(pi1 >= 0.0 && pi1 < 1.0)) bad_scenario("uniform mixture needs pi1 in [0,1), got " + fmt(pi1));
  if (!(b > 0.0 && b < 1.0)) bad_scenario("uniform mixture needs b in (0,1), got " + fmt(b));
}

std::size_t UniformMixtureScenario::false_null_count() const { return dosprop::false_null_count(n, pi1); }

std::string UniformMixtureScenario::describe() const {
  return "uniform_mixture(n=" + std::to_string(n) + ", pi1=" + fmt(pi1) + ", b=" + fmt(b) + ")";
}

LabeledSample gen_gaussian(const GaussianScenario& s, Rng& rng) {
  s.validate();
  const std::uint64_t seed = rng.seed();
  const std::size_t n1 = s.false_null_count();
  const double shared = s.rho > 0.0 ? rng.normal() : 0.0;
  const double shared_w = std::sqrt(s.rho);
  const double own_w = std::sqrt(1.0 - s.rho);

  std::vector<double> p(s.n);
  std::vector<bool> labels(s.n, false);
  for (std::size_t i = 0; i < s.n; ++i) {
    const bool alt = i < n1;
    const double t = (alt ? s.mu1 : s.mu0) + shared_w * shared + own_w * rng.normal();
    p[i] = std_normal_upper(t);
    labels[i] = alt;
  }
  return finish(std::move(p), std::move(labels), rng, seed);
}

LabeledSample gen_uniform_mixture(const UniformMixtureScenario& s, Rng& rng) {
  s.validate();
  const std::uint64_t seed = rng.seed();
  const std::size_t n1 = s.false_null_count();
  std::vector<double> p(s.n);
  std::vector<bool> labels(s.n, false);
  for (std::size_t i = 0; i < s.n; ++i) {
    const bool alt = i < n1;
    p[i] = alt ? s.b * rng.uniform() : rng.uniform();
    labels[i] = alt;
  }
  return finish(std::move(p), std::move(labels), rng, seed);
}

LabeledSample generate(const Scenario& scenario, Rng& rng) {
  return std::visit(
      [&](const auto& s) -> LabeledSample {
        if constexpr (std::is_same_v<std::decay_t<decltype(s)>, GaussianScenario>) {
          return gen_gaussian(s, rng);
        } else {
          return gen_uniform_mixture(s, rng);
        }
      },
      scenario);
}

void validate(const Scenario& scenario) {
  std::visit([](const auto& s) { s.validate(); }, scenario);
}

std::size_t sample_size(const Scenario& scenario) {
  return std::visit([](const auto& s) { return s.n; }, scenario);
}

std::size_t false_null_count(const Scenario& scenario) {
  return std::visit([](const auto& s) { return s.false_null_count(); }, scenario);
}

std::string describe(const Scenario& scenario) {
  return std::visit([](const auto& s) { return s.describe(); }, scenario);
}

}  // namespace dosprop
