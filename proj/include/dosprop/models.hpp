#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>

#include "dosprop/rng.hpp"
#include "dosprop/sample.hpp"
#include "dosprop/testing.hpp"

namespace dosprop {

// One-sided Gaussian mean testing. Statistics are
//   T_i = mu + sqrt(rho) U + sqrt(1 - rho) Z_i,
// with one shared factor U per replicate, mu = mu1 for the floor(n pi1) false
// nulls and mu0 (<= 0) otherwise, and p_i = 1 - Phi(T_i).
// mu0 < 0 gives superuniform (composite-null) p-values.
struct GaussianScenario {
  std::size_t n = 1000;
  double pi1 = 0.1;
  double mu1 = 3.0;
  double mu0 = 0.0;
  double rho = 0.0;

  void validate() const;
  std::size_t false_null_count() const;
  std::string describe() const;
};

// pi1 U[0,b] + (1 - pi1) U[0,1], with exactly floor(n pi1) draws from U[0,b].
struct UniformMixtureScenario {
  std::size_t n = 1000;
  double pi1 = 0.2;
  double b = 0.1;

  void validate() const;
  std::size_t false_null_count() const;
  std::string describe() const;
};

using Scenario = std::variant<GaussianScenario, UniformMixtureScenario>;

struct LabeledSample {
  PValueSample sample;
  TruthLabels truth;
  std::uint64_t seed = 0;
};

// floor(n pi1), tolerant of n*pi1 landing a rounding error below an integer.
std::size_t false_null_count(std::size_t n, double pi1);

LabeledSample gen_gaussian(const GaussianScenario& scenario, Rng& rng);
LabeledSample gen_uniform_mixture(const UniformMixtureScenario& scenario, Rng& rng);

LabeledSample generate(const Scenario& scenario, Rng& rng);
void validate(const Scenario& scenario);
std::size_t sample_size(const Scenario& scenario);
std::size_t false_null_count(const Scenario& scenario);
std::string describe(const Scenario& scenario);

}  // namespace dosprop
