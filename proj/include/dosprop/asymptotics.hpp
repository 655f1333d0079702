#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace dosprop {

// T ~ pi1 N(mu1,1) + (1-pi1) N(0,1), one-sided p-values.
struct GaussianMixtureModel {
  double pi1 = 0.1;
  double mu1 = 3.0;
};

// pi1 U[0,b] + (1-pi1) U[0,1].
struct UniformMixtureModel {
  double pi1 = 0.2;
  double b = 0.1;
};

// Composite null: true nulls N(mu0,1) with mu0 <= 0 give superuniform p-values.
struct CompositeGaussianModel {
  double pi1 = 0.25;
  double mu0 = -1.0;
  double mu1 = 2.25;
};

// Piecewise-linear quantile function on [0,1]. `breaks` are the interior
// change-points t_1 < ... < t_m, `slopes` the slope on each segment starting
// at 0. With m slopes the last segment's slope is whatever reaches Q(1) = 1.
struct PiecewiseLinearModel {
  std::vector<double> breaks;
  std::vector<double> slopes;
};

// Analytic p-value distribution F with CDF and quantile evaluation.
// Immutable after construction.
class QuantileModel {
 public:
  using Kind = std::variant<GaussianMixtureModel, UniformMixtureModel, CompositeGaussianModel, PiecewiseLinearModel>;

  static QuantileModel gaussian_mixture(double pi1, double mu1);
  static QuantileModel uniform_mixture(double pi1, double b);
  static QuantileModel composite_gaussian(double pi1, double mu0, double mu1);
  static QuantileModel piecewise_linear(std::vector<double> breaks, std::vector<double> slopes);

  double cdf(double x) const;
  double quantile(double t) const;

  const Kind& kind() const noexcept { return kind_; }
  // False-null proportion of the mixture; empty for piecewise models.
  std::optional<double> pi1() const;
  std::string describe() const;

 private:
  explicit QuantileModel(Kind kind);

  Kind kind_;
  // piecewise only: knots t_0 = 0 < ... < t_{m+1} = 1 and Q at each knot
  std::vector<double> knots_t_;
  std::vector<double> knots_q_;
};

double model_cdf(const QuantileModel& model, double x);
double model_quantile(const QuantileModel& model, double t);

// h(t) = (F^{-1}(2t) - 2 F^{-1}(t)) / t^alpha for t in (0, 1/2].
double h_value(const QuantileModel& model, double alpha, double t);

// Lower end of the search domain for the ideal change-point.
inline constexpr double kIdealSearchFloor = 1e-4;
inline constexpr std::size_t kIdealCoarseGrid = 2000;

enum class A2Status { ok, increasing_throughout, plateau_at_max, boundary_max };

const char* a2_status_name(A2Status s) noexcept;

struct A2Report {
  A2Status status = A2Status::ok;
  double t_at_max = 0.0;  // first grid maximiser
  double h_max = 0.0;
  std::size_t plateau_points = 1;  // adjacent grid points within 1e-9 of the max
};

// Evaluates h on grid_size (>= 100) equally spaced points of [1e-4, 1/2] and
// classifies the shape around its maximum.
A2Report check_a2(const QuantileModel& model, double alpha, std::size_t grid_size = kIdealCoarseGrid);

struct IdealQuantities {
  double t_tilde = 0.0;
  double quantile_at_t = 0.0;
  double pi1_estimable = 0.0;
  double h_at_max = 0.0;
};

// Maximiser of h over [1e-4, 1/2]: coarse grid then golden-section refinement
// in the bracket around the best grid point. Throws A2Violated when the coarse
// grid shows a boundary maximum or a plateau, unless check_assumption is false.
IdealQuantities ideal_changepoint(const QuantileModel& model, double alpha, bool check_assumption = true);

}  // namespace dosprop
