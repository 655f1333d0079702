#include "dosprop/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <type_traits>

#include "dosprop/error.hpp"
#include "dosprop/normal.hpp"
#include "dosprop/optimize.hpp"

namespace dosprop {

namespace {

[[noreturn]] void bad_model(const std::string& what) { throw Error(Errc::BadModel, what); }

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

// Two-component Gaussian p-value CDF written in z = Phi^{-1}(x):
//   G(z) = w Phi(m1 + z) + (1 - w) Phi(m0 + z).
struct GaussianPair {
  double w, m1, m0;

  double cdf_z(double z) const { return w * std_normal_cdf(m1 + z) + (1.0 - w) * std_normal_cdf(m0 + z); }
  double pdf_z(double z) const { return w * std_normal_pdf(m1 + z) + (1.0 - w) * std_normal_pdf(m0 + z); }

  double cdf(double x) const {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return cdf_z(std_normal_quantile(x));
  }

  // Solves G(z) = t on the bracket [Phi^{-1}(t) - max m, Phi^{-1}(t) - min m]
  // with Newton steps, falling back to bisection whenever a step leaves the bracket.
  double quantile(double t) const {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const double zt = std_normal_quantile(t);
    double lo = zt - std::max(m1, m0);
    double hi = zt - std::min(m1, m0);
    if (lo == hi) return t;
    double z = zt - (w * m1 + (1.0 - w) * m0);
    for (int it = 0; it < 200; ++it) {
      const double f = cdf_z(z) - t;
      if (f == 0.0) break;
      if (f < 0.0) {
        lo = z;
      } else {
        hi = z;
      }
      const double slope = pdf_z(z);
      double next = slope > 0.0 ? z - f / slope : 0.5 * (lo + hi);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      const double step = std::abs(next - z);
      z = next;
      if (step <= 4e-16 * std::max(1.0, std::abs(z)) || hi - lo <= 4e-16 * std::max(1.0, std::abs(z))) break;
    }
    return std_normal_cdf(z);
  }
};

GaussianPair as_pair(const GaussianMixtureModel& m) { return {m.pi1, m.mu1, 0.0}; }
GaussianPair as_pair(const CompositeGaussianModel& m) { return {m.pi1, m.mu1, m.mu0}; }

void require_alpha(double alpha) {
  if (!(alpha >= 0.5 && alpha <= 1.0)) {
    throw Error(Errc::BadAlpha, "alpha must lie in [1/2, 1], got " + std::to_string(alpha));
  }
}

// h without argument checks; t in (0, 1/2].
double h_raw(const QuantileModel& model, double alpha, double t) {
  const double num = model.quantile(std::min(1.0, 2.0 * t)) - 2.0 * model.quantile(t);
  return alpha == 1.0 ? num / t : num / std::pow(t, alpha);
}

std::vector<double> search_grid(std::size_t points) {
  std::vector<double> grid(points);
  const double step = (0.5 - kIdealSearchFloor) / static_cast<double>(points - 1);
  for (std::size_t j = 0; j < points; ++j) grid[j] = kIdealSearchFloor + step * static_cast<double>(j);
  grid.back() = 0.5;
  return grid;
}

struct GridScan {
  std::vector<double> t;
  std::vector<double> h;
  std::size_t best = 0;
  A2Report report;
};

GridScan scan(const QuantileModel& model, double alpha, std::size_t points) {
  GridScan s;
  s.t = search_grid(points);
  s.h.resize(points);
  for (std::size_t j = 0; j < points; ++j) {
    s.h[j] = h_raw(model, alpha, s.t[j]);
    if (s.h[j] > s.h[s.best]) s.best = j;
  }

  constexpr double plateau_tol = 1e-9;
  const double hmax = s.h[s.best];
  std::size_t first = s.best;
  std::size_t last = s.best;
  while (first > 0 && s.h[first - 1] >= hmax - plateau_tol) --first;
  while (last + 1 < points && s.h[last + 1] >= hmax - plateau_tol) ++last;

  A2Report& r = s.report;
  r.t_at_max = s.t[s.best];
  r.h_max = hmax;
  r.plateau_points = last - first + 1;

  bool nondecreasing = true;
  for (std::size_t j = 1; j < points && nondecreasing; ++j) {
    nondecreasing = s.h[j] >= s.h[j - 1] - 1e-12;
  }
  if (last == points - 1 && nondecreasing) {
    r.status = A2Status::increasing_throughout;
  } else if (r.plateau_points >= 3) {
    r.status = A2Status::plateau_at_max;
  } else if (s.best == 0 || s.best == points - 1) {
    r.status = A2Status::boundary_max;
  } else {
    r.status = A2Status::ok;
  }
  return s;
}

}  // namespace

QuantileModel::QuantileModel(Kind kind) : kind_(std::move(kind)) {}

QuantileModel QuantileModel::gaussian_mixture(double pi1, double mu1) {
  if (!(pi1 >= 0.0 && pi1 < 1.0)) bad_model("gaussian mixture needs pi1 in [0,1), got " + fmt(pi1));
  if (!(mu1 > 0.0 && std::isfinite(mu1))) bad_model("gaussian mixture needs finite mu1 > 0, got " + fmt(mu1));
  return QuantileModel(GaussianMixtureModel{pi1, mu1});
}

QuantileModel QuantileModel::uniform_mixture(double pi1, double b) {
  if (!(pi1 >= 0.0 && pi1 < 1.0)) bad_model("uniform mixture needs pi1 in [0,1), got " + fmt(pi1));
  if (!(b > 0.0 && b < 1.0)) bad_model("uniform mixture needs b in (0,1), got " + fmt(b));
  return QuantileModel(UniformMixtureModel{pi1, b});
}

QuantileModel QuantileModel::composite_gaussian(double pi1, double mu0, double mu1) {
  if (!(pi1 >= 0.0 && pi1 < 1.0)) bad_model("composite model needs pi1 in [0,1), got " + fmt(pi1));
  if (!(mu0 <= 0.0 && std::isfinite(mu0))) bad_model("composite model needs finite mu0 <= 0, got " + fmt(mu0));
  if (!(mu1 > 0.0 && std::isfinite(mu1))) bad_model("composite model needs finite mu1 > 0, got " + fmt(mu1));
  return QuantileModel(CompositeGaussianModel{pi1, mu0, mu1});
}

QuantileModel QuantileModel::piecewise_linear(std::vector<double> breaks, std::vector<double> slopes) {
  const std::size_t m = breaks.size();
  if (slopes.size() != m && slopes.size() != m + 1) {
    bad_model("piecewise model needs " + std::to_string(m) + " or " + std::to_string(m + 1) + " slopes");
  }
  double prev = 0.0;
  for (double b : breaks) {
    if (!(b > prev && b < 1.0)) bad_model("piecewise breaks must increase strictly inside (0,1)");
    prev = b;
  }

  std::vector<double> kt{0.0};
  kt.insert(kt.end(), breaks.begin(), breaks.end());
  kt.push_back(1.0);
  std::vector<double> kq{0.0};
  for (std::size_t j = 0; j < m; ++j) {
    if (!(slopes[j] > 0.0)) bad_model("piecewise slopes must be positive");
    kq.push_back(kq.back() + slopes[j] * (kt[j + 1] - kt[j]));
  }
  if (slopes.size() == m) {
    const double tail = (1.0 - kq.back()) / (1.0 - kt[m]);
    if (!(tail > 0.0)) bad_model("piecewise segments already reach 1 before the last break");
    slopes.push_back(tail);
    kq.push_back(1.0);
  } else {
    if (!(slopes[m] > 0.0)) bad_model("piecewise slopes must be positive");
    const double end = kq.back() + slopes[m] * (1.0 - kt[m]);
    if (std::abs(end - 1.0) > 1e-12) bad_model("piecewise quantile must end at Q(1) = 1, got " + fmt(end));
    kq.push_back(1.0);
  }

  QuantileModel model(PiecewiseLinearModel{std::move(breaks), std::move(slopes)});
  model.knots_t_ = std::move(kt);
  model.knots_q_ = std::move(kq);
  return model;
}

double QuantileModel::cdf(double x) const {
  if (!(x >= 0.0 && x <= 1.0)) throw Error(Errc::BadX, "model CDF needs x in [0,1], got " + fmt(x));
  return std::visit(
      [&](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, UniformMixtureModel>) {
          return k.pi1 * std::min(x / k.b, 1.0) + (1.0 - k.pi1) * x;
        } else if constexpr (std::is_same_v<K, PiecewiseLinearModel>) {
          if (x >= 1.0) return 1.0;
          const auto it = std::upper_bound(knots_q_.begin(), knots_q_.end(), x);
          const std::size_t j = static_cast<std::size_t>(it - knots_q_.begin()) - 1;
          return knots_t_[j] + (x - knots_q_[j]) / k.slopes[j];
        } else {
          return as_pair(k).cdf(x);
        }
      },
      kind_);
}

double QuantileModel::quantile(double t) const {
  if (!(t >= 0.0 && t <= 1.0)) throw Error(Errc::BadT, "model quantile needs t in [0,1], got " + fmt(t));
  return std::visit(
      [&](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, UniformMixtureModel>) {
          const double at_b = k.pi1 + (1.0 - k.pi1) * k.b;
          if (t <= at_b) return t / (k.pi1 / k.b + (1.0 - k.pi1));
          return (t - k.pi1) / (1.0 - k.pi1);
        } else if constexpr (std::is_same_v<K, PiecewiseLinearModel>) {
          if (t >= 1.0) return 1.0;
          const auto it = std::upper_bound(knots_t_.begin(), knots_t_.end(), t);
          const std::size_t j = static_cast<std::size_t>(it - knots_t_.begin()) - 1;
          return knots_q_[j] + k.slopes[j] * (t - knots_t_[j]);
        } else {
          return as_pair(k).quantile(t);
        }
      },
      kind_);
}

std::optional<double> QuantileModel::pi1() const {
  return std::visit(
      [](const auto& k) -> std::optional<double> {
        if constexpr (std::is_same_v<std::decay_t<decltype(k)>, PiecewiseLinearModel>) {
          return std::nullopt;
        } else {
          return k.pi1;
        }
      },
      kind_);
}

std::string QuantileModel::describe() const {
  return std::visit(
      [](const auto& k) -> std::string {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, GaussianMixtureModel>) {
          return "gaussian:" + fmt(k.pi1) + "," + fmt(k.mu1);
        } else if constexpr (std::is_same_v<K, UniformMixtureModel>) {
          return "uniform:" + fmt(k.pi1) + "," + fmt(k.b);
        } else if constexpr (std::is_same_v<K, CompositeGaussianModel>) {
          return "composite:" + fmt(k.pi1) + "," + fmt(k.mu0) + "," + fmt(k.mu1);
        } else {
          std::string s = "piecewise:breaks=";
          for (std::size_t i = 0; i < k.breaks.size(); ++i) s += (i ? "/" : "") + fmt(k.breaks[i]);
          s += ",slopes=";
          for (std::size_t i = 0; i < k.slopes.size(); ++i) s += (i ? "/" : "") + fmt(k.slopes[i]);
          return s;
        }
      },
      kind_);
}

double model_cdf(const QuantileModel& model, double x) { return model.cdf(x); }
double model_quantile(const QuantileModel& model, double t) { return model.quantile(t); }

double h_value(const QuantileModel& model, double alpha, double t) {
  require_alpha(alpha);
  if (!(t > 0.0 && t <= 0.5)) throw Error(Errc::BadT, "h needs t in (0, 1/2], got " + fmt(t));
  return h_raw(model, alpha, t);
}

const char* a2_status_name(A2Status s) noexcept {
  switch (s) {
    case A2Status::ok: return "ok";
    case A2Status::increasing_throughout: return "increasing_throughout";
    case A2Status::plateau_at_max: return "plateau_at_max";
    case A2Status::boundary_max: return "boundary_max";
  }
  return "unknown";
}

A2Report check_a2(const QuantileModel& model, double alpha, std::size_t grid_size) {
  require_alpha(alpha);
  if (grid_size < 100) throw Error(Errc::BadGrid, "A2 check needs at least 100 grid points");
  return scan(model, alpha, grid_size).report;
}

IdealQuantities ideal_changepoint(const QuantileModel& model, double alpha, bool check_assumption) {
  require_alpha(alpha);
  const GridScan s = scan(model, alpha, kIdealCoarseGrid);
  if (check_assumption && s.report.status != A2Status::ok) {
    throw Error(Errc::A2Violated, std::string("h has no unique interior maximum for ") + model.describe() +
                                      " (" + a2_status_name(s.report.status) + ")");
  }

  const std::size_t j = s.best;
  const double a = s.t[j == 0 ? 0 : j - 1];
  const double b = s.t[std::min(j + 1, s.t.size() - 1)];
  ScalarMax best{s.t[j], s.h[j]};
  if (b > a) {
    const auto refined = golden_section_max([&](double t) { return h_raw(model, alpha, t); }, a, b, 1e-10);
    if (refined.value >= best.value) best = refined;
  }

  IdealQuantities q;
  q.t_tilde = best.x;
  q.h_at_max = best.value;
  q.quantile_at_t = model.quantile(best.x);
  q.pi1_estimable = (q.t_tilde - q.quantile_at_t) / (1.0 - q.quantile_at_t);
  return q;
}

}  // namespace dosprop
