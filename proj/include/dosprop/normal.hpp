#pragma once

namespace dosprop {

// Phi(x). Computed through erfc so both tails keep full relative precision.
double std_normal_cdf(double x);

// 1 - Phi(x) without cancellation; this is the one-sided p-value of x.
double std_normal_upper(double x);

// Phi^{-1}(q) for q in (0,1). Throws BadQuantileInput otherwise.
double std_normal_quantile(double q);

double std_normal_pdf(double x);

}  // namespace dosprop
