#pragma once

namespace fri::stats {

/// Regularized incomplete beta function I_x(a, b).
double incomplete_beta(double a, double b, double x);

/// Student-t CDF with nu degrees of freedom.
double student_t_cdf(double t, double nu);

/// Quantile of the Student-t distribution (inverse CDF), nu >= 1,
/// 0 < p < 1, accurate to ~1e-10.
double student_t_quantile(double p, double nu);

}  // namespace fri::stats
