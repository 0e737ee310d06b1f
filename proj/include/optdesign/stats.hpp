#pragma once

namespace optdesign {

/// Inverse standard normal CDF (Wichura's rational approximation).
double normal_quantile(double p);

double normal_cdf(double x);

/// Regularized incomplete beta I_x(a, b) by continued fraction.
double regularized_incomplete_beta(double a, double b, double x);

double student_cdf(double t, int dof);

/// Student t quantile via incomplete-beta CDF inversion.
double student_quantile(double p, int dof);

}  // namespace optdesign
