#pragma once

#include <string>
#include <vector>

#include "optdesign/design.hpp"

namespace optdesign {

/// The canonical estimator variance sigma2 * sum_j l_j(x)^2 / m_j, with m_j
/// the integer frequencies or, when use_weights, the continuous weights.
/// Every closed form in this module is checked against this sum.
double variance_at(const Design& d, double sigma2, double x, bool use_weights = false);

/// Variance at the optimal continuous weights for extrapolation to x:
/// sigma2 * (sum_j |l_j(x)|)^2 / n.
double hl_envelope_variance(const NodeSet& nodes, double sigma2, int n, double x);

/// Closed-form Guest variance (1 + (x^2-1)/(g(g-1)) * P'_{g-1}(x)^2) * g sigma2 / n.
double guest_variance_closed_form(int g, int n, double sigma2, double x);

/// Leading-order Guest variance for |x| > 1:
/// (g-1) * ((2(g-1))! / (2^{g-1} ((g-1)!)^2))^2 * x^{2(g-1)} * sigma2 / n.
double extrapolation_asymptote(int g, int n, double sigma2, double x);

struct MaxVariance {
    double argmax;
    double max_value;
};

/// Global maximum of the variance polynomial over [lo,hi]: derivative roots
/// bracketed on a 512-point grid, refined by bisection to 1e-12, plus both
/// endpoints.
MaxVariance max_variance_on_interval(const Design& d, double sigma2, const Interval& iv,
                                     bool use_weights = false);

/// R(c): the interval maximum of the variance under the continuous
/// Hoel-Levine allocation at c, divided by its value at c. Chebyshev nodes,
/// weight fractions n_j(c) = |l_j(c)| / sum_i |l_i(c)|.
double crossover_ratio(int g, double c);

struct CrossoverResult {
    int g;
    double c1;
    double ratio_at_c1;
    int iterations;
};

/// The unique c1 > 1 with R(c1) = 1, by bracketing and bisection.
CrossoverResult crossover_c1(int g);

std::string to_json(const CrossoverResult& r);

struct VarianceProfile {
    double sigma2;
    std::vector<double> grid;
    std::vector<double> values;
    double max_point;
    double max_value;
};

VarianceProfile variance_profile(const Design& d, double sigma2, const Interval& iv,
                                 int points, bool use_weights = false);

/// CSV rows "x,variance" plus a trailing "# max at <x> value <v>" line.
std::string profile_to_csv(const VarianceProfile& p);

}  // namespace optdesign
