#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "optdesign/design.hpp"

namespace optdesign {

/// Small dense matrix, row-major.
class Matrix {
public:
    Matrix() : rows_(0), cols_(0) {}
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

private:
    std::size_t rows_, cols_;
    std::vector<double> data_;
};

struct Point {
    double x;
    double y;
};

/// The stressed region [a1,b1] x [a2,b2]; the unstressed domain is the
/// quadrant componentwise below the south-west corner.
struct StressRectangle {
    Interval x_interval;
    Interval y_interval;

    Point threshold() const { return {x_interval.lo, y_interval.lo}; }
    bool in_unstressed_quadrant(Point u) const {
        return u.x <= x_interval.lo && u.y <= y_interval.lo;
    }
};

/// l_{i1,i2}(x,y) = l_{i1}(x) * l_{i2}(y) for every index pair; rows are i1.
Matrix tensor_lagrange_eval(const NodeSet& x_nodes, const NodeSet& y_nodes, Point p);

/// Ordered-observation regression at one node. The design matrix has a ones
/// column and a constant E(Z) column; reduced drops the E(Z) column
/// (mean-only model).
struct GlsProblem {
    Matrix omega;           // covariance of the ordered responses, SPD
    std::vector<double> y;  // ascending
    double ez = 0.0;
    bool reduced = false;

    void validate() const;
};

struct GlsEstimate {
    double location;
    double scale;  // 0 in the reduced model
    double covariance[2][2];
};

/// GLS coefficients via Cholesky of Omega; the covariance block is
/// (X' Omega^-1 X)^-1 without the sigma^2 eta^2 factor.
GlsEstimate gls_estimate(const GlsProblem& p);

enum class GlsSimplification { general, symmetric_g1, row_sum_g2 };

/// Per-node variance factor. general: first diagonal entry of
/// sigma2eta2 (X'Omega^-1 X)^-1. symmetric_g1: sigma2eta2 / sum of all
/// Omega^-1 entries. row_sum_g2: sigma2eta2 / n, valid only when
/// 1'Omega = 1'.
double g_scalar(double sigma2eta2, const GlsProblem& p, GlsSimplification tag);

struct FrequencyAllocation {
    Matrix continuous;             // g1 x g2 KKT allocation, clamped entries 0
    std::vector<std::vector<int>> frequencies;  // rounded, sums to M1
    bool clamped;
};

/// KKT allocation n(i) = (|l_i(u)| (alpha M1 + beta g1 g2) / sum|l| - beta) / alpha
/// with negative entries clamped to zero and the remainder re-solved on the
/// active set, then largest-remainder rounding. beta = 0 reduces to the
/// Hoel-Levine rule on the flattened grid.
FrequencyAllocation generalized_frequencies(Point u, const StressRectangle& rect, int g1,
                                            int g2, int m1, double alpha, double beta);

struct BivariateDesign {
    Design x_design;
    Design y_design;
    std::vector<std::vector<int>> replications;  // [i1][i2]
    int m1;
    double alpha;
    double beta;
};

BivariateDesign bivariate_design(Point u, const StressRectangle& rect, int g1, int g2, int m1,
                                 double alpha, double beta);

struct BivariateVariance {
    double value;
    bool clamped_fallback;  // closed form replaced by the direct sum
};

/// Var(m(u)) = sigma2eta2 / (alpha M1 + beta g1 g2) * (sum |l_i(u)|)^2 at the
/// unclamped continuous allocation; falls back to the direct sum when the
/// allocation was clamped.
BivariateVariance bivariate_variance(const BivariateDesign& d, double sigma2eta2, Point u);

struct OrderStatistics {
    std::vector<double> means;
    Matrix covariance;
};

/// Monte Carlo means and covariance of the order statistics of n standard
/// Gumbel draws (CDF 1 - exp(-exp(z))), for n <= 30.
OrderStatistics gumbel_order_stat_covariance(int n, long replicates, std::uint64_t seed);

std::string to_json(const BivariateDesign& d);
BivariateDesign bivariate_design_from_json(const std::string& text);

/// Dense row-major CSV with a "dim=n" header line.
std::string omega_to_csv(const Matrix& omega);
Matrix omega_from_csv(const std::string& text);

}  // namespace optdesign
