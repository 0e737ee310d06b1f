#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "optdesign/errors.hpp"

namespace optdesign {

/// Closed real interval [lo, hi] with lo < hi.
struct Interval {
    double lo;
    double hi;

    Interval(double lo_, double hi_) : lo(lo_), hi(hi_) {
        if (!(lo < hi)) fail(errc::invalid_interval, "interval requires lo < hi");
    }

    double width() const { return hi - lo; }
    bool contains(double x) const { return x >= lo && x <= hi; }

    static Interval unit() { return Interval(-1.0, 1.0); }
};

/// Maps t in [-1,1] to (lo+hi)/2 + (hi-lo)/2 * t. Endpoints map exactly.
double from_unit(const Interval& iv, double t);

/// Inverse of from_unit; round trip is exact to 1e-15 relative.
double to_unit(const Interval& iv, double x);

/// Strictly increasing abscissas inside a containing interval.
class NodeSet {
public:
    NodeSet(std::vector<double> nodes, Interval interval);

    const std::vector<double>& nodes() const { return nodes_; }
    const Interval& interval() const { return interval_; }
    std::size_t size() const { return nodes_.size(); }
    double operator[](std::size_t i) const { return nodes_[i]; }

private:
    std::vector<double> nodes_;
    Interval interval_;
};

/// Elementary Lagrange basis on a fixed node set. Pairwise-difference
/// denominators are computed once at construction; evaluation anywhere on the
/// real line uses the direct product formula.
class LagrangeBasis {
public:
    explicit LagrangeBasis(const NodeSet& nodes);

    std::size_t size() const { return nodes_.size(); }
    const std::vector<double>& nodes() const { return nodes_; }

    /// l_0(x), ..., l_{g-1}(x). Within 1e-14 * width of a node this
    /// short-circuits to the exact standard basis vector.
    std::vector<double> eval(double x) const;
    void eval_into(double x, std::span<double> out) const;

    /// Derivatives l_j'(x), exact sum-of-products form.
    std::vector<double> eval_deriv(double x) const;
    void eval_deriv_into(double x, std::span<double> out) const;

    /// Sum of |l_j(x)|.
    double sum_abs(double x) const;

private:
    std::vector<double> nodes_;
    std::vector<double> inv_denom_;  // 1 / prod_{k!=j}(x_j - x_k)
    double snap_tol_;
};

/// Chebyshev polynomial of the first kind, cos(d*arccos x) on [-1,1],
/// extended to all reals by the three-term recurrence.
double chebyshev_t(int degree, double x);

struct LegendreEval {
    double value;
    double first_deriv;
    double second_deriv;
};

/// Legendre polynomial P_degree with first and second derivatives, by the
/// Bonnet recurrence and its differentiated forms. degree must be <= 60.
LegendreEval legendre_eval(int degree, double x);

/// All degree-1 roots of d/dx P_degree inside (-1,1), increasing, each
/// accurate to 1e-12. Empty for degree 1.
std::vector<double> legendre_deriv_roots(int degree);

}  // namespace optdesign
