#include "optdesign/poly.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace optdesign {

double from_unit(const Interval& iv, double t) {
    if (t == -1.0) return iv.lo;
    if (t == 1.0) return iv.hi;
    return 0.5 * (iv.lo + iv.hi) + 0.5 * (iv.hi - iv.lo) * t;
}

double to_unit(const Interval& iv, double x) {
    if (x == iv.lo) return -1.0;
    if (x == iv.hi) return 1.0;
    return (2.0 * x - iv.lo - iv.hi) / (iv.hi - iv.lo);
}

NodeSet::NodeSet(std::vector<double> nodes, Interval interval)
    : nodes_(std::move(nodes)), interval_(interval) {
    if (nodes_.size() < 2) fail(errc::invalid_request, "a node set needs at least 2 nodes");
    for (std::size_t i = 0; i + 1 < nodes_.size(); ++i) {
        if (!(nodes_[i] < nodes_[i + 1]))
            fail(errc::invalid_request, "nodes must be strictly increasing");
    }
    if (nodes_.front() < interval_.lo || nodes_.back() > interval_.hi)
        fail(errc::invalid_request, "nodes must lie inside the interval");
}

LagrangeBasis::LagrangeBasis(const NodeSet& ns)
    : nodes_(ns.nodes()), snap_tol_(1e-14 * ns.interval().width()) {
    const std::size_t g = nodes_.size();
    const double degenerate_tol = 1e-14 * ns.interval().width();
    inv_denom_.resize(g);
    for (std::size_t j = 0; j < g; ++j) {
        double denom = 1.0;
        for (std::size_t k = 0; k < g; ++k) {
            if (k == j) continue;
            const double d = nodes_[j] - nodes_[k];
            if (std::abs(d) < degenerate_tol)
                fail(errc::degenerate_nodes,
                     "nodes " + std::to_string(j) + " and " + std::to_string(k) +
                         " are closer than 1e-14 of the interval width");
            denom *= d;
        }
        inv_denom_[j] = 1.0 / denom;
    }
}

void LagrangeBasis::eval_into(double x, std::span<double> out) const {
    const std::size_t g = nodes_.size();
    for (std::size_t j = 0; j < g; ++j) {
        if (std::abs(x - nodes_[j]) <= snap_tol_) {
            std::fill(out.begin(), out.end(), 0.0);
            out[j] = 1.0;
            return;
        }
    }
    for (std::size_t j = 0; j < g; ++j) {
        double p = inv_denom_[j];
        for (std::size_t k = 0; k < g; ++k) {
            if (k != j) p *= x - nodes_[k];
        }
        out[j] = p;
    }
}

std::vector<double> LagrangeBasis::eval(double x) const {
    std::vector<double> out(nodes_.size());
    eval_into(x, out);
    return out;
}

void LagrangeBasis::eval_deriv_into(double x, std::span<double> out) const {
    const std::size_t g = nodes_.size();
    // l_j'(x) = sum_{m!=j} prod_{k!=j,m} (x - x_k) / denom_j
    for (std::size_t j = 0; j < g; ++j) {
        double sum = 0.0;
        for (std::size_t m = 0; m < g; ++m) {
            if (m == j) continue;
            double p = 1.0;
            for (std::size_t k = 0; k < g; ++k) {
                if (k != j && k != m) p *= x - nodes_[k];
            }
            sum += p;
        }
        out[j] = sum * inv_denom_[j];
    }
}

std::vector<double> LagrangeBasis::eval_deriv(double x) const {
    std::vector<double> out(nodes_.size());
    eval_deriv_into(x, out);
    return out;
}

double LagrangeBasis::sum_abs(double x) const {
    const std::size_t g = nodes_.size();
    double s = 0.0;
    for (std::size_t j = 0; j < g; ++j) {
        double p = inv_denom_[j];
        for (std::size_t k = 0; k < g; ++k) {
            if (k != j) p *= x - nodes_[k];
        }
        s += std::abs(p);
    }
    return s;
}

double chebyshev_t(int degree, double x) {
    if (degree < 0) fail(errc::invalid_request, "chebyshev_t needs a non-negative degree");
    if (degree == 0) return 1.0;
    double prev = 1.0;
    double cur = x;
    for (int k = 1; k < degree; ++k) {
        const double next = 2.0 * x * cur - prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

LegendreEval legendre_eval(int degree, double x) {
    if (degree < 0) fail(errc::invalid_request, "legendre_eval needs a non-negative degree");
    if (degree > 60)
        fail(errc::unsupported_degree, "legendre recurrence budget is degree <= 60");
    // P_0 = 1, P_1 = x; Bonnet recurrence differentiated twice.
    double p_prev = 1.0, d_prev = 0.0, s_prev = 0.0;
    if (degree == 0) return {1.0, 0.0, 0.0};
    double p = x, d = 1.0, s = 0.0;
    for (int k = 1; k < degree; ++k) {
        const double a = (2.0 * k + 1.0) / (k + 1.0);
        const double b = static_cast<double>(k) / (k + 1.0);
        const double p_next = a * x * p - b * p_prev;
        const double d_next = a * (p + x * d) - b * d_prev;
        const double s_next = a * (2.0 * d + x * s) - b * s_prev;
        p_prev = p;
        d_prev = d;
        s_prev = s;
        p = p_next;
        d = d_next;
        s = s_next;
    }
    return {p, d, s};
}

std::vector<double> legendre_deriv_roots(int degree) {
    if (degree < 1) fail(errc::invalid_request, "legendre_deriv_roots needs degree >= 1");
    std::vector<double> roots;
    if (degree == 1) return roots;  // P_1' = 1
    roots.reserve(static_cast<std::size_t>(degree) - 1);

    const auto dp = [degree](double x) { return legendre_eval(degree, x).first_deriv; };
    const auto ddp = [degree](double x) { return legendre_eval(degree, x).second_deriv; };

    // Brackets from sign changes of P' on a 64*degree uniform grid of (-1,1).
    const int m = 64 * degree;
    double x_prev = -1.0 + 2.0 / m;
    double f_prev = dp(x_prev);
    for (int i = 2; i < m; ++i) {
        const double x_cur = -1.0 + 2.0 * i / m;
        const double f_cur = dp(x_cur);
        if (f_prev == 0.0) {
            roots.push_back(x_prev);
        } else if (f_prev * f_cur < 0.0) {
            double lo = x_prev, hi = x_cur, flo = f_prev;
            while (hi - lo > 1e-6) {
                const double mid = 0.5 * (lo + hi);
                const double fm = dp(mid);
                if (flo * fm <= 0.0) {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
            }
            // Interlacing guarantees simple roots; Newton polishes to 1e-12.
            double r = 0.5 * (lo + hi);
            for (int it = 0; it < 60; ++it) {
                const double f = dp(r);
                const double df = ddp(r);
                if (df == 0.0) break;
                const double step = f / df;
                r -= step;
                if (std::abs(step) < 1e-13) break;
            }
            roots.push_back(r);
        }
        x_prev = x_cur;
        f_prev = f_cur;
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

}  // namespace optdesign
