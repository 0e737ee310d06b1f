#include "optdesign/variance.hpp"

#include <cmath>
#include <cstdio>
#include <functional>

namespace optdesign {

namespace {

std::string format_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<double> inverse_masses(const Design& d, bool use_weights) {
    std::vector<double> inv(d.size());
    for (std::size_t j = 0; j < d.size(); ++j) {
        const double m = use_weights ? d.weights[j] : static_cast<double>(d.frequencies[j]);
        if (m <= 0.0)
            fail(errc::infinite_variance,
                 "node " + std::to_string(j) + " has no observations");
        inv[j] = 1.0 / m;
    }
    return inv;
}

// Maximum of scale * sum_j l_j(x)^2 * inv_m[j] over [lo,hi].
MaxVariance max_weighted_l2(const LagrangeBasis& basis, const std::vector<double>& inv_m,
                            const Interval& iv, double scale) {
    const std::size_t g = basis.size();
    std::vector<double> l(g), dl(g);

    const auto value = [&](double x) {
        basis.eval_into(x, l);
        double s = 0.0;
        for (std::size_t j = 0; j < g; ++j) s += l[j] * l[j] * inv_m[j];
        return scale * s;
    };
    const auto slope = [&](double x) {
        basis.eval_into(x, l);
        basis.eval_deriv_into(x, dl);
        double s = 0.0;
        for (std::size_t j = 0; j < g; ++j) s += l[j] * dl[j] * inv_m[j];
        return s;
    };

    constexpr int kGrid = 512;
    std::vector<double> candidates;
    candidates.reserve(2 * g + 2);
    candidates.push_back(iv.lo);
    candidates.push_back(iv.hi);

    double x_prev = iv.lo;
    double f_prev = slope(x_prev);
    for (int i = 1; i <= kGrid; ++i) {
        const double x_cur = (i == kGrid) ? iv.hi : iv.lo + iv.width() * i / kGrid;
        const double f_cur = slope(x_cur);
        if (f_prev == 0.0) {
            candidates.push_back(x_prev);
        } else if (f_prev * f_cur < 0.0) {
            double lo = x_prev, hi = x_cur, flo = f_prev;
            while (hi - lo > 1e-12) {
                const double mid = 0.5 * (lo + hi);
                const double fm = slope(mid);
                if (flo * fm <= 0.0) {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
            }
            candidates.push_back(0.5 * (lo + hi));
        }
        x_prev = x_cur;
        f_prev = f_cur;
    }

    MaxVariance best{candidates.front(), value(candidates.front())};
    for (std::size_t i = 1; i < candidates.size(); ++i) {
        const double v = value(candidates[i]);
        if (v > best.max_value) best = {candidates[i], v};
    }
    return best;
}

}  // namespace

double variance_at(const Design& d, double sigma2, double x, bool use_weights) {
    const std::vector<double> inv = inverse_masses(d, use_weights);
    LagrangeBasis basis(d.nodes);
    const std::vector<double> l = basis.eval(x);
    double s = 0.0;
    for (std::size_t j = 0; j < d.size(); ++j) s += l[j] * l[j] * inv[j];
    return sigma2 * s;
}

double hl_envelope_variance(const NodeSet& nodes, double sigma2, int n, double x) {
    LagrangeBasis basis(nodes);
    const double s = basis.sum_abs(x);
    return sigma2 * s * s / n;
}

double guest_variance_closed_form(int g, int n, double sigma2, double x) {
    if (g < 2) fail(errc::invalid_request, "guest closed form needs g >= 2");
    const double dp = legendre_eval(g - 1, x).first_deriv;
    const double base = static_cast<double>(g) * sigma2 / n;
    return (1.0 + (x * x - 1.0) / (static_cast<double>(g) * (g - 1)) * dp * dp) * base;
}

double extrapolation_asymptote(int g, int n, double sigma2, double x) {
    if (g < 2) fail(errc::invalid_request, "extrapolation asymptote needs g >= 2");
    if (std::abs(x) <= 1.0)
        fail(errc::domain_error, "extrapolation asymptote is defined for |x| > 1");
    const int deg = g - 1;
    // leading coefficient of P_{g-1}: C(2(g-1), g-1) / 2^{g-1}
    double lead = 1.0;
    for (int k = 1; k <= deg; ++k) lead *= static_cast<double>(deg + k) / (2.0 * k);
    return deg * lead * lead * std::pow(x, 2.0 * deg) * sigma2 / n;
}

MaxVariance max_variance_on_interval(const Design& d, double sigma2, const Interval& iv,
                                     bool use_weights) {
    const std::vector<double> inv = inverse_masses(d, use_weights);
    LagrangeBasis basis(d.nodes);
    return max_weighted_l2(basis, inv, iv, sigma2);
}

double crossover_ratio(int g, double c) {
    if (!(c > 1.0)) fail(errc::domain_error, "crossover ratio is defined for c > 1");
    LagrangeBasis basis(chebyshev_nodes(g));
    const std::vector<double> lc = basis.eval(c);
    double sum_abs = 0.0;
    for (double v : lc) sum_abs += std::abs(v);
    std::vector<double> inv(lc.size());
    for (std::size_t j = 0; j < lc.size(); ++j) inv[j] = sum_abs / std::abs(lc[j]);
    const MaxVariance peak = max_weighted_l2(basis, inv, Interval::unit(), 1.0);
    return peak.max_value / (sum_abs * sum_abs);
}

CrossoverResult crossover_c1(int g) {
    if (g < 2) fail(errc::invalid_request, "crossover needs g >= 2");
    double lo = 1.0 + 1e-6;
    double hi = 1.0 + 2e-6;
    int iterations = 0;
    while (crossover_ratio(g, hi) >= 1.0) {
        lo = hi;
        hi = 1.0 + 2.0 * (hi - 1.0);
        ++iterations;
        if (iterations > 200) fail(errc::domain_error, "crossover bracket did not close");
    }
    while (hi - lo > 1e-13 * hi && iterations < 400) {
        const double mid = 0.5 * (lo + hi);
        if (crossover_ratio(g, mid) >= 1.0) {
            lo = mid;
        } else {
            hi = mid;
        }
        ++iterations;
    }
    const double c1 = 0.5 * (lo + hi);
    return {g, c1, crossover_ratio(g, c1), iterations};
}

std::string to_json(const CrossoverResult& r) {
    std::string out = "{\"g\":";
    out += std::to_string(r.g);
    out += ",\"c1\":";
    out += format_real(r.c1);
    out += ",\"ratio_at_c1\":";
    out += format_real(r.ratio_at_c1);
    out += ",\"iterations\":";
    out += std::to_string(r.iterations);
    out += '}';
    return out;
}

VarianceProfile variance_profile(const Design& d, double sigma2, const Interval& iv,
                                 int points, bool use_weights) {
    if (points < 2) fail(errc::invalid_request, "a profile needs at least 2 points");
    const std::vector<double> inv = inverse_masses(d, use_weights);
    LagrangeBasis basis(d.nodes);
    std::vector<double> l(d.size());

    VarianceProfile p;
    p.sigma2 = sigma2;
    p.grid.resize(static_cast<std::size_t>(points));
    p.values.resize(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        const double x =
            (i == points - 1) ? iv.hi : iv.lo + iv.width() * i / (points - 1);
        basis.eval_into(x, l);
        double s = 0.0;
        for (std::size_t j = 0; j < d.size(); ++j) s += l[j] * l[j] * inv[j];
        p.grid[static_cast<std::size_t>(i)] = x;
        p.values[static_cast<std::size_t>(i)] = sigma2 * s;
    }
    const MaxVariance m = max_weighted_l2(basis, inv, iv, sigma2);
    p.max_point = m.argmax;
    p.max_value = m.max_value;
    return p;
}

std::string profile_to_csv(const VarianceProfile& p) {
    std::string out = "x,variance\n";
    for (std::size_t i = 0; i < p.grid.size(); ++i) {
        out += format_real(p.grid[i]);
        out += ',';
        out += format_real(p.values[i]);
        out += '\n';
    }
    out += "# max at ";
    out += format_real(p.max_point);
    out += " value ";
    out += format_real(p.max_value);
    out += '\n';
    return out;
}

}  // namespace optdesign
