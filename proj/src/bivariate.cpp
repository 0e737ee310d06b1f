#include "optdesign/bivariate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "optdesign/rng.hpp"

namespace optdesign {

namespace {

std::string format_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Lower Cholesky factor of an SPD matrix.
Matrix cholesky(const Matrix& a) {
    const std::size_t n = a.rows();
    Matrix l(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            if (i == j) {
                if (!(s > 0.0) || !std::isfinite(s))
                    fail(errc::covariance_not_pd, "covariance is not positive-definite");
                l(i, i) = std::sqrt(s);
            } else {
                l(i, j) = s / l(j, j);
            }
        }
    }
    return l;
}

// Solve (L L') x = b.
std::vector<double> cholesky_solve(const Matrix& l, const std::vector<double>& b) {
    const std::size_t n = l.rows();
    std::vector<double> x(b);
    for (std::size_t i = 0; i < n; ++i) {
        double s = x[i];
        for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * x[k];
        x[i] = s / l(i, i);
    }
    for (std::size_t i = n; i-- > 0;) {
        double s = x[i];
        for (std::size_t k = i + 1; k < n; ++k) s -= l(k, i) * x[k];
        x[i] = s / l(i, i);
    }
    return x;
}

}  // namespace

Matrix tensor_lagrange_eval(const NodeSet& x_nodes, const NodeSet& y_nodes, Point p) {
    LagrangeBasis bx(x_nodes);
    LagrangeBasis by(y_nodes);
    const std::vector<double> lx = bx.eval(p.x);
    const std::vector<double> ly = by.eval(p.y);
    Matrix out(lx.size(), ly.size());
    for (std::size_t i = 0; i < lx.size(); ++i)
        for (std::size_t j = 0; j < ly.size(); ++j) out(i, j) = lx[i] * ly[j];
    return out;
}

void GlsProblem::validate() const {
    if (omega.rows() == 0 || omega.rows() != omega.cols())
        fail(errc::invalid_request, "omega must be square and non-empty");
    if (y.size() != omega.rows())
        fail(errc::invalid_request, "response length must match omega's order");
    for (std::size_t i = 0; i + 1 < y.size(); ++i)
        if (y[i] > y[i + 1]) fail(errc::invalid_request, "responses must be ordered ascending");
}

GlsEstimate gls_estimate(const GlsProblem& p) {
    p.validate();
    const std::size_t n = p.y.size();
    const Matrix l = cholesky(p.omega);
    const std::vector<double> ones(n, 1.0);
    const std::vector<double> wi_ones = cholesky_solve(l, ones);   // Omega^-1 1
    const std::vector<double> wi_y = cholesky_solve(l, p.y);       // Omega^-1 y
    const double s11 = std::accumulate(wi_ones.begin(), wi_ones.end(), 0.0);  // 1'Omega^-1 1
    double s1y = 0.0;
    for (std::size_t i = 0; i < n; ++i) s1y += wi_y[i];  // 1'Omega^-1 y

    GlsEstimate est{};
    if (p.reduced) {
        if (s11 <= 0.0) fail(errc::covariance_not_pd, "degenerate normal equations");
        est.location = s1y / s11;
        est.scale = 0.0;
        est.covariance[0][0] = 1.0 / s11;
        return est;
    }

    // X = [1, ez 1]: the normal-equation matrix is s11 * [[1, ez], [ez, ez^2]].
    const double a00 = s11;
    const double a01 = p.ez * s11;
    const double a11 = p.ez * p.ez * s11;
    const double det = a00 * a11 - a01 * a01;
    const double scale_ref = std::max({std::abs(a00), std::abs(a01), std::abs(a11)});
    if (std::abs(det) <= 1e-12 * scale_ref * scale_ref)
        fail(errc::collinear_design,
             "constant E(Z) column is collinear with the intercept; use the reduced model");

    const double b0 = s1y;
    const double b1 = p.ez * s1y;
    est.location = (a11 * b0 - a01 * b1) / det;
    est.scale = (a00 * b1 - a01 * b0) / det;
    est.covariance[0][0] = a11 / det;
    est.covariance[0][1] = est.covariance[1][0] = -a01 / det;
    est.covariance[1][1] = a00 / det;
    return est;
}

double g_scalar(double sigma2eta2, const GlsProblem& p, GlsSimplification tag) {
    p.validate();
    const std::size_t n = p.y.size();
    switch (tag) {
        case GlsSimplification::general: {
            const Matrix l = cholesky(p.omega);
            const std::vector<double> ones(n, 1.0);
            const std::vector<double> wi_ones = cholesky_solve(l, ones);
            const double s11 = std::accumulate(wi_ones.begin(), wi_ones.end(), 0.0);
            if (p.reduced) return sigma2eta2 / s11;
            const double a01 = p.ez * s11;
            const double a11 = p.ez * p.ez * s11;
            const double det = s11 * a11 - a01 * a01;
            if (std::abs(det) <= 1e-12 * std::max(s11, a11) * std::max(s11, a11))
                fail(errc::collinear_design,
                     "constant E(Z) column is collinear with the intercept");
            return sigma2eta2 * a11 / det;
        }
        case GlsSimplification::symmetric_g1: {
            if (std::abs(p.ez) > 1e-12)
                fail(errc::simplification_inapplicable, "symmetric_g1 needs E(Z) = 0");
            const Matrix l = cholesky(p.omega);
            const std::vector<double> ones(n, 1.0);
            const std::vector<double> wi_ones = cholesky_solve(l, ones);
            const double gamma = std::accumulate(wi_ones.begin(), wi_ones.end(), 0.0);
            return sigma2eta2 / gamma;
        }
        case GlsSimplification::row_sum_g2: {
            for (std::size_t j = 0; j < n; ++j) {
                double colsum = 0.0;
                for (std::size_t i = 0; i < n; ++i) colsum += p.omega(i, j);
                if (std::abs(colsum - 1.0) > 1e-10)
                    fail(errc::simplification_inapplicable,
                         "row_sum_g2 needs 1'Omega = 1'");
            }
            return sigma2eta2 / static_cast<double>(n);
        }
    }
    fail(errc::invalid_request, "unknown simplification tag");
}

namespace {

struct AxisBasis {
    NodeSet nodes;
    std::vector<double> abs_l;  // |l_j(u)| on this axis
};

AxisBasis axis_basis(int g, const Interval& iv, double u) {
    std::vector<double> mapped(static_cast<std::size_t>(g));
    NodeSet unit = chebyshev_nodes(g);
    for (std::size_t i = 0; i < mapped.size(); ++i) mapped[i] = from_unit(iv, unit[i]);
    NodeSet nodes(std::move(mapped), iv);
    LagrangeBasis basis(nodes);
    std::vector<double> l = basis.eval(u);
    for (double& v : l) v = std::abs(v);
    return {std::move(nodes), std::move(l)};
}

}  // namespace

FrequencyAllocation generalized_frequencies(Point u, const StressRectangle& rect, int g1,
                                            int g2, int m1, double alpha, double beta) {
    if (g1 < 2 || g2 < 2) fail(errc::invalid_request, "both axes need at least 2 nodes");
    if (!(alpha > 0.0)) fail(errc::invalid_request, "alpha must be positive");
    if (beta < 0.0) fail(errc::invalid_request, "beta must be non-negative");
    if (m1 < g1 * g2) fail(errc::invalid_request, "budget M1 must cover the node grid");
    if (!rect.in_unstressed_quadrant(u))
        fail(errc::not_extrapolation, "u must lie in the unstressed quadrant of the rectangle");

    const AxisBasis ax = axis_basis(g1, rect.x_interval, u.x);
    const AxisBasis ay = axis_basis(g2, rect.y_interval, u.y);

    const std::size_t cells = static_cast<std::size_t>(g1) * g2;
    std::vector<double> l_abs(cells);
    for (int i1 = 0; i1 < g1; ++i1)
        for (int i2 = 0; i2 < g2; ++i2)
            l_abs[static_cast<std::size_t>(i1) * g2 + i2] =
                ax.abs_l[static_cast<std::size_t>(i1)] * ay.abs_l[static_cast<std::size_t>(i2)];

    // KKT on the active set; clamped entries leave and the rest re-solves.
    std::vector<bool> active(cells, true);
    std::vector<double> cont(cells, 0.0);
    bool clamped = false;
    for (;;) {
        double sum_l = 0.0;
        int live = 0;
        for (std::size_t i = 0; i < cells; ++i) {
            if (active[i]) {
                sum_l += l_abs[i];
                ++live;
            }
        }
        if (live == 0 || sum_l <= 0.0)
            fail(errc::invalid_request, "allocation degenerated to an empty active set");
        const double top = alpha * m1 + beta * live;
        bool removed = false;
        for (std::size_t i = 0; i < cells; ++i) {
            if (!active[i]) {
                cont[i] = 0.0;
                continue;
            }
            const double v = (l_abs[i] * top / sum_l - beta) / alpha;
            if (v < 0.0) {
                active[i] = false;
                clamped = true;
                removed = true;
            } else {
                cont[i] = v;
            }
        }
        if (!removed) break;
    }

    const std::vector<int> flat = round_frequencies(cont, m1);

    FrequencyAllocation out;
    out.continuous = Matrix(static_cast<std::size_t>(g1), static_cast<std::size_t>(g2));
    out.frequencies.assign(static_cast<std::size_t>(g1),
                           std::vector<int>(static_cast<std::size_t>(g2)));
    for (int i1 = 0; i1 < g1; ++i1) {
        for (int i2 = 0; i2 < g2; ++i2) {
            const std::size_t k = static_cast<std::size_t>(i1) * g2 + i2;
            out.continuous(static_cast<std::size_t>(i1), static_cast<std::size_t>(i2)) = cont[k];
            out.frequencies[static_cast<std::size_t>(i1)][static_cast<std::size_t>(i2)] = flat[k];
        }
    }
    out.clamped = clamped;
    return out;
}

BivariateDesign bivariate_design(Point u, const StressRectangle& rect, int g1, int g2, int m1,
                                 double alpha, double beta) {
    FrequencyAllocation alloc = generalized_frequencies(u, rect, g1, g2, m1, alpha, beta);
    const AxisBasis ax = axis_basis(g1, rect.x_interval, u.x);
    const AxisBasis ay = axis_basis(g2, rect.y_interval, u.y);

    std::vector<double> wx(static_cast<std::size_t>(g1), 0.0);
    std::vector<double> wy(static_cast<std::size_t>(g2), 0.0);
    std::vector<int> fx(static_cast<std::size_t>(g1), 0);
    std::vector<int> fy(static_cast<std::size_t>(g2), 0);
    for (int i1 = 0; i1 < g1; ++i1) {
        for (int i2 = 0; i2 < g2; ++i2) {
            const auto a = static_cast<std::size_t>(i1);
            const auto b = static_cast<std::size_t>(i2);
            wx[a] += alloc.continuous(a, b);
            wy[b] += alloc.continuous(a, b);
            fx[a] += alloc.frequencies[a][b];
            fy[b] += alloc.frequencies[a][b];
        }
    }

    Design dx{ax.nodes, std::move(wx), std::move(fx), m1, DesignKind::custom, std::nullopt};
    Design dy{ay.nodes, std::move(wy), std::move(fy), m1, DesignKind::custom, std::nullopt};
    return {std::move(dx), std::move(dy), std::move(alloc.frequencies), m1, alpha, beta};
}

BivariateVariance bivariate_variance(const BivariateDesign& d, double sigma2eta2, Point u) {
    const StressRectangle rect{d.x_design.nodes.interval(), d.y_design.nodes.interval()};
    const int g1 = static_cast<int>(d.x_design.size());
    const int g2 = static_cast<int>(d.y_design.size());
    const FrequencyAllocation alloc =
        generalized_frequencies(u, rect, g1, g2, d.m1, d.alpha, d.beta);

    LagrangeBasis bx(d.x_design.nodes);
    LagrangeBasis by(d.y_design.nodes);
    const double sum_abs = bx.sum_abs(u.x) * by.sum_abs(u.y);

    if (!alloc.clamped) {
        const double denom = d.alpha * d.m1 + d.beta * g1 * g2;
        return {sigma2eta2 / denom * sum_abs * sum_abs, false};
    }

    // Clamped allocations break the closed form; fall back to the direct sum.
    const std::vector<double> lx = bx.eval(u.x);
    const std::vector<double> ly = by.eval(u.y);
    double total = 0.0;
    for (int i1 = 0; i1 < g1; ++i1) {
        for (int i2 = 0; i2 < g2; ++i2) {
            const double l = lx[static_cast<std::size_t>(i1)] * ly[static_cast<std::size_t>(i2)];
            if (l == 0.0) continue;
            const double denom =
                d.alpha * alloc.continuous(static_cast<std::size_t>(i1),
                                           static_cast<std::size_t>(i2)) +
                d.beta;
            if (denom <= 0.0) fail(errc::infinite_variance, "allocation left a live node empty");
            total += l * l / denom;
        }
    }
    return {sigma2eta2 * total, true};
}

OrderStatistics gumbel_order_stat_covariance(int n, long replicates, std::uint64_t seed) {
    if (n < 1 || n > 30)
        fail(errc::invalid_request, "order-statistics helper supports 1 <= n <= 30");
    if (replicates < 2) fail(errc::invalid_request, "need at least 2 replicates");

    constexpr long kBlock = 4096;
    const long blocks = (replicates + kBlock - 1) / kBlock;

    const std::size_t un = static_cast<std::size_t>(n);
    std::vector<double> sum(un, 0.0);
    Matrix sumsq(un, un, 0.0);
    std::vector<double> z(un);

    for (long b = 0; b < blocks; ++b) {
        CounterRng rng(seed, static_cast<std::uint64_t>(b));
        const long first = b * kBlock;
        const long last = std::min(replicates, first + kBlock);
        for (long r = first; r < last; ++r) {
            for (double& v : z) v = std::log(-std::log1p(-rng.uniform()));
            std::sort(z.begin(), z.end());
            for (std::size_t i = 0; i < un; ++i) {
                sum[i] += z[i];
                for (std::size_t j = i; j < un; ++j) sumsq(i, j) += z[i] * z[j];
            }
        }
    }

    OrderStatistics out;
    out.means.resize(un);
    const double r = static_cast<double>(replicates);
    for (std::size_t i = 0; i < un; ++i) out.means[i] = sum[i] / r;
    out.covariance = Matrix(un, un);
    for (std::size_t i = 0; i < un; ++i) {
        for (std::size_t j = i; j < un; ++j) {
            const double c = (sumsq(i, j) - r * out.means[i] * out.means[j]) / (r - 1.0);
            out.covariance(i, j) = c;
            out.covariance(j, i) = c;
        }
    }
    return out;
}

std::string to_json(const BivariateDesign& d) {
    std::string out = "{\"x_design\":";
    out += to_json(d.x_design);
    out += ",\"y_design\":";
    out += to_json(d.y_design);
    out += ",\"replications\":[";
    for (std::size_t i = 0; i < d.replications.size(); ++i) {
        if (i) out += ',';
        out += '[';
        for (std::size_t j = 0; j < d.replications[i].size(); ++j) {
            if (j) out += ',';
            out += std::to_string(d.replications[i][j]);
        }
        out += ']';
    }
    out += "],\"M1\":";
    out += std::to_string(d.m1);
    out += ",\"alpha\":";
    out += format_real(d.alpha);
    out += ",\"beta\":";
    out += format_real(d.beta);
    out += '}';
    return out;
}

BivariateDesign bivariate_design_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        fail(errc::parse_error, std::string("bivariate design JSON: ") + e.what());
    }
    try {
        BivariateDesign d{design_from_json(j.at("x_design").dump()),
                          design_from_json(j.at("y_design").dump()),
                          j.at("replications").get<std::vector<std::vector<int>>>(),
                          j.at("M1").get<int>(),
                          j.at("alpha").get<double>(),
                          j.at("beta").get<double>()};
        return d;
    } catch (const nlohmann::json::exception& e) {
        fail(errc::parse_error, std::string("bivariate design JSON: ") + e.what());
    }
}

std::string omega_to_csv(const Matrix& omega) {
    std::string out = "dim=" + std::to_string(omega.rows()) + "\n";
    for (std::size_t i = 0; i < omega.rows(); ++i) {
        for (std::size_t j = 0; j < omega.cols(); ++j) {
            if (j) out += ',';
            out += format_real(omega(i, j));
        }
        out += '\n';
    }
    return out;
}

Matrix omega_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line.rfind("dim=", 0) != 0)
        fail(errc::parse_error, "omega CSV must start with a 'dim=n' line");
    int n = 0;
    try {
        n = std::stoi(line.substr(4));
    } catch (...) {
        fail(errc::parse_error, "bad dimension in omega CSV header");
    }
    if (n < 1) fail(errc::parse_error, "omega dimension must be positive");

    Matrix omega(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        if (!std::getline(in, line))
            fail(errc::parse_error, "omega CSV ended before row " + std::to_string(i));
        std::istringstream row(line);
        std::string cell;
        for (int j = 0; j < n; ++j) {
            if (!std::getline(row, cell, ','))
                fail(errc::parse_error, "omega CSV row " + std::to_string(i) + " is short");
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str() || *end != '\0')
                fail(errc::parse_error, "bad value in omega CSV row " + std::to_string(i));
            omega(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = v;
        }
        if (std::getline(row, cell, ','))
            fail(errc::parse_error, "omega CSV row " + std::to_string(i) + " is long");
    }
    return omega;
}

}  // namespace optdesign
