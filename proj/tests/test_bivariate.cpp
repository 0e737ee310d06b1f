#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "optdesign/bivariate.hpp"

using namespace optdesign;

namespace {

constexpr double kEulerGamma = 0.57721566490153287;

NodeSet cheb_on(int g, const Interval& iv) {
    NodeSet unit = chebyshev_nodes(g);
    std::vector<double> mapped(unit.size());
    for (std::size_t i = 0; i < mapped.size(); ++i) mapped[i] = from_unit(iv, unit[i]);
    return NodeSet(std::move(mapped), iv);
}

double sum_abs_product(const NodeSet& xs, const NodeSet& ys, Point u) {
    return LagrangeBasis(xs).sum_abs(u.x) * LagrangeBasis(ys).sum_abs(u.y);
}

}  // namespace

TEST_CASE("tensor basis is a bivariate partition of unity with delta nodes") {
    const NodeSet xs({0.0, 1.0}, Interval(0.0, 1.0));
    const NodeSet ys({0.0, 0.5, 1.0}, Interval(0.0, 1.0));
    const Matrix at_node = tensor_lagrange_eval(xs, ys, {1.0, 0.5});
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            CHECK(at_node(i, j) == ((i == 1 && j == 1) ? 1.0 : 0.0));

    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> dist(-3.0, 3.0);
    for (int rep = 0; rep < 50; ++rep) {
        const Matrix m = tensor_lagrange_eval(xs, ys, {dist(gen), dist(gen)});
        double sum = 0.0;
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 3; ++j) sum += m(i, j);
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("bilinear truth is reconstructed exactly off the grid") {
    const NodeSet xs({0.0, 1.0}, Interval(0.0, 1.0));
    const NodeSet ys({0.0, 1.0}, Interval(0.0, 1.0));
    const Matrix l = tensor_lagrange_eval(xs, ys, {3.0, -2.0});
    double estimate = 0.0;
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) estimate += xs[i] * ys[j] * l(i, j);
    CHECK(estimate == doctest::Approx(-6.0).epsilon(1e-12));
}

TEST_CASE("tensor reconstruction is exact for all low monomials") {
    const int g1 = 3, g2 = 4;
    const NodeSet xs = cheb_on(g1, Interval(0.0, 2.0));
    const NodeSet ys = cheb_on(g2, Interval(1.0, 3.0));
    std::mt19937_64 gen(12);
    std::uniform_real_distribution<double> dist(-3.0, 3.0);
    for (int p = 0; p < g1; ++p) {
        for (int q = 0; q < g2; ++q) {
            for (int rep = 0; rep < 100; ++rep) {
                const Point pt{dist(gen), dist(gen)};
                const Matrix l = tensor_lagrange_eval(xs, ys, pt);
                double estimate = 0.0;
                for (int i = 0; i < g1; ++i)
                    for (int j = 0; j < g2; ++j)
                        estimate += std::pow(xs[static_cast<std::size_t>(i)], p) *
                                    std::pow(ys[static_cast<std::size_t>(j)], q) *
                                    l(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
                const double truth = std::pow(pt.x, p) * std::pow(pt.y, q);
                CHECK(estimate == doctest::Approx(truth).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("gls with a constant E(Z) column is collinear") {
    Matrix omega(2, 2);
    omega(0, 0) = omega(1, 1) = 1.0;
    const GlsProblem p{omega, {0.0, 2.0}, 1.0, false};
    CHECK_THROWS_WITH_AS(gls_estimate(p), doctest::Contains("collinear-design"), Error);
}

TEST_CASE("reduced gls is the covariance-weighted mean") {
    Matrix identity(2, 2);
    identity(0, 0) = identity(1, 1) = 1.0;
    const GlsEstimate flat = gls_estimate({identity, {0.0, 2.0}, 0.0, true});
    CHECK(flat.location == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(flat.covariance[0][0] == doctest::Approx(0.5).epsilon(1e-12));

    Matrix omega(2, 2);
    omega(0, 0) = omega(1, 1) = 2.0;
    omega(0, 1) = omega(1, 0) = 1.0;
    const GlsEstimate weighted = gls_estimate({omega, {0.0, 3.0}, 0.0, true});
    CHECK(weighted.location == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("gls validates its problem") {
    Matrix not_pd(2, 2);
    not_pd(0, 0) = 1.0;
    not_pd(0, 1) = not_pd(1, 0) = 2.0;
    not_pd(1, 1) = 1.0;
    CHECK_THROWS_WITH_AS(gls_estimate({not_pd, {0.0, 1.0}, 0.0, true}),
                         doctest::Contains("covariance-not-pd"), Error);

    Matrix identity(2, 2);
    identity(0, 0) = identity(1, 1) = 1.0;
    CHECK_THROWS_WITH_AS(gls_estimate({identity, {2.0, 1.0}, 0.0, true}),
                         doctest::Contains("invalid-request"), Error);
}

TEST_CASE("per-node variance factor under each simplification") {
    Matrix id5(5, 5);
    for (std::size_t i = 0; i < 5; ++i) id5(i, i) = 1.0;
    const GlsProblem p5{id5, {0.0, 1.0, 2.0, 3.0, 4.0}, 0.0, true};
    CHECK(g_scalar(2.0, p5, GlsSimplification::symmetric_g1) ==
          doctest::Approx(0.4).epsilon(1e-12));
    CHECK(g_scalar(2.0, p5, GlsSimplification::row_sum_g2) ==
          doctest::Approx(0.4).epsilon(1e-12));
    CHECK(g_scalar(2.0, p5, GlsSimplification::general) ==
          doctest::Approx(0.4).epsilon(1e-12));

    Matrix omega(2, 2);
    omega(0, 0) = omega(1, 1) = 2.0;
    omega(0, 1) = omega(1, 0) = 1.0;
    const GlsProblem p2{omega, {0.0, 3.0}, 0.0, true};
    CHECK(g_scalar(1.0, p2, GlsSimplification::symmetric_g1) ==
          doctest::Approx(1.5).epsilon(1e-12));
    CHECK_THROWS_WITH_AS(g_scalar(1.0, p2, GlsSimplification::row_sum_g2),
                         doctest::Contains("simplification-inapplicable"), Error);

    const GlsProblem offcenter{id5, {0.0, 1.0, 2.0, 3.0, 4.0}, 0.3, true};
    CHECK_THROWS_WITH_AS(g_scalar(1.0, offcenter, GlsSimplification::symmetric_g1),
                         doctest::Contains("simplification-inapplicable"), Error);
}

TEST_CASE("beta zero reduces the allocation to the flattened rule") {
    const StressRectangle rect{Interval(0.0, 1.0), Interval(0.0, 1.0)};
    const Point u{-1.0, -1.0};
    const FrequencyAllocation alloc = generalized_frequencies(u, rect, 2, 2, 52, 1.0, 0.0);
    CHECK(!alloc.clamped);

    // per-axis |l| at u are (2,1) on both axes, so the cells follow (4,2,2,1)/9
    const double expect[2][2] = {{52 * 4.0 / 9, 52 * 2.0 / 9}, {52 * 2.0 / 9, 52 * 1.0 / 9}};
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j)
            CHECK(alloc.continuous(i, j) == doctest::Approx(expect[i][j]).epsilon(1e-12));

    std::vector<double> flat{expect[0][0], expect[0][1], expect[1][0], expect[1][1]};
    const std::vector<int> rounded = round_frequencies(flat, 52);
    CHECK(alloc.frequencies[0][0] == rounded[0]);
    CHECK(alloc.frequencies[0][1] == rounded[1]);
    CHECK(alloc.frequencies[1][0] == rounded[2]);
    CHECK(alloc.frequencies[1][1] == rounded[3]);

    // alpha rescales nothing at beta = 0
    const FrequencyAllocation scaled = generalized_frequencies(u, rect, 2, 2, 52, 3.7, 0.0);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j)
            CHECK(scaled.continuous(i, j) == doctest::Approx(expect[i][j]).epsilon(1e-12));
}

TEST_CASE("allocation always spends the budget") {
    const StressRectangle rect{Interval(0.0, 1.0), Interval(2.0, 5.0)};
    std::mt19937_64 gen(8);
    std::uniform_real_distribution<double> adist(0.2, 3.0);
    std::uniform_real_distribution<double> bdist(0.0, 2.0);
    for (int rep = 0; rep < 100; ++rep) {
        const int g1 = 2 + static_cast<int>(gen() % 3);
        const int g2 = 2 + static_cast<int>(gen() % 3);
        const int m1 = g1 * g2 + static_cast<int>(gen() % 60);
        const FrequencyAllocation alloc = generalized_frequencies(
            {-0.5, 1.0}, rect, g1, g2, m1, adist(gen), bdist(gen));
        int total = 0;
        double cont = 0.0;
        for (const auto& row : alloc.frequencies)
            for (int f : row) {
                CHECK(f >= 0);
                total += f;
            }
        for (std::size_t i = 0; i < alloc.continuous.rows(); ++i)
            for (std::size_t j = 0; j < alloc.continuous.cols(); ++j)
                cont += alloc.continuous(i, j);
        CHECK(total == m1);
        CHECK(cont == doctest::Approx(static_cast<double>(m1)).epsilon(1e-9));
    }
}

TEST_CASE("scarce budget with a large beta clamps the weak corner") {
    const StressRectangle rect{Interval(0.0, 1.0), Interval(0.0, 1.0)};
    const FrequencyAllocation alloc =
        generalized_frequencies({-1.0, -1.0}, rect, 2, 2, 8, 1.0, 2.0);
    CHECK(alloc.clamped);
    CHECK(alloc.continuous(1, 1) == 0.0);
    CHECK(alloc.continuous(0, 0) == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(alloc.continuous(0, 1) == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(alloc.continuous(1, 0) == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(alloc.frequencies[0][0] + alloc.frequencies[0][1] + alloc.frequencies[1][0] +
              alloc.frequencies[1][1] ==
          8);
}

TEST_CASE("unstressed quadrant is enforced") {
    const StressRectangle rect{Interval(0.0, 1.0), Interval(0.0, 1.0)};
    CHECK_THROWS_WITH_AS(generalized_frequencies({0.5, 0.5}, rect, 2, 2, 10, 1.0, 0.0),
                         doctest::Contains("not-extrapolation"), Error);
    CHECK_THROWS_WITH_AS(generalized_frequencies({-1.0, 0.5}, rect, 2, 2, 10, 1.0, 0.0),
                         doctest::Contains("not-extrapolation"), Error);
    // the threshold corner itself is accepted
    CHECK_NOTHROW(generalized_frequencies({0.0, 0.0}, rect, 2, 2, 10, 1.0, 0.0));
}

TEST_CASE("bivariate design maps chebyshev nodes onto each axis") {
    const StressRectangle rect{Interval(0.0, 2.0), Interval(0.0, 1.0)};
    const BivariateDesign d = bivariate_design({-1.0, -1.0}, rect, 4, 2, 40, 1.0, 0.0);
    CHECK(d.x_design.nodes[0] == 0.0);
    CHECK(d.x_design.nodes[1] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(d.x_design.nodes[2] == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(d.x_design.nodes[3] == 2.0);
    CHECK(d.y_design.nodes[0] == 0.0);
    CHECK(d.y_design.nodes[1] == 1.0);

    // marginals of the grid land in the per-axis designs
    for (std::size_t i = 0; i < 4; ++i) {
        int row = 0;
        for (std::size_t j = 0; j < 2; ++j) row += d.replications[i][j];
        CHECK(row == d.x_design.frequencies[i]);
    }
    int total = 0;
    for (const auto& row : d.replications)
        for (int f : row) total += f;
    CHECK(total == 40);
}

TEST_CASE("chebyshev product grid minimizes the extrapolation criterion") {
    std::mt19937_64 gen(99);
    std::uniform_real_distribution<double> ux(0.0, 1.0);
    for (int g = 2; g <= 3; ++g) {
        const StressRectangle rect{Interval(0.0, 1.0), Interval(0.0, 1.0)};
        const Point u{-0.5, -0.25};
        const NodeSet bx = cheb_on(g, rect.x_interval);
        const NodeSet by = cheb_on(g, rect.y_interval);
        const double best = sum_abs_product(bx, by, u);
        int tested = 0;
        while (tested < 200) {
            std::vector<double> xs, ys;
            for (int i = 0; i < g; ++i) {
                xs.push_back(ux(gen));
                ys.push_back(ux(gen));
            }
            std::sort(xs.begin(), xs.end());
            std::sort(ys.begin(), ys.end());
            bool ok = true;
            for (int i = 0; i + 1 < g; ++i)
                if (xs[i + 1] - xs[i] < 1e-3 || ys[i + 1] - ys[i] < 1e-3) ok = false;
            if (!ok) continue;
            ++tested;
            const double rival = sum_abs_product(NodeSet(xs, rect.x_interval),
                                                 NodeSet(ys, rect.y_interval), u);
            CHECK(rival >= best * (1.0 - 1e-12));
        }
    }
}

TEST_CASE("bivariate variance closed form factorizes and matches the direct sum") {
    const StressRectangle rect{Interval(0.0, 1.0), Interval(0.0, 1.0)};
    const Point u{-1.0, -1.0};
    const BivariateDesign d = bivariate_design(u, rect, 2, 2, 52, 1.0, 0.5);
    const BivariateVariance v = bivariate_variance(d, 2.0, u);
    CHECK(!v.clamped_fallback);

    const double sum_abs = sum_abs_product(d.x_design.nodes, d.y_design.nodes, u);
    CHECK(v.value ==
          doctest::Approx(2.0 / (52.0 + 0.5 * 4) * sum_abs * sum_abs).epsilon(1e-12));

    // direct sum over the continuous allocation agrees
    const FrequencyAllocation alloc = generalized_frequencies(u, rect, 2, 2, 52, 1.0, 0.5);
    LagrangeBasis bx(d.x_design.nodes);
    LagrangeBasis by(d.y_design.nodes);
    const std::vector<double> lx = bx.eval(u.x);
    const std::vector<double> ly = by.eval(u.y);
    double direct = 0.0;
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
            const double l = lx[i] * ly[j];
            direct += l * l * 2.0 / (alloc.continuous(i, j) + 0.5);
        }
    CHECK(v.value == doctest::Approx(direct).epsilon(1e-9));

    CHECK(bivariate_variance(d, 0.0, u).value == 0.0);

    const BivariateDesign doubled = bivariate_design(u, rect, 2, 2, 104, 1.0, 0.0);
    const BivariateDesign base = bivariate_design(u, rect, 2, 2, 52, 1.0, 0.0);
    CHECK(bivariate_variance(doubled, 1.0, u).value ==
          doctest::Approx(0.5 * bivariate_variance(base, 1.0, u).value).epsilon(1e-12));
}

TEST_CASE("clamped allocation falls back to the direct sum") {
    const StressRectangle rect{Interval(0.0, 1.0), Interval(0.0, 1.0)};
    const Point u{-1.0, -1.0};
    const BivariateDesign d = bivariate_design(u, rect, 2, 2, 8, 1.0, 2.0);
    const BivariateVariance v = bivariate_variance(d, 1.0, u);
    CHECK(v.clamped_fallback);
    // hand sum: l = (4,-2,-2,1), alpha n + beta = (7, 3.5, 3.5, 2)
    const double expect = 16.0 / 7 + 4.0 / 3.5 + 4.0 / 3.5 + 1.0 / 2;
    CHECK(v.value == doctest::Approx(expect).epsilon(1e-12));
    const double closed = 81.0 / 16;
    CHECK(std::abs(v.value - closed) > 1e-3);
}

TEST_CASE("gumbel order statistics match the analytic two-draw law") {
    const OrderStatistics os = gumbel_order_stat_covariance(2, 200000, 5);
    CHECK(os.means[0] == doctest::Approx(-kEulerGamma - std::log(2.0)).epsilon(0.01));
    CHECK(os.means[1] == doctest::Approx(std::log(2.0) - kEulerGamma).epsilon(0.05));
    CHECK(os.covariance(0, 0) == doctest::Approx(M_PI * M_PI / 6).epsilon(0.03));
    CHECK(os.covariance(0, 1) == os.covariance(1, 0));
    CHECK(os.covariance(0, 1) > 0.0);

    const OrderStatistics again = gumbel_order_stat_covariance(2, 200000, 5);
    CHECK(again.means[0] == os.means[0]);  // seeded determinism

    CHECK_THROWS_WITH_AS(gumbel_order_stat_covariance(31, 1000, 1),
                         doctest::Contains("invalid-request"), Error);
}

TEST_CASE("bivariate JSON and omega CSV round trips") {
    const StressRectangle rect{Interval(0.0, 2.0), Interval(1.0, 4.0)};
    const BivariateDesign d = bivariate_design({-0.3, 0.7}, rect, 3, 2, 30, 1.0, 0.25);
    const std::string j = to_json(d);
    const BivariateDesign back = bivariate_design_from_json(j);
    CHECK(to_json(back) == j);
    CHECK(back.replications == d.replications);

    Matrix omega(3, 3);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t k = 0; k < 3; ++k)
            omega(i, k) = (i == k) ? 2.0 : 0.25 / (1.0 + i + k);
    const std::string csv = omega_to_csv(omega);
    const Matrix back_m = omega_from_csv(csv);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t k = 0; k < 3; ++k) CHECK(back_m(i, k) == omega(i, k));

    CHECK_THROWS_WITH_AS(omega_from_csv("3\n1,0,0\n"), doctest::Contains("parse-error"),
                         Error);
}
