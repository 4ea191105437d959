#include <doctest.h>

#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/special_functions/beta.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "hsm/error.hpp"
#include "hsm/rng.hpp"
#include "hsm/stats.hpp"

using namespace hsm;
using doctest::Approx;

namespace {

double trapezoid(const KdeCurve& c)
{
    double s = 0;
    for (std::size_t i = 1; i < c.grid.size(); ++i)
        s += 0.5 * (c.density[i] + c.density[i - 1]) * (c.grid[i] - c.grid[i - 1]);
    return s;
}

// 3x3 solve by Cramer's rule.
std::vector<double> cramer3(const double m[3][3], const double r[3])
{
    const auto det = [](const double a[3][3]) {
        return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
               a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
    };
    const double d = det(m);
    std::vector<double> out;
    for (int k = 0; k < 3; ++k) {
        double t[3][3];
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                t[i][j] = j == k ? r[i] : m[i][j];
        out.push_back(det(t) / d);
    }
    return out;
}

} // namespace

TEST_CASE("pearson examples")
{
    const std::vector<double> x{1, 2, 3, 4, 5};
    std::vector<double> y, neg;
    for (double v : x) {
        y.push_back(2 * v + 1);
        neg.push_back(-v);
    }
    CHECK(pearson(x, y) == Approx(1.0).epsilon(1e-15));
    CHECK(pearson(x, neg) == Approx(-1.0).epsilon(1e-15));
    const std::vector<double> a{1, 2, 3}, b{1, 3, 2};
    CHECK(pearson(a, b) == Approx(0.5).epsilon(1e-15));
}

TEST_CASE("pearson errors")
{
    const std::vector<double> a{1, 2, 3}, flat{2, 2, 2}, two{1, 2}, one{1};
    CHECK_THROWS_AS(pearson(a, flat), DegenerateData);
    CHECK_THROWS_AS(pearson(a, two), InvalidSpec);
    CHECK_THROWS_AS(pearson(one, one), InsufficientData);
}

TEST_CASE("pearson is invariant under positive affine maps")
{
    Rng rng(2);
    std::vector<double> x(200), y(200);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = rng.uniform();
        y[i] = x[i] + 0.5 * rng.uniform();
    }
    const double base = pearson(x, y);
    for (auto [s, t] : {std::pair{3.0, -7.0}, {1e-3, 5.0}, {250.0, 0.0}}) {
        auto xs = x, ys = y;
        for (auto& v : xs)
            v = s * v + t;
        for (auto& v : ys)
            v = 2 * s * v - t;
        CHECK(std::abs(pearson(xs, y) - base) < 1e-12);
        CHECK(std::abs(pearson(x, ys) - base) < 1e-12);
    }
}

TEST_CASE("spearman examples")
{
    const std::vector<double> x{1, 2, 3, 4}, sq{1, 4, 9, 16}, down{9, 7, 3, -1};
    CHECK(spearman(x, sq) == Approx(1.0));
    CHECK(spearman(x, down) == Approx(-1.0));
    CHECK(average_ranks(std::vector<double>{10, 20, 10, 5}) == std::vector<double>{2.5, 4, 2.5, 1});
}

TEST_CASE("kde of a single location is the kernel itself")
{
    const std::vector<double> pts{0, 0, 0};
    const auto grid = linspace(-3, 3, 61);
    const auto c = kde(pts, 1.0, grid);
    CHECK(c.bandwidth == 1.0);
    for (std::size_t i = 0; i < grid.size(); ++i)
        CHECK(c.density[i] == Approx(std::exp(-0.5 * grid[i] * grid[i]) / std::sqrt(2 * std::numbers::pi)).epsilon(1e-12));
}

TEST_CASE("kde of symmetric data is symmetric")
{
    const std::vector<double> pts{-3, -1, -0.5, 0.5, 1, 3};
    const auto grid = linspace(-6, 6, 241);
    const auto c = kde(pts, std::nullopt, grid);
    for (std::size_t i = 0; i < grid.size(); ++i)
        CHECK(std::abs(c.density[i] - c.density[grid.size() - 1 - i]) < 1e-9);
}

TEST_CASE("kde of uniform samples")
{
    Rng rng(12);
    std::vector<double> pts(10000);
    for (auto& p : pts)
        p = rng.uniform();
    const auto grid = linspace(0.2, 0.8, 61);
    const auto c = kde(pts, std::nullopt, grid);
    for (double d : c.density)
        CHECK(std::abs(d - 1.0) < 0.1);
}

TEST_CASE("kde non-negative and integrates to one")
{
    Rng rng(13);
    for (int t = 0; t < 20; ++t) {
        std::vector<double> pts(5 + rng.below(300));
        for (auto& p : pts)
            p = std::pow(rng.uniform(), 3) * 100;
        const auto [lo, hi] = std::minmax_element(pts.begin(), pts.end());
        const double bw = silverman_bandwidth(pts);
        const auto c = kde(pts, std::nullopt, linspace(*lo - 3 * bw, *hi + 3 * bw, 4000));
        for (double d : c.density)
            CHECK(d >= 0);
        CHECK(std::abs(trapezoid(c) - 1) < 0.02);
    }
}

TEST_CASE("silverman bandwidth")
{
    // Points 1..5: sd = sqrt(2.5), IQR = 2 (type 7), min(sd, IQR/1.34) = IQR/1.34
    const std::vector<double> pts{1, 2, 3, 4, 5};
    CHECK(silverman_bandwidth(pts) == Approx(0.9 * (2 / 1.34) * std::pow(5.0, -0.2)));
    // Zero IQR with spread tails falls back to the range rule
    const std::vector<double> spiky{0, 5, 5, 5, 5, 10};
    CHECK(silverman_bandwidth(spiky) == Approx(1.06 * 10 * std::pow(6.0, -0.2)));
    // Heavy tails: sd is the smaller scale
    const std::vector<double> wide{0, 0, 0, 1, 9, 9, 9};
    const double sd = std::sqrt((3 * 16.0 + 9 + 3 * 25.0) / 6); // mean 4
    CHECK(silverman_bandwidth(wide) == Approx(0.9 * std::min(sd, 9 / 1.34) * std::pow(7.0, -0.2)));
    const std::vector<double> same{4, 4, 4};
    CHECK_THROWS_AS(silverman_bandwidth(same), DegenerateData);
}

TEST_CASE("incomplete beta identities")
{
    for (double x : {0.0, 0.1, 0.33, 0.5, 0.9, 1.0})
        CHECK(incomplete_beta(x, 1, 1) == Approx(x).epsilon(1e-14));
    CHECK(incomplete_beta(0.5, 2, 2) == Approx(0.5).epsilon(1e-14));
    for (double x = 0.0; x <= 1.0; x += 0.05)
        for (double a : {0.3, 1.0, 2.5, 10.0, 150.0})
            for (double b : {0.5, 1.0, 4.0, 33.0, 400.0}) {
                CHECK(std::abs(incomplete_beta(x, a, b) + incomplete_beta(1 - x, b, a) - 1) < 1e-10);
            }
}

TEST_CASE("incomplete beta against an independent implementation")
{
    for (double x : {1e-6, 0.01, 0.2, 0.5, 0.77, 0.999})
        for (double a : {0.5, 1.5, 7.0, 201.0})
            for (double b : {0.5, 2.0, 12.0, 1000.0})
                CHECK(std::abs(incomplete_beta(x, a, b) - boost::math::ibeta(a, b, x)) < 1e-10);
    CHECK_THROWS_AS(incomplete_beta(1.5, 1, 1), DomainError);
    CHECK_THROWS_AS(incomplete_beta(0.5, 0, 1), DomainError);
}

TEST_CASE("F survival against an independent implementation")
{
    for (double d1 : {1.0, 2.0, 5.0, 30.0})
        for (double d2 : {1.0, 3.0, 20.0, 400.0})
            for (double f : {0.0, 0.1, 1.0, 2.5, 10.0, 1000.0}) {
                const boost::math::fisher_f dist(d1, d2);
                CHECK(std::abs(f_survival(f, d1, d2) - boost::math::cdf(boost::math::complement(dist, f))) < 1e-10);
            }
}

TEST_CASE("one_way_anova examples")
{
    const auto same = one_way_anova({{1, 2, 3}, {1, 2, 3}});
    CHECK(same.f_stat == 0);
    CHECK(same.p_value == 1);

    const auto far = one_way_anova({{0, 0, 0.001, -0.001}, {10, 10, 10.001, 9.999}});
    CHECK(far.p_value < 1e-10);

    const auto hand = one_way_anova({{1, 2}, {2, 3}, {3, 4}});
    CHECK(hand.f_stat == Approx(4.0).epsilon(1e-14));
    CHECK(hand.df_between == 2);
    CHECK(hand.df_within == 3);
    CHECK(hand.p_value == Approx(boost::math::cdf(boost::math::complement(boost::math::fisher_f(2, 3), 4.0))));
}

TEST_CASE("one_way_anova degenerate variance")
{
    const auto inf = one_way_anova({{1, 1}, {2, 2}}, "x");
    CHECK(inf.infinite_f);
    CHECK(std::isinf(inf.f_stat));
    CHECK(inf.p_value == 0);
    CHECK(inf.factor_name == "x");

    const auto flat = one_way_anova({{5, 5}, {5, 5, 5}});
    CHECK(flat.f_stat == 0);
    CHECK(flat.p_value == 1);
    CHECK_FALSE(flat.infinite_f);

    CHECK_THROWS_AS(one_way_anova({{1, 2, 3}}), InsufficientData);
    CHECK_THROWS_AS(one_way_anova({{1, 2}, {3}}), InsufficientData);
}

TEST_CASE("one_way_anova properties")
{
    Rng rng(6);
    for (int t = 0; t < 50; ++t) {
        std::vector<std::vector<double>> g(2 + rng.below(4));
        for (std::size_t k = 0; k < g.size(); ++k) {
            g[k].resize(2 + rng.below(10));
            for (auto& v : g[k])
                v = double(k) * rng.uniform() + rng.uniform();
        }
        const auto base = one_way_anova(g);
        CHECK(base.p_value >= 0);
        CHECK(base.p_value <= 1);
        CHECK(base.f_stat >= 0);

        // F is invariant to an affine change of units and to group order.
        auto moved = g;
        for (auto& grp : moved)
            for (auto& v : grp)
                v = 40 * v - 3;
        std::reverse(moved.begin(), moved.end());
        CHECK(one_way_anova(moved).f_stat == Approx(base.f_stat).epsilon(1e-9));
    }
    // p decreases as F grows for fixed degrees of freedom.
    double last = 1.0;
    for (double f = 0.5; f < 50; f *= 1.5) {
        const double p = f_survival(f, 3, 40);
        CHECK(p < last);
        last = p;
    }
}

TEST_CASE("p-value formatting")
{
    CHECK(format_p_value(1e-300) == "0.000");
    CHECK(format_p_value(0.0004) == "0.000");
    CHECK(format_p_value(0.25) == "0.250");
}

TEST_CASE("linear_regression examples")
{
    {
        std::vector<std::vector<double>> x;
        std::vector<double> y;
        for (int i = 0; i < 10; ++i) {
            x.push_back({double(i)});
            y.push_back(3 + 2.0 * i);
        }
        const auto r = linear_regression(x, y);
        CHECK(std::abs(r.coefficients[0] - 3) < 1e-10);
        CHECK(std::abs(r.coefficients[1] - 2) < 1e-10);
        CHECK(r.r2 == Approx(1.0));
    }
    {
        std::vector<std::vector<double>> x;
        std::vector<double> y;
        for (int i = 0; i < 12; ++i) {
            const double x1 = i, x2 = (i * 7) % 5;
            x.push_back({x1, x2});
            y.push_back(x1);
        }
        const auto r = linear_regression(x, y);
        CHECK(std::abs(r.coefficients[2]) < 1e-10);
        CHECK(std::abs(r.coefficients[1] - 1) < 1e-10);
    }
}

TEST_CASE("linear_regression matches a normal-equation solve")
{
    const std::vector<std::vector<double>> x{{1, 0}, {2, 1}, {0, 3}, {4, 5}};
    const std::vector<double> y{1, 3, 2, 7};
    double xtx[3][3] = {}, xty[3] = {};
    for (std::size_t i = 0; i < 4; ++i) {
        const double row[3] = {1, x[i][0], x[i][1]};
        for (int a = 0; a < 3; ++a) {
            xty[a] += row[a] * y[i];
            for (int b = 0; b < 3; ++b)
                xtx[a][b] += row[a] * row[b];
        }
    }
    const auto oracle = cramer3(xtx, xty);
    const auto r = linear_regression(x, y);
    for (int k = 0; k < 3; ++k)
        CHECK(r.coefficients[k] == Approx(oracle[k]).epsilon(1e-10));
    CHECK(r.std_errors.size() == 3);
    for (double se : r.std_errors)
        CHECK(se > 0);
}

TEST_CASE("linear_regression rejects collinear designs")
{
    const std::vector<std::vector<double>> x{{1, 2}, {2, 4}, {3, 6}, {4, 8}};
    const std::vector<double> y{1, 2, 3, 5};
    CHECK_THROWS_AS(linear_regression(x, y), SingularFit);
}

TEST_CASE("kde CSV")
{
    KdeCurve c;
    c.grid = {0, 1};
    c.density = {0.5, 0.25};
    c.bandwidth = 1;
    std::ostringstream os;
    write_csv(os, c);
    CHECK(os.str() == "x,density\n0,0.5\n1,0.25\n");
}
