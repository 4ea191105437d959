#include "hsm/stats.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>

#include "format.hpp"
#include "hsm/error.hpp"

namespace hsm {

double pearson(std::span<const double> xs, std::span<const double> ys)
{
    if (xs.size() != ys.size())
        throw InvalidSpec("correlation inputs differ in length");
    if (xs.size() < 2)
        throw InsufficientData("correlation needs >= 2 pairs");
    const auto n = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx, dy = ys[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (!(sxx > 0) || !(syy > 0))
        throw DegenerateData("correlation is undefined for zero-variance input");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> xs)
{
    std::vector<std::size_t> order(xs.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
    std::vector<double> ranks(xs.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && xs[order[j + 1]] == xs[order[i]])
            ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k)
            ranks[order[k]] = r;
        i = j + 1;
    }
    return ranks;
}

double spearman(std::span<const double> xs, std::span<const double> ys)
{
    if (xs.size() != ys.size())
        throw InvalidSpec("correlation inputs differ in length");
    const auto rx = average_ranks(xs);
    const auto ry = average_ranks(ys);
    return pearson(rx, ry);
}

namespace {

double quantile_sorted(const std::vector<double>& s, double p)
{
    const double h = (static_cast<double>(s.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, s.size() - 1);
    return s[lo] + (h - static_cast<double>(lo)) * (s[hi] - s[lo]);
}

} // namespace

double silverman_bandwidth(std::span<const double> points)
{
    if (points.size() < 2)
        throw InsufficientData("bandwidth selection needs >= 2 points");
    std::vector<double> s(points.begin(), points.end());
    std::sort(s.begin(), s.end());
    if (s.front() == s.back())
        throw DegenerateData("all points are identical; give an explicit bandwidth");
    const auto n = static_cast<double>(s.size());
    const double mean = std::accumulate(s.begin(), s.end(), 0.0) / n;
    double ss = 0;
    for (double v : s)
        ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    const double iqr = quantile_sorted(s, 0.75) - quantile_sorted(s, 0.25);
    const double h = 0.9 * std::min(sd, iqr / 1.34) * std::pow(n, -0.2);
    if (h > 0)
        return h;
    return 1.06 * (s.back() - s.front()) * std::pow(n, -0.2);
}

KdeCurve kde(std::span<const double> points, std::optional<double> bandwidth, std::span<const double> grid)
{
    if (points.size() < 2)
        throw InsufficientData("density estimate needs >= 2 points");
    if (bandwidth && !(*bandwidth > 0))
        throw InvalidSpec("bandwidth must be > 0");
    KdeCurve c;
    c.bandwidth = bandwidth ? *bandwidth : silverman_bandwidth(points);
    c.grid.assign(grid.begin(), grid.end());
    c.density.resize(grid.size());
    const double norm = 1.0 / (static_cast<double>(points.size()) * c.bandwidth * std::sqrt(2.0 * M_PI));
    for (std::size_t g = 0; g < grid.size(); ++g) {
        double sum = 0;
        for (double p : points) {
            const double z = (grid[g] - p) / c.bandwidth;
            sum += std::exp(-0.5 * z * z);
        }
        c.density[g] = sum * norm;
    }
    return c;
}

std::vector<double> linspace(double lo, double hi, std::size_t count)
{
    std::vector<double> v(count);
    if (count == 1) {
        v[0] = lo;
        return v;
    }
    for (std::size_t i = 0; i < count; ++i)
        v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    return v;
}

void write_csv(std::ostream& out, const KdeCurve& curve)
{
    out << "x,density\n";
    for (std::size_t i = 0; i < curve.grid.size(); ++i)
        out << detail::fmt_double(curve.grid[i]) << ',' << detail::fmt_double(curve.density[i]) << '\n';
}

namespace {

// Continued fraction for I_x(a,b), modified Lentz; converges fast for x < (a+1)/(a+b+2).
double beta_continued_fraction(double x, double a, double b)
{
    constexpr double tiny = 1e-300;
    constexpr double eps = 1e-16;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny)
        d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 100000; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny)
            d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny)
            c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny)
            d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny)
            c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < eps)
            return h;
    }
    return h;
}

} // namespace

double incomplete_beta(double x, double a, double b)
{
    if (!(a > 0) || !(b > 0))
        throw DomainError("incomplete beta needs a, b > 0");
    if (!(x >= 0.0 && x <= 1.0))
        throw DomainError("incomplete beta needs x in [0, 1]");
    if (x == 0.0)
        return 0.0;
    if (x == 1.0)
        return 1.0;
    const double log_front =
        std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0))
        return front * beta_continued_fraction(x, a, b) / a;
    return 1.0 - front * beta_continued_fraction(1.0 - x, b, a) / b;
}

double f_survival(double f, double d1, double d2)
{
    if (!(d1 > 0) || !(d2 > 0))
        throw DomainError("F distribution needs positive degrees of freedom");
    if (std::isnan(f))
        throw DomainError("F statistic is NaN");
    if (f <= 0)
        return 1.0;
    if (std::isinf(f))
        return 0.0;
    return std::clamp(incomplete_beta(d2 / (d2 + d1 * f), 0.5 * d2, 0.5 * d1), 0.0, 1.0);
}

AnovaResult one_way_anova(const std::vector<std::vector<double>>& groups, std::string factor_name)
{
    if (groups.size() < 2)
        throw InsufficientData("ANOVA needs >= 2 groups");
    std::size_t total_n = 0;
    double grand = 0;
    for (const auto& g : groups) {
        if (g.size() < 2)
            throw InsufficientData("every ANOVA group needs >= 2 observations");
        total_n += g.size();
        grand += std::accumulate(g.begin(), g.end(), 0.0);
    }
    grand /= static_cast<double>(total_n);
    double ssb = 0, ssw = 0;
    for (const auto& g : groups) {
        const double mean = std::accumulate(g.begin(), g.end(), 0.0) / static_cast<double>(g.size());
        ssb += static_cast<double>(g.size()) * (mean - grand) * (mean - grand);
        for (double v : g)
            ssw += (v - mean) * (v - mean);
    }
    AnovaResult r;
    r.factor_name = std::move(factor_name);
    r.df_between = groups.size() - 1;
    r.df_within = total_n - groups.size();
    if (ssw == 0) {
        if (ssb == 0) {
            r.f_stat = 0;
            r.p_value = 1;
        } else {
            r.f_stat = std::numeric_limits<double>::infinity();
            r.p_value = 0;
            r.infinite_f = true;
        }
        return r;
    }
    r.f_stat = (ssb / static_cast<double>(r.df_between)) / (ssw / static_cast<double>(r.df_within));
    r.p_value = f_survival(r.f_stat, static_cast<double>(r.df_between), static_cast<double>(r.df_within));
    return r;
}

void write_anova_header(std::ostream& out)
{
    out << "factor,f_stat,df_between,df_within,p_value\n";
}

void write_anova_row(std::ostream& out, const AnovaResult& r)
{
    out << r.factor_name << ',' << detail::fmt_double(r.f_stat) << ',' << r.df_between << ',' << r.df_within << ','
        << detail::fmt_double(r.p_value) << '\n';
}

std::string format_p_value(double p)
{
    if (p < 1e-12)
        return "0.000";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", p);
    return buf;
}

RegressionResult linear_regression(const std::vector<std::vector<double>>& design, std::span<const double> y)
{
    const std::size_t n = design.size();
    if (y.size() != n)
        throw InvalidSpec("design rows and response differ in length");
    if (n == 0)
        throw InsufficientData("regression needs observations");
    const std::size_t predictors = design.front().size();
    if (n < predictors + 1)
        throw InsufficientData("regression needs rows >= predictors + 1");
    const auto p = static_cast<Eigen::Index>(predictors + 1);
    Eigen::MatrixXd x(static_cast<Eigen::Index>(n), p);
    Eigen::VectorXd yv(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        if (design[i].size() != predictors)
            throw InvalidSpec("ragged design matrix");
        const auto row = static_cast<Eigen::Index>(i);
        x(row, 0) = 1.0;
        for (std::size_t k = 0; k < predictors; ++k)
            x(row, static_cast<Eigen::Index>(k + 1)) = design[i][k];
        yv(row) = y[i];
    }
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    if (qr.rank() < p)
        throw SingularFit("design matrix is rank deficient");
    const Eigen::VectorXd beta = qr.solve(yv);
    const Eigen::VectorXd resid = yv - x * beta;
    const double sse = resid.squaredNorm();
    const double my = yv.mean();
    const double sst = (yv.array() - my).square().sum();

    RegressionResult r;
    r.coefficients.assign(beta.data(), beta.data() + beta.size());
    const auto dof = static_cast<double>(n) - static_cast<double>(p);
    r.residual_variance = dof > 0 ? sse / dof : std::numeric_limits<double>::quiet_NaN();
    r.r2 = sst > 0 ? 1.0 - sse / sst : 1.0;
    const Eigen::MatrixXd cov = (x.transpose() * x).inverse();
    r.std_errors.resize(static_cast<std::size_t>(p));
    for (Eigen::Index k = 0; k < p; ++k)
        r.std_errors[static_cast<std::size_t>(k)] = std::sqrt(cov(k, k) * r.residual_variance);
    return r;
}

} // namespace hsm
