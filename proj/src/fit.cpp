#include "hsm/fit.hpp"

#include <algorithm>
#include <optional>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>

#include "format.hpp"
#include "hsm/error.hpp"

namespace hsm {
namespace {

struct LineFit {
    double slope = 0;
    double intercept = 0;
    double r2 = 0;
};

// Ordinary least squares y = intercept + slope * x, two-pass centered sums.
LineFit ols_line(std::span<const double> x, std::span<const double> y)
{
    const auto n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (!(sxx > 0))
        throw SingularFit("all abscissae are equal");
    LineFit f;
    const auto [ymin, ymax] = std::minmax_element(y.begin(), y.end());
    if (*ymin == *ymax) {
        f.slope = 0;
        f.intercept = *ymin;
        f.r2 = 1;
        return f;
    }
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double sse = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = y[i] - (f.intercept + f.slope * x[i]);
        sse += e * e;
    }
    f.r2 = 1.0 - sse / syy;
    return f;
}

struct PowerFit {
    double coefficient = 0;
    double exponent = 0;
    double sse = 0;
};

// For y ~ C z^(-b): C is linear given b, so sse(b) is searched in one dimension.
double power_sse(std::span<const double> z, std::span<const double> y, double b, double* coefficient)
{
    double num = 0, den = 0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double g = std::pow(z[i], -b);
        num += g * y[i];
        den += g * g;
    }
    const double c = den > 0 ? num / den : 0.0;
    double sse = 0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double e = y[i] - c * std::pow(z[i], -b);
        sse += e * e;
    }
    if (coefficient)
        *coefficient = c;
    return std::isfinite(sse) ? sse : std::numeric_limits<double>::infinity();
}

PowerFit raw_power_fit(std::span<const double> z, std::span<const double> y, double start)
{
    constexpr double half_width = 10.0;
    constexpr double step = 0.05;
    double best_b = start;
    double best = power_sse(z, y, start, nullptr);
    const int steps = static_cast<int>(2 * half_width / step);
    for (int k = 0; k <= steps; ++k) {
        const double b = start - half_width + step * k;
        const double s = power_sse(z, y, b, nullptr);
        if (s < best) {
            best = s;
            best_b = b;
        }
    }
    // Golden-section search on the bracket around the best grid point.
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = best_b - step, hi = best_b + step;
    double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
    double f1 = power_sse(z, y, x1, nullptr), f2 = power_sse(z, y, x2, nullptr);
    while (hi - lo > 1e-12) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = power_sse(z, y, x1, nullptr);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = power_sse(z, y, x2, nullptr);
        }
    }
    PowerFit out;
    out.exponent = 0.5 * (lo + hi);
    out.sse = power_sse(z, y, out.exponent, &out.coefficient);
    if (best < out.sse) {
        out.exponent = best_b;
        out.sse = power_sse(z, y, best_b, &out.coefficient);
    }
    return out;
}

double raw_r2(std::span<const double> y, double sse)
{
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
    double sst = 0;
    for (double v : y)
        sst += (v - my) * (v - my);
    if (sst == 0)
        return sse == 0 ? 1.0 : 0.0;
    return 1.0 - sse / sst;
}

// Log-log line through (ln z, ln y) for y ~ C z^(-b).
FitResult log_power_fit(std::span<const double> z, std::span<const double> y)
{
    std::vector<double> lx(z.size()), ly(y.size());
    std::transform(z.begin(), z.end(), lx.begin(), [](double v) { return std::log(v); });
    std::transform(y.begin(), y.end(), ly.begin(), [](double v) { return std::log(v); });
    const LineFit line = ols_line(lx, ly);
    FitResult r;
    r.alpha = -line.slope;
    r.log_intercept = line.intercept;
    r.r2 = line.r2;
    r.n_points = y.size();
    r.adj_r2 = adjusted_r2(r.r2, r.n_points, 2);
    return r;
}

FitResult power_fit(std::span<const double> z, std::span<const double> y, FitSpace space)
{
    FitResult r = log_power_fit(z, y);
    if (space == FitSpace::raw) {
        const PowerFit p = raw_power_fit(z, y, r.alpha);
        r.alpha = p.exponent;
        r.log_intercept = std::log(p.coefficient);
        r.r2 = raw_r2(y, p.sse);
        r.adj_r2 = adjusted_r2(r.r2, r.n_points, 2);
    }
    return r;
}

void require_positive(std::span<const double> v, const char* what)
{
    for (double x : v)
        if (!(x > 0) || !std::isfinite(x))
            throw DomainError(std::string(what) + " must be finite and > 0");
}

} // namespace

double adjusted_r2(double r2, std::size_t n, std::size_t coefficients)
{
    if (n <= coefficients)
        throw InsufficientData("adjusted R^2 needs more observations than coefficients");
    return 1.0 - (1.0 - r2) * static_cast<double>(n - 1) / static_cast<double>(n - coefficients);
}

RankedSeries rank_series(const FrequencyTable& table, const RankOptions& options)
{
    if (table.rows.empty())
        throw DegenerateData("frequency table is empty");
    std::vector<const FrequencyRow*> rows;
    rows.reserve(table.rows.size());
    for (const auto& r : table.rows)
        rows.push_back(&r);
    std::sort(rows.begin(), rows.end(), [](const FrequencyRow* a, const FrequencyRow* b) {
        if (a->count != b->count)
            return a->count > b->count;
        if (a->hierarchy != b->hierarchy)
            return a->hierarchy < b->hierarchy;
        if (a->within_rank != b->within_rank)
            return a->within_rank < b->within_rank;
        return a->object_id < b->object_id;
    });
    std::vector<double> counts;
    counts.reserve(rows.size());
    for (const auto* r : rows)
        counts.push_back(r->count);
    return rank_counts(counts, options);
}

RankedSeries rank_counts(std::span<const double> counts, const RankOptions& options)
{
    RankedSeries s;
    s.frequency.reserve(counts.size());
    for (double c : counts) {
        if (c < 0 || std::isnan(c))
            throw DomainError("counts must be >= 0");
        if (c == 0)
            ++s.n_zero;
        else
            s.frequency.push_back(c);
    }
    if (s.frequency.empty())
        throw DegenerateData("all counts are zero");
    std::stable_sort(s.frequency.begin(), s.frequency.end(), std::greater<>{});
    if (options.max_rank > 0 && s.frequency.size() > options.max_rank) {
        s.n_truncated = s.frequency.size() - options.max_rank;
        s.frequency.resize(options.max_rank);
    }
    return s;
}

FitResult fit_power_loglog(const RankedSeries& series, FitSpace space)
{
    if (series.size() < 3)
        throw InsufficientData("power-law fit needs >= 3 points, got " + std::to_string(series.size()));
    require_positive(series.frequency, "frequencies");
    std::vector<double> ranks(series.size());
    std::iota(ranks.begin(), ranks.end(), 1.0);
    FitResult r = power_fit(ranks, series.frequency, space);
    r.n_zero = series.n_zero;
    return r;
}

FitResult fit_shifted_power(std::span<const double> xs, std::span<const double> ys, double shift, FitSpace space)
{
    if (xs.size() != ys.size())
        throw InvalidSpec("xs and ys differ in length");
    if (xs.size() < 3)
        throw InsufficientData("shifted power fit needs >= 3 points");
    require_positive(ys, "ys");
    std::vector<double> z(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        z[i] = shift - xs[i];
        if (!(z[i] > 0))
            throw DomainError("shift must exceed every x (shift = " + detail::fmt_double(shift) + ")");
    }
    return power_fit(z, ys, space);
}

TwoTermFit fit_two_term_power(std::span<const double> xs, std::span<const double> ys, const TwoTermOptions& opt)
{
    const std::size_t n = xs.size();
    if (ys.size() != n)
        throw InvalidSpec("xs and ys differ in length");
    if (n < 5)
        throw InsufficientData("two-term power fit needs >= 5 points");
    require_positive(xs, "xs");
    require_positive(ys, "ys");
    if (std::all_of(xs.begin(), xs.end(), [&](double x) { return x == xs[0]; }))
        throw SingularFit("all xs are equal");
    if (!(opt.grid_step > 0) || !(opt.exponent_max >= opt.exponent_min) || !(opt.exponent_min > 0))
        throw InvalidSpec("two-term grid needs 0 < exponent_min <= exponent_max and step > 0");

    struct Eval {
        double a = 0, c = 0, sse = std::numeric_limits<double>::infinity();
    };
    // Linear coefficients (a, c) for fixed basis columns u = x^-b, v = x^d.
    const auto project = [&](std::span<const double> u, std::span<const double> v) {
        double suu = 0, svv = 0, suv = 0, suy = 0, svy = 0;
        for (std::size_t i = 0; i < n; ++i) {
            suu += u[i] * u[i];
            svv += v[i] * v[i];
            suv += u[i] * v[i];
            suy += u[i] * ys[i];
            svy += v[i] * ys[i];
        }
        const auto sse_of = [&](double a, double c) {
            double s = 0;
            for (std::size_t i = 0; i < n; ++i) {
                const double e = ys[i] - a * u[i] - c * v[i];
                s += e * e;
            }
            return s;
        };
        const double det = suu * svv - suv * suv;
        if (det > 1e-12 * suu * svv) {
            const double a = (suy * svv - svy * suv) / det;
            const double c = (svy * suu - suy * suv) / det;
            if (a >= 0 && c >= 0)
                return Eval{a, c, sse_of(a, c)};
        }
        // Constrained optimum lies on a boundary: one of the single-term fits.
        Eval best;
        if (const double a = suy / suu; a >= 0)
            best = Eval{a, 0.0, sse_of(a, 0.0)};
        if (const double c = svy / svv; c >= 0) {
            const double s = sse_of(0.0, c);
            if (s < best.sse)
                best = Eval{0.0, c, s};
        }
        return best;
    };
    std::vector<double> u(n), v(n);
    const auto solve = [&](double b, double d) {
        for (std::size_t i = 0; i < n; ++i) {
            u[i] = std::pow(xs[i], -b);
            v[i] = std::pow(xs[i], d);
        }
        return project(u, v);
    };

    const auto levels =
        static_cast<std::size_t>(std::floor((opt.exponent_max - opt.exponent_min) / opt.grid_step + 1e-9)) + 1;
    const auto level = [&](std::size_t k) { return opt.exponent_min + opt.grid_step * static_cast<double>(k); };
    std::vector<double> decay(levels * n), growth(levels * n);
    for (std::size_t k = 0; k < levels; ++k)
        for (std::size_t i = 0; i < n; ++i) {
            decay[k * n + i] = std::pow(xs[i], -level(k));
            growth[k * n + i] = std::pow(xs[i], level(k));
        }
    double best_b = opt.exponent_min, best_d = opt.exponent_min;
    Eval best;
    for (std::size_t ib = 0; ib < levels; ++ib) {
        const std::span<const double> ub(decay.data() + ib * n, n);
        for (std::size_t id = 0; id < levels; ++id) {
            const Eval e = project(ub, std::span<const double>(growth.data() + id * n, n));
            if (e.sse < best.sse) {
                best = e;
                best_b = level(ib);
                best_d = level(id);
            }
        }
    }

    // Pattern search on (b, d), halving the step whenever no neighbour improves.
    double step = opt.grid_step;
    const double min_step = opt.grid_step * opt.tolerance * 1e-3;
    for (int iter = 0; iter < 100000 && step > min_step && best.sse > 0; ++iter) {
        bool moved = false;
        const double cand[4][2] = {{best_b + step, best_d}, {best_b - step, best_d},
                                   {best_b, best_d + step}, {best_b, best_d - step}};
        for (const auto& bd : cand) {
            if (bd[0] <= 0 || bd[1] <= 0)
                continue;
            const Eval e = solve(bd[0], bd[1]);
            if (e.sse < best.sse) {
                best = e;
                best_b = bd[0];
                best_d = bd[1];
                moved = true;
            }
        }
        if (!moved)
            step *= 0.5;
    }

    TwoTermFit fit;
    fit.a = best.a;
    fit.b = best_b;
    fit.c = best.c;
    fit.d = best_d;
    fit.sse = best.sse;
    fit.r2 = raw_r2(ys, best.sse);
    fit.adj_r2 = adjusted_r2(fit.r2, n, 4);
    return fit;
}

void write_csv(std::ostream& out, const RankedSeries& series)
{
    out << "rank,frequency\n";
    for (std::size_t i = 0; i < series.size(); ++i)
        out << i + 1 << ',' << detail::fmt_double(series.frequency[i]) << '\n';
}

RankedSeries read_ranked_series(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line) || detail::trim(line) != "rank,frequency")
        throw IoError("expected header 'rank,frequency'");
    std::vector<std::pair<double, double>> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::trim(line).empty())
            continue;
        const auto comma = line.find(',');
        const auto rank = detail::parse_double(std::string_view(line).substr(0, comma));
        const auto freq = comma == std::string::npos ? std::nullopt
                                                     : detail::parse_double(std::string_view(line).substr(comma + 1));
        if (!rank || !freq)
            throw IoError("malformed row at line " + std::to_string(lineno));
        rows.emplace_back(*rank, *freq);
    }
    std::stable_sort(rows.begin(), rows.end());
    std::vector<double> counts;
    counts.reserve(rows.size());
    for (const auto& [r, f] : rows)
        counts.push_back(f);
    return rank_counts(counts);
}

XYData read_xy_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line) || std::count(line.begin(), line.end(), ',') != 1)
        throw IoError("expected a two-column CSV header");
    XYData xy;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::trim(line).empty())
            continue;
        const auto comma = line.find(',');
        const auto x = detail::parse_double(std::string_view(line).substr(0, comma));
        const auto y = comma == std::string::npos ? std::nullopt
                                                  : detail::parse_double(std::string_view(line).substr(comma + 1));
        if (!x || !y)
            throw IoError("malformed row at line " + std::to_string(lineno));
        xy.x.push_back(*x);
        xy.y.push_back(*y);
    }
    return xy;
}

void write_fit_header(std::ostream& out)
{
    out << "alpha,log_intercept,r2,adj_r2,n_points,n_zero\n";
}

void write_fit_row(std::ostream& out, const FitResult& f)
{
    out << detail::fmt_double(f.alpha) << ',' << detail::fmt_double(f.log_intercept) << ','
        << detail::fmt_double(f.r2) << ',' << detail::fmt_double(f.adj_r2) << ',' << f.n_points << ','
        << f.n_zero << '\n';
}

} // namespace hsm
