#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hsm {

double pearson(std::span<const double> xs, std::span<const double> ys);

/// Pearson correlation of average ranks (ties share the mean rank).
double spearman(std::span<const double> xs, std::span<const double> ys);

/// 1-based ranks, ties averaged.
std::vector<double> average_ranks(std::span<const double> xs);

struct KdeCurve {
    std::vector<double> grid;
    std::vector<double> density;
    double bandwidth = 0;
};

/// Silverman's rule 0.9 min(sd, IQR/1.34) n^(-1/5), falling back to
/// 1.06 (max - min) n^(-1/5) when that is zero. Quartiles use linear
/// interpolation between order statistics. Throws DegenerateData when
/// every point is identical.
double silverman_bandwidth(std::span<const double> points);

/// Gaussian kernel density estimate evaluated on `grid`.
KdeCurve kde(std::span<const double> points, std::optional<double> bandwidth, std::span<const double> grid);

/// `count` evenly spaced points from lo to hi inclusive.
std::vector<double> linspace(double lo, double hi, std::size_t count);

void write_csv(std::ostream& out, const KdeCurve& curve);

/// Regularized incomplete beta I_x(a, b) (Lentz continued fraction).
double incomplete_beta(double x, double a, double b);

/// Upper tail P(F > f) of the F(d1, d2) distribution.
double f_survival(double f, double d1, double d2);

struct AnovaResult {
    std::string factor_name;
    double f_stat = 0;
    std::size_t df_between = 0;
    std::size_t df_within = 0;
    double p_value = 1;
    /// Set when within-group variance is zero but the means differ.
    bool infinite_f = false;
};

AnovaResult one_way_anova(const std::vector<std::vector<double>>& groups, std::string factor_name = {});

void write_anova_header(std::ostream& out);
void write_anova_row(std::ostream& out, const AnovaResult& r);

/// p-value as printed in reports: three decimals, values below 1e-12 shown as 0.000.
std::string format_p_value(double p);

struct RegressionResult {
    /// coefficients[0] is the intercept; coefficients[k] belongs to predictor column k-1.
    std::vector<double> coefficients;
    std::vector<double> std_errors;
    double residual_variance = 0;
    double r2 = 0;
};

/// OLS with intercept via column-pivoted QR. `design` holds one row per
/// observation (predictors only). Throws SingularFit on rank deficiency.
RegressionResult linear_regression(const std::vector<std::vector<double>>& design, std::span<const double> y);

} // namespace hsm
