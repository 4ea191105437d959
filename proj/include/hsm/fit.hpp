#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "hsm/model.hpp"

namespace hsm {

/// Frequencies in rank order; frequency[i] belongs to rank i + 1.
struct RankedSeries {
    std::vector<double> frequency;
    std::size_t n_zero = 0;       // zero-count objects left out of the series
    std::size_t n_truncated = 0;  // positive entries cut by max_rank

    std::size_t size() const noexcept { return frequency.size(); }
};

struct RankOptions {
    /// Zero counts are dropped either way (they have no logarithm); the flag is
    /// kept for callers that want to state intent. n_zero is always reported.
    bool include_zeros = false;
    /// 0 keeps the full series; otherwise only ranks 1..max_rank are kept.
    std::size_t max_rank = 0;
};

/// Sorts by count descending, ties by (hierarchy, within_rank, object_id).
RankedSeries rank_series(const FrequencyTable& table, const RankOptions& options = {});

/// Sorts plain counts descending (stable for ties) and drops zeros.
RankedSeries rank_counts(std::span<const double> counts, const RankOptions& options = {});

/// Which residuals a fit minimizes.
enum class FitSpace { log, raw };

/// Power-law fit frequency = exp(log_intercept) * rank^(-alpha).
struct FitResult {
    double alpha = 0;
    double log_intercept = 0;
    double r2 = 0;
    double adj_r2 = 0;
    std::size_t n_points = 0;
    std::size_t n_zero = 0;
};

/// Adjusted R^2 for n observations and `coefficients` fitted parameters
/// (intercept included): 1 - (1 - r2)(n - 1)/(n - coefficients).
double adjusted_r2(double r2, std::size_t n, std::size_t coefficients);

/// Least squares of ln(frequency) on ln(rank). With FitSpace::raw the
/// residuals frequency - C*rank^(-alpha) are minimized instead and r2 is
/// computed on raw frequencies.
FitResult fit_power_loglog(const RankedSeries& series, FitSpace space = FitSpace::log);

/// f(x) = a x^(-b) + c x^d.
struct TwoTermFit {
    double a = 0, b = 0, c = 0, d = 0;
    double sse = 0;
    double r2 = 0;
    double adj_r2 = 0; // four coefficients
};

struct TwoTermOptions {
    double exponent_min = 0.1;
    double exponent_max = 5.0;
    double grid_step = 0.01;
    /// Refinement stops once the search step falls below grid_step * tolerance / 1000.
    double tolerance = 1e-6;
};

/// Raw-space least squares by variable projection: for each (b, d) on the
/// grid the linear coefficients (a, c) solve a 2x2 least-squares problem
/// (falling back to the better single-term fit when a or c would be
/// negative); the best grid point is then refined by a coordinate pattern
/// search on (b, d) that halves its step whenever no neighbour improves.
TwoTermFit fit_two_term_power(std::span<const double> xs, std::span<const double> ys,
                              const TwoTermOptions& options = {});

/// f(x) = a (shift - x)^(-b). alpha holds b and log_intercept holds ln a.
///
/// Raw space (the default) minimizes sum (f(x) - y)^2 by profiling a out and
/// searching b; log space is ordinary least squares of ln y on ln(shift - x).
FitResult fit_shifted_power(std::span<const double> xs, std::span<const double> ys, double shift,
                            FitSpace space = FitSpace::raw);

/// CSV `rank,frequency`.
void write_csv(std::ostream& out, const RankedSeries& series);
RankedSeries read_ranked_series(std::istream& in);

/// Two numeric columns under any header, kept in file order.
struct XYData {
    std::vector<double> x;
    std::vector<double> y;
};
XYData read_xy_csv(std::istream& in);

/// CSV header `alpha,log_intercept,r2,adj_r2,n_points,n_zero` and one row.
void write_fit_header(std::ostream& out);
void write_fit_row(std::ostream& out, const FitResult& fit);

} // namespace hsm
