#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hsm/dist.hpp"
#include "hsm/fit.hpp"
#include "hsm/model.hpp"
#include "hsm/stats.hpp"

namespace hsm {

enum class SimulationMode { montecarlo, expected };

enum class Factor { M, N, ratio_m, ratio_w, ratio_c };

std::string_view factor_name(Factor f);
Factor parse_factor(std::string_view name);

/// One level of a distribution factor. `value` is what sweep tables record
/// and what ANOVA/regression group on: the ratio for triangular levels,
/// the exponent or rate for power/exponential ones, 1 for uniform.
struct FactorLevel {
    double value = 1;
    DistributionSpec spec;
};

FactorLevel level_from_spec(const DistributionSpec& spec);
std::vector<FactorLevel> triangular_levels(const std::vector<double>& ratios, Orientation orientation);

/// fm/fw/fc triple calibrated on the NT statistics of the text corpus.
struct DistributionTriple {
    DistributionSpec fm, fw, fc;
};

/// Power family (`table2`) or exponential weights with the same constants (`table2-exp`).
/// fm ~ NT^-2.094 puts the fewest objects at the top hierarchy, fw uses the
/// median per-group exponent, fc ~ (M + 1 - NT)^-3.791 favours the top.
DistributionTriple table2_distributions(bool exponential = false);

/// Median of the per-NT-group exponents the fw preset is taken from.
double table2_fw_exponent();

struct SweepConfig {
    std::string name = "custom";
    std::vector<std::size_t> m_levels;
    std::vector<std::size_t> n_levels;
    std::uint64_t draws = 2'000'000;
    std::vector<FactorLevel> fm_levels;
    std::vector<FactorLevel> fw_levels;
    std::vector<FactorLevel> fc_levels;
    /// fc takes each fm level's ratio (as a descending ramp) instead of iterating fc_levels.
    bool pair_fc_with_fm = false;
    std::size_t replicates = 1;
    std::uint64_t master_seed = 0;
    SimulationMode mode = SimulationMode::montecarlo;
    /// Worker threads; 0 picks std::thread::hardware_concurrency(). Never affects output.
    std::size_t workers = 0;

    void validate() const;
    std::size_t cell_count() const;
};

struct SweepCell {
    std::size_t cell_id = 0;
    std::size_t m = 0;
    std::size_t n = 0;
    std::uint64_t draws = 0;
    double ratio_m = 0, ratio_w = 0, ratio_c = 0;
    std::size_t replicate = 0;
    std::uint64_t seed = 0;
    FitResult fit;
    bool failed = false;
    std::string error;

    double level(Factor f) const;
};

/// seed of cell `cell_id` = derive_seed(master_seed, cell_id).
std::uint64_t cell_seed(std::uint64_t master_seed, std::size_t cell_id);

/// Full factorial over M x N x fm x fw x fc x replicate (replicate varies
/// fastest). Cells whose model cannot be built are marked failed and kept.
std::vector<SweepCell> run_sweep(const SweepConfig& config);

/// Model specification of one cell of `config`.
HierarchySpec cell_spec(const SweepConfig& config, const SweepCell& cell);

/// Re-runs one cell and returns its rank series (for plotting).
RankedSeries replay_cell(const SweepConfig& config, const SweepCell& cell);

/// `cell_id,M,N,T,ratio_m,ratio_w,ratio_c,replicate,seed,alpha,adj_r2,n_zero`;
/// failed cells carry nan in the fit columns.
void write_sweep_csv(std::ostream& out, const std::vector<SweepCell>& cells);
std::vector<SweepCell> read_sweep_csv(std::istream& in);

struct ContourGrid {
    Factor x_factor = Factor::ratio_m;
    Factor y_factor = Factor::ratio_c;
    std::vector<double> x_levels;
    std::vector<double> y_levels;
    std::vector<std::vector<double>> mean_adj_r2; // [y][x]
};

ContourGrid contour_grid(const std::vector<SweepCell>& cells, Factor x, Factor y);

/// gnuplot `nonuniform matrix` layout: first row is the x-level count then
/// the x levels; every following row is a y level then its values.
void write_contour_csv(std::ostream& out, const ContourGrid& grid);

struct TrendCurve {
    Factor curve_factor = Factor::M;
    double curve_level = 0;
    Factor varied_factor = Factor::N;
    std::vector<std::pair<double, double>> points; // (level, mean alpha)
    double spearman = 0;                           // 0 when the means are flat
};

/// One curve per level of `curve`, mean alpha against the levels of `varied`.
std::vector<TrendCurve> exponent_trends(const std::vector<SweepCell>& cells, Factor varied, Factor curve);

void write_trends_csv(std::ostream& out, const std::vector<TrendCurve>& curves);

/// One-way ANOVA per factor on adj_r2, then per factor on alpha. Factor
/// names read `adj_r2~M`, `alpha~ratio_c`, ...
std::vector<AnovaResult> anova_over_sweep(const std::vector<SweepCell>& cells, const std::vector<Factor>& factors);

struct ExponentRegression {
    std::vector<std::string> names; // intercept, ratio_m, ratio_w, ratio_c
    RegressionResult fit;
};

ExponentRegression exponent_regression(const std::vector<SweepCell>& cells);

void write_regression_csv(std::ostream& out, const ExponentRegression& reg);

/// Topics in which objects of hierarchy h (1-based) may occur: the first
/// ceil(n_topics * (M + 1 - h) / M).
std::size_t eligible_topics(std::size_t hierarchy, std::size_t n_hierarchies, std::size_t n_topics);

/// Synthetic topic texts drawn from the model. Object k is emitted as the
/// token `o<k>`; within topic t only objects whose hierarchy is eligible
/// there are drawn (fc renormalized over the eligible hierarchies).
std::vector<std::pair<std::string, std::string>> generate_corpus(const ModelInstance& inst, std::size_t n_topics,
                                                                 std::size_t tokens_per_topic, std::uint64_t seed);

/// Writes `<topic>.txt` files into `dir` (created if missing).
void write_corpus(const std::filesystem::path& dir, const std::vector<std::pair<std::string, std::string>>& topics);

// Presets -----------------------------------------------------------------

/// fig3, fig4, fig4-paired, fig5, fig5-exp, table2-anova.
SweepConfig preset(std::string_view name);
std::vector<std::string> preset_names();

/// Flat `key = value` configuration; `#` starts a comment. A `preset` key,
/// if present, is applied first and the remaining keys override it.
SweepConfig parse_sweep_config(std::istream& in);

} // namespace hsm
