#include "hsm/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "format.hpp"
#include "hsm/error.hpp"
#include "hsm/rng.hpp"

namespace hsm {

std::string_view factor_name(Factor f)
{
    switch (f) {
    case Factor::M:
        return "M";
    case Factor::N:
        return "N";
    case Factor::ratio_m:
        return "ratio_m";
    case Factor::ratio_w:
        return "ratio_w";
    case Factor::ratio_c:
        return "ratio_c";
    }
    return "?";
}

Factor parse_factor(std::string_view name)
{
    for (Factor f : {Factor::M, Factor::N, Factor::ratio_m, Factor::ratio_w, Factor::ratio_c})
        if (factor_name(f) == name)
            return f;
    throw InvalidSpec("unknown factor '" + std::string(name) + "'");
}

FactorLevel level_from_spec(const DistributionSpec& spec)
{
    spec.validate();
    const bool parametric = spec.family != DistributionSpec::Family::uniform &&
                            spec.family != DistributionSpec::Family::explicit_weights;
    return {parametric ? spec.parameter : 1.0, spec};
}

std::vector<FactorLevel> triangular_levels(const std::vector<double>& ratios, Orientation orientation)
{
    std::vector<FactorLevel> out;
    out.reserve(ratios.size());
    for (double r : ratios)
        out.push_back({r, DistributionSpec::triangular(r, orientation)});
    return out;
}

namespace {

// Per-group power-law exponents of the eight NT groups.
constexpr double kGroupExponents[] = {0.735, 0.8456, 0.86, 0.8116, 0.8088, 0.8195, 0.8941, 1.337};
constexpr double kCountExponent = 2.094;     // NT -> number of words, decreasing term
constexpr double kSelectionExponent = 3.791; // NT -> share of tokens, (9 - NT)^-b

} // namespace

double table2_fw_exponent()
{
    std::vector<double> v(std::begin(kGroupExponents), std::end(kGroupExponents));
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

DistributionTriple table2_distributions(bool exponential)
{
    // Hierarchy 1 is the top (NT = M), so NT-indexed shapes are mirrored:
    // NT^-b becomes an ascending ramp and (M + 1 - NT)^-b a descending one.
    const double fw = table2_fw_exponent();
    if (exponential)
        return {DistributionSpec::exponential(kCountExponent, Orientation::ascending),
                DistributionSpec::exponential(fw), DistributionSpec::exponential(kSelectionExponent)};
    return {DistributionSpec::power(kCountExponent, Orientation::ascending), DistributionSpec::power(fw),
            DistributionSpec::power(kSelectionExponent)};
}

void SweepConfig::validate() const
{
    if (m_levels.empty() || n_levels.empty() || fm_levels.empty() || fw_levels.empty())
        throw InvalidSpec("sweep level lists must be non-empty");
    if (!pair_fc_with_fm && fc_levels.empty())
        throw InvalidSpec("sweep needs fc levels (or pair_fc)");
    if (replicates < 1)
        throw InvalidSpec("replicates must be >= 1");
    if (draws < 1)
        throw InvalidSpec("draws must be >= 1");
    if (pair_fc_with_fm)
        for (const auto& l : fm_levels)
            if (l.spec.family != DistributionSpec::Family::triangular)
                throw InvalidSpec("pair_fc needs triangular fm levels");
}

std::size_t SweepConfig::cell_count() const
{
    const std::size_t fc = pair_fc_with_fm ? 1 : fc_levels.size();
    return m_levels.size() * n_levels.size() * fm_levels.size() * fw_levels.size() * fc * replicates;
}

double SweepCell::level(Factor f) const
{
    switch (f) {
    case Factor::M:
        return static_cast<double>(m);
    case Factor::N:
        return static_cast<double>(n);
    case Factor::ratio_m:
        return ratio_m;
    case Factor::ratio_w:
        return ratio_w;
    case Factor::ratio_c:
        return ratio_c;
    }
    return 0;
}

std::uint64_t cell_seed(std::uint64_t master_seed, std::size_t cell_id)
{
    return derive_seed(master_seed, cell_id);
}

namespace {

struct CellPlan {
    SweepCell cell;
    HierarchySpec spec;
};

std::vector<CellPlan> plan_cells(const SweepConfig& cfg)
{
    std::vector<CellPlan> plans;
    plans.reserve(cfg.cell_count());
    const std::size_t fc_count = cfg.pair_fc_with_fm ? 1 : cfg.fc_levels.size();
    for (std::size_t m : cfg.m_levels)
        for (std::size_t n : cfg.n_levels)
            for (const auto& fm : cfg.fm_levels)
                for (const auto& fw : cfg.fw_levels)
                    for (std::size_t ic = 0; ic < fc_count; ++ic) {
                        const FactorLevel fc =
                            cfg.pair_fc_with_fm
                                ? FactorLevel{fm.value, DistributionSpec::triangular(fm.value, Orientation::descending)}
                                : cfg.fc_levels[ic];
                        for (std::size_t rep = 0; rep < cfg.replicates; ++rep) {
                            CellPlan p;
                            p.cell.cell_id = plans.size();
                            p.cell.m = m;
                            p.cell.n = n;
                            p.cell.draws = cfg.draws;
                            p.cell.ratio_m = fm.value;
                            p.cell.ratio_w = fw.value;
                            p.cell.ratio_c = fc.value;
                            p.cell.replicate = rep;
                            p.cell.seed = cell_seed(cfg.master_seed, p.cell.cell_id);
                            p.spec.n_objects = n;
                            p.spec.n_hierarchies = m;
                            p.spec.fm = fm.spec;
                            p.spec.fw = fw.spec;
                            p.spec.fc = fc.spec;
                            plans.push_back(std::move(p));
                        }
                    }
    return plans;
}

RankedSeries cell_series(const HierarchySpec& spec, SimulationMode mode, std::uint64_t draws, std::uint64_t seed)
{
    const ModelInstance inst = build_instance(spec);
    const FrequencyTable table = mode == SimulationMode::expected
                                     ? expected_frequencies(inst, static_cast<double>(draws))
                                     : simulate(inst, draws, seed);
    return rank_series(table);
}

} // namespace

std::vector<SweepCell> run_sweep(const SweepConfig& config)
{
    config.validate();
    std::vector<CellPlan> plans = plan_cells(config);
    std::size_t workers = config.workers ? config.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, std::max<std::size_t>(1, plans.size()));

    std::atomic<std::size_t> next{0};
    const auto work = [&] {
        for (std::size_t i = next++; i < plans.size(); i = next++) {
            SweepCell& cell = plans[i].cell;
            try {
                cell.fit = fit_power_loglog(cell_series(plans[i].spec, config.mode, cell.draws, cell.seed));
            } catch (const Error& e) {
                cell.failed = true;
                cell.error = e.what();
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back(work);
    }

    std::vector<SweepCell> cells;
    cells.reserve(plans.size());
    for (auto& p : plans) {
        if (p.cell.failed)
            warn("cell " + std::to_string(p.cell.cell_id) + " failed: " + p.cell.error);
        cells.push_back(std::move(p.cell));
    }
    return cells;
}

HierarchySpec cell_spec(const SweepConfig& config, const SweepCell& cell)
{
    for (const auto& p : plan_cells(config))
        if (p.cell.cell_id == cell.cell_id)
            return p.spec;
    throw InvalidSpec("cell " + std::to_string(cell.cell_id) + " is not part of the sweep");
}

RankedSeries replay_cell(const SweepConfig& config, const SweepCell& cell)
{
    return cell_series(cell_spec(config, cell), config.mode, cell.draws, cell.seed);
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepCell>& cells)
{
    using detail::fmt_double;
    out << "cell_id,M,N,T,ratio_m,ratio_w,ratio_c,replicate,seed,alpha,adj_r2,n_zero\n";
    for (const auto& c : cells) {
        out << c.cell_id << ',' << c.m << ',' << c.n << ',' << c.draws << ',' << fmt_double(c.ratio_m) << ','
            << fmt_double(c.ratio_w) << ',' << fmt_double(c.ratio_c) << ',' << c.replicate << ',' << c.seed << ',';
        if (c.failed)
            out << "nan,nan,nan\n";
        else
            out << fmt_double(c.fit.alpha) << ',' << fmt_double(c.fit.adj_r2) << ',' << c.fit.n_zero << '\n';
    }
}

std::vector<SweepCell> read_sweep_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line) ||
        detail::trim(line) != "cell_id,M,N,T,ratio_m,ratio_w,ratio_c,replicate,seed,alpha,adj_r2,n_zero")
        throw IoError("not a sweep CSV (header mismatch)");
    std::vector<SweepCell> cells;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::trim(line).empty())
            continue;
        std::vector<std::string_view> f;
        std::string_view rest(line);
        while (true) {
            const auto comma = rest.find(',');
            f.push_back(rest.substr(0, comma));
            if (comma == std::string_view::npos)
                break;
            rest = rest.substr(comma + 1);
        }
        const auto bad = [&] { return IoError("malformed sweep row at line " + std::to_string(lineno)); };
        if (f.size() != 12)
            throw bad();
        SweepCell c;
        const auto id = detail::parse_int<std::size_t>(f[0]);
        const auto m = detail::parse_int<std::size_t>(f[1]);
        const auto n = detail::parse_int<std::size_t>(f[2]);
        const auto t = detail::parse_int<std::uint64_t>(f[3]);
        const auto rm = detail::parse_double(f[4]);
        const auto rw = detail::parse_double(f[5]);
        const auto rc = detail::parse_double(f[6]);
        const auto rep = detail::parse_int<std::size_t>(f[7]);
        const auto seed = detail::parse_int<std::uint64_t>(f[8]);
        const auto alpha = detail::parse_double(f[9]);
        const auto adj = detail::parse_double(f[10]);
        if (!id || !m || !n || !t || !rm || !rw || !rc || !rep || !seed || !alpha || !adj)
            throw bad();
        c.cell_id = *id;
        c.m = *m;
        c.n = *n;
        c.draws = *t;
        c.ratio_m = *rm;
        c.ratio_w = *rw;
        c.ratio_c = *rc;
        c.replicate = *rep;
        c.seed = *seed;
        if (std::isnan(*alpha) || std::isnan(*adj)) {
            c.failed = true;
            c.error = "failed in source sweep";
        } else {
            const auto nz = detail::parse_int<std::size_t>(f[11]);
            if (!nz)
                throw bad();
            c.fit.alpha = *alpha;
            c.fit.adj_r2 = *adj;
            c.fit.n_zero = *nz;
        }
        cells.push_back(std::move(c));
    }
    return cells;
}

ContourGrid contour_grid(const std::vector<SweepCell>& cells, Factor x, Factor y)
{
    ContourGrid g;
    g.x_factor = x;
    g.y_factor = y;
    std::set<double> xs, ys;
    std::map<std::pair<double, double>, std::pair<double, std::size_t>> acc;
    for (const auto& c : cells) {
        xs.insert(c.level(x));
        ys.insert(c.level(y));
        if (c.failed)
            continue;
        auto& a = acc[{c.level(x), c.level(y)}];
        a.first += c.fit.adj_r2;
        ++a.second;
    }
    if (xs.empty())
        throw InsufficientData("no cells for contour grid");
    g.x_levels.assign(xs.begin(), xs.end());
    g.y_levels.assign(ys.begin(), ys.end());
    std::string missing;
    g.mean_adj_r2.assign(g.y_levels.size(), std::vector<double>(g.x_levels.size()));
    for (std::size_t iy = 0; iy < g.y_levels.size(); ++iy)
        for (std::size_t ix = 0; ix < g.x_levels.size(); ++ix) {
            const auto it = acc.find({g.x_levels[ix], g.y_levels[iy]});
            if (it == acc.end()) {
                missing += " (" + detail::fmt_double(g.x_levels[ix]) + "," + detail::fmt_double(g.y_levels[iy]) + ")";
                continue;
            }
            g.mean_adj_r2[iy][ix] = it->second.first / static_cast<double>(it->second.second);
        }
    if (!missing.empty())
        throw InsufficientData("ragged contour grid; missing " + std::string(factor_name(x)) + "," +
                               std::string(factor_name(y)) + " cells:" + missing);
    return g;
}

void write_contour_csv(std::ostream& out, const ContourGrid& g)
{
    out << g.x_levels.size();
    for (double x : g.x_levels)
        out << ',' << detail::fmt_double(x);
    out << '\n';
    for (std::size_t iy = 0; iy < g.y_levels.size(); ++iy) {
        out << detail::fmt_double(g.y_levels[iy]);
        for (double v : g.mean_adj_r2[iy])
            out << ',' << detail::fmt_double(v);
        out << '\n';
    }
}

std::vector<TrendCurve> exponent_trends(const std::vector<SweepCell>& cells, Factor varied, Factor curve)
{
    std::map<double, std::map<double, std::pair<double, std::size_t>>> acc;
    for (const auto& c : cells) {
        if (c.failed)
            continue;
        auto& a = acc[c.level(curve)][c.level(varied)];
        a.first += c.fit.alpha;
        ++a.second;
    }
    std::vector<TrendCurve> out;
    for (const auto& [curve_level, by_level] : acc) {
        if (by_level.size() < 3)
            throw InsufficientData("trend needs >= 3 levels of " + std::string(factor_name(varied)) + ", got " +
                                   std::to_string(by_level.size()));
        TrendCurve t;
        t.curve_factor = curve;
        t.curve_level = curve_level;
        t.varied_factor = varied;
        std::vector<double> levels, means;
        for (const auto& [level, a] : by_level) {
            const double mean = a.first / static_cast<double>(a.second);
            t.points.emplace_back(level, mean);
            levels.push_back(level);
            means.push_back(mean);
        }
        const bool flat = std::all_of(means.begin(), means.end(), [&](double m) { return m == means.front(); });
        t.spearman = flat ? 0.0 : spearman(levels, means);
        out.push_back(std::move(t));
    }
    if (out.empty())
        throw InsufficientData("no successful cells for trends");
    return out;
}

void write_trends_csv(std::ostream& out, const std::vector<TrendCurve>& curves)
{
    out << "curve_factor,curve_level,varied_factor,level,mean_alpha,spearman\n";
    for (const auto& t : curves)
        for (const auto& [level, mean] : t.points)
            out << factor_name(t.curve_factor) << ',' << detail::fmt_double(t.curve_level) << ','
                << factor_name(t.varied_factor) << ',' << detail::fmt_double(level) << ','
                << detail::fmt_double(mean) << ',' << detail::fmt_double(t.spearman) << '\n';
}

std::vector<AnovaResult> anova_over_sweep(const std::vector<SweepCell>& cells, const std::vector<Factor>& factors)
{
    std::vector<AnovaResult> out;
    for (const bool on_alpha : {false, true}) {
        for (Factor f : factors) {
            std::map<double, std::vector<double>> groups;
            for (const auto& c : cells)
                if (!c.failed)
                    groups[c.level(f)].push_back(on_alpha ? c.fit.alpha : c.fit.adj_r2);
            std::vector<std::vector<double>> g;
            g.reserve(groups.size());
            for (auto& [level, values] : groups)
                g.push_back(std::move(values));
            const std::string name = std::string(on_alpha ? "alpha~" : "adj_r2~") + std::string(factor_name(f));
            try {
                out.push_back(one_way_anova(g, name));
            } catch (const Error& e) {
                throw InsufficientData(name + ": " + e.what());
            }
        }
    }
    return out;
}

ExponentRegression exponent_regression(const std::vector<SweepCell>& cells)
{
    const Factor predictors[] = {Factor::ratio_m, Factor::ratio_w, Factor::ratio_c};
    std::vector<std::vector<double>> design;
    std::vector<double> alpha;
    std::set<double> seen[3];
    for (const auto& c : cells) {
        if (c.failed)
            continue;
        std::vector<double> row;
        for (std::size_t k = 0; k < 3; ++k) {
            row.push_back(c.level(predictors[k]));
            seen[k].insert(row.back());
        }
        design.push_back(std::move(row));
        alpha.push_back(c.fit.alpha);
    }
    for (std::size_t k = 0; k < 3; ++k)
        if (seen[k].size() < 2)
            throw InsufficientData("exponent regression needs >= 2 levels of " +
                                   std::string(factor_name(predictors[k])));
    ExponentRegression r;
    r.names = {"intercept", "ratio_m", "ratio_w", "ratio_c"};
    r.fit = linear_regression(design, alpha);
    return r;
}

void write_regression_csv(std::ostream& out, const ExponentRegression& reg)
{
    out << "term,coefficient,std_error\n";
    for (std::size_t k = 0; k < reg.names.size(); ++k)
        out << reg.names[k] << ',' << detail::fmt_double(reg.fit.coefficients[k]) << ','
            << detail::fmt_double(reg.fit.std_errors[k]) << '\n';
}

std::size_t eligible_topics(std::size_t hierarchy, std::size_t n_hierarchies, std::size_t n_topics)
{
    if (hierarchy < 1 || hierarchy > n_hierarchies)
        throw InvalidSpec("hierarchy out of range");
    return (n_topics * (n_hierarchies + 1 - hierarchy) + n_hierarchies - 1) / n_hierarchies;
}

std::vector<std::pair<std::string, std::string>> generate_corpus(const ModelInstance& inst, std::size_t n_topics,
                                                                 std::size_t tokens_per_topic, std::uint64_t seed)
{
    if (n_topics < 1)
        throw InvalidSpec("n_topics must be >= 1");
    const std::size_t m = inst.n_hierarchies();
    const int width = static_cast<int>(std::to_string(n_topics).size());
    std::vector<std::pair<std::string, std::string>> topics;
    topics.reserve(n_topics);
    for (std::size_t t = 0; t < n_topics; ++t) {
        // Hierarchy h (0-based) is eligible in topic t when t < eligible_topics(h + 1).
        std::vector<double> weights(m, 0.0);
        for (std::size_t h = 0; h < m; ++h)
            if (t < eligible_topics(h + 1, m, n_topics))
                weights[h] = inst.fc()[h];
        const Pmf stage(std::move(weights));
        Rng rng(derive_seed(seed, t));
        std::string text;
        text.reserve(tokens_per_topic * 7);
        for (std::size_t k = 0; k < tokens_per_topic; ++k) {
            const std::size_t h = stage.sample(rng);
            const std::size_t j = inst.fw(h).sample(rng);
            if (k)
                text += (k % 20 == 0) ? '\n' : ' ';
            text += 'o';
            text += std::to_string(inst.offset(h) + j + 1);
        }
        text += '\n';
        std::string name = std::to_string(t + 1);
        name.insert(0, static_cast<std::size_t>(width) - name.size(), '0');
        topics.emplace_back("topic" + name, std::move(text));
    }
    return topics;
}

void write_corpus(const std::filesystem::path& dir, const std::vector<std::pair<std::string, std::string>>& topics)
{
    std::filesystem::create_directories(dir);
    for (const auto& [name, text] : topics) {
        const auto path = dir / (name + ".txt");
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw IoError("cannot write " + path.string());
        out << text;
        if (!out)
            throw IoError("error writing " + path.string());
    }
}

namespace {

std::vector<double> ratio_range(double lo, double hi, double step)
{
    std::vector<double> out;
    const auto n = static_cast<std::size_t>(std::llround((hi - lo) / step));
    for (std::size_t i = 0; i <= n; ++i)
        out.push_back(lo + step * static_cast<double>(i));
    return out;
}

std::vector<FactorLevel> flat_level()
{
    return {level_from_spec(DistributionSpec::uniform())};
}

SweepConfig fig5_preset(bool exponential)
{
    const DistributionTriple d = table2_distributions(exponential);
    SweepConfig c;
    c.name = exponential ? "fig5-exp" : "fig5";
    c.m_levels = {2, 3, 4, 5, 6, 7, 8};
    c.n_levels = {1000, 2000, 5000, 10000, 20000, 50000};
    c.draws = 1'000'000;
    c.fm_levels = {level_from_spec(d.fm)};
    c.fw_levels = {level_from_spec(d.fw)};
    c.fc_levels = {level_from_spec(d.fc)};
    c.mode = SimulationMode::expected;
    c.master_seed = 5;
    return c;
}

} // namespace

std::vector<std::string> preset_names()
{
    return {"fig3", "fig4", "fig4-paired", "fig5", "fig5-exp", "table2-anova"};
}

SweepConfig preset(std::string_view name)
{
    SweepConfig c;
    c.name = std::string(name);
    if (name == "fig3") {
        const auto ratios = ratio_range(1.0, 10.0, 0.5);
        c.m_levels = {5};
        c.n_levels = {50000};
        c.draws = 2'000'000;
        c.fm_levels = triangular_levels(ratios, Orientation::ascending);
        c.fw_levels = flat_level();
        c.fc_levels = triangular_levels(ratios, Orientation::descending);
        c.master_seed = 3;
    } else if (name == "fig4" || name == "fig4-paired") {
        c.m_levels = {5};
        c.n_levels = {50000};
        c.draws = 2'000'000;
        c.fm_levels = triangular_levels({5, 7, 9}, Orientation::ascending);
        c.fw_levels = flat_level();
        if (name == "fig4-paired")
            c.pair_fc_with_fm = true;
        else
            c.fc_levels = flat_level();
        c.replicates = 10;
        c.master_seed = 4;
    } else if (name == "fig5" || name == "fig5-exp") {
        return fig5_preset(name == "fig5-exp");
    } else if (name == "table2-anova") {
        c.m_levels = {3, 5, 8};
        c.n_levels = {50000};
        c.draws = 2'000'000;
        c.fm_levels = triangular_levels({2, 5, 9}, Orientation::ascending);
        c.fw_levels = triangular_levels({1, 3, 6}, Orientation::descending);
        c.fc_levels = triangular_levels({1.5, 3, 6}, Orientation::descending);
        c.replicates = 5;
        c.master_seed = 2;
    } else {
        std::string known;
        for (const auto& n : preset_names())
            known += " " + n;
        throw InvalidSpec("unknown preset '" + std::string(name) + "'; known:" + known);
    }
    return c;
}

namespace {

std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> out;
    while (true) {
        const auto pos = s.find(sep);
        const auto item = detail::trim(s.substr(0, pos));
        if (!item.empty())
            out.push_back(item);
        if (pos == std::string_view::npos)
            return out;
        s = s.substr(pos + 1);
    }
}

template <class Int>
std::vector<Int> int_list(std::string_view key, std::string_view value)
{
    std::vector<Int> out;
    for (auto item : split(value, ',')) {
        const auto v = detail::parse_int<Int>(item);
        if (!v)
            throw InvalidSpec(std::string(key) + ": '" + std::string(item) + "' is not an integer");
        out.push_back(*v);
    }
    return out;
}

std::vector<double> real_list(std::string_view key, std::string_view value)
{
    std::vector<double> out;
    for (auto item : split(value, ',')) {
        const auto v = detail::parse_double(item);
        if (!v)
            throw InvalidSpec(std::string(key) + ": '" + std::string(item) + "' is not a number");
        out.push_back(*v);
    }
    return out;
}

std::vector<FactorLevel> spec_list(std::string_view value)
{
    std::vector<FactorLevel> out;
    for (auto item : split(value, ';'))
        out.push_back(level_from_spec(parse_distribution(item)));
    return out;
}

} // namespace

SweepConfig parse_sweep_config(std::istream& in)
{
    std::vector<std::pair<std::string, std::string>> entries;
    std::string line;
    std::size_t lineno = 0;
    std::optional<std::string> preset_name;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view v(line);
        if (const auto hash = v.find('#'); hash != std::string_view::npos)
            v = v.substr(0, hash);
        v = detail::trim(v);
        if (v.empty())
            continue;
        const auto eq = v.find('=');
        if (eq == std::string_view::npos)
            throw InvalidSpec("config line " + std::to_string(lineno) + ": expected key = value");
        std::string key(detail::trim(v.substr(0, eq)));
        std::string value(detail::trim(v.substr(eq + 1)));
        if (key == "preset")
            preset_name = value;
        else
            entries.emplace_back(std::move(key), std::move(value));
    }

    SweepConfig c = preset_name ? preset(*preset_name) : SweepConfig{};
    for (const auto& [key, value] : entries) {
        const auto one_int = [&](auto tag) {
            using Int = decltype(tag);
            const auto v = detail::parse_int<Int>(value);
            if (!v)
                throw InvalidSpec(key + ": '" + value + "' is not an integer");
            return *v;
        };
        if (key == "name") {
            c.name = value;
        } else if (key == "m_levels" || key == "M") {
            c.m_levels = int_list<std::size_t>(key, value);
        } else if (key == "n_levels" || key == "N") {
            c.n_levels = int_list<std::size_t>(key, value);
        } else if (key == "draws" || key == "T") {
            c.draws = one_int(std::uint64_t{});
        } else if (key == "replicates") {
            c.replicates = one_int(std::size_t{});
        } else if (key == "master_seed" || key == "seed") {
            c.master_seed = one_int(std::uint64_t{});
        } else if (key == "workers") {
            c.workers = one_int(std::size_t{});
        } else if (key == "mode") {
            if (value == "montecarlo")
                c.mode = SimulationMode::montecarlo;
            else if (value == "expected")
                c.mode = SimulationMode::expected;
            else
                throw InvalidSpec("mode must be montecarlo or expected, got '" + value + "'");
        } else if (key == "ratio_m") {
            c.fm_levels = triangular_levels(real_list(key, value), Orientation::ascending);
        } else if (key == "ratio_w") {
            c.fw_levels = triangular_levels(real_list(key, value), Orientation::descending);
        } else if (key == "ratio_c") {
            c.fc_levels = triangular_levels(real_list(key, value), Orientation::descending);
        } else if (key == "fm") {
            c.fm_levels = spec_list(value);
        } else if (key == "fw") {
            c.fw_levels = spec_list(value);
        } else if (key == "fc") {
            c.fc_levels = spec_list(value);
        } else if (key == "pair_fc") {
            if (value != "true" && value != "false")
                throw InvalidSpec("pair_fc must be true or false");
            c.pair_fc_with_fm = value == "true";
        } else if (key == "dists") {
            if (value != "table2" && value != "table2-exp")
                throw InvalidSpec("dists must be table2 or table2-exp");
            const auto d = table2_distributions(value == "table2-exp");
            c.fm_levels = {level_from_spec(d.fm)};
            c.fw_levels = {level_from_spec(d.fw)};
            c.fc_levels = {level_from_spec(d.fc)};
        } else {
            throw InvalidSpec("unknown config key '" + key + "'");
        }
    }
    c.validate();
    return c;
}

} // namespace hsm
