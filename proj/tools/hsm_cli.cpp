#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hsm/corpus.hpp"
#include "hsm/error.hpp"
#include "hsm/harness.hpp"
#include "hsm/plot.hpp"

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& path)
{
    std::ofstream out(path);
    if (!out)
        throw hsm::IoError("cannot write " + path.string());
    return out;
}

std::ifstream open_in(const fs::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw hsm::IoError("cannot read " + path.string());
    return in;
}

// Writes to `path`, or stdout for "-".
template <class F>
void emit(const std::string& path, F&& write)
{
    if (path == "-") {
        write(std::cout);
        std::cout.flush();
        return;
    }
    auto out = open_out(path);
    write(out);
    if (!out)
        throw hsm::IoError("error writing " + path);
}

hsm::SimulationMode parse_mode(const std::string& s)
{
    if (s == "montecarlo")
        return hsm::SimulationMode::montecarlo;
    if (s == "expected")
        return hsm::SimulationMode::expected;
    throw hsm::InvalidSpec("mode must be montecarlo or expected, got '" + s + "'");
}

struct ModelArgs {
    std::size_t m = 5;
    std::size_t n = 50000;
    std::string fm = "tri:1:asc";
    std::string fw = "uniform";
    std::string fc = "uniform";
    std::string dists;

    void add(CLI::App& app)
    {
        app.add_option("--m", m, "number of hierarchies")->capture_default_str();
        app.add_option("--n", n, "number of objects")->capture_default_str();
        app.add_option("--fm", fm, "objects per hierarchy distribution")->capture_default_str();
        app.add_option("--fw", fw, "within-hierarchy selection distribution")->capture_default_str();
        app.add_option("--fc", fc, "hierarchy selection distribution")->capture_default_str();
        app.add_option("--dists", dists, "calibrated fm/fw/fc triple (overrides --fm/--fw/--fc)")
            ->check(CLI::IsMember({"table2", "table2-exp"}));
    }

    hsm::HierarchySpec spec() const
    {
        hsm::HierarchySpec s;
        s.n_objects = n;
        s.n_hierarchies = m;
        if (!dists.empty()) {
            const auto d = hsm::table2_distributions(dists == "table2-exp");
            s.fm = d.fm;
            s.fw = d.fw;
            s.fc = d.fc;
        } else {
            s.fm = hsm::parse_distribution(fm);
            s.fw = hsm::parse_distribution(fw);
            s.fc = hsm::parse_distribution(fc);
        }
        return s;
    }
};

void write_meta(const fs::path& path, const hsm::SweepConfig& c)
{
    auto out = open_out(path);
    const auto levels = [&](const char* key, const std::vector<hsm::FactorLevel>& ls) {
        out << key << " =";
        for (std::size_t i = 0; i < ls.size(); ++i)
            out << (i ? "; " : " ") << ls[i].spec.to_string();
        out << '\n';
    };
    out << "name = " << c.name << '\n';
    out << "M =";
    for (std::size_t i = 0; i < c.m_levels.size(); ++i)
        out << (i ? "," : " ") << c.m_levels[i];
    out << "\nN =";
    for (std::size_t i = 0; i < c.n_levels.size(); ++i)
        out << (i ? "," : " ") << c.n_levels[i];
    out << "\nT = " << c.draws << '\n';
    levels("fm", c.fm_levels);
    levels("fw", c.fw_levels);
    if (c.pair_fc_with_fm)
        out << "fc = tri:<ratio_m>\n";
    else
        levels("fc", c.fc_levels);
    out << "replicates = " << c.replicates << '\n'
        << "master_seed = " << c.master_seed << '\n'
        << "mode = " << (c.mode == hsm::SimulationMode::expected ? "expected" : "montecarlo") << '\n';
    if (!out)
        throw hsm::IoError("error writing " + path.string());
}

std::size_t distinct(const std::vector<hsm::SweepCell>& cells, hsm::Factor f)
{
    std::set<double> s;
    for (const auto& c : cells)
        s.insert(c.level(f));
    return s.size();
}

// The two factors vary and every level combination occurs.
bool full_grid(const std::vector<hsm::SweepCell>& cells, hsm::Factor x, hsm::Factor y)
{
    std::set<std::pair<double, double>> pairs;
    for (const auto& c : cells)
        pairs.emplace(c.level(x), c.level(y));
    const auto nx = distinct(cells, x), ny = distinct(cells, y);
    return nx > 1 && ny > 1 && pairs.size() == nx * ny;
}

int run_simulate(const ModelArgs& model, std::uint64_t draws, std::uint64_t seed, const std::string& mode,
                 const std::string& out, const std::string& ranked_out, bool gnuplot)
{
    const auto inst = hsm::build_instance(model.spec());
    const auto table = parse_mode(mode) == hsm::SimulationMode::expected
                           ? hsm::expected_frequencies(inst, static_cast<double>(draws))
                           : hsm::simulate(inst, draws, seed);
    emit(out, [&](std::ostream& os) { hsm::write_csv(os, table); });
    if (!ranked_out.empty()) {
        const auto series = hsm::rank_series(table);
        emit(ranked_out, [&](std::ostream& os) { hsm::write_csv(os, series); });
        if (gnuplot && ranked_out != "-") {
            std::optional<hsm::FitResult> fit;
            try {
                fit = hsm::fit_power_loglog(series);
            } catch (const hsm::Error& e) {
                hsm::warn(std::string("no fit line: ") + e.what());
            }
            const fs::path p(ranked_out);
            hsm::plot::write_script(fs::path(p).replace_extension(".gp"),
                                    hsm::plot::rank_frequency(p.filename().string(),
                                                              fs::path(p.filename()).replace_extension(".png").string(),
                                                              "rank-frequency", fit));
        }
    }
    return 0;
}

int run_fit(const std::string& in_path, const std::string& model, std::size_t max_rank, const std::string& space,
            double shift, const std::string& out)
{
    std::ifstream file;
    if (in_path != "-")
        file = open_in(in_path);
    std::istream& in = in_path == "-" ? std::cin : file;
    const bool raw = space.empty() ? model == "shifted" : space == "raw";
    const auto fit_space = raw ? hsm::FitSpace::raw : hsm::FitSpace::log;

    if (model == "power") {
        auto series = hsm::read_ranked_series(in);
        if (max_rank && series.frequency.size() > max_rank) {
            series.n_truncated += series.frequency.size() - max_rank;
            series.frequency.resize(max_rank);
        }
        const auto fit = hsm::fit_power_loglog(series, fit_space);
        emit(out, [&](std::ostream& os) {
            hsm::write_fit_header(os);
            hsm::write_fit_row(os, fit);
        });
        return 0;
    }

    auto xy = hsm::read_xy_csv(in);
    if (max_rank && xy.x.size() > max_rank) {
        xy.x.resize(max_rank);
        xy.y.resize(max_rank);
    }
    if (model == "shifted") {
        const auto fit = hsm::fit_shifted_power(xy.x, xy.y, shift, fit_space);
        emit(out, [&](std::ostream& os) {
            hsm::write_fit_header(os);
            hsm::write_fit_row(os, fit);
        });
        return 0;
    }
    const auto f = hsm::fit_two_term_power(xy.x, xy.y);
    emit(out, [&](std::ostream& os) {
        char buf[256];
        std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g\n", f.a, f.b, f.c, f.d, f.sse, f.r2,
                      f.adj_r2);
        os << "a,b,c,d,sse,r2,adj_r2\n" << buf;
    });
    return 0;
}

int run_sweep_cmd(const std::string& config_path, const std::string& preset_name, const fs::path& out_dir,
                  std::optional<std::size_t> workers, bool gnuplot)
{
    hsm::SweepConfig cfg;
    if (!config_path.empty()) {
        auto in = open_in(config_path);
        cfg = hsm::parse_sweep_config(in);
    } else {
        cfg = hsm::preset(preset_name);
    }
    if (workers)
        cfg.workers = *workers;
    fs::create_directories(out_dir);
    const auto cells = hsm::run_sweep(cfg);
    {
        auto out = open_out(out_dir / "sweep.csv");
        hsm::write_sweep_csv(out, cells);
    }
    write_meta(out_dir / "sweep_meta.txt", cfg);

    std::size_t failed = 0;
    for (const auto& c : cells)
        failed += c.failed;
    std::cerr << "sweep " << cfg.name << ": " << cells.size() << " cells, " << failed << " failed\n";

    if (full_grid(cells, hsm::Factor::ratio_m, hsm::Factor::ratio_c)) {
        const auto grid = hsm::contour_grid(cells, hsm::Factor::ratio_m, hsm::Factor::ratio_c);
        auto out = open_out(out_dir / "contour.csv");
        hsm::write_contour_csv(out, grid);
        if (gnuplot)
            hsm::plot::write_script(out_dir / "contour.gp", hsm::plot::contour("contour.csv", "contour.png", grid));
    }
    std::vector<hsm::TrendCurve> trends;
    if (distinct(cells, hsm::Factor::N) >= 3)
        for (auto& t : hsm::exponent_trends(cells, hsm::Factor::N, hsm::Factor::M))
            trends.push_back(std::move(t));
    if (distinct(cells, hsm::Factor::M) >= 3)
        for (auto& t : hsm::exponent_trends(cells, hsm::Factor::M, hsm::Factor::N))
            trends.push_back(std::move(t));
    if (!trends.empty()) {
        auto out = open_out(out_dir / "trends.csv");
        hsm::write_trends_csv(out, trends);
        if (gnuplot) {
            std::vector<hsm::TrendCurve> by_n, by_m;
            for (const auto& t : trends)
                (t.varied_factor == hsm::Factor::N ? by_n : by_m).push_back(t);
            if (!by_n.empty())
                hsm::plot::write_script(out_dir / "trends_n.gp", hsm::plot::trends("trends.csv", "trends_n.png", by_n));
            if (!by_m.empty())
                hsm::plot::write_script(out_dir / "trends_m.gp", hsm::plot::trends("trends.csv", "trends_m.png", by_m));
        }
    }
    return 0;
}

int run_corpus(const fs::path& dir, std::uint64_t threshold, double proportion, std::uint64_t seed,
               std::size_t max_rank, const fs::path& out_dir, bool gnuplot)
{
    const auto corpus = hsm::load_corpus_dir(dir);
    const auto records = hsm::nt_table(corpus, threshold);
    fs::create_directories(out_dir);
    {
        auto out = open_out(out_dir / "nt_table.csv");
        hsm::write_nt_table(out, records);
    }
    {
        auto out = open_out(out_dir / "group_stats.csv");
        hsm::write_group_stats(out, hsm::group_stats(records, corpus));
    }
    {
        hsm::RankOptions opts;
        opts.max_rank = max_rank;
        auto out = open_out(out_dir / "topic_fits.csv");
        hsm::write_topic_fits(out, hsm::per_topic_fits(corpus, opts));
    }
    std::vector<std::pair<std::string, std::string>> curves;
    for (const auto& [nt, curve] : hsm::nt_density_curves(records)) {
        const auto name = "fig2_nt" + std::to_string(nt) + ".csv";
        auto out = open_out(out_dir / name);
        hsm::write_csv(out, curve);
        curves.emplace_back("NT=" + std::to_string(nt), name);
    }
    if (gnuplot && !curves.empty())
        hsm::plot::write_script(out_dir / "fig2.gp", hsm::plot::densities(curves, "fig2.png", "rank"));
    const double r = hsm::rank_nt_correlation(records, proportion, seed);
    std::cout << "words," << records.size() << "\ntokens," << corpus.token_count() << "\nrank_nt_correlation," << r
              << '\n';
    return 0;
}

int run_anova(const std::string& in_path, const std::vector<std::string>& factor_names, bool regression,
              const std::string& out)
{
    std::vector<hsm::SweepCell> cells;
    if (in_path == "-") {
        cells = hsm::read_sweep_csv(std::cin);
    } else {
        auto in = open_in(in_path);
        cells = hsm::read_sweep_csv(in);
    }
    std::vector<hsm::Factor> factors;
    for (const auto& f : factor_names)
        factors.push_back(hsm::parse_factor(f));
    const auto results = hsm::anova_over_sweep(cells, factors);
    emit(out, [&](std::ostream& os) {
        hsm::write_anova_header(os);
        for (const auto& r : results)
            hsm::write_anova_row(os, r);
        if (regression) {
            os << '\n';
            hsm::write_regression_csv(os, hsm::exponent_regression(cells));
        }
    });
    return 0;
}

int run_generate(const ModelArgs& model, std::size_t topics, std::size_t tokens, std::uint64_t seed,
                 const fs::path& out_dir)
{
    const auto inst = hsm::build_instance(model.spec());
    hsm::write_corpus(out_dir, hsm::generate_corpus(inst, topics, tokens, seed));
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Hierarchical selection model: simulation, power-law fitting, sweeps and corpus statistics"};
    app.require_subcommand(1);

    auto* sim = app.add_subcommand("simulate", "draw a frequency table from one model instance");
    ModelArgs sim_model;
    sim_model.add(*sim);
    std::uint64_t sim_draws = 2'000'000, sim_seed = 0;
    std::string sim_mode = "montecarlo", sim_out = "-", sim_ranked;
    bool sim_gp = false;
    sim->add_option("--draws,-T", sim_draws, "number of two-step selections")->capture_default_str();
    sim->add_option("--seed", sim_seed)->capture_default_str();
    sim->add_option("--mode", sim_mode)->check(CLI::IsMember({"montecarlo", "expected"}))->capture_default_str();
    sim->add_option("--out,-o", sim_out, "frequency table CSV ('-' = stdout)")->capture_default_str();
    sim->add_option("--ranked", sim_ranked, "also write the rank,frequency series here");
    sim->add_flag("--gnuplot", sim_gp, "emit a .gp script next to --ranked");

    auto* fit = app.add_subcommand("fit", "fit a rank,frequency CSV");
    std::string fit_in = "-", fit_model = "power", fit_space, fit_out = "-";
    std::size_t fit_max_rank = 0;
    double fit_shift = 9;
    fit->add_option("input", fit_in, "rank,frequency CSV, or x,y in file order for two-term/shifted ('-' = stdin)")
        ->capture_default_str();
    fit->add_option("--model", fit_model)
        ->check(CLI::IsMember({"power", "two-term", "shifted"}))
        ->capture_default_str();
    fit->add_option("--space", fit_space, "objective space for power/shifted (default: log for power, raw for shifted)")
        ->check(CLI::IsMember({"log", "raw"}));
    fit->add_option("--max-rank", fit_max_rank, "keep only the first rows (0 = all)")->capture_default_str();
    fit->add_option("--shift", fit_shift, "s in a(s-x)^-b")->capture_default_str();
    fit->add_option("--out,-o", fit_out)->capture_default_str();

    auto* sweep = app.add_subcommand("sweep", "run a factorial parameter sweep");
    std::string sweep_config, sweep_preset, sweep_out = ".";
    std::optional<std::size_t> sweep_workers;
    bool sweep_gp = false;
    auto* cfg_opt = sweep->add_option("--config", sweep_config, "key = value configuration file");
    auto* preset_opt = sweep->add_option("--preset", sweep_preset)->check(CLI::IsMember(hsm::preset_names()));
    cfg_opt->excludes(preset_opt);
    sweep->add_option("--out-dir", sweep_out)->capture_default_str();
    sweep->add_option("--workers", sweep_workers, "worker threads (0 = hardware concurrency)");
    sweep->add_flag("--gnuplot", sweep_gp, "emit .gp scripts for contour/trend outputs");

    auto* corpus = app.add_subcommand("corpus", "NT statistics and per-topic fits of a topic directory");
    std::string corpus_dir, corpus_out = ".";
    std::uint64_t corpus_threshold = 1, corpus_seed = 0;
    double corpus_proportion = 1.0;
    std::size_t corpus_max_rank = 0;
    bool corpus_gp = false;
    corpus->add_option("--dir", corpus_dir, "directory of <topic>.txt files")->required();
    corpus->add_option("--threshold", corpus_threshold, "minimum count for a word to occur in a topic")
        ->capture_default_str();
    corpus->add_option("--proportion", corpus_proportion, "per-NT sampling proportion for the rank/NT correlation")
        ->capture_default_str();
    corpus->add_option("--seed", corpus_seed)->capture_default_str();
    corpus->add_option("--max-rank", corpus_max_rank, "truncate per-topic fits (0 = all)")->capture_default_str();
    corpus->add_option("--out-dir", corpus_out)->capture_default_str();
    corpus->add_flag("--gnuplot", corpus_gp);

    auto* anova = app.add_subcommand("anova", "one-way ANOVA per factor over a sweep CSV");
    std::string anova_in = "-", anova_out = "-";
    std::vector<std::string> anova_factors = {"M", "ratio_m", "ratio_w", "ratio_c"};
    bool anova_reg = false;
    anova->add_option("input", anova_in, "sweep.csv ('-' = stdin)")->capture_default_str();
    anova->add_option("--factors", anova_factors)->delimiter(',')->capture_default_str();
    anova->add_flag("--regression", anova_reg, "append the alpha ~ ratio_m + ratio_w + ratio_c regression");
    anova->add_option("--out,-o", anova_out)->capture_default_str();

    auto* gen = app.add_subcommand("generate", "write a synthetic topic corpus drawn from the model");
    ModelArgs gen_model;
    gen_model.add(*gen);
    std::size_t gen_topics = 8, gen_tokens = 10000;
    std::uint64_t gen_seed = 0;
    std::string gen_out;
    gen->add_option("--topics", gen_topics)->capture_default_str();
    gen->add_option("--tokens", gen_tokens, "tokens per topic")->capture_default_str();
    gen->add_option("--seed", gen_seed)->capture_default_str();
    gen->add_option("--out-dir", gen_out)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sim)
            return run_simulate(sim_model, sim_draws, sim_seed, sim_mode, sim_out, sim_ranked, sim_gp);
        if (*fit)
            return run_fit(fit_in, fit_model, fit_max_rank, fit_space, fit_shift, fit_out);
        if (*sweep) {
            if (sweep_config.empty() && sweep_preset.empty())
                throw hsm::InvalidSpec("sweep needs --config or --preset");
            return run_sweep_cmd(sweep_config, sweep_preset, sweep_out, sweep_workers, sweep_gp);
        }
        if (*corpus)
            return run_corpus(corpus_dir, corpus_threshold, corpus_proportion, corpus_seed, corpus_max_rank,
                              corpus_out, corpus_gp);
        if (*anova)
            return run_anova(anova_in, anova_factors, anova_reg, anova_out);
        if (*gen)
            return run_generate(gen_model, gen_topics, gen_tokens, gen_seed, gen_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
