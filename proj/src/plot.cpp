#include "hsm/plot.hpp"

#include <fstream>
#include <sstream>

#include "format.hpp"
#include "hsm/error.hpp"

namespace hsm::plot {

namespace {

std::string quoted(const std::string& s)
{
    std::string out = "'";
    for (char c : s) {
        if (c == '\'')
            out += '\'';
        out += c;
    }
    return out + "'";
}

void preamble(std::ostringstream& gp, const std::string& png)
{
    gp << "set terminal pngcairo size 900,650\n"
       << "set output " << quoted(png) << "\n"
       << "set datafile separator ','\n";
}

} // namespace

std::string rank_frequency(const std::string& csv, const std::string& png, const std::string& title, const std::optional<FitResult>& fit)
{
    std::ostringstream gp;
    preamble(gp, png);
    gp << "set title " << quoted(title) << "\n"
       << "set logscale xy\n"
       << "set xlabel 'rank'\nset ylabel 'frequency'\n"
       << "set key top right\n";
    gp << "plot " << quoted(csv) << " using 1:2 every ::1 with points pt 7 ps 0.4 title 'observed'";
    if (fit)
        gp << ", \\\n     exp(" << detail::fmt_double(fit->log_intercept) << ") * x**(-"
           << detail::fmt_double(fit->alpha) << ") with lines lw 2 title sprintf('alpha=%.4f adj R^2=%.4f', "
           << detail::fmt_double(fit->alpha) << ", " << detail::fmt_double(fit->adj_r2) << ")";
    gp << "\n";
    return gp.str();
}

std::string contour(const std::string& csv, const std::string& png, const ContourGrid& grid)
{
    std::ostringstream gp;
    preamble(gp, png);
    gp << "set xlabel " << quoted(std::string(factor_name(grid.x_factor))) << "\n"
       << "set ylabel " << quoted(std::string(factor_name(grid.y_factor))) << "\n"
       << "set cblabel 'adjusted R^2'\n"
       << "set view map\nset pm3d map interpolate 4,4\nset contour base\nset cntrparam levels 10\n"
       << "set palette rgbformulae 33,13,10\n"
       << "splot " << quoted(csv) << " nonuniform matrix with pm3d notitle\n";
    return gp.str();
}

std::string trends(const std::string& csv, const std::string& png, const std::vector<TrendCurve>& curves)
{
    if (curves.empty())
        throw InsufficientData("no trend curves to plot");
    std::ostringstream gp;
    preamble(gp, png);
    const auto varied = std::string(factor_name(curves.front().varied_factor));
    const auto curve = std::string(factor_name(curves.front().curve_factor));
    gp << "set xlabel " << quoted(varied) << "\nset ylabel 'alpha'\nset key outside right\n";
    gp << "plot";
    for (std::size_t i = 0; i < curves.size(); ++i) {
        const auto level = detail::fmt_double(curves[i].curve_level);
        gp << (i ? ", \\\n    " : " ") << quoted(csv) << " using ($2==" << level << " ? $4 : 1/0):5 every ::1"
           << " with linespoints title " << quoted(curve + "=" + level);
    }
    gp << "\n";
    return gp.str();
}

std::string densities(const std::vector<std::pair<std::string, std::string>>& curves, const std::string& png,
                      const std::string& xlabel)
{
    if (curves.empty())
        throw InsufficientData("no density curves to plot");
    std::ostringstream gp;
    preamble(gp, png);
    gp << "set xlabel " << quoted(xlabel) << "\nset ylabel 'density'\nset key top right\n";
    gp << "plot";
    for (std::size_t i = 0; i < curves.size(); ++i)
        gp << (i ? ", \\\n    " : " ") << quoted(curves[i].second) << " using 1:2 every ::1 with lines title "
           << quoted(curves[i].first);
    gp << "\n";
    return gp.str();
}

void write_script(const std::filesystem::path& path, const std::string& script)
{
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write " + path.string());
    out << script;
    if (!out)
        throw IoError("error writing " + path.string());
}

} // namespace hsm::plot
