#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hsm/fit.hpp"
#include "hsm/harness.hpp"

namespace hsm::plot {

// gnuplot scripts referencing CSV files by name, relative to the script's
// directory; `png` is the image the script renders to. They are emitted,
// never executed.

/// Log-log rank/frequency scatter, with the fitted line when given.
std::string rank_frequency(const std::string& csv, const std::string& png, const std::string& title, const std::optional<FitResult>& fit);

/// Filled contour of mean adj_r2 from a write_contour_csv file.
std::string contour(const std::string& csv, const std::string& png, const ContourGrid& grid);

/// Mean alpha against the varied factor, one line per curve level.
std::string trends(const std::string& csv, const std::string& png, const std::vector<TrendCurve>& curves);

/// Overlaid density curves, (label, csv) per curve.
std::string densities(const std::vector<std::pair<std::string, std::string>>& curves, const std::string& png,
                      const std::string& xlabel);

void write_script(const std::filesystem::path& path, const std::string& script);

} // namespace hsm::plot
