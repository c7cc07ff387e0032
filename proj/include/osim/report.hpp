#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "osim/analysis.hpp"

namespace osim {

/// A labelled sample of per-trial values.
struct Series {
  std::string label;
  std::vector<double> values;
};

/// Gaussian-kernel density curves, one per series, on a shared grid.
/// Each series needs at least two values.
std::string density_svg(const std::vector<Series>& series, std::string_view title,
                        std::string_view x_label);

/// Bar chart of a winprob table. Bar heights come from the table's
/// win_probability column; each bar carries it as data-value.
std::string winprob_svg(const Table& winprob);

/// Heat-map table of a convergence table: colour encodes log10(n_required),
/// NOT-REACHED cells are grey.
std::string convergence_svg(const Table& convergence);

}  // namespace osim
