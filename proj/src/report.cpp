#include "osim/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "osim/error.hpp"
#include "osim/stats.hpp"

namespace osim {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 170.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;
constexpr std::size_t kGridPoints = 512;

constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string fixed(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string escape(std::string_view s) {
  std::string out;
  for (const char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string open_svg(double w, double h, std::string_view title) {
  return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
         "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fixed(w, 0) + "\" height=\"" +
         fixed(h, 0) + "\" viewBox=\"0 0 " + fixed(w, 0) + " " + fixed(h, 0) +
         "\" font-family=\"sans-serif\" font-size=\"12\">\n"
         "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
         "<text x=\"" + fixed(w / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" +
         escape(title) + "</text>\n";
}

std::size_t column(const Table& t, std::string_view name) {
  const auto it = std::find(t.columns.begin(), t.columns.end(), name);
  if (it == t.columns.end()) throw DataError("table lacks column '" + std::string(name) + "'");
  return static_cast<std::size_t>(it - t.columns.begin());
}

}  // namespace

std::string density_svg(const std::vector<Series>& series, std::string_view title,
                        std::string_view x_label) {
  if (series.empty()) throw DataError("density: empty selection");
  std::vector<KernelDensity> kdes;
  double lo = INFINITY;
  double hi = -INFINITY;
  for (const auto& s : series) {
    if (s.values.size() < 2) throw DataError("density: series '" + s.label + "' has fewer than two values");
    kdes.emplace_back(s.values);
    const auto [mn, mx] = std::minmax_element(s.values.begin(), s.values.end());
    lo = std::min(lo, *mn - 4.0 * kdes.back().bandwidth());
    hi = std::max(hi, *mx + 4.0 * kdes.back().bandwidth());
  }
  const auto grid = KernelDensity::grid(lo, hi, kGridPoints);
  std::vector<std::vector<double>> dens;
  double ymax = 0.0;
  for (const auto& k : kdes) {
    dens.push_back(k.evaluate(grid));
    ymax = std::max(ymax, *std::max_element(dens.back().begin(), dens.back().end()));
  }
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  const auto px = [&](double x) { return kLeft + (x - lo) / (hi - lo) * pw; };
  const auto py = [&](double y) { return kTop + ph - y / ymax * ph; };

  std::string svg = open_svg(kWidth, kHeight, title);
  svg += "<rect x=\"" + fixed(kLeft) + "\" y=\"" + fixed(kTop) + "\" width=\"" + fixed(pw) +
         "\" height=\"" + fixed(ph) + "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double x = lo + (hi - lo) * i / 4.0;
    svg += "<text x=\"" + fixed(px(x)) + "\" y=\"" + fixed(kTop + ph + 18) +
           "\" text-anchor=\"middle\">" + fixed(x, 3) + "</text>\n";
    const double y = ymax * i / 4.0;
    svg += "<text x=\"" + fixed(kLeft - 6) + "\" y=\"" + fixed(py(y) + 4) +
           "\" text-anchor=\"end\">" + fixed(y, 1) + "</text>\n";
  }
  svg += "<text x=\"" + fixed(kLeft + pw / 2) + "\" y=\"" + fixed(kHeight - 15) +
         "\" text-anchor=\"middle\">" + escape(x_label) + "</text>\n";
  svg += "<text x=\"18\" y=\"" + fixed(kTop + ph / 2) +
         "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " + fixed(kTop + ph / 2) +
         ")\">density</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* colour = kPalette[s % std::size(kPalette)];
    svg += "<polyline fill=\"none\" stroke=\"" + std::string(colour) +
           "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < grid.size(); ++i) {
      svg += (i ? " " : "") + fixed(px(grid[i])) + "," + fixed(py(dens[s][i]));
    }
    svg += "\"/>\n";
    const double ly = kTop + 10 + 18.0 * static_cast<double>(s);
    svg += "<line x1=\"" + fixed(kWidth - kRight + 12) + "\" y1=\"" + fixed(ly) + "\" x2=\"" +
           fixed(kWidth - kRight + 32) + "\" y2=\"" + fixed(ly) + "\" stroke=\"" + colour +
           "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + fixed(kWidth - kRight + 38) + "\" y=\"" + fixed(ly + 4) + "\">" +
           escape(series[s].label) + " (n=" + std::to_string(series[s].values.size()) +
           ")</text>\n";
  }
  return svg + "</svg>\n";
}

std::string winprob_svg(const Table& winprob) {
  if (winprob.rows.empty()) throw DataError("winprob: empty selection");
  const auto c_method = column(winprob, "method");
  const auto c_p = column(winprob, "win_probability");
  const auto c_metric = column(winprob, "metric");
  const auto c_k = column(winprob, "k");
  const double pw = kWidth - kLeft - 40.0;
  const double ph = kHeight - kTop - kBottom;
  const double slot = pw / static_cast<double>(winprob.rows.size());
  std::string svg = open_svg(kWidth, kHeight,
                             "Win probability (" + winprob.rows.front()[c_metric] + ", k = " +
                                 winprob.rows.front()[c_k] + ")");
  for (int i = 0; i <= 4; ++i) {
    const double y = kTop + ph - ph * i / 4.0;
    svg += "<line x1=\"" + fixed(kLeft) + "\" y1=\"" + fixed(y) + "\" x2=\"" + fixed(kLeft + pw) +
           "\" y2=\"" + fixed(y) + "\" stroke=\"#dddddd\"/>\n";
    svg += "<text x=\"" + fixed(kLeft - 6) + "\" y=\"" + fixed(y + 4) + "\" text-anchor=\"end\">" +
           fixed(i / 4.0) + "</text>\n";
  }
  for (std::size_t r = 0; r < winprob.rows.size(); ++r) {
    const auto& row = winprob.rows[r];
    const double p = std::stod(row[c_p]);
    const double h = p * ph;
    const double x = kLeft + slot * static_cast<double>(r) + slot * 0.15;
    svg += "<rect class=\"bar\" data-method=\"" + escape(row[c_method]) + "\" data-value=\"" +
           row[c_p] + "\" x=\"" + fixed(x) + "\" y=\"" + fixed(kTop + ph - h) + "\" width=\"" +
           fixed(slot * 0.7) + "\" height=\"" + fixed(h) + "\" fill=\"" +
           kPalette[r % std::size(kPalette)] + "\"/>\n";
    svg += "<text x=\"" + fixed(x + slot * 0.35) + "\" y=\"" + fixed(kTop + ph - h - 4) +
           "\" text-anchor=\"middle\">" + fixed(p, 3) + "</text>\n";
    svg += "<text x=\"" + fixed(x + slot * 0.35) + "\" y=\"" + fixed(kTop + ph + 18) +
           "\" text-anchor=\"middle\">" + escape(row[c_method]) + "</text>\n";
  }
  svg += "<line x1=\"" + fixed(kLeft) + "\" y1=\"" + fixed(kTop + ph) + "\" x2=\"" +
         fixed(kLeft + pw) + "\" y2=\"" + fixed(kTop + ph) + "\" stroke=\"black\"/>\n";
  return svg + "</svg>\n";
}

std::string convergence_svg(const Table& convergence) {
  if (convergence.rows.empty()) throw DataError("convergence: empty selection");
  const auto c_a = column(convergence, "method_a");
  const auto c_b = column(convergence, "method_b");
  const auto c_n = column(convergence, "n_required");
  const auto c_pool = column(convergence, "pool_size");
  std::vector<std::string> methods;
  std::map<std::pair<std::string, std::string>, std::string> cells;
  for (const auto& row : convergence.rows) {
    for (const auto* m : {&row[c_a], &row[c_b]}) {
      if (std::find(methods.begin(), methods.end(), *m) == methods.end()) methods.push_back(*m);
    }
    cells[{row[c_a], row[c_b]}] = row[c_n];
    cells[{row[c_b], row[c_a]}] = row[c_n];
  }
  const double pool_size = std::max(2.0, std::stod(convergence.rows.front()[c_pool]));
  const double cell = 70.0;
  const double left = 110.0;
  const double top = 60.0;
  const double n = static_cast<double>(methods.size());
  std::string svg = open_svg(left + cell * n + 30.0, top + cell * n + 40.0,
                             "Trials until Welch p < alpha");
  for (std::size_t i = 0; i < methods.size(); ++i) {
    svg += "<text x=\"" + fixed(left + cell * (i + 0.5)) + "\" y=\"" + fixed(top - 8) +
           "\" text-anchor=\"middle\">" + escape(methods[i]) + "</text>\n";
    svg += "<text x=\"" + fixed(left - 8) + "\" y=\"" + fixed(top + cell * (i + 0.5) + 4) +
           "\" text-anchor=\"end\">" + escape(methods[i]) + "</text>\n";
    for (std::size_t j = 0; j < methods.size(); ++j) {
      const auto it = cells.find({methods[i], methods[j]});
      const std::string value = it == cells.end() ? "" : it->second;
      std::string fill = "#bbbbbb";
      if (!value.empty() && value != "NOT-REACHED") {
        // Few trials needed -> dark, many -> light.
        const double f = std::log10(std::stod(value)) / std::log10(pool_size);
        const int shade = static_cast<int>(std::lround(40.0 + 200.0 * std::clamp(f, 0.0, 1.0)));
        char buf[16];
        std::snprintf(buf, sizeof buf, "#%02x%02xff", shade, shade);
        fill = buf;
      }
      const double x = left + cell * static_cast<double>(j);
      const double y = top + cell * static_cast<double>(i);
      svg += "<rect x=\"" + fixed(x) + "\" y=\"" + fixed(y) + "\" width=\"" + fixed(cell) +
             "\" height=\"" + fixed(cell) + "\" fill=\"" + fill + "\" stroke=\"white\"/>\n";
      svg += "<text x=\"" + fixed(x + cell / 2) + "\" y=\"" + fixed(y + cell / 2 + 4) +
             "\" text-anchor=\"middle\" font-size=\"10\">" + escape(value) + "</text>\n";
    }
  }
  return svg + "</svg>\n";
}

}  // namespace osim
