#ifndef WASSIM_IO_HPP
#define WASSIM_IO_HPP

#include <string>
#include <vector>

#include "wassim/mixtures.hpp"
#include "wassim/pde.hpp"
#include "wassim/wim.hpp"

namespace wassim {

/// Round-trip decimal formatting (17 significant digits).
std::string format_full(double x);

std::string model_to_json(const MixtureModel& model);
MixtureModel model_from_json(const std::string& text);

std::string metric_to_json(const MetricMatrix& m);
MetricMatrix metric_from_json(const std::string& text);

/// CSV table with fixed column order. The header comment line carries a
/// timestamp unless suppressed, so reruns stay byte-identical under
/// `timestamp = false`.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

std::string csv_to_string(const CsvTable& table, bool timestamp);
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

/// Minimal static SVG line chart; one polyline per series.
std::string svg_line_chart(const std::vector<double>& x,
                           const std::vector<std::vector<double>>& series,
                           const std::vector<std::string>& labels, const std::string& title);

/// Grayscale heatmap of a matrix, row 0 at the top.
std::string svg_heatmap(const Matrix& values, const std::string& title);

}  // namespace wassim

#endif  // WASSIM_IO_HPP
