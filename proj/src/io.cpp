#include "wassim/io.hpp"

#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace wassim {

using nlohmann::json;

std::string format_full(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string model_to_json(const MixtureModel& model) {
  json j;
  j["family"] = family_name(model.family());
  j["means"] = std::vector<double>(model.means().data(),
                                   model.means().data() + model.means().size());
  j["scales"] = std::vector<double>(model.scales().data(),
                                    model.scales().data() + model.scales().size());
  const Vector& w = model.weights().weights();
  j["weights"] = std::vector<double>(w.data(), w.data() + w.size());
  return j.dump(2);
}

MixtureModel model_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidModel(std::string("model JSON parse failure: ") + e.what());
  }
  for (const char* key : {"family", "means", "scales", "weights"}) {
    if (!j.contains(key)) throw InvalidModel(std::string("model JSON missing key: ") + key);
  }
  const auto means = j["means"].get<std::vector<double>>();
  const auto scales = j["scales"].get<std::vector<double>>();
  const auto weights = j["weights"].get<std::vector<double>>();
  Vector mu = Eigen::Map<const Vector>(means.data(), means.size());
  Vector sc = Eigen::Map<const Vector>(scales.data(), scales.size());
  Vector w = Eigen::Map<const Vector>(weights.data(), weights.size());
  return MixtureModel(family_from_name(j["family"].get<std::string>()), std::move(mu),
                      std::move(sc), SimplexPoint(std::move(w)));
}

std::string metric_to_json(const MetricMatrix& m) {
  json j;
  j["provenance"] = provenance_name(m.provenance);
  j["n"] = m.dim();
  json rows = json::array();
  for (int i = 0; i < m.dim(); ++i) {
    json row = json::array();
    for (int k = 0; k < m.dim(); ++k) row.push_back(m.entries(i, k));
    rows.push_back(row);
  }
  j["entries"] = rows;
  if (m.log_scale) j["log_scale"] = *m.log_scale;
  return j.dump(2);
}

MetricMatrix metric_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidModel(std::string("metric JSON parse failure: ") + e.what());
  }
  MetricMatrix m;
  m.provenance = provenance_from_name(j.at("provenance").get<std::string>());
  const int n = j.at("n").get<int>();
  m.entries = Matrix::Zero(n, n);
  const auto& rows = j.at("entries");
  if (static_cast<int>(rows.size()) != n) throw InvalidModel("metric JSON: row count != n");
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(rows[i].size()) != n)
      throw InvalidModel("metric JSON: column count != n");
    for (int k = 0; k < n; ++k) m.entries(i, k) = rows[i][k].get<double>();
  }
  if (j.contains("log_scale")) m.log_scale = j["log_scale"].get<double>();
  return m;
}

std::string csv_to_string(const CsvTable& table, bool timestamp) {
  std::ostringstream out;
  if (timestamp) {
    std::time_t now = std::time(nullptr);
    char stamp[64];
    std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    out << "# generated " << stamp << "\n";
  }
  for (size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out << ",";
    out << table.columns[c];
  }
  out << "\n";
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size())
      throw InvalidField("csv: row width differs from header");
    for (size_t c = 0; c < row.size(); ++c) {
      if (c) out << ",";
      out << format_full(row[c]);
    }
    out << "\n";
  }
  return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path);
  if (!f) throw Error("cannot open for writing: " + path);
  f << content;
  if (!f.good()) throw Error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

namespace {

constexpr int kWidth = 720;
constexpr int kHeight = 480;
constexpr int kMargin = 56;

const char* kPalette[] = {"#1f6fb4", "#d0541f", "#2c8a4b", "#8a2ca0",
                          "#b4a11f", "#1fb4a6", "#70421a", "#5a5a5a"};

double nice_span(double lo, double hi) {
  const double s = hi - lo;
  return s > 0.0 ? s : 1.0;
}

}  // namespace

std::string svg_line_chart(const std::vector<double>& x,
                           const std::vector<std::vector<double>>& series,
                           const std::vector<std::string>& labels, const std::string& title) {
  if (x.empty() || series.empty()) throw InvalidField("svg_line_chart: empty data");
  double x_lo = x.front(), x_hi = x.front();
  for (double v : x) {
    x_lo = std::min(x_lo, v);
    x_hi = std::max(x_hi, v);
  }
  double y_lo = series[0][0], y_hi = series[0][0];
  for (const auto& s : series) {
    if (s.size() != x.size()) throw InvalidField("svg_line_chart: series length mismatch");
    for (double v : s) {
      y_lo = std::min(y_lo, v);
      y_hi = std::max(y_hi, v);
    }
  }
  const double xs = nice_span(x_lo, x_hi), ys = nice_span(y_lo, y_hi);
  auto px = [&](double v) { return kMargin + (v - x_lo) / xs * (kWidth - 2 * kMargin); };
  auto py = [&](double v) {
    return kHeight - kMargin - (v - y_lo) / ys * (kHeight - 2 * kMargin);
  };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
      << title << "</text>\n";
  out << "<line x1=\"" << kMargin << "\" y1=\"" << kHeight - kMargin << "\" x2=\""
      << kWidth - kMargin << "\" y2=\"" << kHeight - kMargin
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << kMargin << "\" y1=\"" << kMargin << "\" x2=\"" << kMargin
      << "\" y2=\"" << kHeight - kMargin << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << kMargin << "\" y=\"" << kHeight - kMargin + 18
      << "\" font-size=\"11\">" << format_full(x_lo) << "</text>\n";
  out << "<text x=\"" << kWidth - kMargin << "\" y=\"" << kHeight - kMargin + 18
      << "\" text-anchor=\"end\" font-size=\"11\">" << format_full(x_hi) << "</text>\n";
  out << "<text x=\"" << kMargin - 4 << "\" y=\"" << kHeight - kMargin
      << "\" text-anchor=\"end\" font-size=\"11\">" << format_full(y_lo) << "</text>\n";
  out << "<text x=\"" << kMargin - 4 << "\" y=\"" << kMargin
      << "\" text-anchor=\"end\" font-size=\"11\">" << format_full(y_hi) << "</text>\n";

  for (size_t s = 0; s < series.size(); ++s) {
    out << "<polyline fill=\"none\" stroke=\"" << kPalette[s % 8]
        << "\" stroke-width=\"1.5\" points=\"";
    for (size_t i = 0; i < x.size(); ++i)
      out << px(x[i]) << "," << py(series[s][i]) << " ";
    out << "\"/>\n";
    if (s < labels.size()) {
      out << "<text x=\"" << kWidth - kMargin - 4 << "\" y=\"" << kMargin + 16 * (s + 1)
          << "\" text-anchor=\"end\" font-size=\"12\" fill=\"" << kPalette[s % 8] << "\">"
          << labels[s] << "</text>\n";
    }
  }
  out << "</svg>\n";
  return out.str();
}

std::string svg_heatmap(const Matrix& values, const std::string& title) {
  const int rows = static_cast<int>(values.rows());
  const int cols = static_cast<int>(values.cols());
  if (rows == 0 || cols == 0) throw InvalidField("svg_heatmap: empty matrix");
  const double lo = values.minCoeff();
  const double hi = values.maxCoeff();
  const double span = nice_span(lo, hi);
  const double cw = static_cast<double>(kWidth - 2 * kMargin) / cols;
  const double ch = static_cast<double>(kHeight - 2 * kMargin) / rows;

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
      << title << "</text>\n";
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      const int level = static_cast<int>(255.0 * (values(i, j) - lo) / span);
      out << "<rect x=\"" << kMargin + j * cw << "\" y=\"" << kMargin + i * ch
          << "\" width=\"" << cw + 0.5 << "\" height=\"" << ch + 0.5 << "\" fill=\"rgb("
          << level << "," << level << "," << level << ")\"/>\n";
    }
  }
  out << "<text x=\"" << kMargin << "\" y=\"" << kHeight - kMargin + 18
      << "\" font-size=\"11\">min " << format_full(lo) << " max " << format_full(hi)
      << "</text>\n";
  out << "</svg>\n";
  return out.str();
}

}  // namespace wassim
