#include <cstdio>

#include <doctest.h>

#include "wassim/io.hpp"

using namespace wassim;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<int>(xs.size()));
  int i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

}  // namespace

TEST_CASE("full-precision formatting round trips") {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, -2.5}) {
    CHECK(std::stod(format_full(x)) == x);
  }
}

TEST_CASE("model JSON round trip") {
  const MixtureModel model(ComponentFamily::Laplace, vec({-1.0, 0.25, 2.0}),
                           vec({0.5, 0.3, 0.7}), SimplexPoint(vec({0.2, 0.5, 0.3})));
  const MixtureModel back = model_from_json(model_to_json(model));
  CHECK(back.family() == ComponentFamily::Laplace);
  for (int i = 0; i < 3; ++i) {
    CHECK(back.means()(i) == model.means()(i));
    CHECK(back.scales()(i) == model.scales()(i));
    CHECK(back.weights()[i] == model.weights()[i]);
  }

  CHECK_THROWS_AS(model_from_json("not json"), InvalidModel);
  CHECK_THROWS_AS(model_from_json(R"({"family":"gaussian","means":[0,1]})"), InvalidModel);
  CHECK_THROWS_AS(
      model_from_json(
          R"({"family":"cauchy","means":[0,1],"scales":[1,1],"weights":[0.5,0.5]})"),
      InvalidModel);
}

TEST_CASE("metric JSON round trip keeps the log scale") {
  MetricMatrix m;
  m.entries = Matrix::Identity(2, 2) * 1.75;
  m.entries(0, 1) = m.entries(1, 0) = 1e-9;
  m.provenance = Provenance::NumericWasserstein;
  m.log_scale = 312.5;
  const MetricMatrix back = metric_from_json(metric_to_json(m));
  CHECK(back.provenance == Provenance::NumericWasserstein);
  CHECK(back.entries == m.entries);
  REQUIRE(back.log_scale.has_value());
  CHECK(*back.log_scale == 312.5);

  MetricMatrix plain;
  plain.entries = Matrix::Identity(3, 3);
  plain.provenance = Provenance::FisherLimit;
  CHECK(!metric_from_json(metric_to_json(plain)).log_scale.has_value());

  CHECK_THROWS_AS(metric_from_json(R"({"provenance":"fisher_limit","n":2,"entries":[[1,0]]})"),
                  InvalidModel);
}

TEST_CASE("csv output") {
  CsvTable t;
  t.columns = {"t", "p_1", "p_2"};
  t.rows = {{0.0, 0.1, 0.9}, {0.5, 1.0 / 3.0, 2.0 / 3.0}};
  const std::string body = csv_to_string(t, false);
  CHECK(body.substr(0, 9) == "t,p_1,p_2");
  // Values survive a parse at full precision.
  const auto pos = body.find("0.33333333333333331");
  CHECK(pos != std::string::npos);
  // Repeated rendering without timestamps is byte-identical.
  CHECK(csv_to_string(t, false) == body);

  const std::string stamped = csv_to_string(t, true);
  CHECK(stamped.substr(0, 12) == "# generated ");
  CHECK(stamped.find(body) != std::string::npos);

  CsvTable ragged = t;
  ragged.rows.push_back({1.0});
  CHECK_THROWS_AS(csv_to_string(ragged, false), InvalidField);
}

TEST_CASE("text file round trip") {
  const std::string path = "io_test_tmp.txt";
  write_text_file(path, "line one\nline two\n");
  CHECK(read_text_file(path) == "line one\nline two\n");
  std::remove(path.c_str());
  CHECK_THROWS_AS(read_text_file("definitely/not/there.txt"), Error);
}

TEST_CASE("svg charts are well formed") {
  const std::vector<double> x = {0.0, 1.0, 2.0, 3.0};
  const std::vector<std::vector<double>> series = {{1.0, 2.0, 1.5, 0.5},
                                                   {0.0, 0.1, 0.2, 0.3}};
  const std::string svg = svg_line_chart(x, series, {"a", "b"}, "demo");
  CHECK(svg.find("<svg") == 0);
  CHECK(svg.rfind("</svg>\n") == svg.size() - 7);
  CHECK(svg.find("polyline") != std::string::npos);
  CHECK(svg.find(">demo<") != std::string::npos);
  CHECK_THROWS_AS(svg_line_chart({}, series, {}, "x"), InvalidField);
  CHECK_THROWS_AS(svg_line_chart(x, {{1.0}}, {}, "x"), InvalidField);

  Matrix m(2, 3);
  m << 1, 2, 3, 4, 5, 6;
  const std::string heat = svg_heatmap(m, "grid");
  CHECK(heat.find("<svg") == 0);
  CHECK(heat.find("rgb(255,255,255)") != std::string::npos);
  CHECK(heat.find("rgb(0,0,0)") != std::string::npos);
}
