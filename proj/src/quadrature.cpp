#include "wassim/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace wassim {

namespace {

// 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1].
constexpr int kKronrod = 15;
constexpr double kNodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0};
constexpr double kWeightsK[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
// Gauss weights for the odd-indexed Kronrod nodes (plus the center).
constexpr double kWeightsG[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct Panel {
  double a, b;
  double integral;
  double error;
};

Panel evaluate_panel(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fv[kKronrod];
  for (int i = 0; i < 7; ++i) {
    fv[i] = f(c - h * kNodes[i]);
    fv[14 - i] = f(c + h * kNodes[i]);
  }
  fv[7] = f(c);

  double resk = kWeightsK[7] * fv[7];
  double resg = kWeightsG[3] * fv[7];
  for (int i = 0; i < 7; ++i) {
    resk += kWeightsK[i] * (fv[i] + fv[14 - i]);
    if (i % 2 == 1) resg += kWeightsG[i / 2] * (fv[i] + fv[14 - i]);
  }
  Panel p;
  p.a = a;
  p.b = b;
  p.integral = resk * h;
  const double diff = std::abs(resk - resg) * h;
  // Sharpened error estimate in the quadpack style; never below the raw
  // rule difference scaled to roundoff.
  p.error = diff;
  if (diff > 0.0) {
    const double scaled = std::pow(200.0 * diff, 1.5);
    if (scaled < diff) p.error = scaled;
  }
  return p;
}

std::vector<double> initial_boundaries(double a, double b, const std::vector<double>& seeds) {
  std::vector<double> pts;
  pts.push_back(a);
  for (double s : seeds) {
    if (!(s > a && s < b)) continue;
    pts.push_back(s);
    // Geometric ladder of panels around the seed: a feature of width down to
    // ~1e-8 of the interval lands on quadrature nodes of a comparable panel,
    // so its error estimate triggers refinement instead of silently reading
    // zero between the nodes.
    for (double frac : {1e-2, 1e-4, 1e-6, 1e-8}) {
      const double off = frac * (b - a);
      if (s - off > a) pts.push_back(s - off);
      if (s + off < b) pts.push_back(s + off);
    }
  }
  pts.push_back(b);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureSpec& spec, const std::vector<double>& seeds) {
  if (!(a < b)) throw Error("integrate: requires a < b");

  std::vector<double> pts = initial_boundaries(a, b, seeds);
  std::vector<Panel> panels;
  panels.reserve(64);
  for (size_t i = 0; i + 1 < pts.size(); ++i)
    panels.push_back(evaluate_panel(f, pts[i], pts[i + 1]));

  auto total = [&panels]() {
    // Fixed left-to-right summation order keeps results bit-stable.
    std::sort(panels.begin(), panels.end(),
              [](const Panel& x, const Panel& y) { return x.a < y.a; });
    double s = 0.0;
    for (const Panel& p : panels) s += p.integral;
    return s;
  };

  while (true) {
    double sum = 0.0, err = 0.0;
    for (const Panel& p : panels) {
      sum += p.integral;
      err += p.error;
    }
    if (err <= std::max(spec.abs_tol, spec.rel_tol * std::abs(sum))) break;
    if (static_cast<int>(panels.size()) >= spec.max_subdivisions)
      throw NonConvergent("integrate: subdivision limit reached", total(), err);

    size_t worst = 0;
    for (size_t i = 1; i < panels.size(); ++i) {
      if (panels[i].error > panels[worst].error ||
          (panels[i].error == panels[worst].error && panels[i].a < panels[worst].a))
        worst = i;
    }
    const Panel w = panels[worst];
    const double mid = 0.5 * (w.a + w.b);
    if (!(w.a < mid && mid < w.b))
      throw NonConvergent("integrate: panel below machine resolution", total(),
                          panels[worst].error);
    panels[worst] = evaluate_panel(f, w.a, mid);
    panels.push_back(evaluate_panel(f, mid, w.b));
  }
  return total();
}

LogScaledValue integrate_log_scaled(const std::function<double(double)>& log_f, double a,
                                    double b, const QuadratureSpec& spec,
                                    const std::vector<double>& seeds) {
  if (!(a < b)) throw Error("integrate_log_scaled: requires a < b");

  // Probe for the maximum of log_f on a seed-refined grid, then sharpen the
  // best bracket by golden-section ascent. The shift only has to land within
  // a few hundred nats of the true peak to keep exp() in range.
  std::vector<double> pts = initial_boundaries(a, b, seeds);
  std::vector<double> probes;
  for (size_t i = 0; i + 1 < pts.size(); ++i) {
    const double lo = pts[i], hi = pts[i + 1];
    for (int j = 0; j <= 16; ++j) probes.push_back(lo + (hi - lo) * j / 16.0);
  }
  size_t best = 0;
  double best_val = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < probes.size(); ++i) {
    const double v = log_f(probes[i]);
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  double lo = best > 0 ? probes[best - 1] : probes[best];
  double hi = best + 1 < probes.size() ? probes[best + 1] : probes[best];
  for (int iter = 0; iter < 200 && hi - lo > 1e-14 * (b - a); ++iter) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    const double v1 = log_f(m1), v2 = log_f(m2);
    if (v1 > best_val) best_val = v1;
    if (v2 > best_val) best_val = v2;
    if (v1 < v2)
      lo = m1;
    else
      hi = m2;
  }
  const double shift = best_val;
  if (!std::isfinite(shift)) return LogScaledValue::zero();

  std::vector<double> refined_seeds = seeds;
  refined_seeds.push_back(0.5 * (lo + hi));
  const double scaled = integrate(
      [&log_f, shift](double x) { return std::exp(log_f(x) - shift); }, a, b, spec,
      refined_seeds);
  if (!(scaled > 0.0)) return LogScaledValue::zero();
  return LogScaledValue::from_log(shift + std::log(scaled), 1);
}

}  // namespace wassim
