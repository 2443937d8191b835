#include "wassim/wim.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace wassim {

namespace {

constexpr double kPi = 3.14159265358979323846;

double log_sum_exp2(double a, double b) {
  const double m = std::max(a, b);
  if (!std::isfinite(m)) return m;
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

/// Seeds for mixture integrands: component means and inter-mean midpoints.
std::vector<double> mixture_seeds(const MixtureModel& model) {
  std::vector<double> seeds;
  const Vector& mu = model.means();
  for (int i = 0; i < mu.size(); ++i) {
    seeds.push_back(mu(i));
    if (i + 1 < mu.size()) seeds.push_back(0.5 * (mu(i) + mu(i + 1)));
  }
  return seeds;
}

double log_cdf_diff(const MixtureModel& model, int i, double x) {
  const double diff = component_cdf_diff(model, i, i + 1, x);
  return diff > 0.0 ? std::log(diff) : -std::numeric_limits<double>::infinity();
}

}  // namespace

std::string provenance_name(Provenance p) {
  switch (p) {
    case Provenance::NumericFisher: return "numeric_fisher";
    case Provenance::NumericWasserstein: return "numeric_wasserstein";
    case Provenance::FisherLimit: return "fisher_limit";
    case Provenance::WassersteinLimit: return "wasserstein_limit";
    case Provenance::SecondOrderLimit: return "second_order_limit";
    case Provenance::InhomogeneousLimit: return "inhomogeneous_limit";
  }
  return "unknown";
}

Provenance provenance_from_name(const std::string& name) {
  if (name == "numeric_fisher") return Provenance::NumericFisher;
  if (name == "numeric_wasserstein") return Provenance::NumericWasserstein;
  if (name == "fisher_limit") return Provenance::FisherLimit;
  if (name == "wasserstein_limit") return Provenance::WassersteinLimit;
  if (name == "second_order_limit") return Provenance::SecondOrderLimit;
  if (name == "inhomogeneous_limit") return Provenance::InhomogeneousLimit;
  throw InvalidModel("unknown provenance: " + name);
}

LogScaledValue MetricMatrix::log_entry(int i, int j) const {
  LogScaledValue v = LogScaledValue::from_value(entries(i, j));
  if (log_scale) v.log_magnitude += *log_scale;
  return v;
}

void InhomogeneousSpec::validate() const {
  const int n = static_cast<int>(scale_factors.size());
  if (gaps.size() != n - 1) throw InvalidModel("inhomogeneous spec: gaps must have N-1 entries");
  for (int i = 0; i < n - 1; ++i) {
    const double r = gaps(i) / (scale_factors(i) + scale_factors(i + 1));
    if (std::abs(r - reduced_gap) > 1e-12 * std::abs(reduced_gap))
      throw MatchingViolation("matching condition d_i/(s_i + s_{i+1}) = d fails at gap " +
                                  std::to_string(i),
                              i);
  }
}

// --- numeric matrices -----------------------------------------------------

MetricMatrix fisher_matrix_numeric(const MixtureModel& model, const QuadratureSpec& spec) {
  const int n = model.components();
  if (n < 2) throw InvalidModel("fisher_matrix_numeric: need at least 2 components");
  const auto [a, b] = model.support_interval(spec.truncation_radius);
  const std::vector<double> seeds = mixture_seeds(model);

  auto log_rho = [&model](int i, double x) {
    return component_log_pdf(model.family(), x, model.means()(i), model.scales()(i));
  };

  MetricMatrix out;
  out.provenance = Provenance::NumericFisher;
  out.entries = Matrix::Zero(n - 1, n - 1);
  for (int i = 0; i < n - 1; ++i) {
    for (int j = i; j < n - 1; ++j) {
      auto f = [&](double x) {
        const double lt = mixture_log_pdf(model, x);
        // (rho_{i+1} - rho_i)(rho_{j+1} - rho_j) / rho_theta, term by term in
        // log domain: each ratio is bounded by 1/min_p.
        const double t1 = std::exp(log_rho(i + 1, x) + log_rho(j + 1, x) - lt);
        const double t2 = std::exp(log_rho(i + 1, x) + log_rho(j, x) - lt);
        const double t3 = std::exp(log_rho(i, x) + log_rho(j + 1, x) - lt);
        const double t4 = std::exp(log_rho(i, x) + log_rho(j, x) - lt);
        return t1 - t2 - t3 + t4;
      };
      try {
        out.entries(i, j) = integrate(f, a, b, spec, seeds);
      } catch (const NonConvergent& e) {
        throw NonConvergent("fisher entry (" + std::to_string(i) + "," + std::to_string(j) +
                                "): " + e.what(),
                            e.best_estimate, e.error_bound);
      }
      out.entries(j, i) = out.entries(i, j);
    }
  }
  return out;
}

MetricMatrix wasserstein_matrix_numeric(const MixtureModel& model, const QuadratureSpec& spec) {
  const int n = model.components();
  if (n < 2) throw InvalidModel("wasserstein_matrix_numeric: need at least 2 components");
  const auto [a, b] = model.support_interval(spec.truncation_radius);
  const std::vector<double> seeds = mixture_seeds(model);

  std::vector<std::vector<LogScaledValue>> log_entries(n - 1,
                                                       std::vector<LogScaledValue>(n - 1));
  double max_log = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n - 1; ++i) {
    for (int j = i; j < n - 1; ++j) {
      auto log_f = [&](double x) {
        return log_cdf_diff(model, i, x) + log_cdf_diff(model, j, x) -
               mixture_log_pdf(model, x);
      };
      LogScaledValue v;
      try {
        v = integrate_log_scaled(log_f, a, b, spec, seeds);
      } catch (const NonConvergent& e) {
        throw NonConvergent("wasserstein entry (" + std::to_string(i) + "," +
                                std::to_string(j) + "): " + e.what(),
                            e.best_estimate, e.error_bound);
      }
      log_entries[i][j] = v;
      log_entries[j][i] = v;
      if (v.sign != 0) max_log = std::max(max_log, v.log_magnitude);
    }
  }

  MetricMatrix out;
  out.provenance = Provenance::NumericWasserstein;
  out.log_scale = std::isfinite(max_log) ? max_log : 0.0;
  out.entries = Matrix::Zero(n - 1, n - 1);
  for (int i = 0; i < n - 1; ++i)
    for (int j = 0; j < n - 1; ++j)
      if (log_entries[i][j].sign != 0)
        out.entries(i, j) = std::exp(log_entries[i][j].log_magnitude - *out.log_scale);
  return out;
}

LogScaledValue diagonal_reduction_integral(const MixtureModel& model, int i,
                                           const QuadratureSpec& spec) {
  const double mu_lo = model.means()(i);
  const double mu_hi = model.means()(i + 1);
  auto log_f = [&](double x) {
    const double t1 = std::log(model.weights()[i]) +
                      component_log_pdf(model.family(), x, mu_lo, model.scales()(i));
    const double t2 = std::log(model.weights()[i + 1]) +
                      component_log_pdf(model.family(), x, mu_hi, model.scales()(i + 1));
    return -log_sum_exp2(t1, t2);
  };
  return integrate_log_scaled(log_f, mu_lo, mu_hi, spec, {0.5 * (mu_lo + mu_hi)});
}

// --- closed-form limits ---------------------------------------------------

MetricMatrix fisher_limit(const SimplexPoint& p) {
  const int n = p.size();
  MetricMatrix out;
  out.provenance = Provenance::FisherLimit;
  out.entries = Matrix::Zero(n - 1, n - 1);
  for (int i = 0; i < n - 1; ++i) {
    out.entries(i, i) = 1.0 / p[i] + 1.0 / p[i + 1];
    if (i + 1 < n - 1) {
      out.entries(i, i + 1) = -1.0 / p[i + 1];
      out.entries(i + 1, i) = -1.0 / p[i + 1];
    }
  }
  return out;
}

MetricMatrix wasserstein_limit(const SimplexPoint& p) {
  const int n = p.size();
  MetricMatrix out;
  out.provenance = Provenance::WassersteinLimit;
  out.entries = Matrix::Zero(n - 1, n - 1);
  for (int i = 0; i < n - 1; ++i) out.entries(i, i) = 1.0 / std::sqrt(p[i] * p[i + 1]);
  return out;
}

MetricMatrix second_order_limit(const SimplexPoint& p, double sigma, double d,
                                const QuadratureSpec& spec) {
  if (!(sigma / d < 0.5)) throw InvalidModel("second_order_limit: requires sigma/d < 0.5");
  // The sigma^2 coefficient combines three expansion pieces: the g_2 moment
  // (pi^2/2), the matching-point shift of the exponent (log^2 ratio / 2),
  // and a linear log-ratio pair, (8/pi) g'(1) = 2 against the -2 from the
  // prefactor, which cancels exactly. The diagonal must be even in the log
  // ratio (reversing the component order is an isometry), and quadrature at
  // sigma = 0.01 confirms the remaining quadratic coefficient is 1/2.
  const double gp1 = g_prime_at_1(spec);
  const int n = p.size();
  MetricMatrix out;
  out.provenance = Provenance::SecondOrderLimit;
  out.entries = Matrix::Zero(n - 1, n - 1);
  const double s2 = sigma * sigma / (d * d);
  for (int i = 0; i < n - 1; ++i) {
    const double lr = std::log(p[i] / p[i + 1]);
    const double corr = kPi * kPi / 2.0 + ((8.0 / kPi) * gp1 - 2.0) * lr + 0.5 * lr * lr;
    out.entries(i, i) = (1.0 + corr * s2) / std::sqrt(p[i] * p[i + 1]);
  }
  return out;
}

MetricMatrix inhomogeneous_limit(const SimplexPoint& p, const InhomogeneousSpec& ispec,
                                 const QuadratureSpec& spec) {
  ispec.validate();
  const int n = p.size();
  if (ispec.scale_factors.size() != n)
    throw InvalidModel("inhomogeneous_limit: scale factors must have N entries");
  MetricMatrix out;
  out.provenance = Provenance::InhomogeneousLimit;
  out.entries = Matrix::Zero(n - 1, n - 1);
  for (int i = 0; i < n - 1; ++i) {
    const double si = ispec.scale_factors(i);
    const double sn = ispec.scale_factors(i + 1);
    const double wn = sn / (si + sn);
    const double wi = si / (si + sn);
    out.entries(i, i) = g_integral(sn / si, spec) * std::pow(sn / p[i + 1], wn) *
                        std::pow(si / p[i], wi) * si;
  }
  return out;
}

LogScaledValue scaling_factor(ComponentFamily family, double sigma, double d,
                              ScalingVariant variant) {
  if (!(sigma > 0.0 && d > 0.0)) throw InvalidScale("scaling_factor: sigma, d must be positive");
  if (family == ComponentFamily::Laplace) {
    // K = pi sigma^2 e^{d / 2 sigma}
    return LogScaledValue::from_log(std::log(kPi) + 2.0 * std::log(sigma) + d / (2.0 * sigma));
  }
  if (variant == ScalingVariant::Homogeneous) {
    // K = sqrt(2 pi^3) (sigma^3 / d) e^{d^2 / 8 sigma^2}
    return LogScaledValue::from_log(0.5 * std::log(2.0 * kPi * kPi * kPi) +
                                    3.0 * std::log(sigma) - std::log(d) +
                                    d * d / (8.0 * sigma * sigma));
  }
  // K_in = sqrt(2 pi) (sigma^3 / d) e^{d^2 / 2 sigma^2}
  return LogScaledValue::from_log(0.5 * std::log(2.0 * kPi) + 3.0 * std::log(sigma) -
                                  std::log(d) + d * d / (2.0 * sigma * sigma));
}

// --- asymptotic machinery -------------------------------------------------

double g_integral(double k, const QuadratureSpec& spec) {
  if (!(k > 0.0)) throw Error("g_integral: k must be positive");
  const double a = (k + 1.0) / k;
  const double cutoff = 1e6;
  const double body = integrate([a](double y) { return 1.0 / (1.0 + std::pow(y, a)); }, 0.0,
                                cutoff, spec, {1.0, 10.0, 100.0, 1e3, 1e4, 1e5});
  // Algebraic tail: int_Y^inf dy/(1+y^a) = sum_m (-1)^m Y^{1-(m+1)a}/((m+1)a - 1).
  double tail = 0.0;
  for (int m = 0; m < 64; ++m) {
    const double e = (m + 1) * a - 1.0;
    const double term = std::pow(cutoff, -e) / e;
    tail += (m % 2 == 0 ? term : -term);
    if (term < 1e-18) break;
  }
  return body + tail;
}

double g_closed_form(double k) {
  const double a = (k + 1.0) / k;
  return kPi / (a * std::sin(kPi / a));
}

double g2_integral(double k, const QuadratureSpec& spec) {
  if (!(k > 0.0)) throw Error("g2_integral: k must be positive");
  const double a = (k + 1.0) / k;
  // Substitution v = e^u tames the log^2 singularity at 0; the integrand
  // becomes u^2 e^u / (1 + e^{a u}) with exponential decay on both sides.
  const double lo = -50.0;
  double hi = 60.0 * std::max(1.0, k);
  while ((a - 1.0) * hi - 2.0 * std::log(hi) < 45.0) hi *= 1.5;
  auto f = [a](double u) {
    const double m = std::max(0.0, a * u);
    return u * u * std::exp(u - m) / (std::exp(-m) + std::exp(a * u - m));
  };
  return integrate(f, lo, hi, spec, {-1.0, 0.0, 1.0});
}

double g_prime_at_1(const QuadratureSpec& spec) {
  QuadratureSpec tight = spec;
  tight.rel_tol = std::min(spec.rel_tol, 1e-13);
  tight.abs_tol = std::min(spec.abs_tol, 1e-15);
  const double h = 1e-5;
  auto central = [&](double step) {
    return (g_integral(1.0 + step, tight) - g_integral(1.0 - step, tight)) / (2.0 * step);
  };
  const double d1 = central(h);
  const double d2 = central(2.0 * h);
  return (4.0 * d1 - d2) / 3.0;  // Richardson: kills the O(h^2) term
}

double matching_point(ComponentFamily family, double p_i, double p_next, double k,
                      double sigma, double d) {
  if (!(p_i > 0.0 && p_next > 0.0 && k > 0.0 && sigma > 0.0 && d > 0.0))
    throw Error("matching_point: inputs must be positive");
  double l;
  if (family == ComponentFamily::Laplace) {
    l = d / (k + 1.0) + k * sigma / (k + 1.0) * std::log(k * p_i / p_next);
  } else {
    // p_i rho(l; sigma) = p_next rho(d - l; k sigma) in log form; the
    // difference is strictly decreasing in l, so bisection is safe.
    auto balance = [&](double x) {
      const double lhs = std::log(p_i) - x * x / (2.0 * sigma * sigma);
      const double rhs = std::log(p_next / k) -
                         (d - x) * (d - x) / (2.0 * k * k * sigma * sigma);
      return lhs - rhs;
    };
    double lo = 1e-12 * d, hi = d * (1.0 - 1e-12);
    if (!(balance(lo) > 0.0) || !(balance(hi) < 0.0))
      throw DegenerateMatching("matching point leaves (0, d); weights too asymmetric");
    for (int iter = 0; iter < 200; ++iter) {
      const double mid = 0.5 * (lo + hi);
      (balance(mid) > 0.0 ? lo : hi) = mid;
    }
    l = 0.5 * (lo + hi);
  }
  if (!(l > 0.05 * d && l < 0.95 * d))
    throw DegenerateMatching("matching point too close to an endpoint");
  return l;
}

double delta2_asymptotic_ratio(ComponentFamily family, double p_i, double p_next, double k,
                               double sigma, double d, const QuadratureSpec& spec) {
  const double l = matching_point(family, p_i, p_next, k, sigma, d);
  auto log_f = [&](double x) {
    const double t1 = std::log(p_i) + component_log_pdf(family, x, 0.0, sigma);
    const double t2 = std::log(p_next) + component_log_pdf(family, d - x, 0.0, k * sigma);
    return -log_sum_exp2(t1, t2);
  };
  const LogScaledValue num = integrate_log_scaled(log_f, 0.0, d, spec, {l, 0.5 * d});
  double log_den;
  if (family == ComponentFamily::Gaussian) {
    log_den = 0.5 * std::log(2.0 * kPi) + 3.0 * std::log(sigma) - std::log(p_i * l) +
              0.5 * (l / sigma) * (l / sigma);
  } else {
    log_den = std::log(2.0 * sigma * sigma / p_i) + l / sigma;
  }
  return std::exp(num.log_magnitude - log_den);
}

double perturbation_lemma_check(double k1, double k2, double t, const QuadratureSpec& spec) {
  if (!(t >= 5.0)) throw Error("perturbation_lemma_check: requires t >= 5");
  const double radius = 1.5 * 50.0 * std::max({1.0, k1, k2}) / t + 1.0;
  auto inv_sum = [](double e1, double e2) {
    const double m = std::max(e1, e2);
    return std::exp(-m) / (std::exp(e1 - m) + std::exp(e2 - m));
  };
  auto f_full = [&](double u) {
    return inv_sum(-u * u / 2.0 - t * u, t * u / k1 - (u / k2) * (u / k2) / 2.0);
  };
  auto f_linear = [&](double u) { return inv_sum(-u * t, t * u / k1); };
  QuadratureSpec tight = spec;
  tight.rel_tol = std::min(spec.rel_tol, 1e-12);
  const double i_full = integrate(f_full, -radius, radius, tight, {0.0});
  const double i_linear = integrate(f_linear, -radius, radius, tight, {0.0});
  const double d_t = i_full - i_linear;
  return d_t * 4.0 * t * t * t / (1.0 + 1.0 / (k2 * k2));
}

// --- extended model -------------------------------------------------------

ExtendedMetric extended_limit(const SimplexPoint& p, const Vector& means, double sigma,
                              ComponentFamily family) {
  if (family != ComponentFamily::Gaussian)
    throw InvalidModel("extended_limit: homogeneous Gaussian case only");
  const int n = p.size();
  if (means.size() != n) throw InvalidModel("extended_limit: means must have N entries");
  const double d = means(1) - means(0);
  for (int i = 0; i + 1 < n; ++i) {
    if (std::abs((means(i + 1) - means(i)) - d) > 1e-9 * std::abs(d))
      throw InvalidModel("extended_limit: homogeneous means required");
  }
  ExtendedMetric out;
  out.K = scaling_factor(family, sigma, d, ScalingVariant::Homogeneous);
  out.block_theta_theta = wasserstein_limit(p).entries;
  out.block_mu_mu = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) out.block_mu_mu(i, i) = p[i];
  out.block_theta_mu = Matrix::Zero(n - 1, n);
  for (int i = 0; i < n - 1; ++i) {
    const double half_gap = 0.5 * (means(i + 1) - means(i));
    out.block_theta_mu(i, i) = half_gap;
    out.block_theta_mu(i, i + 1) = half_gap;
  }
  return out;
}

Matrix rescaled_block_matrix(const ExtendedMetric& metric) {
  const int m = static_cast<int>(metric.block_theta_theta.rows());
  const int n = static_cast<int>(metric.block_mu_mu.rows());
  Matrix full = Matrix::Zero(m + n, m + n);
  full.topLeftCorner(m, m) = metric.block_theta_theta;
  const double log_k = metric.K.sign == 0 ? 0.0 : metric.K.log_magnitude;
  const double inv_sqrt_k = log_k > 1400.0 ? 0.0 : std::exp(-0.5 * log_k);
  full.topRightCorner(m, n) = metric.block_theta_mu * inv_sqrt_k;
  full.bottomLeftCorner(n, m) = full.topRightCorner(m, n).transpose();
  full.bottomRightCorner(n, n) = metric.block_mu_mu;
  return full;
}

Matrix wasserstein_mu_matrix_numeric(const MixtureModel& model, const QuadratureSpec& spec) {
  const int n = model.components();
  const auto [a, b] = model.support_interval(spec.truncation_radius);
  const std::vector<double> seeds = mixture_seeds(model);
  auto log_rho = [&model](int i, double x) {
    return component_log_pdf(model.family(), x, model.means()(i), model.scales()(i));
  };
  Matrix gw = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const double lp = std::log(model.weights()[i]) + std::log(model.weights()[j]);
      auto f = [&](double x) {
        return std::exp(lp + log_rho(i, x) + log_rho(j, x) - mixture_log_pdf(model, x));
      };
      gw(i, j) = integrate(f, a, b, spec, seeds);
      gw(j, i) = gw(i, j);
    }
  }
  return gw;
}

ExtendedMetric extended_metric_numeric(const MixtureModel& model, const QuadratureSpec& spec) {
  const int n = model.components();
  const auto [a, b] = model.support_interval(spec.truncation_radius);
  const std::vector<double> seeds = mixture_seeds(model);
  auto log_rho = [&model](int i, double x) {
    return component_log_pdf(model.family(), x, model.means()(i), model.scales()(i));
  };

  MetricMatrix theta_block = wasserstein_matrix_numeric(model, spec);
  ExtendedMetric out;
  out.block_theta_theta = theta_block.entries;
  out.K = LogScaledValue::from_log(theta_block.log_scale.value_or(0.0));
  out.block_mu_mu = wasserstein_mu_matrix_numeric(model, spec);
  out.block_theta_mu = Matrix::Zero(n - 1, n);
  for (int i = 0; i < n - 1; ++i) {
    for (int j = 0; j < n; ++j) {
      const double lw = std::log(model.weights()[j]);
      auto f = [&](double x) {
        return std::exp(log_cdf_diff(model, i, x) + lw + log_rho(j, x) -
                        mixture_log_pdf(model, x));
      };
      out.block_theta_mu(i, j) = integrate(f, a, b, spec, seeds);
    }
  }
  return out;
}

Matrix wig_sigma_matrix(const SimplexPoint& p) {
  const int n = p.size();
  Matrix sigma = Matrix::Zero(n - 1, n);
  for (int i = 0; i < n - 1; ++i) {
    sigma(i, i) = -1.0 / p[i];
    sigma(i, i + 1) = 1.0 / p[i + 1];
  }
  return sigma;
}

double wig_relation_check(const MixtureModel& model, const QuadratureSpec& spec) {
  const Matrix gf = fisher_matrix_numeric(model, spec).entries;
  const Matrix gw = wasserstein_mu_matrix_numeric(model, spec);
  const Matrix sigma = wig_sigma_matrix(model.weights());
  return (gf - sigma * gw * sigma.transpose()).norm() / gf.norm();
}

}  // namespace wassim
