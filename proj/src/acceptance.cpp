#include "wassim/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

#include "wassim/flows.hpp"
#include "wassim/io.hpp"
#include "wassim/pde.hpp"
#include "wassim/wim.hpp"

namespace wassim {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Check {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "FAIL " << what << "; ";
    }
  }
  void note(const std::string& what) { detail << what << "; "; }
};

std::string fmt(double x) { return format_full(x); }

bool log_leq(const LogScaledValue& a, const LogScaledValue& b) {
  const LogScaledValue diff = b - a;
  return diff.sign >= 0;
}

MixtureModel homogeneous_model(const Vector& p, double sigma, double d,
                               ComponentFamily family = ComponentFamily::Gaussian) {
  const int n = static_cast<int>(p.size());
  Vector means(n), scales(n);
  for (int i = 0; i < n; ++i) {
    means(i) = d * i;
    scales(i) = sigma;
  }
  return MixtureModel(family, means, scales, SimplexPoint(p));
}

/// exp(log G_W,ii - log K) for the homogeneous two-component harness.
double scaled_first_diagonal(const MixtureModel& model, const LogScaledValue& k,
                             const QuadratureSpec& spec) {
  const MetricMatrix gw = wasserstein_matrix_numeric(model, spec);
  return (gw.log_entry(0, 0) / k).value();
}

Vector random_simplex(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.1, 1.0);
  Vector p(n);
  for (int i = 0; i < n; ++i) p(i) = unif(rng);
  p /= p.sum();
  return p;
}

// --- criteria -------------------------------------------------------------

void criterion_asymptotic_constants(Check& c) {
  QuadratureSpec spec;
  spec.rel_tol = 1e-12;
  const double g1 = g_integral(1.0, spec);
  c.require(std::abs(g1 - kPi / 2.0) < 1e-10, "g(1) = pi/2: got " + fmt(g1));
  const double g21 = g2_integral(1.0, spec);
  const double g2_ref = kPi * kPi * kPi / 8.0;
  c.require(std::abs(g21 - g2_ref) < 1e-8, "g2(1) = pi^3/8: got " + fmt(g21));
  const double gp1 = g_prime_at_1(spec);
  c.require(std::abs(gp1 - kPi / 4.0) < 1e-7, "g'(1) = pi/4: got " + fmt(gp1));
}

void criterion_gaussian_limit(Check& c) {
  const double d = 1.0;
  Vector p(2);
  p << 0.3, 0.7;
  const double root = std::sqrt(p(0) * p(1));
  const double lr = std::log(p(0) / p(1));
  // The linear log-ratio pieces of the expansion cancel; see
  // second_order_limit for the derivation of the remaining coefficient.
  const double second_order_coeff = kPi * kPi / 2.0 + 0.5 * lr * lr;

  QuadratureSpec spec;
  const std::vector<double> sigmas = {0.1, 0.07, 0.05, 0.03};
  double prev_residual = std::numeric_limits<double>::infinity();
  for (double sigma : sigmas) {
    const MixtureModel model = homogeneous_model(p, sigma, d);
    const LogScaledValue k =
        scaling_factor(ComponentFamily::Gaussian, sigma, d, ScalingVariant::Homogeneous);
    const double v = scaled_first_diagonal(model, k, spec) * root;
    const double residual = std::abs(v - 1.0);
    const double predicted = second_order_coeff * sigma * sigma / (d * d);
    c.note("sigma=" + fmt(sigma) + " residual=" + fmt(residual) +
           " predicted=" + fmt(predicted));
    c.require(residual < prev_residual,
              "residual decreases monotonically at sigma=" + fmt(sigma));
    c.require(std::abs(residual / predicted - 1.0) <= 0.5,
              "residual within 50% of second-order prediction at sigma=" + fmt(sigma));
    if (sigma == 0.05) {
      c.require(std::abs(residual / predicted - 1.0) <= 0.1,
                "residual within 10% of prediction at sigma=0.05");
    }
    prev_residual = residual;
  }
}

void criterion_laplace_limit(Check& c) {
  const double d = 1.0;
  Vector p(2);
  p << 0.3, 0.7;
  const double root = std::sqrt(p(0) * p(1));
  QuadratureSpec spec;
  const double sigma = 0.02;
  const MixtureModel model = homogeneous_model(p, sigma, d, ComponentFamily::Laplace);
  const LogScaledValue k =
      scaling_factor(ComponentFamily::Laplace, sigma, d, ScalingVariant::Homogeneous);
  const double v = scaled_first_diagonal(model, k, spec) * root;
  c.note("scaled diagonal = " + fmt(v));
  c.require(std::abs(v - 1.0) < 0.01, "Laplace residual < 1% at sigma=0.02");
}

void criterion_fisher_limit(Check& c) {
  Vector p(3);
  p << 0.2, 0.5, 0.3;
  QuadratureSpec spec;
  const MixtureModel model = homogeneous_model(p, 0.01, 1.0);
  const MetricMatrix num = fisher_matrix_numeric(model, spec);
  const MetricMatrix lim = fisher_limit(SimplexPoint(p));
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double rel = std::abs(num.entries(i, j) - lim.entries(i, j)) /
                         std::abs(lim.entries(i, j));
      c.require(rel < 1e-2, "entry (" + std::to_string(i) + "," + std::to_string(j) +
                                ") rel error " + fmt(rel));
    }
  }
}

void criterion_delta1_bounds(Check& c) {
  Vector p(3);
  p << 0.2, 0.5, 0.3;
  const double d = 1.0;
  QuadratureSpec spec;
  for (double sigma : {0.05, 0.1}) {
    const MixtureModel model = homogeneous_model(p, sigma, d);
    const MetricMatrix gw = wasserstein_matrix_numeric(model, spec);

    const double off = gw.log_entry(0, 1).value();
    const double off_bound = (3.0 * d * sigma * sigma * kTailConstantM / p.minCoeff()) *
                             (1.0 + (2.0 * sigma * sigma / (3.0 * d * d)) *
                                        std::exp(-d * d / (2.0 * sigma * sigma)));
    c.require(off >= 0.0, "off-diagonal nonnegative at sigma=" + fmt(sigma));
    c.require(off <= off_bound, "off-diagonal bound at sigma=" + fmt(sigma) + ": " +
                                    fmt(off) + " vs " + fmt(off_bound));

    for (int i = 0; i < 2; ++i) {
      const LogScaledValue gii = gw.log_entry(i, i);
      const LogScaledValue ii = diagonal_reduction_integral(model, i, spec);
      const double pmin = std::min(p(i), p(i + 1));
      const double pmax = std::max(p(i), p(i + 1));
      const double m2s4 = sigma * sigma * sigma * sigma * kTailConstantM * kTailConstantM;
      const double shrink = 1.0 - std::sqrt(2.0 * sigma / kPi) * std::exp(-0.5 / sigma) -
                            std::exp(-d * d / (2.0 * sigma * sigma)) / pmin;
      const LogScaledValue lower =
          LogScaledValue::from_value(m2s4 / (2.0 * pmax)) +
          LogScaledValue::from_value(shrink) * ii;
      const LogScaledValue upper = LogScaledValue::from_value(m2s4 / (2.0 * pmin)) + ii;
      c.require(log_leq(lower, gii), "diagonal lower bound i=" + std::to_string(i) +
                                         " sigma=" + fmt(sigma));
      c.require(log_leq(gii, upper), "diagonal upper bound i=" + std::to_string(i) +
                                         " sigma=" + fmt(sigma));
    }
  }
}

void criterion_inhomogeneous_example(Check& c) {
  Vector p(3);
  p << 0.2, 0.5, 0.3;
  Vector means(3), factors(3);
  means << -1.0, 0.0, 2.0;
  factors << 1.0, 1.0, 3.0;
  const double sigma = 0.04;
  Vector scales = factors * sigma;

  QuadratureSpec spec;
  const MixtureModel model(ComponentFamily::Gaussian, means, scales, SimplexPoint(p));
  const MetricMatrix gw = wasserstein_matrix_numeric(model, spec);

  InhomogeneousSpec ispec;
  ispec.gaps = Vector(2);
  ispec.gaps << 1.0, 2.0;
  ispec.scale_factors = factors;
  ispec.sigma = sigma;
  ispec.reduced_gap = 0.5;
  const MetricMatrix lim = inhomogeneous_limit(SimplexPoint(p), ispec, spec);

  const LogScaledValue k = scaling_factor(ComponentFamily::Gaussian, sigma,
                                          ispec.reduced_gap, ScalingVariant::Inhomogeneous);
  for (int i = 0; i < 2; ++i) {
    const double scaled = (gw.log_entry(i, i) / k).value();
    const double rel = std::abs(scaled / lim.entries(i, i) - 1.0);
    c.note("diag " + std::to_string(i) + " scaled=" + fmt(scaled) +
           " limit=" + fmt(lim.entries(i, i)));
    c.require(rel < 0.05, "diagonal " + std::to_string(i) + " within 5%: rel " + fmt(rel));
  }
}

void criterion_wig_identity(Check& c) {
  QuadratureSpec spec;
  for (int n : {2, 3}) {
    Vector p(n);
    if (n == 2)
      p << 0.3, 0.7;
    else
      p << 0.2, 0.5, 0.3;
    for (double sigma : {0.05, 0.2, 1.0}) {
      const MixtureModel model = homogeneous_model(p, sigma, 1.0);
      const double dev = wig_relation_check(model, spec);
      c.require(dev < 1e-6, "N=" + std::to_string(n) + " sigma=" + fmt(sigma) +
                                " deviation " + fmt(dev));
    }
  }
}

void criterion_extended_metric(Check& c) {
  Vector p(3);
  p << 0.2, 0.5, 0.3;
  const double sigma = 0.02;
  QuadratureSpec spec;
  const MixtureModel model = homogeneous_model(p, sigma, 1.0);
  const ExtendedMetric em = extended_metric_numeric(model, spec);

  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double want = i == j ? p(i) : 0.0;
      c.require(std::abs(em.block_mu_mu(i, j) - want) < 1e-3,
                "mu-mu entry (" + std::to_string(i) + "," + std::to_string(j) + ")");
    }
  }
  for (int i = 0; i < 2; ++i) {
    const double half_gap = 0.5;  // means are unit-spaced
    for (int j : {i, i + 1}) {
      const double rel = std::abs(em.block_theta_mu(i, j) / half_gap - 1.0);
      c.require(rel < 1e-2, "theta-mu entry (" + std::to_string(i) + "," +
                                std::to_string(j) + ") rel " + fmt(rel));
    }
  }
  const Matrix full = rescaled_block_matrix(em);
  const double cross = full.topRightCorner(2, 3).cwiseAbs().maxCoeff();
  c.note("rescaled cross max = " + fmt(cross));
  c.require(cross < 1e-8, "rescaled cross block vanishes");
}

void criterion_perturbation_lemma(Check& c) {
  QuadratureSpec spec;
  const double g2_ref = kPi * kPi * kPi / 8.0;
  const double v20 = perturbation_lemma_check(1.0, 1.0, 20.0, spec);
  const double v40 = perturbation_lemma_check(1.0, 1.0, 40.0, spec);
  const double dev20 = std::abs(v20 / g2_ref - 1.0);
  const double dev40 = std::abs(v40 / g2_ref - 1.0);
  c.note("dev(20)=" + fmt(dev20) + " dev(40)=" + fmt(dev40));
  c.require(dev20 < 0.06, "deviation at t=20 below 6%");
  c.require(dev40 < 0.03, "deviation at t=40 below 3%");
  const double ratio = dev20 / dev40;
  // With k1 = k2 = 1 the integrand is symmetric and the odd 1/t correction
  // cancels, so the deviation decays at second order and the ratio sits near
  // 4 rather than the generic 2; the lemma's O(1/t) bound is an upper bound.
  c.note("decay ratio " + fmt(ratio));
  c.require(ratio >= 1.5, "deviation decays at least linearly in 1/t");
}

void criterion_flow_conservation(Check& c) {
  std::mt19937_64 rng(12345);
  for (int n : {2, 3, 5, 10}) {
    const Vector p0 = random_simplex(n, rng);

    struct Setup {
      const char* label;
      EnergyFunctional energy;
      double dt;
    };
    Vector v_nodes(n);
    for (int i = 0; i < n; ++i) v_nodes(i) = 0.1 * i;
    PotentialEnergy pot;
    pot.v_nodes = v_nodes;
    InteractionEnergy inter;
    inter.w = Matrix::Identity(n, n);
    const Setup setups[3] = {{"potential", pot, 1e-4},
                             {"internal", entropy_energy(), 1e-3},
                             {"interaction", inter, 1e-3}};
    for (const Setup& s : setups) {
      IntegratorSpec ispec;
      ispec.dt = s.dt;
      const auto traj = integrate_flow(s.energy, SimplexPoint(p0), ispec, 1e4 * s.dt);
      double drift = 0.0;
      for (const auto& st : traj)
        drift = std::max(drift, std::abs(st.p.weights().sum() - 1.0));
      c.require(drift <= 1e-12, std::string(s.label) + " N=" + std::to_string(n) +
                                    " mass drift " + fmt(drift));
    }

    IntegratorSpec espec;
    espec.dt = 0.02;
    const auto traj = integrate_flow(entropy_energy(), SimplexPoint(p0), espec, 250.0);
    const Vector final_p = traj.back().p.weights();
    const double dist = (final_p.array() - 1.0 / n).abs().maxCoeff();
    c.require(dist < 1e-6,
              "entropy equilibrium N=" + std::to_string(n) + " distance " + fmt(dist));
  }
}

Field1D gaussian_field_1d(const Grid1D& grid) {
  Vector v(grid.n);
  for (int i = 0; i < grid.n; ++i) {
    const double x = grid.node(i);
    v(i) = std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi) * grid.dx;
  }
  return Field1D(v);
}

void criterion_heat_1d(Check& c) {
  const Grid1D grid(-5.0, 5.0, 100);
  const Field1D f0 = gaussian_field_1d(grid);
  IntegratorSpec spec;
  const Trajectory1D traj = run_scheme_1d(f0, grid, 1e-3, 1000, spec, 1000);
  const Field1D ref = crank_nicolson_1d(f0, grid, 1e-3, 1000);
  const double peak = ref.values.maxCoeff();
  const double dev = (traj.fields.back() - ref.values).cwiseAbs().maxCoeff();
  c.note("deviation/peak = " + fmt(dev / peak));
  c.require(dev <= 5e-3 * peak, "scheme vs Crank-Nicolson at t=1");

  // Consistency order against the analytic second derivative of a smooth
  // positive profile on the torus.
  std::vector<double> log_dx, log_err;
  for (double dx : {0.2, 0.1, 0.05, 0.025}) {
    const int n = static_cast<int>(std::lround(10.0 / dx));
    const Grid1D g(-5.0, 5.0, n);
    Vector v(n), lap(n);
    const double w = 2.0 * kPi / 10.0;
    for (int i = 0; i < n; ++i) {
      const double x = g.node(i);
      v(i) = 2.0 + std::cos(w * x);
      lap(i) = -w * w * std::cos(w * x);
    }
    const Vector rhs = heat1d_rhs(Field1D(v), g);
    log_dx.push_back(std::log(dx));
    log_err.push_back(std::log((rhs - lap).cwiseAbs().maxCoeff()));
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int m = static_cast<int>(log_dx.size());
  for (int i = 0; i < m; ++i) {
    sx += log_dx[i];
    sy += log_err[i];
    sxx += log_dx[i] * log_dx[i];
    sxy += log_dx[i] * log_err[i];
  }
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  c.note("consistency order = " + fmt(slope));
  c.require(std::abs(slope - 2.0) <= 0.2, "consistency order 2.0 +- 0.2");
}

void criterion_heat_2d(Check& c) {
  const Grid1D gx(-5.0, 5.0, 100);
  const Grid2D grid(gx, gx);
  Matrix v(100, 100);
  for (int i = 0; i < 100; ++i) {
    for (int j = 0; j < 100; ++j) {
      const double x = gx.node(i), y = gx.node(j);
      v(i, j) = std::exp(-0.5 * (x * x + y * y)) / (2.0 * kPi) * gx.dx * gx.dx;
    }
  }
  const Field2D f0(v);

  const Matrix rhs_joint = heat2d_rhs(f0, grid);
  Matrix rhs_split = Matrix::Zero(100, 100);
  for (int j = 0; j < 100; ++j)
    rhs_split.col(j) += heat1d_rhs(Field1D(v.col(j)), gx);
  for (int i = 0; i < 100; ++i)
    rhs_split.row(i) += heat1d_rhs(Field1D(v.row(i).transpose()), gx).transpose();
  const double sep = (rhs_joint - rhs_split).cwiseAbs().maxCoeff();
  c.require(sep <= 1e-14, "separability identity: " + fmt(sep));

  IntegratorSpec spec;
  // The Gaussian corner values sit near 2e-14, below the default interior
  // floor; positivity itself is all the scheme needs here.
  spec.positivity_floor = 0.0;
  const Trajectory2D traj = run_scheme_2d(f0, grid, 1e-3, 1000, spec, 1000);
  const Field2D ref = crank_nicolson_2d(f0, grid, 1e-3, 1000);
  const double peak = ref.values.maxCoeff();
  const double dev = (traj.fields.back() - ref.values).cwiseAbs().maxCoeff();
  c.note("deviation/peak = " + fmt(dev / peak));
  c.require(dev <= 5e-3 * peak, "scheme vs split Crank-Nicolson at t=1");
}

void criterion_extended_transport(Check& c) {
  ExtendedFlowState s0;
  s0.weights = Vector(3);
  s0.weights << 0.2, 0.5, 0.3;
  s0.mu = Vector(3);
  s0.mu << -1.0, 0.0, 3.0;
  s0.t = 0.0;
  s0.sigma = 0.1;

  PotentialEnergy energy;
  energy.v = [](double x) { return std::sin(x); };
  energy.v_prime = [](double x) { return std::cos(x); };

  IntegratorSpec spec;
  spec.dt = 0.01;
  const auto traj = integrate_extended_flow(s0, energy, spec, 50.0);
  const ExtendedFlowState& last = traj.back();
  c.note("final components = " + std::to_string(last.mu.size()));
  c.require(last.mu.size() == 2, "first two components merged");
  if (last.mu.size() == 2) {
    c.require(std::abs(last.mu(0) + kPi / 2.0) < 1e-2,
              "surviving mean -pi/2: got " + fmt(last.mu(0)));
    c.require(std::abs(last.mu(1) - 3.0 * kPi / 2.0) < 1e-2,
              "surviving mean 3pi/2: got " + fmt(last.mu(1)));
    c.require(std::abs(last.weights.sum() - 1.0) < 1e-12, "mass preserved through merge");
  }
}

}  // namespace

std::vector<CriterionResult> run_acceptance_suite() {
  struct Entry {
    const char* name;
    std::function<void(Check&)> fn;
  };
  const Entry entries[] = {
      {"asymptotic-constants", criterion_asymptotic_constants},
      {"gaussian-scaling-limit", criterion_gaussian_limit},
      {"laplace-scaling-limit", criterion_laplace_limit},
      {"fisher-limit", criterion_fisher_limit},
      {"matrix-element-bounds", criterion_delta1_bounds},
      {"inhomogeneous-example", criterion_inhomogeneous_example},
      {"wig-identity", criterion_wig_identity},
      {"extended-metric", criterion_extended_metric},
      {"perturbation-lemma", criterion_perturbation_lemma},
      {"flow-conservation", criterion_flow_conservation},
      {"heat-1d", criterion_heat_1d},
      {"heat-2d", criterion_heat_2d},
      {"extended-transport", criterion_extended_transport},
  };

  std::vector<CriterionResult> results;
  int index = 1;
  for (const Entry& e : entries) {
    Check c;
    const auto start = std::chrono::steady_clock::now();
    try {
      e.fn(c);
    } catch (const std::exception& ex) {
      c.pass = false;
      c.detail << "exception: " << ex.what();
    }
    const auto stop = std::chrono::steady_clock::now();
    CriterionResult r;
    r.index = index++;
    r.name = e.name;
    r.pass = c.pass;
    r.detail = c.detail.str();
    r.seconds = std::chrono::duration<double>(stop - start).count();
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace wassim
