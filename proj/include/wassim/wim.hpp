#ifndef WASSIM_WIM_HPP
#define WASSIM_WIM_HPP

#include <optional>
#include <string>

#include "wassim/mixtures.hpp"
#include "wassim/quadrature.hpp"
#include "wassim/types.hpp"

namespace wassim {

enum class Provenance {
  NumericFisher,
  NumericWasserstein,
  FisherLimit,
  WassersteinLimit,
  SecondOrderLimit,
  InhomogeneousLimit,
};

std::string provenance_name(Provenance p);
Provenance provenance_from_name(const std::string& name);

/// (N-1)x(N-1) information matrix in theta-coordinates. When log_scale is
/// set, the stored entries are the true entries divided by exp(log_scale);
/// diagonal Wasserstein entries overflow doubles otherwise.
struct MetricMatrix {
  Matrix entries;
  Provenance provenance;
  std::optional<double> log_scale;

  int dim() const { return static_cast<int>(entries.rows()); }
  /// True entry (i, j) as a sign/log pair.
  LogScaledValue log_entry(int i, int j) const;
};

/// Scaling factor pairing for a limit matrix: the WIM diagonal diverges like
/// K(sigma) while the limit matrix stays finite.
struct ScalingConstants {
  LogScaledValue K;
  double d;
  double sigma;
};

enum class ScalingVariant { Homogeneous, Inhomogeneous };

/// Inhomogeneous lattice: gaps d_i, per-component scale factors s_i with
/// sigma_i = s_i * sigma, and reduced gap d = d_i / (s_i + s_{i+1}).
struct InhomogeneousSpec {
  Vector gaps;           // N-1 positive gaps d_i
  Vector scale_factors;  // N positive factors s_i
  double sigma;          // base scale
  double reduced_gap;    // common value of d_i / (s_i + s_{i+1})

  /// Throws MatchingViolation if some gap index breaks the relation.
  void validate() const;
};

/// Block metric over (theta, mu) coordinates of the extended mixture model.
struct ExtendedMetric {
  Matrix block_theta_theta;  // (N-1)x(N-1), stored divided by K
  Matrix block_theta_mu;     // (N-1)xN
  Matrix block_mu_mu;        // NxN
  LogScaledValue K;
};

/// Tail constant sqrt(2*pi*e)/2 from the off-diagonal suppression bound.
inline constexpr double kTailConstantM = 1.1658338679862872;

// --- numeric information matrices ---------------------------------------

MetricMatrix fisher_matrix_numeric(const MixtureModel& model, const QuadratureSpec& spec);
MetricMatrix wasserstein_matrix_numeric(const MixtureModel& model, const QuadratureSpec& spec);

/// Diagonal reduction integral I_i = int_{mu_i}^{mu_{i+1}} dx /
/// (p_i rho_i + p_{i+1} rho_{i+1}), the quantity the diagonal sandwich
/// bounds are phrased around.
LogScaledValue diagonal_reduction_integral(const MixtureModel& model, int i,
                                           const QuadratureSpec& spec);

// --- closed-form limits ---------------------------------------------------

MetricMatrix fisher_limit(const SimplexPoint& p);
MetricMatrix wasserstein_limit(const SimplexPoint& p);
MetricMatrix second_order_limit(const SimplexPoint& p, double sigma, double d,
                                const QuadratureSpec& spec);
MetricMatrix inhomogeneous_limit(const SimplexPoint& p, const InhomogeneousSpec& ispec,
                                 const QuadratureSpec& spec);

LogScaledValue scaling_factor(ComponentFamily family, double sigma, double d,
                              ScalingVariant variant);

// --- asymptotic machinery -------------------------------------------------

/// g(k) = int_0^inf dy / (1 + y^{(k+1)/k}).
double g_integral(double k, const QuadratureSpec& spec);
/// Closed form pi / (a sin(pi/a)), a = (k+1)/k. Oracle only; the library
/// path is the quadrature above.
double g_closed_form(double k);
/// g2(k) = int_0^inf log^2(v) / (1 + v^{(k+1)/k}) dv.
double g2_integral(double k, const QuadratureSpec& spec);
/// dg/dk at k = 1 by Richardson-extrapolated central differences (= pi/4).
double g_prime_at_1(const QuadratureSpec& spec);

/// Abscissa l in (0, d) where p_i rho(l; sigma) = p_next rho(d - l; k sigma).
double matching_point(ComponentFamily family, double p_i, double p_next, double k,
                      double sigma, double d);

/// Ratio of the two-component gap integral to its Laplace-method
/// denominator; converges to g(k) as sigma -> 0.
double delta2_asymptotic_ratio(ComponentFamily family, double p_i, double p_next, double k,
                               double sigma, double d, const QuadratureSpec& spec);

/// D(t) scaled per the perturbation expansion; D(t) * 4 t^3 / (1 + 1/k2^2)
/// tends to g2(k1) with O(1/t) relative deviation.
double perturbation_lemma_check(double k1, double k2, double t, const QuadratureSpec& spec);

// --- extended model -------------------------------------------------------

ExtendedMetric extended_limit(const SimplexPoint& p, const Vector& means, double sigma,
                              ComponentFamily family);

/// Numeric counterpart of the extended-metric blocks at finite sigma,
/// computed from the Wasserstein score functions.
ExtendedMetric extended_metric_numeric(const MixtureModel& model, const QuadratureSpec& spec);

/// Full (2N-1)x(2N-1) matrix with theta-tangents rescaled by K^{-1/2}; the
/// cross blocks carry the factor K^{-1/2} and flush to zero for small sigma.
Matrix rescaled_block_matrix(const ExtendedMetric& metric);

/// Relative Frobenius deviation of G_F - Sigma G_W Sigma^T, where G_F is the
/// numeric Fisher matrix over theta-tangents and G_W the numeric Wasserstein
/// matrix over mu-tangents.
double wig_relation_check(const MixtureModel& model, const QuadratureSpec& spec);

/// The bidiagonal change-of-score matrix Sigma ((N-1)xN).
Matrix wig_sigma_matrix(const SimplexPoint& p);

/// Numeric Wasserstein metric over mu-tangents: entries p_i p_j
/// int rho_i rho_j / rho_theta dx.
Matrix wasserstein_mu_matrix_numeric(const MixtureModel& model, const QuadratureSpec& spec);

}  // namespace wassim

#endif  // WASSIM_WIM_HPP
