#ifndef WASSIM_MIXTURES_HPP
#define WASSIM_MIXTURES_HPP

#include <string>

#include "wassim/types.hpp"

namespace wassim {

/// Interior point of the probability simplex: p_i > 0, sum p_i = 1.
class SimplexPoint {
 public:
  explicit SimplexPoint(Vector p);

  int size() const { return static_cast<int>(p_.size()); }
  double operator[](int i) const { return p_(i); }
  const Vector& weights() const { return p_; }

 private:
  Vector p_;
};

/// Cumulative-complement coordinates theta_i = 1 - sum_{k<=i} p_k, strictly
/// decreasing in (0, 1); theta_0 = 1 and theta_N = 0 are implicit.
class ThetaCoords {
 public:
  explicit ThetaCoords(Vector theta);

  int size() const { return static_cast<int>(theta_.size()); }
  double operator[](int i) const { return theta_(i); }
  const Vector& values() const { return theta_; }

 private:
  Vector theta_;
};

enum class ComponentFamily { Gaussian, Laplace };

std::string family_name(ComponentFamily f);
ComponentFamily family_from_name(const std::string& name);

SimplexPoint simplex_from_theta(const ThetaCoords& theta);
ThetaCoords theta_from_simplex(const SimplexPoint& p);

// Component densities. Gaussian scale is the standard deviation; Laplace
// density is (1/2s) exp(-|x - mu|/s).
double component_pdf(ComponentFamily family, double x, double mu, double sigma);
double component_log_pdf(ComponentFamily family, double x, double mu, double sigma);
double component_cdf(ComponentFamily family, double x, double mu, double sigma);
/// Upper tail 1 - F, evaluated without cancellation.
double component_sf(ComponentFamily family, double x, double mu, double sigma);

/// 1D mixture with ordered means and positive scales.
class MixtureModel {
 public:
  MixtureModel(ComponentFamily family, Vector means, Vector scales, SimplexPoint weights);

  ComponentFamily family() const { return family_; }
  int components() const { return static_cast<int>(means_.size()); }
  const Vector& means() const { return means_; }
  const Vector& scales() const { return scales_; }
  const SimplexPoint& weights() const { return weights_; }

  double max_scale() const { return scales_.maxCoeff(); }

  /// [mu_1 - r*sigma_max, mu_N + r*sigma_max]; the mass outside is below
  /// quadrature tolerance for the default radius.
  std::pair<double, double> support_interval(double radius) const;

 private:
  ComponentFamily family_;
  Vector means_;
  Vector scales_;
  SimplexPoint weights_;
};

double mixture_pdf(const MixtureModel& model, double x);
double mixture_log_pdf(const MixtureModel& model, double x);
double mixture_cdf(const MixtureModel& model, double x);

/// F_i(x) - F_j(x) for component indices i < j, computed through whichever
/// tail keeps the subtraction well conditioned.
double component_cdf_diff(const MixtureModel& model, int i, int j, double x);

}  // namespace wassim

#endif  // WASSIM_MIXTURES_HPP
