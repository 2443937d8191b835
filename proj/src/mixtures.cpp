#include "wassim/mixtures.hpp"

#include <algorithm>
#include <cmath>

namespace wassim {

namespace {
constexpr double kSimplexSumTol = 1e-12;
constexpr double kInteriorFloor = 1e-15;
constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // log sqrt(2*pi)
constexpr double kInvSqrt2 = 0.70710678118654752440;
}  // namespace

SimplexPoint::SimplexPoint(Vector p) : p_(std::move(p)) {
  if (p_.size() < 2) throw InvalidCoordinates("simplex point needs at least 2 masses");
  for (int i = 0; i < p_.size(); ++i) {
    if (!(p_(i) > kInteriorFloor))
      throw InvalidCoordinates("simplex mass " + std::to_string(i) + " not strictly interior");
  }
  if (std::abs(p_.sum() - 1.0) > kSimplexSumTol)
    throw InvalidCoordinates("simplex masses do not sum to 1");
}

ThetaCoords::ThetaCoords(Vector theta) : theta_(std::move(theta)) {
  if (theta_.size() < 1) throw InvalidCoordinates("theta coordinates are empty");
  double prev = 1.0;
  for (int i = 0; i < theta_.size(); ++i) {
    if (!(theta_(i) < prev && theta_(i) > 0.0))
      throw InvalidCoordinates("theta must satisfy 1 > theta_1 > ... > theta_{N-1} > 0");
    prev = theta_(i);
  }
}

std::string family_name(ComponentFamily f) {
  return f == ComponentFamily::Gaussian ? "gaussian" : "laplace";
}

ComponentFamily family_from_name(const std::string& name) {
  if (name == "gaussian") return ComponentFamily::Gaussian;
  if (name == "laplace") return ComponentFamily::Laplace;
  throw InvalidModel("unknown component family: " + name);
}

SimplexPoint simplex_from_theta(const ThetaCoords& theta) {
  const int n = theta.size() + 1;
  Vector p(n);
  double prev = 1.0;
  for (int i = 0; i < n - 1; ++i) {
    p(i) = prev - theta[i];
    prev = theta[i];
  }
  p(n - 1) = prev;  // theta_N = 0, so the last difference is theta_{N-1} itself
  return SimplexPoint(std::move(p));
}

ThetaCoords theta_from_simplex(const SimplexPoint& p) {
  const int n = p.size();
  Vector theta(n - 1);
  double cum = 0.0;
  for (int i = 0; i < n - 1; ++i) {
    cum += p[i];
    theta(i) = 1.0 - cum;
  }
  return ThetaCoords(std::move(theta));
}

double component_log_pdf(ComponentFamily family, double x, double mu, double sigma) {
  if (!(sigma > 0.0)) throw InvalidScale("component scale must be positive");
  const double z = (x - mu) / sigma;
  if (family == ComponentFamily::Gaussian) return -0.5 * z * z - std::log(sigma) - kLogSqrt2Pi;
  return -std::abs(z) - std::log(2.0 * sigma);
}

double component_pdf(ComponentFamily family, double x, double mu, double sigma) {
  return std::exp(component_log_pdf(family, x, mu, sigma));
}

double component_cdf(ComponentFamily family, double x, double mu, double sigma) {
  if (!(sigma > 0.0)) throw InvalidScale("component scale must be positive");
  const double z = (x - mu) / sigma;
  if (family == ComponentFamily::Gaussian) return 0.5 * std::erfc(-z * kInvSqrt2);
  return z < 0.0 ? 0.5 * std::exp(z) : 1.0 - 0.5 * std::exp(-z);
}

double component_sf(ComponentFamily family, double x, double mu, double sigma) {
  if (!(sigma > 0.0)) throw InvalidScale("component scale must be positive");
  const double z = (x - mu) / sigma;
  if (family == ComponentFamily::Gaussian) return 0.5 * std::erfc(z * kInvSqrt2);
  return z < 0.0 ? 1.0 - 0.5 * std::exp(z) : 0.5 * std::exp(-z);
}

MixtureModel::MixtureModel(ComponentFamily family, Vector means, Vector scales,
                           SimplexPoint weights)
    : family_(family), means_(std::move(means)), scales_(std::move(scales)),
      weights_(std::move(weights)) {
  const int n = weights_.size();
  if (means_.size() != n || scales_.size() != n)
    throw InvalidModel("means/scales/weights size mismatch");
  for (int i = 0; i + 1 < n; ++i) {
    if (!(means_(i) < means_(i + 1)))
      throw InvalidModel("component means must be strictly increasing");
  }
  for (int i = 0; i < n; ++i) {
    if (!(scales_(i) > 0.0)) throw InvalidModel("component scales must be positive");
  }
}

std::pair<double, double> MixtureModel::support_interval(double radius) const {
  const double pad = radius * max_scale();
  return {means_(0) - pad, means_(components() - 1) + pad};
}

double mixture_log_pdf(const MixtureModel& model, double x) {
  const int n = model.components();
  double max_term = -std::numeric_limits<double>::infinity();
  Vector terms(n);
  for (int i = 0; i < n; ++i) {
    terms(i) = std::log(model.weights()[i]) +
               component_log_pdf(model.family(), x, model.means()(i), model.scales()(i));
    max_term = std::max(max_term, terms(i));
  }
  if (!std::isfinite(max_term)) return max_term;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += std::exp(terms(i) - max_term);
  return max_term + std::log(acc);
}

double mixture_pdf(const MixtureModel& model, double x) {
  return std::exp(mixture_log_pdf(model, x));
}

double mixture_cdf(const MixtureModel& model, double x) {
  double acc = 0.0;
  for (int i = 0; i < model.components(); ++i) {
    acc += model.weights()[i] *
           component_cdf(model.family(), x, model.means()(i), model.scales()(i));
  }
  return std::min(acc, 1.0);
}

double component_cdf_diff(const MixtureModel& model, int i, int j, double x) {
  // F_i >= F_j for i < j since means increase. Below the midpoint both lower
  // tails are small and subtract cleanly; above it we switch to upper tails.
  const double mid = 0.5 * (model.means()(i) + model.means()(j));
  if (x < mid) {
    return component_cdf(model.family(), x, model.means()(i), model.scales()(i)) -
           component_cdf(model.family(), x, model.means()(j), model.scales()(j));
  }
  return component_sf(model.family(), x, model.means()(j), model.scales()(j)) -
         component_sf(model.family(), x, model.means()(i), model.scales()(i));
}

}  // namespace wassim
