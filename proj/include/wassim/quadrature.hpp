#ifndef WASSIM_QUADRATURE_HPP
#define WASSIM_QUADRATURE_HPP

#include <functional>
#include <vector>

#include "wassim/types.hpp"

namespace wassim {

struct QuadratureSpec {
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;
  int max_subdivisions = 2000;
  /// Truncation of infinite domains, in units of the largest component scale.
  double truncation_radius = 12.0;
};

/// Adaptive Gauss-Kronrod integration over [a, b]. The seeds are abscissae
/// the integrand is known to peak at (component means, inter-mean midpoints);
/// they become mandatory initial panel boundaries, since adaptive refinement
/// alone misses spikes whose width is far below the panel size.
///
/// Deterministic for identical inputs: panels are refined worst-error-first
/// with leftmost tie-breaking and summed in left-to-right order.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureSpec& spec, const std::vector<double>& seeds = {});

/// Computes log of the integral of exp(log_f) over [a, b] for a positive
/// integrand whose values overflow doubles. The integrand is shifted by its
/// maximum over seed-refined probe points so the scaled integrand is O(1).
LogScaledValue integrate_log_scaled(const std::function<double(double)>& log_f, double a,
                                    double b, const QuadratureSpec& spec,
                                    const std::vector<double>& seeds = {});

}  // namespace wassim

#endif  // WASSIM_QUADRATURE_HPP
