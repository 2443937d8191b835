#ifndef WASSIM_PDE_HPP
#define WASSIM_PDE_HPP

#include <vector>

#include "wassim/flows.hpp"
#include "wassim/types.hpp"

namespace wassim {

/// Periodic 1D grid with nodes x_i = x_min + i*dx, i = 0..n-1; node n wraps
/// to node 0, so dx = (x_max - x_min)/n.
struct Grid1D {
  double x_min;
  double x_max;
  int n;
  double dx;

  Grid1D(double lo, double hi, int nodes);
  double node(int i) const { return x_min + dx * i; }
};

struct Grid2D {
  Grid1D x;
  Grid1D y;

  Grid2D(Grid1D gx, Grid1D gy);
};

/// Strictly positive cell masses; the constructor records total mass so
/// schemes can be audited against it.
struct Field1D {
  Vector values;
  double initial_mass;

  explicit Field1D(Vector v);
};

struct Field2D {
  Matrix values;
  double initial_mass;

  explicit Field2D(Matrix v);
};

/// dp_i/dt = -(1/dx^2)(sqrt(p_{i-1}p_i)log(p_i/p_{i-1})
///                     - sqrt(p_{i+1}p_i)log(p_{i+1}/p_i)), periodic ring.
/// Sums to zero exactly by telescoping.
Vector heat1d_rhs(const Field1D& field, const Grid1D& grid);

/// Axis-separable 2D operator: the 1D stencil applied along every row plus
/// along every column.
Matrix heat2d_rhs(const Field2D& field, const Grid2D& grid);

/// Reference solver for the linear heat equation, second order in dt, dx.
Field1D crank_nicolson_1d(const Field1D& field0, const Grid1D& grid, double dt, int steps);

/// Peaceman-Rachford alternating-direction Crank-Nicolson.
Field2D crank_nicolson_2d(const Field2D& field0, const Grid2D& grid, double dt, int steps);

struct Trajectory1D {
  std::vector<double> times;
  std::vector<Vector> fields;
};

struct Trajectory2D {
  std::vector<double> times;
  std::vector<Matrix> fields;
};

/// Fixed-step integration of heat1d_rhs with local step halving on a
/// positivity violation; warns on stderr when dt exceeds dx^2/2 under
/// forward Euler. Snapshots every `stride` accepted steps (plus the final).
Trajectory1D run_scheme_1d(const Field1D& field0, const Grid1D& grid, double dt, int steps,
                           const IntegratorSpec& spec, int stride = 100);

Trajectory2D run_scheme_2d(const Field2D& field0, const Grid2D& grid, double dt, int steps,
                           const IntegratorSpec& spec, int stride = 100);

/// Per-snapshot comparison of two trajectories on the same time grid.
struct ErrorReport {
  std::vector<double> times;
  std::vector<double> max_abs;
  std::vector<double> l2;
  std::vector<double> mass_diff;
};

ErrorReport error_report(const Trajectory1D& a, const Trajectory1D& b);
ErrorReport error_report(const Trajectory2D& a, const Trajectory2D& b);

}  // namespace wassim

#endif  // WASSIM_PDE_HPP
