#include "wassim/pde.hpp"

#include <cmath>
#include <functional>
#include <iostream>

namespace wassim {

namespace {

void check_positive(const Vector& v, const char* who) {
  for (int i = 0; i < v.size(); ++i) {
    if (!(v(i) > 0.0)) throw InvalidField(std::string(who) + ": nonpositive cell value");
  }
}

/// Periodic entropy-flux stencil without the 1/dx^2 factor.
Vector ring_rhs(const Vector& p) {
  const int n = static_cast<int>(p.size());
  Vector out = Vector::Zero(n);
  for (int i = 0; i < n; ++i) {
    const int j = (i + 1) % n;
    const double flux = std::sqrt(p(i) * p(j)) * std::log(p(j) / p(i));
    out(i) += flux;
    out(j) -= flux;
  }
  return out;
}

Matrix periodic_laplacian(int n, double dx) {
  Matrix l = Matrix::Zero(n, n);
  const double c = 1.0 / (dx * dx);
  for (int i = 0; i < n; ++i) {
    l(i, i) = -2.0 * c;
    // += so the two-node ring, where both neighbors coincide, stays exact.
    l(i, (i + 1) % n) += c;
    l(i, (i + n - 1) % n) += c;
  }
  return l;
}

bool positive(const Vector& v, double floor) {
  for (int i = 0; i < v.size(); ++i) {
    if (!(v(i) > floor) || !std::isfinite(v(i))) return false;
  }
  return true;
}

/// Shared fixed-step loop over a flattened state vector.
std::vector<std::pair<double, Vector>> march(
    const std::function<Vector(const Vector&)>& rhs, Vector p, double dt, int steps,
    const IntegratorSpec& spec, int stride) {
  std::vector<std::pair<double, Vector>> traj;
  double t = 0.0;
  traj.emplace_back(t, p);

  auto step_once = [&](const Vector& s, double h) {
    if (spec.method == IntegratorMethod::ForwardEuler) return Vector(s + h * rhs(s));
    const Vector k1 = rhs(s);
    const Vector k2 = rhs(s + (0.5 * h) * k1);
    const Vector k3 = rhs(s + (0.5 * h) * k2);
    const Vector k4 = rhs(s + h * k3);
    return Vector(s + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
  };

  std::function<void(double, int)> advance = [&](double h, int depth) {
    const Vector next = step_once(p, h);
    if (!positive(next, spec.positivity_floor)) {
      if (depth >= spec.max_halvings)
        throw StiffnessError("run_scheme: step halving exhausted", t, p);
      advance(0.5 * h, depth + 1);
      advance(0.5 * h, depth + 1);
      return;
    }
    p = next;
    t += h;
  };

  for (int s = 1; s <= steps; ++s) {
    advance(dt, 0);
    if (s % stride == 0 || s == steps) traj.emplace_back(t, p);
  }
  return traj;
}

}  // namespace

Grid1D::Grid1D(double lo, double hi, int nodes) : x_min(lo), x_max(hi), n(nodes) {
  if (!(hi > lo)) throw InvalidField("grid: x_max must exceed x_min");
  if (n < 2) throw InvalidField("grid: need at least 2 nodes");
  dx = (hi - lo) / n;
}

Grid2D::Grid2D(Grid1D gx, Grid1D gy) : x(gx), y(gy) {}

Field1D::Field1D(Vector v) : values(std::move(v)) {
  check_positive(values, "field");
  initial_mass = values.sum();
}

Field2D::Field2D(Matrix v) : values(std::move(v)) {
  for (int i = 0; i < values.rows(); ++i) {
    for (int j = 0; j < values.cols(); ++j) {
      if (!(values(i, j) > 0.0)) throw InvalidField("field: nonpositive cell value");
    }
  }
  initial_mass = values.sum();
}

Vector heat1d_rhs(const Field1D& field, const Grid1D& grid) {
  if (field.values.size() != grid.n) throw InvalidField("heat1d_rhs: field/grid size mismatch");
  check_positive(field.values, "heat1d_rhs");
  return ring_rhs(field.values) / (grid.dx * grid.dx);
}

Matrix heat2d_rhs(const Field2D& field, const Grid2D& grid) {
  const Matrix& p = field.values;
  if (p.rows() != grid.x.n || p.cols() != grid.y.n)
    throw InvalidField("heat2d_rhs: field/grid shape mismatch");
  Matrix out = Matrix::Zero(p.rows(), p.cols());
  for (int j = 0; j < p.cols(); ++j) {
    Vector col = p.col(j);
    check_positive(col, "heat2d_rhs");
    out.col(j) += ring_rhs(col) / (grid.x.dx * grid.x.dx);
  }
  for (int i = 0; i < p.rows(); ++i) {
    Vector row = p.row(i).transpose();
    out.row(i) += (ring_rhs(row) / (grid.y.dx * grid.y.dx)).transpose();
  }
  return out;
}

Field1D crank_nicolson_1d(const Field1D& field0, const Grid1D& grid, double dt, int steps) {
  const int n = grid.n;
  if (field0.values.size() != n) throw InvalidField("crank_nicolson_1d: size mismatch");
  const Matrix l = periodic_laplacian(n, grid.dx);
  const Matrix a = Matrix::Identity(n, n) - (0.5 * dt) * l;
  const Matrix b = Matrix::Identity(n, n) + (0.5 * dt) * l;
  Eigen::PartialPivLU<Matrix> lu(a);
  Vector u = field0.values;
  for (int s = 0; s < steps; ++s) u = lu.solve(b * u);
  return Field1D(u);
}

Field2D crank_nicolson_2d(const Field2D& field0, const Grid2D& grid, double dt, int steps) {
  const int nx = grid.x.n, ny = grid.y.n;
  if (field0.values.rows() != nx || field0.values.cols() != ny)
    throw InvalidField("crank_nicolson_2d: shape mismatch");
  const Matrix lx = periodic_laplacian(nx, grid.x.dx);
  const Matrix ly = periodic_laplacian(ny, grid.y.dx);
  const Matrix ax = Matrix::Identity(nx, nx) - (0.5 * dt) * lx;
  const Matrix bx = Matrix::Identity(nx, nx) + (0.5 * dt) * lx;
  const Matrix ay = Matrix::Identity(ny, ny) - (0.5 * dt) * ly;
  const Matrix by = Matrix::Identity(ny, ny) + (0.5 * dt) * ly;
  Eigen::PartialPivLU<Matrix> lux(ax);
  Eigen::PartialPivLU<Matrix> luy(ay);
  Matrix u = field0.values;
  for (int s = 0; s < steps; ++s) {
    // Peaceman-Rachford: explicit x, implicit y, then the roles swap.
    Matrix half = luy.solve((bx * u).transpose()).transpose();
    u = lux.solve(half * by);
  }
  return Field2D(u);
}

Trajectory1D run_scheme_1d(const Field1D& field0, const Grid1D& grid, double dt, int steps,
                           const IntegratorSpec& spec, int stride) {
  if (spec.method == IntegratorMethod::ForwardEuler && dt > 0.5 * grid.dx * grid.dx)
    std::cerr << "run_scheme_1d: dt exceeds dx^2/2; forward Euler may be unstable\n";
  // Explicit Vector return: handing the raw Eigen expression to the
  // std::function in march would dangle on the ring_rhs temporary.
  auto rhs = [&grid](const Vector& p) -> Vector {
    return ring_rhs(p) / (grid.dx * grid.dx);
  };
  Trajectory1D out;
  for (auto& [t, v] : march(rhs, field0.values, dt, steps, spec, stride)) {
    out.times.push_back(t);
    out.fields.push_back(v);
  }
  return out;
}

Trajectory2D run_scheme_2d(const Field2D& field0, const Grid2D& grid, double dt, int steps,
                           const IntegratorSpec& spec, int stride) {
  if (spec.method == IntegratorMethod::ForwardEuler &&
      dt > 0.5 * std::min(grid.x.dx * grid.x.dx, grid.y.dx * grid.y.dx))
    std::cerr << "run_scheme_2d: dt exceeds dx^2/2; forward Euler may be unstable\n";
  const int nx = grid.x.n, ny = grid.y.n;
  auto rhs = [&](const Vector& flat) {
    Field2D f(Eigen::Map<const Matrix>(flat.data(), nx, ny));
    const Matrix r = heat2d_rhs(f, grid);
    return Vector(Eigen::Map<const Vector>(r.data(), nx * ny));
  };
  Vector flat0 = Eigen::Map<const Vector>(field0.values.data(), nx * ny);
  Trajectory2D out;
  for (auto& [t, v] : march(rhs, flat0, dt, steps, spec, stride)) {
    out.times.push_back(t);
    out.fields.push_back(Eigen::Map<const Matrix>(v.data(), nx, ny));
  }
  return out;
}

namespace {

template <typename Traj, typename Flatten>
ErrorReport report_impl(const Traj& a, const Traj& b, Flatten flatten) {
  if (a.times.size() != b.times.size())
    throw InvalidField("error_report: trajectory length mismatch");
  ErrorReport r;
  for (size_t k = 0; k < a.times.size(); ++k) {
    if (std::abs(a.times[k] - b.times[k]) > 1e-12)
      throw InvalidField("error_report: time grids differ");
    const Vector va = flatten(a.fields[k]);
    const Vector vb = flatten(b.fields[k]);
    if (va.size() != vb.size()) throw InvalidField("error_report: shape mismatch");
    r.times.push_back(a.times[k]);
    r.max_abs.push_back((va - vb).cwiseAbs().maxCoeff());
    r.l2.push_back((va - vb).norm());
    r.mass_diff.push_back(va.sum() - vb.sum());
  }
  return r;
}

}  // namespace

ErrorReport error_report(const Trajectory1D& a, const Trajectory1D& b) {
  return report_impl(a, b, [](const Vector& v) { return v; });
}

ErrorReport error_report(const Trajectory2D& a, const Trajectory2D& b) {
  return report_impl(a, b, [](const Matrix& m) {
    return Vector(Eigen::Map<const Vector>(m.data(), m.size()));
  });
}

}  // namespace wassim
