#include "wassim/flows.hpp"

#include <algorithm>
#include <cmath>

#include "wassim/wim.hpp"

namespace wassim {

namespace {

constexpr double kMergeFraction = 1e-9;
constexpr double kLogKFlush = 700.0;

Vector energy_dp(const EnergyFunctional& energy, const Vector& p) {
  const int n = static_cast<int>(p.size());
  Vector dp(n);
  if (const auto* pot = std::get_if<PotentialEnergy>(&energy)) {
    if (pot->v_nodes.size() != n)
      throw InvalidModel("potential energy: node values must match N");
    dp = pot->v_nodes;
  } else if (const auto* in = std::get_if<InternalEnergy>(&energy)) {
    if (!in->u_prime) throw EvaluationError("internal energy: U' not supplied");
    for (int i = 0; i < n; ++i) {
      dp(i) = in->u_prime(p(i));
      if (!std::isfinite(dp(i)))
        throw EvaluationError("internal energy: U' not finite at p_" + std::to_string(i));
    }
  } else {
    const auto& w = std::get<InteractionEnergy>(energy).w;
    if (w.rows() != n || w.cols() != n)
      throw InvalidModel("interaction energy: W must be NxN");
    if ((w - w.transpose()).cwiseAbs().maxCoeff() > 1e-12)
      throw InvalidModel("interaction energy: W must be symmetric");
    dp = w * p;
  }
  return dp;
}

Vector rhs_raw(const EnergyFunctional& energy, const Vector& p) {
  const int n = static_cast<int>(p.size());
  const Vector dp = energy_dp(energy, p);
  Vector out = Vector::Zero(n);
  // Edge flux J_i = sqrt(p_i p_{i+1}) (dF/dp_{i+1} - dF/dp_i); node i gains
  // J_i, node i+1 loses it, so the sum telescopes to zero exactly.
  for (int i = 0; i + 1 < n; ++i) {
    const double flux = std::sqrt(p(i) * p(i + 1)) * (dp(i + 1) - dp(i));
    out(i) += flux;
    out(i + 1) -= flux;
  }
  return out;
}

bool interior(const Vector& p, double floor) {
  for (int i = 0; i < p.size(); ++i) {
    if (!(p(i) > floor) || !std::isfinite(p(i))) return false;
  }
  return true;
}

Vector step_once(const EnergyFunctional& energy, const Vector& p, double h,
                 IntegratorMethod method, double rate) {
  if (method == IntegratorMethod::ForwardEuler) return p + (h * rate) * rhs_raw(energy, p);
  const Vector k1 = rate * rhs_raw(energy, p);
  const Vector k2 = rate * rhs_raw(energy, p + (0.5 * h) * k1);
  const Vector k3 = rate * rhs_raw(energy, p + (0.5 * h) * k2);
  const Vector k4 = rate * rhs_raw(energy, p + h * k3);
  return p + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

double per_gap_inv_k(double sigma, double gap) {
  const LogScaledValue k =
      scaling_factor(ComponentFamily::Gaussian, sigma, gap, ScalingVariant::Homogeneous);
  if (k.log_magnitude > kLogKFlush) return 0.0;
  return std::exp(-k.log_magnitude);
}

}  // namespace

EnergyFunctional entropy_energy() {
  InternalEnergy e;
  e.u = [](double x) { return x * std::log(x); };
  e.u_prime = [](double x) { return std::log(x) + 1.0; };
  return e;
}

double energy_value(const EnergyFunctional& energy, const SimplexPoint& p) {
  const Vector& w = p.weights();
  if (const auto* pot = std::get_if<PotentialEnergy>(&energy)) return pot->v_nodes.dot(w);
  if (const auto* in = std::get_if<InternalEnergy>(&energy)) {
    if (!in->u) throw EvaluationError("internal energy: U not supplied");
    double acc = 0.0;
    for (int i = 0; i < w.size(); ++i) acc += in->u(w(i));
    return acc;
  }
  const auto& mat = std::get<InteractionEnergy>(energy).w;
  return 0.5 * w.dot(mat * w);
}

Vector theta_gradient(const EnergyFunctional& energy, const SimplexPoint& p) {
  const Vector dp = energy_dp(energy, p.weights());
  Vector g(p.size() - 1);
  for (int i = 0; i + 1 < p.size(); ++i) g(i) = dp(i + 1) - dp(i);
  return g;
}

Vector flow_rhs(const EnergyFunctional& energy, const SimplexPoint& p) {
  return rhs_raw(energy, p.weights());
}

Vector entropy_flow_rhs(const SimplexPoint& p) {
  const int n = p.size();
  Vector out = Vector::Zero(n);
  for (int i = 0; i + 1 < n; ++i) {
    // Difference of logs (not log of the ratio) so this matches the generic
    // internal-energy path bit for bit up to one rounding of U'.
    const double flux = std::sqrt(p[i] * p[i + 1]) * (std::log(p[i + 1]) - std::log(p[i]));
    out(i) += flux;
    out(i + 1) -= flux;
  }
  return out;
}

Matrix markov_kernel_form(const SimplexPoint& p) {
  const int n = p.size();
  Matrix m = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    if (i + 1 < n) m(i, i + 1) = std::sqrt(p[i] / p[i + 1]) * std::log(p[i + 1] / p[i]);
    if (i > 0) m(i, i - 1) = std::sqrt(p[i] / p[i - 1]) * std::log(p[i - 1] / p[i]);
  }
  return m;
}

std::vector<FlowState> integrate_flow(const EnergyFunctional& energy, const SimplexPoint& p0,
                                      const IntegratorSpec& spec, double t_end) {
  if (!(spec.dt > 0.0)) throw InvalidModel("integrate_flow: dt must be positive");
  std::vector<FlowState> traj;
  Vector p = p0.weights();
  double t = 0.0;
  traj.push_back({SimplexPoint(p), t});

  // Attempts one step of size h; on interior violation recurses into two
  // half steps. Mass is never renormalized.
  std::function<void(double, int)> advance = [&](double h, int depth) {
    const Vector next = step_once(energy, p, h, spec.method, spec.rate_scale);
    if (!interior(next, spec.positivity_floor)) {
      if (depth >= spec.max_halvings)
        throw StiffnessError("integrate_flow: step halving exhausted", t, p);
      advance(0.5 * h, depth + 1);
      advance(0.5 * h, depth + 1);
      return;
    }
    p = next;
    t += h;
    traj.push_back({SimplexPoint(p), t});
  };

  const long steps = std::lround(t_end / spec.dt);
  for (long s = 0; s < steps; ++s) advance(spec.dt, 0);
  return traj;
}

std::pair<Vector, Vector> extended_flow_rhs(const ExtendedFlowState& state,
                                            const PotentialEnergy& energy) {
  if (!energy.v || !energy.v_prime)
    throw EvaluationError("extended flow: smooth V and V' required");
  const int n = static_cast<int>(state.mu.size());
  const Vector& p = state.weights;
  const Vector& mu = state.mu;

  Vector inv_k = Vector::Zero(std::max(0, n - 1));
  for (int i = 0; i + 1 < n; ++i) inv_k(i) = per_gap_inv_k(state.sigma, mu(i + 1) - mu(i));

  Vector theta_dot = Vector::Zero(std::max(0, n - 1));
  for (int i = 0; i + 1 < n; ++i) {
    const double half_gap = 0.5 * (mu(i + 1) - mu(i));
    const double bracket = (energy.v(mu(i + 1)) - energy.v(mu(i))) -
                           half_gap * (energy.v_prime(mu(i)) + energy.v_prime(mu(i + 1)));
    theta_dot(i) = -std::sqrt(p(i) * p(i + 1)) * inv_k(i) * bracket;
  }

  Vector mu_dot(n);
  for (int i = 0; i < n; ++i) {
    double v = -energy.v_prime(mu(i));
    if (i + 1 < n) {
      v += inv_k(i) * std::sqrt(p(i + 1) / p(i)) * 0.5 * (mu(i + 1) - mu(i)) *
           (energy.v(mu(i + 1)) - energy.v(mu(i)));
    }
    if (i > 0) {
      v += inv_k(i - 1) * std::sqrt(p(i - 1) / p(i)) * 0.5 * (mu(i) - mu(i - 1)) *
           (energy.v(mu(i)) - energy.v(mu(i - 1)));
    }
    mu_dot(i) = v;
  }
  return {theta_dot, mu_dot};
}

namespace {

struct RawExtended {
  Vector p;
  Vector mu;
};

bool extended_valid(const RawExtended& s, double floor) {
  if (!interior(s.p, floor)) return false;
  for (int i = 0; i + 1 < s.mu.size(); ++i) {
    if (!(s.mu(i) < s.mu(i + 1))) return false;
  }
  for (int i = 0; i < s.mu.size(); ++i) {
    if (!std::isfinite(s.mu(i))) return false;
  }
  return true;
}

RawExtended apply_rates(const RawExtended& s, const Vector& theta_dot, const Vector& mu_dot,
                        double h) {
  RawExtended out = s;
  // p_i = theta_{i-1} - theta_i, so edge i moves -theta_dot_i from node i to
  // node i+1; telescoping conserves mass exactly.
  for (int i = 0; i + 1 < s.p.size(); ++i) {
    const double transfer = h * theta_dot(i);
    out.p(i) -= transfer;
    out.p(i + 1) += transfer;
  }
  out.mu += h * mu_dot;
  return out;
}

}  // namespace

std::vector<ExtendedFlowState> integrate_extended_flow(const ExtendedFlowState& state0,
                                                       const PotentialEnergy& energy,
                                                       const IntegratorSpec& spec,
                                                       double t_end) {
  if (!(spec.dt > 0.0)) throw InvalidModel("integrate_extended_flow: dt must be positive");
  RawExtended cur{state0.weights, state0.mu};
  if (!extended_valid(cur, spec.positivity_floor))
    throw InvalidModel("integrate_extended_flow: initial state not interior/ordered");
  double t = state0.t;
  double sigma = state0.sigma;

  auto snapshot = [&]() {
    ExtendedFlowState s;
    s.weights = cur.p;
    s.mu = cur.mu;
    s.t = t;
    s.sigma = sigma;
    if (cur.mu.size() >= 2) {
      double min_gap = cur.mu(1) - cur.mu(0);
      for (int i = 1; i + 1 < cur.mu.size(); ++i)
        min_gap = std::min(min_gap, cur.mu(i + 1) - cur.mu(i));
      s.K = scaling_factor(ComponentFamily::Gaussian, sigma, min_gap,
                           ScalingVariant::Homogeneous);
    }
    return s;
  };

  auto rates = [&](const RawExtended& s) {
    ExtendedFlowState tmp;
    tmp.weights = s.p;
    tmp.mu = s.mu;
    tmp.sigma = sigma;
    return extended_flow_rhs(tmp, energy);
  };

  auto try_step = [&](const RawExtended& s, double h) {
    if (spec.method == IntegratorMethod::ForwardEuler) {
      auto [td, md] = rates(s);
      return apply_rates(s, spec.rate_scale * td, spec.rate_scale * md, h);
    }
    auto [td1, md1] = rates(s);
    RawExtended s2 = apply_rates(s, spec.rate_scale * td1, spec.rate_scale * md1, 0.5 * h);
    auto [td2, md2] = rates(s2);
    RawExtended s3 = apply_rates(s, spec.rate_scale * td2, spec.rate_scale * md2, 0.5 * h);
    auto [td3, md3] = rates(s3);
    RawExtended s4 = apply_rates(s, spec.rate_scale * td3, spec.rate_scale * md3, h);
    auto [td4, md4] = rates(s4);
    const Vector td = (spec.rate_scale / 6.0) * (td1 + 2.0 * td2 + 2.0 * td3 + td4);
    const Vector md = (spec.rate_scale / 6.0) * (md1 + 2.0 * md2 + 2.0 * md3 + md4);
    return apply_rates(s, td, md, h);
  };

  auto maybe_merge = [&]() {
    while (cur.mu.size() >= 2) {
      const double span =
          std::max(cur.mu(cur.mu.size() - 1) - cur.mu(0), 1.0);
      int at = -1;
      for (int i = 0; i + 1 < cur.mu.size(); ++i) {
        if (cur.mu(i + 1) - cur.mu(i) < kMergeFraction * span) {
          at = i;
          break;
        }
      }
      if (at < 0) return;
      const int n = static_cast<int>(cur.mu.size());
      Vector p(n - 1), mu(n - 1);
      for (int i = 0, j = 0; i < n; ++i) {
        if (i == at) {
          const double w = cur.p(at) + cur.p(at + 1);
          p(j) = w;
          mu(j) = (cur.p(at) * cur.mu(at) + cur.p(at + 1) * cur.mu(at + 1)) / w;
          ++i;  // consumes both members of the pair
        } else {
          p(j) = cur.p(i);
          mu(j) = cur.mu(i);
        }
        ++j;
      }
      cur.p = p;
      cur.mu = mu;
    }
  };

  std::function<void(double, int)> advance = [&](double h, int depth) {
    const RawExtended next = try_step(cur, h);
    if (!extended_valid(next, spec.positivity_floor)) {
      if (depth >= spec.max_halvings)
        throw StiffnessError("integrate_extended_flow: step halving exhausted", t, cur.p);
      advance(0.5 * h, depth + 1);
      advance(0.5 * h, depth + 1);
      return;
    }
    cur = next;
    t += h;
  };

  std::vector<ExtendedFlowState> traj;
  traj.push_back(snapshot());
  const long steps = std::lround((t_end - state0.t) / spec.dt);
  for (long s = 0; s < steps; ++s) {
    maybe_merge();
    advance(spec.dt, 0);
    traj.push_back(snapshot());
  }
  maybe_merge();
  traj.push_back(snapshot());
  return traj;
}

}  // namespace wassim
