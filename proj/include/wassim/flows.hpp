#ifndef WASSIM_FLOWS_HPP
#define WASSIM_FLOWS_HPP

#include <functional>
#include <utility>
#include <variant>
#include <vector>

#include "wassim/mixtures.hpp"
#include "wassim/types.hpp"

namespace wassim {

/// Energy F(p) = sum_i V_i p_i. The node values drive simplex flows; the
/// smooth callables (when set) drive the extended flow over means.
struct PotentialEnergy {
  Vector v_nodes;
  std::function<double(double)> v;        // optional smooth potential
  std::function<double(double)> v_prime;  // optional derivative
};

/// Energy F(p) = sum_i U(p_i).
struct InternalEnergy {
  std::function<double(double)> u;
  std::function<double(double)> u_prime;
};

/// Energy F(p) = (1/2) p^T W p with symmetric W, so dF/dp_i = sum_k W_ik p_k.
struct InteractionEnergy {
  Matrix w;
};

using EnergyFunctional = std::variant<PotentialEnergy, InternalEnergy, InteractionEnergy>;

/// Entropy U(p) = p log p as an InternalEnergy.
EnergyFunctional entropy_energy();

struct FlowState {
  SimplexPoint p;
  double t;
};

/// Weights are a plain positive vector summing to 1 rather than a
/// SimplexPoint: merges can leave a single surviving component.
struct ExtendedFlowState {
  Vector weights;
  Vector mu;
  double t;
  double sigma;
  /// Scaling factor of the tightest gap; the theta block moves at rate 1/K.
  LogScaledValue K;
};

enum class IntegratorMethod { ForwardEuler, RungeKutta4 };

struct IntegratorSpec {
  IntegratorMethod method = IntegratorMethod::ForwardEuler;
  double dt = 0.01;
  int max_halvings = 20;
  double positivity_floor = 1e-13;
  /// Multiplies the right-hand side; dividing the metric by c speeds the
  /// flow up by c, which this field expresses without touching the energy.
  double rate_scale = 1.0;
};

double energy_value(const EnergyFunctional& energy, const SimplexPoint& p);

/// (grad_theta F)_i = dF/dp_{i+1} - dF/dp_i, i = 1..N-1.
Vector theta_gradient(const EnergyFunctional& energy, const SimplexPoint& p);

/// dp_i/dt = -sqrt(p_i p_{i-1}) (grad F)_{i-1} + sqrt(p_i p_{i+1}) (grad F)_i
/// with missing-neighbor terms dropped; sums to zero by telescoping.
Vector flow_rhs(const EnergyFunctional& energy, const SimplexPoint& p);

/// The entropy specialization of flow_rhs in closed form.
Vector entropy_flow_rhs(const SimplexPoint& p);

/// Tridiagonal zero-diagonal M with M * p = entropy_flow_rhs(p).
Matrix markov_kernel_form(const SimplexPoint& p);

/// Fixed-step integration with local step halving when a step would leave
/// the interior of the simplex; mass is conserved structurally, never
/// renormalized. Throws StiffnessError when halvings are exhausted.
std::vector<FlowState> integrate_flow(const EnergyFunctional& energy, const SimplexPoint& p0,
                                      const IntegratorSpec& spec, double t_end);

/// Right-hand side of the extended flow over (theta, mu). The 1/K factors
/// use the per-gap scaling factor and flush to zero once log K > 700.
std::pair<Vector, Vector> extended_flow_rhs(const ExtendedFlowState& state,
                                            const PotentialEnergy& energy);

/// Forward integration of the extended flow. When two means approach within
/// 1e-9 of the mean span, the components merge (weights summed, means
/// averaged by weight) and the state shrinks by one component.
std::vector<ExtendedFlowState> integrate_extended_flow(const ExtendedFlowState& state0,
                                                       const PotentialEnergy& energy,
                                                       const IntegratorSpec& spec,
                                                       double t_end);

}  // namespace wassim

#endif  // WASSIM_FLOWS_HPP
