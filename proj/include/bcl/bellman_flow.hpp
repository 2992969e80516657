#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bcl/distribution.hpp"
#include "bcl/mdp.hpp"

namespace bcl {

/// Row-major state-to-state matrix P(s, s') = sum_a pi(a|s) T(s'|s, a).
std::vector<double> state_transition_matrix(const DiscretePolicy& pi, const TransitionKernel& kernel);

/// Exact state distribution after `step` transitions from `init` under (pi, T).
Distribution step_density(const Distribution& init, const DiscretePolicy& pi, const TabularMDP& mdp,
                          std::size_t step);

/// B(rho) = (1 - discount) * init + discount * P^T rho.
///
/// The operator owns a copy of the policy-induced state matrix, so it stays
/// valid independently of the MDP it was built from.
class BellmanFlowOperator {
 public:
  BellmanFlowOperator(Distribution init, const DiscretePolicy& pi, const TabularMDP& mdp, double discount);

  Distribution apply(const Distribution& rho) const;
  /// Same map on a raw vector; used by fixed-point iteration.
  void apply_into(std::span<const double> rho, std::span<double> out) const;

  std::size_t n_states() const { return init_.size(); }
  double discount() const { return discount_; }
  const Distribution& init() const { return init_; }
  const std::vector<double>& state_matrix() const { return matrix_; }

 private:
  Distribution init_;
  double discount_;
  std::vector<double> matrix_;
};

Distribution apply_bellman(const BellmanFlowOperator& op, const Distribution& rho);

/// Normalized discounted occupancy measure.
struct OccupancyMeasure {
  Distribution state_dist;
  Distribution state_action_dist;  // row-major (s, a)
  double discount = 0.0;
  Distribution init_dist;

  // Diagnostics from the fixed-point cross-check.
  std::size_t iterations = 0;
  bool iteration_converged = true;
  double path_disagreement = 0.0;  // l1 gap between the solve and the iteration
};

/// Computes the occupancy measure by a dense LU solve of (I - discount P^T) rho = (1 - discount) init
/// and cross-checks it against fixed-point iteration of the flow operator.
///
/// The iteration stops when the l1 change drops below 1e-13 or after 1e5 steps; hitting the
/// step limit clears `iteration_converged` instead of failing. A converged iteration that
/// disagrees with the solve by more than 1e-9 in l1 raises NumericalError.
OccupancyMeasure occupancy(const Distribution& init, const DiscretePolicy& pi, const TabularMDP& mdp,
                           double discount);
/// Occupancy from the MDP's own initial distribution and discount.
OccupancyMeasure occupancy(const DiscretePolicy& pi, const TabularMDP& mdp);

/// (1 - discount)^{-1} * sum_{s,a} r(s, a) rho(s, a).
double cumulative_reward(const OccupancyMeasure& occ, const TabularMDP& mdp);

/// E[H^k] for H ~ Geometric(1 - gamma) on {1, 2, ...}, k in {1, 2, 3}.
double geometric_moment(double gamma, int k);

}  // namespace bcl
