#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "bcl/bounds.hpp"
#include "bcl/distribution.hpp"
#include "bcl/mdp.hpp"

namespace bcl {

struct Transition {
  std::size_t state = 0;
  std::size_t action = 0;
  std::size_t next = 0;
};

using Dataset = std::vector<Transition>;

struct MbrlConfig {
  std::size_t iterations = 10;
  std::size_t rollouts_per_iter = 100;
  /// Keep the datasets of the last q iterations.
  std::size_t truncation_q = 1;
  double smoothing_alpha = 1e-3;
  /// Per-state TV radius of the policy update.
  double kappa = 0.2;
  /// Branched discount; unset means plain model rollouts.
  std::optional<double> beta;
  std::uint64_t seed = 42;
  /// Replace the fitted model by the true kernel.
  bool exact_model = false;
  /// Starting policy; uniform when unset.
  std::optional<DiscretePolicy> initial_policy;

  /// Throws ArgumentError when an invariant is violated.
  void validate(const TabularMDP& mdp) const;
};

/// One pass of sample, truncate, fit, improve.
struct MbrlIteration {
  std::size_t iteration = 0;  // 1-based
  std::size_t dataset_size = 0;

  double reward_true = 0.0;        // R(pi_i, T)
  double reward_model = 0.0;       // R(pi_i, T_hat_i)
  double prev_reward_true = 0.0;   // R(pi_{i-1}, T)
  double prev_reward_model = 0.0;  // R(pi_{i-1}, T_hat_i)

  // R(pi_i,T) - R(pi_{i-1},T) = improvement_model + reward_errors.
  double true_change = 0.0;
  double improvement_model = 0.0;
  double reward_errors = 0.0;
  double identity_residual = 0.0;

  double eps_model = 0.0;   // TV model gap under rho_T^{pi_D}(s, a)
  double eps_policy = 0.0;  // TV policy gap pi_D vs pi_i under rho_T^{pi_D}(s)
  /// Gain of pi_i over pi_D in the objective the improver maximizes
  /// (model reward, or branched model reward when beta is set).
  double model_gain = 0.0;

  std::vector<BoundReport> reports;
};

struct MbrlTrace {
  double initial_reward_true = 0.0;
  std::size_t horizon_cap = 0;
  /// Probability mass of horizons at or beyond the cap, folded onto the cap.
  double truncation_mass = 0.0;
  std::vector<MbrlIteration> iterations;
  DiscretePolicy final_policy;
};

/// Dirichlet-smoothed maximum likelihood: (count(s,a,s') + alpha) / (count(s,a) + alpha * n).
TransitionKernel fit_model(const Dataset& data, double smoothing_alpha, std::size_t n_states, std::size_t n_actions);

/// Occupancy-weighted mixture of the given policies (oldest first). States
/// without occupancy weight take the last policy's row.
DiscretePolicy sampling_policy(const std::vector<DiscretePolicy>& previous, const TabularMDP& mdp_true);

/// Moves up to kappa of probability mass per state from the lowest-valued
/// actions to the greedy action of Q^{pi_d} on the model. With `beta` the
/// Q-values use that discount.
DiscretePolicy improve_policy(const DiscretePolicy& pi_d, const TabularMDP& mdp_model, double kappa,
                              std::optional<double> beta = std::nullopt);

/// Exact action values of pi at the given discount.
std::vector<double> action_values(const DiscretePolicy& pi, const TabularMDP& mdp, double discount);

/// Rollouts of (init, pi, T) with geometric horizons capped at ceil(10 / (1 - gamma)).
Dataset sample_rollouts(const TabularMDP& mdp, const DiscretePolicy& pi, std::size_t rollouts, std::uint64_t seed,
                        std::uint64_t iteration);

std::size_t horizon_cap(double gamma);

MbrlTrace run_mbrl(const TabularMDP& mdp_true, const MbrlConfig& config);

}  // namespace bcl
