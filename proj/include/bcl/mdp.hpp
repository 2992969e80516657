#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "bcl/distribution.hpp"

namespace bcl {

/// A finite set of points in R^dim, stored row-major.
class PointSet {
 public:
  PointSet() = default;
  PointSet(std::size_t dim, std::vector<double> coords);
  static PointSet from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t size() const { return dim_ == 0 ? 0 : coords_.size() / dim_; }
  std::size_t dim() const { return dim_; }
  std::span<const double> operator[](std::size_t i) const { return {coords_.data() + i * dim_, dim_}; }
  const std::vector<double>& coords() const { return coords_; }

  /// Euclidean distance between points i and j.
  double distance(std::size_t i, std::size_t j) const;

  friend bool operator==(const PointSet&, const PointSet&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> coords_;
};

double euclidean(std::span<const double> x, std::span<const double> y);

/// T(s' | s, a), stored as dense rows indexed by (s * n_actions + a).
class TransitionKernel {
 public:
  TransitionKernel() = default;
  TransitionKernel(std::size_t n_states, std::size_t n_actions, std::vector<double> probs);

  /// Point-mass kernel from a next-state table indexed by (s * n_actions + a).
  static TransitionKernel from_map(std::size_t n_states, std::size_t n_actions,
                                   const std::vector<std::size_t>& next_state);

  std::size_t n_states() const { return n_states_; }
  std::size_t n_actions() const { return n_actions_; }
  std::span<const double> row(std::size_t s, std::size_t a) const {
    return {probs_.data() + (s * n_actions_ + a) * n_states_, n_states_};
  }
  double operator()(std::size_t next, std::size_t s, std::size_t a) const {
    return probs_[(s * n_actions_ + a) * n_states_ + next];
  }
  const std::vector<double>& probs() const { return probs_; }

  bool deterministic() const { return !next_state_.empty(); }
  /// Cached successor of (s, a); only valid for deterministic kernels.
  std::size_t next_state(std::size_t s, std::size_t a) const;
  const std::vector<std::size_t>& next_state_table() const { return next_state_; }

  friend bool operator==(const TransitionKernel& a, const TransitionKernel& b) {
    return a.n_states_ == b.n_states_ && a.n_actions_ == b.n_actions_ && a.probs_ == b.probs_;
  }

 private:
  std::size_t n_states_ = 0;
  std::size_t n_actions_ = 0;
  std::vector<double> probs_;
  std::vector<std::size_t> next_state_;
};

/// Finite MDP with geometric embeddings of states and actions.
///
/// Immutable after construction. The initial distribution defaults to
/// uniform over states.
class TabularMDP {
 public:
  TabularMDP() = default;
  TabularMDP(PointSet state_embed, PointSet action_embed, TransitionKernel kernel,
             std::vector<double> reward, double r_max, double gamma,
             std::optional<Distribution> init = std::nullopt);

  std::size_t n_states() const { return kernel_.n_states(); }
  std::size_t n_actions() const { return kernel_.n_actions(); }
  const PointSet& state_embed() const { return state_embed_; }
  const PointSet& action_embed() const { return action_embed_; }
  const TransitionKernel& kernel() const { return kernel_; }
  double reward(std::size_t s, std::size_t a) const { return reward_[s * n_actions() + a]; }
  const std::vector<double>& rewards() const { return reward_; }
  double r_max() const { return r_max_; }
  double gamma() const { return gamma_; }
  const Distribution& init_dist() const { return init_; }
  bool deterministic() const { return kernel_.deterministic(); }

  TabularMDP with_kernel(TransitionKernel kernel) const;
  TabularMDP with_gamma(double gamma) const;
  TabularMDP with_init(Distribution init) const;

  friend bool operator==(const TabularMDP&, const TabularMDP&) = default;

 private:
  PointSet state_embed_;
  PointSet action_embed_;
  TransitionKernel kernel_;
  std::vector<double> reward_;
  double r_max_ = 0.0;
  double gamma_ = 0.0;
  Distribution init_;
};

/// Random instance: embeddings uniform in the unit cube, rewards uniform in
/// [0, 1]. Each kernel row is (1 - stochasticity) * point mass at a random
/// successor + stochasticity * a uniformly random simplex point, so
/// stochasticity = 0 yields a deterministic MDP.
TabularMDP make_random_mdp(std::size_t n_states, std::size_t n_actions, std::uint64_t seed,
                           double stochasticity, double gamma = 0.9, std::size_t embed_dim = 2);

/// Policy with rows drawn uniformly from the simplex.
DiscretePolicy random_policy(std::size_t n_states, std::size_t n_actions, std::uint64_t seed);

/// Mixes each row toward a random simplex point: row_s + magnitude * u_s * (q_s - row_s)
/// with u_s ~ U[0, 1]. Per-state TV to the input is magnitude * u_s * TV(q_s, row_s), so it
/// never exceeds magnitude and, for a fixed seed, grows linearly with magnitude.
DiscretePolicy perturb_policy(const DiscretePolicy& pi, double magnitude, std::uint64_t seed);

/// Same mixing construction applied to every kernel row of the MDP.
TransitionKernel perturb_kernel(const TabularMDP& mdp, double magnitude, std::uint64_t seed);

/// Redirects each (s, a) of a deterministic MDP with probability `fraction` to one of the
/// four states nearest (in the embedding) to its original successor.
TransitionKernel perturb_deterministic(const TabularMDP& mdp, double fraction, std::uint64_t seed);

}  // namespace bcl
