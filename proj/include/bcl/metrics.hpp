#pragma once

#include <limits>
#include <span>

#include "bcl/distribution.hpp"
#include "bcl/mdp.hpp"

namespace bcl {

/// Half the l1 distance.
double tv_distance(std::span<const double> p, std::span<const double> q);
double tv_distance(const Distribution& p, const Distribution& q);

/// KL(p || q) in nats. When p puts mass outside the support of q the value is
/// +infinity and `infinite` is set; callers treat that as a vacuous bound
/// rather than an error.
struct Divergence {
  double value = 0.0;
  bool infinite = false;
};

Divergence kl_divergence(std::span<const double> p, std::span<const double> q);
Divergence kl_divergence(const Distribution& p, const Distribution& q);

/// Jensen-Shannon divergence in nats, in [0, ln 2].
double js_divergence(std::span<const double> p, std::span<const double> q);
double js_divergence(const Distribution& p, const Distribution& q);

/// sum_s weighting(s) * TV(pi_d(.|s), pi(.|s)).
double policy_gap_tv(const DiscretePolicy& pi_d, const DiscretePolicy& pi, const Distribution& weighting);

/// sum_{s,a} weighting(s, a) * TV(T(.|s, a), T_hat(.|s, a)), weighting row-major over (s, a).
double transition_gap_tv(const TransitionKernel& t, const TransitionKernel& t_hat, const Distribution& weighting);

/// sum_{s,a} weighting(s, a) * || embed(T(s, a)) - embed(T_hat(s, a)) ||_2 for deterministic kernels.
double transition_gap_l2(const TransitionKernel& t_det, const TransitionKernel& t_hat_det,
                         const Distribution& weighting, const PointSet& state_embed);

}  // namespace bcl
