#include "bcl/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "bcl/errors.hpp"

namespace bcl {

namespace {

void same_size(std::size_t a, std::size_t b) {
  if (a != b) throw ArgumentError("distributions live on different index sets");
}

}  // namespace

double tv_distance(std::span<const double> p, std::span<const double> q) {
  same_size(p.size(), q.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) acc += std::abs(p[i] - q[i]);
  return 0.5 * acc;
}

double tv_distance(const Distribution& p, const Distribution& q) { return tv_distance(p.weights(), q.weights()); }

Divergence kl_divergence(std::span<const double> p, std::span<const double> q) {
  same_size(p.size(), q.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) return {std::numeric_limits<double>::infinity(), true};
    acc += p[i] * std::log(p[i] / q[i]);
  }
  // Round-off can push an exact zero slightly negative.
  return {std::max(acc, 0.0), false};
}

Divergence kl_divergence(const Distribution& p, const Distribution& q) {
  return kl_divergence(p.weights(), q.weights());
}

double js_divergence(std::span<const double> p, std::span<const double> q) {
  same_size(p.size(), q.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double mid = 0.5 * (p[i] + q[i]);
    if (p[i] > 0.0) acc += 0.5 * p[i] * std::log(p[i] / mid);
    if (q[i] > 0.0) acc += 0.5 * q[i] * std::log(q[i] / mid);
  }
  return std::clamp(acc, 0.0, std::log(2.0));
}

double js_divergence(const Distribution& p, const Distribution& q) { return js_divergence(p.weights(), q.weights()); }

double policy_gap_tv(const DiscretePolicy& pi_d, const DiscretePolicy& pi, const Distribution& weighting) {
  if (pi_d.n_states() != pi.n_states() || pi_d.n_actions() != pi.n_actions()) {
    throw ArgumentError("policies have different shapes");
  }
  same_size(weighting.size(), pi.n_states());
  double acc = 0.0;
  for (std::size_t s = 0; s < pi.n_states(); ++s) {
    if (weighting[s] == 0.0) continue;
    acc += weighting[s] * tv_distance(pi_d.row(s), pi.row(s));
  }
  return acc;
}

double transition_gap_tv(const TransitionKernel& t, const TransitionKernel& t_hat, const Distribution& weighting) {
  if (t.n_states() != t_hat.n_states() || t.n_actions() != t_hat.n_actions()) {
    throw ArgumentError("kernels have different shapes");
  }
  same_size(weighting.size(), t.n_states() * t.n_actions());
  double acc = 0.0;
  for (std::size_t s = 0; s < t.n_states(); ++s) {
    for (std::size_t a = 0; a < t.n_actions(); ++a) {
      const double w = weighting[s * t.n_actions() + a];
      if (w == 0.0) continue;
      acc += w * tv_distance(t.row(s, a), t_hat.row(s, a));
    }
  }
  return acc;
}

double transition_gap_l2(const TransitionKernel& t_det, const TransitionKernel& t_hat_det,
                         const Distribution& weighting, const PointSet& state_embed) {
  if (!t_det.deterministic() || !t_hat_det.deterministic()) {
    throw ArgumentError("transition_gap_l2 needs deterministic kernels");
  }
  if (t_det.n_states() != t_hat_det.n_states() || t_det.n_actions() != t_hat_det.n_actions()) {
    throw ArgumentError("kernels have different shapes");
  }
  if (state_embed.size() != t_det.n_states()) throw ArgumentError("embedding does not match the kernel");
  same_size(weighting.size(), t_det.n_states() * t_det.n_actions());
  double acc = 0.0;
  for (std::size_t s = 0; s < t_det.n_states(); ++s) {
    for (std::size_t a = 0; a < t_det.n_actions(); ++a) {
      const double w = weighting[s * t_det.n_actions() + a];
      if (w == 0.0) continue;
      acc += w * state_embed.distance(t_det.next_state(s, a), t_hat_det.next_state(s, a));
    }
  }
  return acc;
}

}  // namespace bcl
