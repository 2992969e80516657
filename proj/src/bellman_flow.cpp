#include "bcl/bellman_flow.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "bcl/errors.hpp"

namespace bcl {

namespace {

constexpr double kIterationTolerance = 1e-13;
constexpr std::size_t kIterationLimit = 100000;
constexpr double kPathAgreement = 1e-9;

void check_shapes(const Distribution& init, const DiscretePolicy& pi, const TabularMDP& mdp) {
  if (init.size() != mdp.n_states()) throw ArgumentError("initial distribution does not match n_states");
  if (pi.n_states() != mdp.n_states() || pi.n_actions() != mdp.n_actions()) {
    throw ArgumentError("policy shape does not match the MDP");
  }
}

// out = P^T rho
void push_forward(const std::vector<double>& matrix, std::span<const double> rho, std::span<double> out) {
  const std::size_t n = rho.size();
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    const double w = rho[s];
    if (w == 0.0) continue;
    const double* row = matrix.data() + s * n;
    for (std::size_t t = 0; t < n; ++t) out[t] += w * row[t];
  }
}

}  // namespace

std::vector<double> state_transition_matrix(const DiscretePolicy& pi, const TransitionKernel& kernel) {
  const std::size_t n = kernel.n_states(), m = kernel.n_actions();
  if (pi.n_states() != n || pi.n_actions() != m) throw ArgumentError("policy shape does not match the kernel");
  std::vector<double> p(n * n, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    double* row = p.data() + s * n;
    for (std::size_t a = 0; a < m; ++a) {
      const double w = pi(s, a);
      if (w == 0.0) continue;
      if (kernel.deterministic()) {
        row[kernel.next_state(s, a)] += w;
        continue;
      }
      const auto k = kernel.row(s, a);
      for (std::size_t t = 0; t < n; ++t) row[t] += w * k[t];
    }
  }
  return p;
}

Distribution step_density(const Distribution& init, const DiscretePolicy& pi, const TabularMDP& mdp,
                          std::size_t step) {
  check_shapes(init, pi, mdp);
  if (step == 0) return init;
  const auto p = state_transition_matrix(pi, mdp.kernel());
  std::vector<double> cur = init.vector(), next(cur.size());
  for (std::size_t i = 0; i < step; ++i) {
    push_forward(p, cur, next);
    std::swap(cur, next);
  }
  return Distribution(std::move(cur));
}

BellmanFlowOperator::BellmanFlowOperator(Distribution init, const DiscretePolicy& pi, const TabularMDP& mdp,
                                         double discount)
    : init_(std::move(init)), discount_(discount) {
  check_shapes(init_, pi, mdp);
  if (!(discount >= 0.0 && discount < 1.0)) throw ArgumentError("discount must lie in [0, 1)");
  matrix_ = state_transition_matrix(pi, mdp.kernel());
}

void BellmanFlowOperator::apply_into(std::span<const double> rho, std::span<double> out) const {
  if (rho.size() != n_states() || out.size() != n_states()) throw ArgumentError("distribution size mismatch");
  push_forward(matrix_, rho, out);
  const auto& r0 = init_.vector();
  for (std::size_t t = 0; t < out.size(); ++t) out[t] = (1.0 - discount_) * r0[t] + discount_ * out[t];
}

Distribution BellmanFlowOperator::apply(const Distribution& rho) const {
  std::vector<double> out(n_states());
  apply_into(rho.weights(), out);
  return Distribution(std::move(out));
}

Distribution apply_bellman(const BellmanFlowOperator& op, const Distribution& rho) { return op.apply(rho); }

OccupancyMeasure occupancy(const Distribution& init, const DiscretePolicy& pi, const TabularMDP& mdp,
                           double discount) {
  if (!(discount > 0.0 && discount < 1.0)) throw ArgumentError("occupancy discount must lie in (0, 1)");
  const BellmanFlowOperator op(init, pi, mdp, discount);
  const std::size_t n = mdp.n_states(), m = mdp.n_actions();

  // Direct solve.
  Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  const auto& p = op.state_matrix();
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t t = 0; t < n; ++t) {
      lhs(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(s)) -= discount * p[s * n + t];
    }
  }
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(n));
  for (std::size_t t = 0; t < n; ++t) rhs(static_cast<Eigen::Index>(t)) = (1.0 - discount) * init[t];
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(lhs);
  const Eigen::VectorXd solved = lu.solve(rhs);
  std::vector<double> direct(n);
  for (std::size_t t = 0; t < n; ++t) {
    direct[t] = solved(static_cast<Eigen::Index>(t));
    if (!std::isfinite(direct[t])) throw NumericalError("occupancy solve produced a non-finite value");
  }

  // Fixed-point iteration from init.
  std::vector<double> cur = init.vector(), next(n);
  std::size_t iters = 0;
  bool converged = false;
  while (iters < kIterationLimit) {
    op.apply_into(cur, next);
    ++iters;
    double change = 0.0;
    for (std::size_t t = 0; t < n; ++t) change += std::abs(next[t] - cur[t]);
    std::swap(cur, next);
    if (change < kIterationTolerance) {
      converged = true;
      break;
    }
  }
  double gap = 0.0;
  for (std::size_t t = 0; t < n; ++t) gap += std::abs(cur[t] - direct[t]);
  if (converged && gap > kPathAgreement) {
    throw NumericalError("occupancy solve and fixed-point iteration disagree by " + std::to_string(gap));
  }

  OccupancyMeasure occ{Distribution(direct), Distribution{}, discount, init, iters, converged, gap};
  std::vector<double> sa(n * m);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t a = 0; a < m; ++a) sa[s * m + a] = occ.state_dist[s] * pi(s, a);
  }
  occ.state_action_dist = Distribution(std::move(sa));
  return occ;
}

OccupancyMeasure occupancy(const DiscretePolicy& pi, const TabularMDP& mdp) {
  return occupancy(mdp.init_dist(), pi, mdp, mdp.gamma());
}

double cumulative_reward(const OccupancyMeasure& occ, const TabularMDP& mdp) {
  if (occ.state_action_dist.size() != mdp.n_states() * mdp.n_actions()) {
    throw ArgumentError("occupancy does not match the MDP's state-action set");
  }
  double acc = 0.0;
  const auto& r = mdp.rewards();
  for (std::size_t k = 0; k < r.size(); ++k) acc += r[k] * occ.state_action_dist[k];
  return acc / (1.0 - occ.discount);
}

double geometric_moment(double gamma, int k) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw ArgumentError("gamma must lie in (0, 1)");
  const double q = 1.0 - gamma;
  switch (k) {
    case 1:
      return 1.0 / q;
    case 2:
      return (1.0 + gamma) / (q * q);
    case 3:
      return (1.0 + 4.0 * gamma + gamma * gamma) / (q * q * q);
    default:
      throw ArgumentError("geometric_moment supports k in {1, 2, 3}");
  }
}

}  // namespace bcl
