#include "bcl/mbrl.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <limits>
#include <random>

#include <Eigen/Dense>

#include "bcl/bellman_flow.hpp"
#include "bcl/errors.hpp"
#include "bcl/metrics.hpp"
#include "bcl/parallel.hpp"

namespace bcl {

namespace {

constexpr double kZeroWeight = 1e-14;

std::size_t draw_index(std::span<const double> weights, double u) {
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    acc += weights[i];
    last = i;
    if (u < acc) return i;
  }
  return last;
}

// Objective the improver maximizes, evaluated exactly.
double improver_objective(const DiscretePolicy& pi, const TabularMDP& model, const std::optional<double>& beta,
                          const Distribution& branch_init) {
  if (!beta) return cumulative_reward(occupancy(pi, model), model);
  return cumulative_reward(occupancy(branch_init, pi, model, *beta), model);
}

}  // namespace

void MbrlConfig::validate(const TabularMDP& mdp) const {
  if (truncation_q < 1) throw ArgumentError("truncation level q must be at least 1");
  if (!(kappa > 0.0 && kappa <= 1.0)) throw ArgumentError("kappa must lie in (0, 1]");
  if (!(smoothing_alpha > 0.0) || !std::isfinite(smoothing_alpha)) {
    throw ArgumentError("smoothing alpha must be positive");
  }
  if (rollouts_per_iter < 1) throw ArgumentError("need at least one rollout per iteration");
  if (beta && !(*beta > 0.0 && *beta < mdp.gamma())) throw ArgumentError("beta must satisfy 0 < beta < gamma");
  if (initial_policy &&
      (initial_policy->n_states() != mdp.n_states() || initial_policy->n_actions() != mdp.n_actions())) {
    throw ArgumentError("initial policy shape does not match the MDP");
  }
}

TransitionKernel fit_model(const Dataset& data, double alpha, std::size_t n, std::size_t m) {
  if (data.empty()) throw ArgumentError("cannot fit a model to an empty dataset");
  if (!(alpha > 0.0)) throw ArgumentError("smoothing alpha must be positive");
  std::vector<double> counts(n * m * n, 0.0);
  std::vector<double> totals(n * m, 0.0);
  for (const auto& t : data) {
    if (t.state >= n || t.action >= m || t.next >= n) throw ArgumentError("transition index out of range");
    counts[(t.state * m + t.action) * n + t.next] += 1.0;
    totals[t.state * m + t.action] += 1.0;
  }
  std::vector<double> probs(n * m * n);
  for (std::size_t k = 0; k < n * m; ++k) {
    const double denom = totals[k] + alpha * static_cast<double>(n);
    for (std::size_t t = 0; t < n; ++t) probs[k * n + t] = (counts[k * n + t] + alpha) / denom;
  }
  return TransitionKernel(n, m, std::move(probs));
}

DiscretePolicy sampling_policy(const std::vector<DiscretePolicy>& previous, const TabularMDP& mdp) {
  if (previous.empty()) throw ArgumentError("sampling_policy needs at least one policy");
  const std::size_t n = mdp.n_states(), m = mdp.n_actions();
  for (const auto& pi : previous) {
    if (pi.n_states() != n || pi.n_actions() != m) throw ArgumentError("policy shape does not match the MDP");
  }
  if (previous.size() == 1) return previous.front();

  std::vector<double> mix(n * m, 0.0), weight(n, 0.0);
  for (const auto& pi : previous) {
    const auto occ = occupancy(pi, mdp);
    for (std::size_t s = 0; s < n; ++s) {
      const double w = occ.state_dist[s];
      weight[s] += w;
      for (std::size_t a = 0; a < m; ++a) mix[s * m + a] += w * pi(s, a);
    }
  }
  const auto& last = previous.back();
  for (std::size_t s = 0; s < n; ++s) {
    auto row = std::span<double>(mix).subspan(s * m, m);
    if (weight[s] <= kZeroWeight) {
      for (std::size_t a = 0; a < m; ++a) row[a] = last(s, a);
      continue;
    }
    for (auto& x : row) x /= weight[s];
    normalize_probability_row(row);
  }
  return DiscretePolicy(n, m, std::move(mix));
}

std::vector<double> action_values(const DiscretePolicy& pi, const TabularMDP& mdp, double discount) {
  const std::size_t n = mdp.n_states(), m = mdp.n_actions();
  if (!(discount >= 0.0 && discount < 1.0)) throw ArgumentError("discount must lie in [0, 1)");
  const auto p = state_transition_matrix(pi, mdp.kernel());
  const auto N = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(N, N);
  Eigen::VectorXd r_pi = Eigen::VectorXd::Zero(N);
  for (std::size_t s = 0; s < n; ++s) {
    const auto i = static_cast<Eigen::Index>(s);
    for (std::size_t t = 0; t < n; ++t) lhs(i, static_cast<Eigen::Index>(t)) -= discount * p[s * n + t];
    for (std::size_t a = 0; a < m; ++a) r_pi(i) += pi(s, a) * mdp.reward(s, a);
  }
  const Eigen::VectorXd solved = Eigen::PartialPivLU<Eigen::MatrixXd>(lhs).solve(r_pi);
  std::vector<double> v(n);
  for (std::size_t s = 0; s < n; ++s) {
    v[s] = solved(static_cast<Eigen::Index>(s));
    if (!std::isfinite(v[s])) throw NumericalError("policy evaluation produced a non-finite value");
  }
  std::vector<double> q(n * m);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t a = 0; a < m; ++a) {
      double next = 0.0;
      const auto row = mdp.kernel().row(s, a);
      for (std::size_t t = 0; t < n; ++t) next += row[t] * v[t];
      q[s * m + a] = mdp.reward(s, a) + discount * next;
    }
  }
  return q;
}

DiscretePolicy improve_policy(const DiscretePolicy& pi_d, const TabularMDP& model, double kappa,
                              std::optional<double> beta) {
  if (!(kappa > 0.0 && kappa <= 1.0)) throw ArgumentError("kappa must lie in (0, 1]");
  const std::size_t n = model.n_states(), m = model.n_actions();
  if (pi_d.n_states() != n || pi_d.n_actions() != m) throw ArgumentError("policy shape does not match the model");
  const double discount = beta ? *beta : model.gamma();
  const auto q = action_values(pi_d, model, discount);

  std::vector<double> out = pi_d.probs();
  std::vector<std::size_t> order(m);
  for (std::size_t s = 0; s < n; ++s) {
    const double* qs = q.data() + s * m;
    std::size_t best = 0;
    for (std::size_t a = 1; a < m; ++a) {
      if (qs[a] > qs[best]) best = a;
    }
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return qs[a] < qs[b]; });
    double budget = kappa, moved = 0.0;
    for (std::size_t a : order) {
      if (a == best || budget <= 0.0) continue;
      if (!(qs[a] < qs[best])) break;
      double& w = out[s * m + a];
      const double take = std::min(w, budget);
      w -= take;
      budget -= take;
      moved += take;
    }
    out[s * m + best] += moved;
    normalize_probability_row(std::span<double>(out).subspan(s * m, m));
  }
  return DiscretePolicy(n, m, std::move(out));
}

std::size_t horizon_cap(double gamma) {
  // 1 - 0.9 is 0.09999999999999998
  return static_cast<std::size_t>(std::ceil(10.0 / (1.0 - gamma) * (1.0 - 1e-12)));
}

Dataset sample_rollouts(const TabularMDP& mdp, const DiscretePolicy& pi, std::size_t rollouts, std::uint64_t seed,
                        std::uint64_t iteration) {
  const std::size_t cap = horizon_cap(mdp.gamma());
  auto one = [&](std::size_t idx) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(iteration), static_cast<std::uint32_t>(idx)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::geometric_distribution<std::size_t> failures(1.0 - mdp.gamma());
    const std::size_t h = std::min(cap, failures(rng) + 1);
    Dataset out;
    out.reserve(h);
    std::size_t s = draw_index(mdp.init_dist().weights(), unit(rng));
    for (std::size_t t = 0; t < h; ++t) {
      const std::size_t a = draw_index(pi.row(s), unit(rng));
      const std::size_t next = draw_index(mdp.kernel().row(s, a), unit(rng));
      out.push_back({s, a, next});
      s = next;
    }
    return out;
  };
  const auto parts = parallel_map(rollouts, one);
  Dataset all;
  for (const auto& p : parts) all.insert(all.end(), p.begin(), p.end());
  return all;
}

MbrlTrace run_mbrl(const TabularMDP& mdp, const MbrlConfig& cfg) {
  cfg.validate(mdp);
  const std::size_t n = mdp.n_states(), m = mdp.n_actions();
  const double g = mdp.gamma();

  MbrlTrace trace;
  trace.horizon_cap = horizon_cap(g);
  trace.truncation_mass = std::pow(g, static_cast<double>(trace.horizon_cap - 1));

  DiscretePolicy current = cfg.initial_policy ? *cfg.initial_policy : DiscretePolicy::uniform(n, m);
  trace.initial_reward_true = cumulative_reward(occupancy(current, mdp), mdp);

  std::deque<Dataset> datasets;
  std::deque<DiscretePolicy> behaviour;
  double prev_true = trace.initial_reward_true;

  for (std::size_t i = 1; i <= cfg.iterations; ++i) {
    datasets.push_back(sample_rollouts(mdp, current, cfg.rollouts_per_iter, cfg.seed, i));
    behaviour.push_back(current);
    while (datasets.size() > cfg.truncation_q) {
      datasets.pop_front();
      behaviour.pop_front();
    }
    Dataset data;
    for (const auto& d : datasets) data.insert(data.end(), d.begin(), d.end());

    const DiscretePolicy pi_d =
        sampling_policy(std::vector<DiscretePolicy>(behaviour.begin(), behaviour.end()), mdp);
    const TabularMDP model =
        cfg.exact_model ? mdp : mdp.with_kernel(fit_model(data, cfg.smoothing_alpha, n, m));

    const auto occ_d = occupancy(pi_d, mdp);
    const Distribution& branch_init = occ_d.state_dist;
    DiscretePolicy next = improve_policy(pi_d, model, cfg.kappa, cfg.beta);

    MbrlIteration rec;
    rec.iteration = i;
    rec.dataset_size = data.size();
    rec.reward_true = cumulative_reward(occupancy(next, mdp), mdp);
    rec.reward_model = cumulative_reward(occupancy(next, model), model);
    rec.prev_reward_true = prev_true;
    rec.prev_reward_model = cumulative_reward(occupancy(current, model), model);
    rec.true_change = rec.reward_true - rec.prev_reward_true;
    rec.improvement_model = rec.reward_model - rec.prev_reward_model;
    rec.reward_errors = rec.reward_true - rec.reward_model + rec.prev_reward_model - rec.prev_reward_true;
    rec.identity_residual = rec.true_change - (rec.improvement_model + rec.reward_errors);
    rec.eps_model = transition_gap_tv(mdp.kernel(), model.kernel(), occ_d.state_action_dist);
    rec.eps_policy = policy_gap_tv(pi_d, next, occ_d.state_dist);
    rec.model_gain =
        improver_objective(next, model, cfg.beta, branch_init) - improver_objective(pi_d, model, cfg.beta, branch_init);

    rec.reports.push_back(check_theorem1(mdp, pi_d, next));
    rec.reports.push_back(check_theorem2(mdp, model, pi_d));
    rec.reports.push_back(check_mbrl_stochastic(mdp, model, pi_d, next));
    if (cfg.beta) rec.reports.push_back(check_cor3_branched(mdp, model, pi_d, next, *cfg.beta));

    trace.iterations.push_back(std::move(rec));
    prev_true = trace.iterations.back().reward_true;
    current = std::move(next);
  }
  trace.final_policy = current;
  return trace;
}

}  // namespace bcl
