#include "bcl/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "bcl/errors.hpp"

namespace bcl {

namespace {

std::vector<double> random_simplex_point(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> w(n);
  double sum = 0.0;
  for (auto& x : w) {
    x = -std::log1p(-unif(rng));
    sum += x;
  }
  if (sum <= 0.0) {
    std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(n));
    return w;
  }
  for (auto& x : w) x /= sum;
  return w;
}

// Renormalizes a row produced by exact-in-theory convex combinations.
void renormalize(std::span<double> row) {
  double sum = 0.0;
  for (double& x : row) {
    if (x < 0.0) x = 0.0;
    sum += x;
  }
  for (double& x : row) x /= sum;
}

}  // namespace

PointSet::PointSet(std::size_t dim, std::vector<double> coords) : dim_(dim), coords_(std::move(coords)) {
  if (dim_ == 0) throw ArgumentError("embedding dimension must be positive");
  if (coords_.size() % dim_ != 0) throw ArgumentError("coordinate count is not a multiple of the dimension");
  for (double c : coords_) {
    if (!std::isfinite(c)) throw ArgumentError("embedding coordinate is not finite");
  }
}

PointSet PointSet::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw ArgumentError("empty point set");
  const std::size_t dim = rows.front().size();
  std::vector<double> coords;
  coords.reserve(rows.size() * dim);
  for (const auto& r : rows) {
    if (r.size() != dim) throw ArgumentError("points differ in dimension");
    coords.insert(coords.end(), r.begin(), r.end());
  }
  return PointSet(dim, std::move(coords));
}

double euclidean(std::span<const double> x, std::span<const double> y) {
  double acc = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double d = x[k] - y[k];
    acc += d * d;
  }
  return std::sqrt(acc);
}

double PointSet::distance(std::size_t i, std::size_t j) const { return euclidean((*this)[i], (*this)[j]); }

TransitionKernel::TransitionKernel(std::size_t n_states, std::size_t n_actions, std::vector<double> probs)
    : n_states_(n_states), n_actions_(n_actions), probs_(std::move(probs)) {
  if (n_states == 0 || n_actions == 0) throw ArgumentError("kernel needs at least one state and action");
  if (probs_.size() != n_states * n_states * n_actions) throw ArgumentError("kernel has the wrong size");
  bool point_masses = true;
  std::vector<std::size_t> next(n_states * n_actions);
  for (std::size_t sa = 0; sa < n_states * n_actions; ++sa) {
    std::span<double> r{probs_.data() + sa * n_states, n_states};
    normalize_probability_row(r);
    if (!point_masses) continue;
    const auto it = std::find(r.begin(), r.end(), 1.0);
    if (it == r.end() || std::count(r.begin(), r.end(), 0.0) != static_cast<long>(n_states) - 1) {
      point_masses = false;
    } else {
      next[sa] = static_cast<std::size_t>(it - r.begin());
    }
  }
  if (point_masses) next_state_ = std::move(next);
}

TransitionKernel TransitionKernel::from_map(std::size_t n_states, std::size_t n_actions,
                                            const std::vector<std::size_t>& next_state) {
  if (next_state.size() != n_states * n_actions) throw ArgumentError("next-state table has the wrong size");
  std::vector<double> probs(n_states * n_states * n_actions, 0.0);
  for (std::size_t sa = 0; sa < next_state.size(); ++sa) {
    if (next_state[sa] >= n_states) throw ArgumentError("next-state index out of range");
    probs[sa * n_states + next_state[sa]] = 1.0;
  }
  return TransitionKernel(n_states, n_actions, std::move(probs));
}

std::size_t TransitionKernel::next_state(std::size_t s, std::size_t a) const {
  if (!deterministic()) throw ArgumentError("kernel is not deterministic");
  return next_state_[s * n_actions_ + a];
}

TabularMDP::TabularMDP(PointSet state_embed, PointSet action_embed, TransitionKernel kernel,
                       std::vector<double> reward, double r_max, double gamma, std::optional<Distribution> init)
    : state_embed_(std::move(state_embed)),
      action_embed_(std::move(action_embed)),
      kernel_(std::move(kernel)),
      reward_(std::move(reward)),
      r_max_(r_max),
      gamma_(gamma) {
  const std::size_t n = kernel_.n_states(), m = kernel_.n_actions();
  if (state_embed_.size() != n) throw ArgumentError("state embedding count does not match n_states");
  if (action_embed_.size() != m) throw ArgumentError("action embedding count does not match n_actions");
  if (reward_.size() != n * m) throw ArgumentError("reward table has the wrong size");
  if (!(r_max >= 0.0) || !std::isfinite(r_max)) throw ArgumentError("r_max must be finite and nonnegative");
  for (double r : reward_) {
    if (!(r >= 0.0 && r <= r_max)) throw ArgumentError("reward " + std::to_string(r) + " outside [0, r_max]");
  }
  if (!(gamma > 0.0 && gamma < 1.0)) throw ArgumentError("gamma must lie in (0, 1)");
  init_ = init ? std::move(*init) : Distribution::uniform(n);
  if (init_.size() != n) throw ArgumentError("initial distribution has the wrong size");
}

TabularMDP TabularMDP::with_kernel(TransitionKernel kernel) const {
  if (kernel.n_states() != n_states() || kernel.n_actions() != n_actions()) {
    throw ArgumentError("replacement kernel has a different shape");
  }
  TabularMDP out = *this;
  out.kernel_ = std::move(kernel);
  return out;
}

TabularMDP TabularMDP::with_gamma(double gamma) const {
  return TabularMDP(state_embed_, action_embed_, kernel_, reward_, r_max_, gamma, init_);
}

TabularMDP TabularMDP::with_init(Distribution init) const {
  return TabularMDP(state_embed_, action_embed_, kernel_, reward_, r_max_, gamma_, std::move(init));
}

TabularMDP make_random_mdp(std::size_t n_states, std::size_t n_actions, std::uint64_t seed, double stochasticity,
                           double gamma, std::size_t embed_dim) {
  if (n_states < 2) throw ArgumentError("make_random_mdp needs n_states >= 2");
  if (n_actions < 1) throw ArgumentError("make_random_mdp needs n_actions >= 1");
  if (!(stochasticity >= 0.0 && stochasticity <= 1.0)) throw ArgumentError("stochasticity must lie in [0, 1]");
  if (embed_dim == 0) throw ArgumentError("embedding dimension must be positive");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, n_states - 1);

  std::vector<double> s_coords(n_states * embed_dim), a_coords(n_actions * embed_dim);
  for (auto& c : s_coords) c = unif(rng);
  for (auto& c : a_coords) c = unif(rng);

  std::vector<double> probs(n_states * n_actions * n_states, 0.0);
  for (std::size_t sa = 0; sa < n_states * n_actions; ++sa) {
    std::span<double> row{probs.data() + sa * n_states, n_states};
    const std::size_t target = pick(rng);
    if (stochasticity > 0.0) {
      const auto noise = random_simplex_point(n_states, rng);
      for (std::size_t k = 0; k < n_states; ++k) row[k] = stochasticity * noise[k];
      row[target] += 1.0 - stochasticity;
      renormalize(row);
    } else {
      row[target] = 1.0;
    }
  }

  std::vector<double> reward(n_states * n_actions);
  for (auto& r : reward) r = unif(rng);

  return TabularMDP(PointSet(embed_dim, std::move(s_coords)), PointSet(embed_dim, std::move(a_coords)),
                    TransitionKernel(n_states, n_actions, std::move(probs)), std::move(reward), 1.0, gamma);
}

DiscretePolicy random_policy(std::size_t n_states, std::size_t n_actions, std::uint64_t seed) {
  if (n_states == 0 || n_actions == 0) throw ArgumentError("random_policy needs positive sizes");
  std::mt19937_64 rng(seed);
  std::vector<double> probs;
  probs.reserve(n_states * n_actions);
  for (std::size_t s = 0; s < n_states; ++s) {
    const auto row = random_simplex_point(n_actions, rng);
    probs.insert(probs.end(), row.begin(), row.end());
  }
  return DiscretePolicy(n_states, n_actions, std::move(probs));
}

DiscretePolicy perturb_policy(const DiscretePolicy& pi, double magnitude, std::uint64_t seed) {
  if (!(magnitude >= 0.0 && magnitude <= 1.0)) throw ArgumentError("perturbation magnitude must lie in [0, 1]");
  if (magnitude == 0.0) return pi;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const std::size_t m = pi.n_actions();
  std::vector<double> probs = pi.probs();
  for (std::size_t s = 0; s < pi.n_states(); ++s) {
    const double lambda = magnitude * unif(rng);
    const auto target = random_simplex_point(m, rng);
    std::span<double> row{probs.data() + s * m, m};
    for (std::size_t a = 0; a < m; ++a) row[a] += lambda * (target[a] - row[a]);
    renormalize(row);
  }
  return DiscretePolicy(pi.n_states(), m, std::move(probs));
}

TransitionKernel perturb_kernel(const TabularMDP& mdp, double magnitude, std::uint64_t seed) {
  if (!(magnitude >= 0.0 && magnitude <= 1.0)) throw ArgumentError("perturbation magnitude must lie in [0, 1]");
  const auto& k = mdp.kernel();
  if (magnitude == 0.0) return k;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const std::size_t n = k.n_states();
  std::vector<double> probs = k.probs();
  for (std::size_t sa = 0; sa < n * k.n_actions(); ++sa) {
    const double lambda = magnitude * unif(rng);
    const auto target = random_simplex_point(n, rng);
    std::span<double> row{probs.data() + sa * n, n};
    for (std::size_t j = 0; j < n; ++j) row[j] += lambda * (target[j] - row[j]);
    renormalize(row);
  }
  return TransitionKernel(n, k.n_actions(), std::move(probs));
}

TransitionKernel perturb_deterministic(const TabularMDP& mdp, double fraction, std::uint64_t seed) {
  if (!mdp.deterministic()) throw ArgumentError("perturb_deterministic needs a deterministic MDP");
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw ArgumentError("fraction must lie in [0, 1]");
  const std::size_t n = mdp.n_states(), m = mdp.n_actions();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<std::size_t> next = mdp.kernel().next_state_table();
  const auto& embed = mdp.state_embed();
  std::vector<std::size_t> order(n);
  for (std::size_t sa = 0; sa < n * m; ++sa) {
    if (unif(rng) >= fraction) continue;
    const std::size_t t = next[sa];
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
      const double dx = embed.distance(t, x), dy = embed.distance(t, y);
      return dx != dy ? dx < dy : x < y;
    });
    const std::size_t pool = std::min<std::size_t>(4, n - 1);
    if (pool == 0) continue;
    std::uniform_int_distribution<std::size_t> pick(1, pool);
    next[sa] = order[pick(rng)];
  }
  return TransitionKernel::from_map(n, m, next);
}

}  // namespace bcl
