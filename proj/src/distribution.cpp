#include "bcl/distribution.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "bcl/errors.hpp"

namespace bcl {

void normalize_probability_row(std::span<double> row) {
  if (row.empty()) throw ArgumentError("probability row is empty");
  double sum = 0.0;
  for (double& w : row) {
    if (!std::isfinite(w)) throw ArgumentError("probability entry is not finite");
    if (w < -tol::kProbability) {
      throw ArgumentError("negative probability entry " + std::to_string(w));
    }
    if (w < 0.0) w = 0.0;
    sum += w;
  }
  if (std::abs(sum - 1.0) > tol::kProbability) {
    throw ArgumentError("probability row sums to " + std::to_string(sum));
  }
  // Rows already normalized up to summation round-off are kept bit-for-bit,
  // which makes construction idempotent and serialization lossless.
  const double roundoff = 8.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(row.size());
  if (std::abs(sum - 1.0) > roundoff) {
    for (double& w : row) w /= sum;
  }
}

Distribution::Distribution(std::vector<double> weights) : weights_(std::move(weights)) {
  normalize_probability_row(weights_);
}

Distribution Distribution::normalized(std::vector<double> weights) {
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ArgumentError("weights must be finite and nonnegative");
    sum += w;
  }
  if (!(sum > 0.0)) throw ArgumentError("weights sum to zero");
  for (double& w : weights) w /= sum;
  return Distribution(std::move(weights));
}

Distribution Distribution::point_mass(std::size_t size, std::size_t index) {
  if (index >= size) throw ArgumentError("point mass index out of range");
  std::vector<double> w(size, 0.0);
  w[index] = 1.0;
  return Distribution(std::move(w));
}

Distribution Distribution::uniform(std::size_t size) {
  if (size == 0) throw ArgumentError("uniform distribution over empty set");
  return Distribution(std::vector<double>(size, 1.0 / static_cast<double>(size)));
}

std::vector<std::size_t> Distribution::support() const {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (weights_[i] > tol::kSupport) idx.push_back(i);
  }
  return idx;
}

DiscretePolicy::DiscretePolicy(std::size_t n_states, std::size_t n_actions, std::vector<double> probs)
    : n_states_(n_states), n_actions_(n_actions), probs_(std::move(probs)) {
  if (n_states == 0 || n_actions == 0) throw ArgumentError("policy needs at least one state and action");
  if (probs_.size() != n_states * n_actions) throw ArgumentError("policy table has the wrong size");
  for (std::size_t s = 0; s < n_states_; ++s) {
    normalize_probability_row({probs_.data() + s * n_actions_, n_actions_});
  }
}

DiscretePolicy::DiscretePolicy(const std::vector<Distribution>& rows) {
  if (rows.empty()) throw ArgumentError("policy needs at least one state");
  n_states_ = rows.size();
  n_actions_ = rows.front().size();
  probs_.reserve(n_states_ * n_actions_);
  for (const auto& r : rows) {
    if (r.size() != n_actions_) throw ArgumentError("policy rows differ in length");
    probs_.insert(probs_.end(), r.vector().begin(), r.vector().end());
  }
}

DiscretePolicy DiscretePolicy::uniform(std::size_t n_states, std::size_t n_actions) {
  if (n_actions == 0) throw ArgumentError("policy needs at least one action");
  return DiscretePolicy(n_states, n_actions,
                        std::vector<double>(n_states * n_actions, 1.0 / static_cast<double>(n_actions)));
}

Distribution DiscretePolicy::row_distribution(std::size_t s) const {
  auto r = row(s);
  return Distribution(std::vector<double>(r.begin(), r.end()));
}

}  // namespace bcl
