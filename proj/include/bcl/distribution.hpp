#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace bcl {

/// A probability vector over a finite index set.
///
/// Construction validates the weights (no entry below -1e-12, sum within
/// 1e-12 of one), clamps round-off negatives to zero and renormalizes once.
/// After that the object is immutable.
class Distribution {
 public:
  Distribution() = default;
  explicit Distribution(std::vector<double> weights);

  /// Divides an arbitrary nonnegative vector by its sum.
  static Distribution normalized(std::vector<double> weights);
  static Distribution point_mass(std::size_t size, std::size_t index);
  static Distribution uniform(std::size_t size);

  std::size_t size() const { return weights_.size(); }
  double operator[](std::size_t i) const { return weights_[i]; }
  std::span<const double> weights() const { return weights_; }
  const std::vector<double>& vector() const { return weights_; }

  /// Indices whose weight exceeds the support threshold.
  std::vector<std::size_t> support() const;

  friend bool operator==(const Distribution&, const Distribution&) = default;

 private:
  std::vector<double> weights_;
};

/// Per-state distribution over actions, stored row-major (state, action).
class DiscretePolicy {
 public:
  DiscretePolicy() = default;
  DiscretePolicy(std::size_t n_states, std::size_t n_actions, std::vector<double> probs);
  explicit DiscretePolicy(const std::vector<Distribution>& rows);

  static DiscretePolicy uniform(std::size_t n_states, std::size_t n_actions);

  std::size_t n_states() const { return n_states_; }
  std::size_t n_actions() const { return n_actions_; }
  double operator()(std::size_t s, std::size_t a) const { return probs_[s * n_actions_ + a]; }
  std::span<const double> row(std::size_t s) const {
    return {probs_.data() + s * n_actions_, n_actions_};
  }
  Distribution row_distribution(std::size_t s) const;
  const std::vector<double>& probs() const { return probs_; }

  friend bool operator==(const DiscretePolicy&, const DiscretePolicy&) = default;

 private:
  std::size_t n_states_ = 0;
  std::size_t n_actions_ = 0;
  std::vector<double> probs_;
};

/// Validates and renormalizes one probability row in place. Throws
/// ArgumentError on negative entries or a sum off by more than 1e-12.
void normalize_probability_row(std::span<double> row);

}  // namespace bcl
