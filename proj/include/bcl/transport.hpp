#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bcl/distribution.hpp"
#include "bcl/mdp.hpp"

namespace bcl {

/// Dense symmetric distance matrix over a finite point set.
class GroundMetric {
 public:
  GroundMetric() = default;

  /// Euclidean distances between embedded points.
  static GroundMetric euclidean(const PointSet& points);
  /// Euclidean distances between concatenated (state, action) embeddings,
  /// indexed row-major by (s, a).
  static GroundMetric state_action(const PointSet& states, const PointSet& actions);
  /// Takes an explicit matrix; checks zero diagonal, symmetry and nonnegativity.
  static GroundMetric from_matrix(std::size_t n, std::vector<double> dist);

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return dist_[i * n_ + j]; }
  /// Largest pairwise distance among the given indices.
  double diameter(std::span<const std::size_t> indices) const;
  /// Exhaustive check over all triples.
  bool satisfies_triangle_inequality(double tolerance = 1e-9) const;

 private:
  std::size_t n_ = 0;
  std::vector<double> dist_;
};

/// Optimal coupling between p and q together with its optimality certificate.
struct TransportPlan {
  std::vector<std::size_t> sources;  // support of p
  std::vector<std::size_t> sinks;    // support of q
  std::vector<double> plan;          // sources.size() x sinks.size(), row-major
  double cost = 0.0;

  /// 1-Lipschitz potential over every point of the metric; its
  /// Kantorovich-Rubinstein value sum f p - sum f q lower-bounds W1.
  std::vector<double> dual_potentials;
  double dual_value = 0.0;
  double duality_gap = 0.0;

  double flow(std::size_t i, std::size_t j) const { return plan[i * sinks.size() + j]; }
};

/// Exact 1-Wasserstein distance by successive shortest paths on the dense
/// bipartite transportation graph.
///
/// Weights at or below 1e-14 are pruned before solving. Raises ArgumentError
/// when the total masses differ by more than 1e-9, and NumericalError when the
/// recovered certificate is not 1-Lipschitz or leaves a duality gap above 1e-8.
TransportPlan w1_distance(std::span<const double> p, std::span<const double> q, const GroundMetric& metric);
TransportPlan w1_distance(const Distribution& p, const Distribution& q, const GroundMetric& metric);

}  // namespace bcl
