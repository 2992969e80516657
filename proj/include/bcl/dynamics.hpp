#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "bcl/bellman_flow.hpp"
#include "bcl/distribution.hpp"
#include "bcl/mdp.hpp"
#include "bcl/transport.hpp"

namespace bcl {

/// Evenly spaced values lo, ..., hi (count >= 1; count == 1 needs lo == hi).
struct GridAxis {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 1;

  double spacing() const { return count > 1 ? (hi - lo) / static_cast<double>(count - 1) : 0.0; }
  double value(std::size_t i) const;
  /// Index of the nearest grid value after clamping into [lo, hi]; ties go to the lower index.
  std::size_t nearest(double x) const;
};

/// Rectangular (position, velocity) grid. State index = ix * v.count + iv.
struct GridSpec {
  GridAxis x;
  GridAxis v;

  /// Parses "x0:x1:nx,v0:v1:nv". Throws ArgumentError on malformed input.
  static GridSpec parse(std::string_view text);

  std::size_t size() const { return x.count * v.count; }
  std::size_t index(std::size_t ix, std::size_t iv) const { return ix * v.count + iv; }
};

struct DoubleIntegratorOptions {
  double r_max = 1.0;
  double gamma = 0.9;
  /// Defaults to a point mass at the grid point nearest the origin.
  std::optional<Distribution> init;
};

/// Deterministic gridded double integrator:
///   x' = x + v*delta + a*delta^2/2,  v' = v + a*delta,
/// clamped to the grid box and snapped to the nearest grid point. The reward
/// v - a^2 is affinely rescaled onto [0, r_max] over all (s, a).
TabularMDP build_double_integrator(double delta, const GridSpec& grid, const std::vector<double>& actions,
                                   const DoubleIntegratorOptions& options = {});

/// Grid on which every update lands exactly on a grid point: velocity step
/// h_v, position step delta * h_v, actions {-2 h_v / delta, 0, 2 h_v / delta}.
/// Velocities run over [-v_half * h_v, v_half * h_v], positions over
/// [-x_half * delta * h_v, x_half * delta * h_v].
struct AlignedGrid {
  double h_v = 0.1;
  std::size_t v_half = 5;
  std::size_t x_half = 20;
};

GridSpec aligned_grid_spec(double delta, const AlignedGrid& grid);
std::vector<double> aligned_actions(double delta, const AlignedGrid& grid);
TabularMDP build_aligned_double_integrator(double delta, const AlignedGrid& grid,
                                           const DoubleIntegratorOptions& options = {});

/// pi(a|s) proportional to exp(slope * v(s) * a / max|a|): a smooth policy
/// that depends on velocity only.
DiscretePolicy velocity_softmax_policy(const TabularMDP& double_integrator, double slope);

/// Image of (x, v) under the unsnapped, unclamped update.
std::pair<double, double> double_integrator_step(double x, double v, double a, double delta);

struct LipschitzProfile {
  double L_T_s = 0.0;
  double L_T_a = 0.0;
  double L_pi_w1 = 0.0;
  double L_pi_dens = 0.0;
  /// Reward constant over (state, action) pairs under the concatenated embedding.
  double L_r = 0.0;
  /// Reward constant in the state alone, action held fixed.
  double L_r_s = 0.0;
  double eta = 0.0;
  double diam_A = 0.0;
  std::size_t dim_A = 0;
};

/// Exhaustive Lipschitz constants of a deterministic map given by its images,
/// one row per (s, a) in row-major order.
struct MapLipschitz {
  double L_s = 0.0;
  double L_a = 0.0;
};
MapLipschitz map_lipschitz(const PointSet& states, const PointSet& actions, const PointSet& images);

/// Exact W1 between two distributions over a one-dimensional action set.
double w1_on_line(std::span<const double> points, std::span<const double> p, std::span<const double> q);

/// All constants are true maxima over the realized finite system. Duplicate
/// state or action embeddings raise ArgumentError.
LipschitzProfile estimate_lipschitz(const TabularMDP& mdp_det, const DiscretePolicy& policy);

struct ContractionMeasurement {
  double modulus = 0.0;
  std::size_t valid_pairs = 0;
  std::size_t skipped_pairs = 0;
  bool no_valid_pairs() const { return valid_pairs == 0; }
};

/// Largest W1(B p, B q) / W1(p, q) over the given pairs; pairs with
/// W1(p, q) < 1e-10 are skipped.
ContractionMeasurement measure_w1_contraction(const BellmanFlowOperator& op, const GroundMetric& metric,
                                              const std::vector<std::pair<Distribution, Distribution>>& pairs);

/// Same over `trials` random pairs with 1 to 4 support points each.
ContractionMeasurement measure_w1_contraction(const BellmanFlowOperator& op, const GroundMetric& metric,
                                              std::size_t trials, std::uint64_t seed);

}  // namespace bcl
