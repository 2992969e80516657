#include "bcl/dynamics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "bcl/errors.hpp"

namespace bcl {

namespace {

constexpr double kSkipBelow = 1e-10;

double parse_number(std::string_view s) {
  double out = 0.0;
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, out);
  if (s.empty() || res.ec != std::errc{} || res.ptr != end || !std::isfinite(out)) {
    throw ArgumentError("malformed number '" + std::string(s) + "' in grid spec");
  }
  return out;
}

GridAxis parse_axis(std::string_view s) {
  const auto c1 = s.find(':');
  const auto c2 = c1 == std::string_view::npos ? c1 : s.find(':', c1 + 1);
  if (c2 == std::string_view::npos || s.find(':', c2 + 1) != std::string_view::npos) {
    throw ArgumentError("grid axis must look like lo:hi:count");
  }
  GridAxis axis;
  axis.lo = parse_number(s.substr(0, c1));
  axis.hi = parse_number(s.substr(c1 + 1, c2 - c1 - 1));
  const auto count = s.substr(c2 + 1);
  std::size_t n = 0;
  const auto res = std::from_chars(count.data(), count.data() + count.size(), n);
  if (count.empty() || res.ec != std::errc{} || res.ptr != count.data() + count.size() || n == 0) {
    throw ArgumentError("grid axis count must be a positive integer");
  }
  axis.count = n;
  if (axis.hi < axis.lo) throw ArgumentError("grid axis needs lo <= hi");
  if (n == 1 && axis.hi != axis.lo) throw ArgumentError("a one-point grid axis needs lo == hi");
  if (n > 1 && axis.hi == axis.lo) throw ArgumentError("grid axis with several points needs lo < hi");
  return axis;
}

void check_axis(const GridAxis& a) {
  if (a.count == 0 || !(a.lo <= a.hi) || (a.count == 1 && a.lo != a.hi) || (a.count > 1 && a.lo == a.hi)) {
    throw ArgumentError("invalid grid axis");
  }
}

double sq(double x) { return x * x; }

}  // namespace

double GridAxis::value(std::size_t i) const {
  if (count == 1) return lo;
  if (i + 1 == count) return hi;
  return lo + static_cast<double>(i) * spacing();
}

std::size_t GridAxis::nearest(double x) const {
  if (count == 1 || x <= lo) return 0;
  if (x >= hi) return count - 1;
  const double k = std::floor((x - lo) / spacing());
  std::size_t lower = static_cast<std::size_t>(std::max(0.0, k));
  lower = std::min(lower, count - 1);
  // Division round-off can land one cell off; settle by direct comparison.
  std::size_t best = lower;
  double best_gap = std::abs(x - value(lower));
  const std::size_t from = lower > 0 ? lower - 1 : 0;
  const std::size_t to = std::min(lower + 2, count - 1);
  for (std::size_t i = from; i <= to; ++i) {
    const double gap = std::abs(x - value(i));
    if (gap < best_gap || (gap == best_gap && i < best)) {
      best = i;
      best_gap = gap;
    }
  }
  return best;
}

GridSpec GridSpec::parse(std::string_view text) {
  const auto comma = text.find(',');
  if (comma == std::string_view::npos || text.find(',', comma + 1) != std::string_view::npos) {
    throw ArgumentError("grid spec must look like x0:x1:nx,v0:v1:nv");
  }
  return GridSpec{parse_axis(text.substr(0, comma)), parse_axis(text.substr(comma + 1))};
}

std::pair<double, double> double_integrator_step(double x, double v, double a, double delta) {
  return {x + v * delta + 0.5 * a * delta * delta, v + a * delta};
}

TabularMDP build_double_integrator(double delta, const GridSpec& grid, const std::vector<double>& actions,
                                   const DoubleIntegratorOptions& options) {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw ArgumentError("delta must be positive");
  check_axis(grid.x);
  check_axis(grid.v);
  if (actions.empty()) throw ArgumentError("action set is empty");
  for (std::size_t i = 0; i < actions.size(); ++i) {
    if (!std::isfinite(actions[i])) throw ArgumentError("actions must be finite");
    for (std::size_t j = 0; j < i; ++j) {
      if (actions[i] == actions[j]) throw ArgumentError("duplicate action");
    }
  }
  const std::size_t n = grid.size(), m = actions.size();

  std::vector<double> coords(2 * n);
  for (std::size_t ix = 0; ix < grid.x.count; ++ix) {
    for (std::size_t iv = 0; iv < grid.v.count; ++iv) {
      const std::size_t s = grid.index(ix, iv);
      coords[2 * s] = grid.x.value(ix);
      coords[2 * s + 1] = grid.v.value(iv);
    }
  }
  PointSet states(2, std::move(coords));
  PointSet action_embed(1, actions);

  std::vector<std::size_t> next(n * m);
  std::vector<double> raw(n * m);
  for (std::size_t s = 0; s < n; ++s) {
    const double x = states[s][0], v = states[s][1];
    for (std::size_t a = 0; a < m; ++a) {
      const auto [x1, v1] = double_integrator_step(x, v, actions[a], delta);
      next[s * m + a] = grid.index(grid.x.nearest(x1), grid.v.nearest(v1));
      raw[s * m + a] = v - actions[a] * actions[a];
    }
  }
  const auto [lo_it, hi_it] = std::minmax_element(raw.begin(), raw.end());
  const double lo = *lo_it, span = *hi_it - *lo_it;
  std::vector<double> reward(n * m, 0.0);
  if (span > 0.0) {
    for (std::size_t k = 0; k < raw.size(); ++k) {
      reward[k] = std::clamp(options.r_max * (raw[k] - lo) / span, 0.0, options.r_max);
    }
  }

  Distribution init = options.init ? *options.init
                                   : Distribution::point_mass(n, grid.index(grid.x.nearest(0.0), grid.v.nearest(0.0)));
  return TabularMDP(std::move(states), std::move(action_embed), TransitionKernel::from_map(n, m, next),
                    std::move(reward), options.r_max, options.gamma, std::move(init));
}

GridSpec aligned_grid_spec(double delta, const AlignedGrid& grid) {
  if (!(delta > 0.0) || !(grid.h_v > 0.0)) throw ArgumentError("aligned grid needs positive delta and h_v");
  const double vmax = static_cast<double>(grid.v_half) * grid.h_v;
  const double xmax = static_cast<double>(grid.x_half) * delta * grid.h_v;
  return GridSpec{GridAxis{-xmax, xmax, 2 * grid.x_half + 1}, GridAxis{-vmax, vmax, 2 * grid.v_half + 1}};
}

std::vector<double> aligned_actions(double delta, const AlignedGrid& grid) {
  const double a0 = 2.0 * grid.h_v / delta;
  return {-a0, 0.0, a0};
}

TabularMDP build_aligned_double_integrator(double delta, const AlignedGrid& grid,
                                           const DoubleIntegratorOptions& options) {
  return build_double_integrator(delta, aligned_grid_spec(delta, grid), aligned_actions(delta, grid), options);
}

DiscretePolicy velocity_softmax_policy(const TabularMDP& di, double slope) {
  const std::size_t n = di.n_states(), m = di.n_actions();
  if (di.state_embed().dim() != 2 || di.action_embed().dim() != 1) {
    throw ArgumentError("velocity_softmax_policy expects (x, v) states and scalar actions");
  }
  double scale = 0.0;
  for (std::size_t a = 0; a < m; ++a) scale = std::max(scale, std::abs(di.action_embed()[a][0]));
  if (scale == 0.0) scale = 1.0;
  std::vector<double> probs(n * m);
  for (std::size_t s = 0; s < n; ++s) {
    const double v = di.state_embed()[s][1];
    double total = 0.0;
    for (std::size_t a = 0; a < m; ++a) {
      probs[s * m + a] = std::exp(slope * v * di.action_embed()[a][0] / scale);
      total += probs[s * m + a];
    }
    for (std::size_t a = 0; a < m; ++a) probs[s * m + a] /= total;
  }
  return DiscretePolicy(n, m, std::move(probs));
}

MapLipschitz map_lipschitz(const PointSet& states, const PointSet& actions, const PointSet& images) {
  const std::size_t n = states.size(), m = actions.size();
  if (images.size() != n * m) throw ArgumentError("need one image per (state, action)");
  MapLipschitz out;
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t t = s + 1; t < n; ++t) {
      const double d = states.distance(s, t);
      if (d == 0.0) throw ArgumentError("duplicate embedded states");
      for (std::size_t a = 0; a < m; ++a) {
        out.L_s = std::max(out.L_s, images.distance(s * m + a, t * m + a) / d);
      }
    }
  }
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a + 1; b < m; ++b) {
      const double d = actions.distance(a, b);
      if (d == 0.0) throw ArgumentError("duplicate embedded actions");
      for (std::size_t s = 0; s < n; ++s) {
        out.L_a = std::max(out.L_a, images.distance(s * m + a, s * m + b) / d);
      }
    }
  }
  return out;
}

double w1_on_line(std::span<const double> points, std::span<const double> p, std::span<const double> q) {
  const std::size_t m = points.size();
  if (p.size() != m || q.size() != m) throw ArgumentError("size mismatch in w1_on_line");
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return points[a] < points[b]; });
  double cdf = 0.0, acc = 0.0;
  for (std::size_t k = 0; k + 1 < m; ++k) {
    cdf += p[order[k]] - q[order[k]];
    acc += std::abs(cdf) * (points[order[k + 1]] - points[order[k]]);
  }
  return acc;
}

LipschitzProfile estimate_lipschitz(const TabularMDP& mdp, const DiscretePolicy& policy) {
  if (!mdp.deterministic()) throw ArgumentError("estimate_lipschitz needs a deterministic MDP");
  const std::size_t n = mdp.n_states(), m = mdp.n_actions();
  if (policy.n_states() != n || policy.n_actions() != m) throw ArgumentError("policy shape does not match the MDP");
  const PointSet& S = mdp.state_embed();
  const PointSet& A = mdp.action_embed();

  std::vector<double> image_coords;
  image_coords.reserve(n * m * S.dim());
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t a = 0; a < m; ++a) {
      const auto e = S[mdp.kernel().next_state(s, a)];
      image_coords.insert(image_coords.end(), e.begin(), e.end());
    }
  }
  const MapLipschitz map = map_lipschitz(S, A, PointSet(S.dim(), std::move(image_coords)));

  LipschitzProfile prof;
  prof.L_T_s = map.L_s;
  prof.L_T_a = map.L_a;
  prof.dim_A = A.dim();
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < m; ++b) prof.diam_A = std::max(prof.diam_A, A.distance(a, b));
  }

  const bool on_line = A.dim() == 1;
  std::vector<double> line;
  GroundMetric action_metric;
  if (on_line) {
    line = A.coords();
  } else {
    action_metric = GroundMetric::euclidean(A);
  }

  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t t = s + 1; t < n; ++t) {
      const double d = S.distance(s, t);
      const double w1 = on_line ? w1_on_line(line, policy.row(s), policy.row(t))
                                : w1_distance(policy.row(s), policy.row(t), action_metric).cost;
      prof.L_pi_w1 = std::max(prof.L_pi_w1, w1 / d);
      for (std::size_t a = 0; a < m; ++a) {
        prof.L_pi_dens = std::max(prof.L_pi_dens, std::abs(policy(s, a) - policy(t, a)) / d);
        prof.L_r_s = std::max(prof.L_r_s, std::abs(mdp.reward(s, a) - mdp.reward(t, a)) / d);
      }
    }
  }

  // Joint reward constant over (s, a) pairs.
  std::vector<double> ds(n * n);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t t = 0; t < n; ++t) ds[s * n + t] = sq(S.distance(s, t));
  }
  std::vector<double> da(m * m);
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < m; ++b) da[a * m + b] = sq(A.distance(a, b));
  }
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t a = 0; a < m; ++a) {
      const double r = mdp.reward(s, a);
      for (std::size_t t = s; t < n; ++t) {
        for (std::size_t b = (t == s ? a + 1 : 0); b < m; ++b) {
          const double d = std::sqrt(ds[s * n + t] + da[a * m + b]);
          prof.L_r = std::max(prof.L_r, std::abs(r - mdp.reward(t, b)) / d);
        }
      }
    }
  }

  prof.eta = prof.L_T_s + prof.L_T_a * prof.L_pi_w1;
  return prof;
}

ContractionMeasurement measure_w1_contraction(const BellmanFlowOperator& op, const GroundMetric& metric,
                                              const std::vector<std::pair<Distribution, Distribution>>& pairs) {
  if (metric.size() != op.n_states()) throw ArgumentError("metric does not match the operator's state count");
  ContractionMeasurement out;
  for (const auto& [p, q] : pairs) {
    const double base = w1_distance(p, q, metric).cost;
    if (base < kSkipBelow) {
      ++out.skipped_pairs;
      continue;
    }
    const double pushed = w1_distance(op.apply(p), op.apply(q), metric).cost;
    out.modulus = std::max(out.modulus, pushed / base);
    ++out.valid_pairs;
  }
  return out;
}

ContractionMeasurement measure_w1_contraction(const BellmanFlowOperator& op, const GroundMetric& metric,
                                              std::size_t trials, std::uint64_t seed) {
  if (trials == 0) throw ArgumentError("trials must be at least 1");
  const std::size_t n = op.n_states();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick_size(1, std::min<std::size_t>(4, n));
  std::uniform_int_distribution<std::size_t> pick_state(0, n - 1);
  std::exponential_distribution<double> weight(1.0);
  auto draw = [&]() {
    std::vector<double> w(n, 0.0);
    const std::size_t k = pick_size(rng);
    for (std::size_t i = 0; i < k; ++i) w[pick_state(rng)] += weight(rng);
    return Distribution::normalized(std::move(w));
  };
  std::vector<std::pair<Distribution, Distribution>> pairs;
  pairs.reserve(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    Distribution p = draw();
    Distribution q = draw();
    pairs.emplace_back(std::move(p), std::move(q));
  }
  return measure_w1_contraction(op, metric, pairs);
}

}  // namespace bcl
