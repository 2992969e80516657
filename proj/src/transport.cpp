#include "bcl/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bcl/errors.hpp"

namespace bcl {

namespace {

constexpr double kMassMismatch = 1e-9;
constexpr double kGapLimit = 1e-8;
constexpr double kLipschitzSlack = 1e-10;
constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<std::size_t> positive_support(std::span<const double> w) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!(w[i] >= -tol::kProbability) || !std::isfinite(w[i])) {
      throw ArgumentError("transport weights must be finite and nonnegative");
    }
    if (w[i] > tol::kSupport) out.push_back(i);
  }
  return out;
}

}  // namespace

GroundMetric GroundMetric::euclidean(const PointSet& points) {
  GroundMetric g;
  g.n_ = points.size();
  g.dist_.assign(g.n_ * g.n_, 0.0);
  for (std::size_t i = 0; i < g.n_; ++i) {
    for (std::size_t j = i + 1; j < g.n_; ++j) {
      const double d = points.distance(i, j);
      g.dist_[i * g.n_ + j] = d;
      g.dist_[j * g.n_ + i] = d;
    }
  }
  return g;
}

GroundMetric GroundMetric::state_action(const PointSet& states, const PointSet& actions) {
  const std::size_t n = states.size(), m = actions.size();
  GroundMetric g;
  g.n_ = n * m;
  g.dist_.assign(g.n_ * g.n_, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t t = 0; t < n; ++t) {
      const double ds = states.distance(s, t);
      for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = 0; b < m; ++b) {
          const double da = actions.distance(a, b);
          g.dist_[(s * m + a) * g.n_ + (t * m + b)] = std::sqrt(ds * ds + da * da);
        }
      }
    }
  }
  return g;
}

GroundMetric GroundMetric::from_matrix(std::size_t n, std::vector<double> dist) {
  if (dist.size() != n * n) throw ArgumentError("distance matrix must be n x n");
  for (std::size_t i = 0; i < n; ++i) {
    if (dist[i * n + i] != 0.0) throw ArgumentError("distance matrix needs a zero diagonal");
    for (std::size_t j = 0; j < n; ++j) {
      const double d = dist[i * n + j];
      if (!std::isfinite(d) || d < 0.0) throw ArgumentError("distances must be finite and nonnegative");
      if (d != dist[j * n + i]) throw ArgumentError("distance matrix must be symmetric");
    }
  }
  GroundMetric g;
  g.n_ = n;
  g.dist_ = std::move(dist);
  return g;
}

double GroundMetric::diameter(std::span<const std::size_t> indices) const {
  double best = 0.0;
  for (std::size_t i : indices) {
    for (std::size_t j : indices) best = std::max(best, (*this)(i, j));
  }
  return best;
}

bool GroundMetric::satisfies_triangle_inequality(double tolerance) const {
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) {
      for (std::size_t k = 0; k < n_; ++k) {
        if ((*this)(i, k) > (*this)(i, j) + (*this)(j, k) + tolerance) return false;
      }
    }
  }
  return true;
}

TransportPlan w1_distance(std::span<const double> p, std::span<const double> q, const GroundMetric& metric) {
  const std::size_t n = metric.size();
  if (p.size() != n || q.size() != n) throw ArgumentError("distributions do not match the metric size");

  TransportPlan out;
  out.sources = positive_support(p);
  out.sinks = positive_support(q);
  double mass_p = 0.0, mass_q = 0.0;
  for (double w : p) mass_p += w;
  for (double w : q) mass_q += w;
  if (std::abs(mass_p - mass_q) > kMassMismatch) {
    throw ArgumentError("transport marginals carry different total mass");
  }
  if (out.sources.empty() || out.sinks.empty()) throw ArgumentError("transport marginals have empty support");

  const std::size_t k = out.sources.size(), l = out.sinks.size();
  std::vector<double> supply(k), demand(l), cost(k * l);
  for (std::size_t i = 0; i < k; ++i) supply[i] = p[out.sources[i]];
  for (std::size_t j = 0; j < l; ++j) demand[j] = q[out.sinks[j]];
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < l; ++j) cost[i * l + j] = metric(out.sources[i], out.sinks[j]);
  }
  out.plan.assign(k * l, 0.0);

  // Nodes 0..k-1 are sources, k..k+l-1 sinks. Forward arcs source->sink have
  // infinite capacity; backward arcs sink->source exist where flow is positive.
  std::vector<double> pot(k + l, 0.0), dist(k + l);
  std::vector<std::size_t> prev(k + l);
  std::vector<char> done(k + l);
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  auto remaining = [](const std::vector<double>& v) {
    for (double x : v) {
      if (x > 0.0) return true;
    }
    return false;
  };

  while (remaining(supply) && remaining(demand)) {
    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(prev.begin(), prev.end(), kNone);
    std::fill(done.begin(), done.end(), 0);
    for (std::size_t i = 0; i < k; ++i) {
      if (supply[i] > 0.0) dist[i] = 0.0;
    }
    std::size_t target = kNone;
    while (true) {
      std::size_t u = kNone;
      for (std::size_t v = 0; v < k + l; ++v) {
        if (!done[v] && dist[v] < kInf && (u == kNone || dist[v] < dist[u])) u = v;
      }
      if (u == kNone) break;
      done[u] = 1;
      if (u >= k && demand[u - k] > 0.0) {
        target = u;
        break;
      }
      if (u < k) {
        for (std::size_t j = 0; j < l; ++j) {
          const std::size_t v = k + j;
          if (done[v]) continue;
          const double rc = std::max(0.0, cost[u * l + j] + pot[u] - pot[v]);
          if (dist[u] + rc < dist[v]) {
            dist[v] = dist[u] + rc;
            prev[v] = u;
          }
        }
      } else {
        const std::size_t j = u - k;
        for (std::size_t i = 0; i < k; ++i) {
          if (done[i] || out.plan[i * l + j] <= 0.0) continue;
          const double rc = std::max(0.0, -cost[i * l + j] + pot[u] - pot[i]);
          if (dist[u] + rc < dist[i]) {
            dist[i] = dist[u] + rc;
            prev[i] = u;
          }
        }
      }
    }
    if (target == kNone) throw NumericalError("transport solver found no augmenting path");

    const double reach = dist[target];
    for (std::size_t v = 0; v < k + l; ++v) pot[v] += std::min(dist[v], reach);

    // Bottleneck along the path back to a source with spare supply.
    double delta = demand[target - k];
    std::size_t v = target;
    while (prev[v] != kNone) {
      const std::size_t u = prev[v];
      if (u >= k) delta = std::min(delta, out.plan[v * l + (u - k)]);
      v = u;
    }
    delta = std::min(delta, supply[v]);

    const std::size_t origin = v;
    v = target;
    while (prev[v] != kNone) {
      const std::size_t u = prev[v];
      if (u < k) {
        out.plan[u * l + (v - k)] += delta;
      } else {
        double& f = out.plan[v * l + (u - k)];
        f = (f == delta) ? 0.0 : f - delta;
      }
      v = u;
    }
    supply[origin] = (supply[origin] == delta) ? 0.0 : supply[origin] - delta;
    double& d = demand[target - k];
    d = (d == delta) ? 0.0 : d - delta;
  }

  // Leftover mass can only be the pruned or round-off residue.
  for (std::size_t i = 0; i < k; ++i) {
    if (supply[i] > kMassMismatch) throw NumericalError("transport plan leaves supply unshipped");
  }
  for (std::size_t j = 0; j < l; ++j) {
    if (demand[j] > kMassMismatch) throw NumericalError("transport plan leaves demand unmet");
  }

  for (std::size_t c = 0; c < k * l; ++c) out.cost += out.plan[c] * cost[c];

  // Kantorovich potential: f(x) = min_j (d(x, sink_j) - pot(sink_j)).
  out.dual_potentials.assign(n, kInf);
  for (std::size_t x = 0; x < n; ++x) {
    double best = kInf;
    for (std::size_t j = 0; j < l; ++j) best = std::min(best, metric(x, out.sinks[j]) - pot[k + j]);
    out.dual_potentials[x] = best;
  }
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      if (out.dual_potentials[x] - out.dual_potentials[y] > metric(x, y) + kLipschitzSlack) {
        throw NumericalError("transport dual potential is not 1-Lipschitz");
      }
    }
  }
  for (std::size_t x = 0; x < n; ++x) out.dual_value += out.dual_potentials[x] * (p[x] - q[x]);
  out.duality_gap = out.cost - out.dual_value;
  if (std::abs(out.duality_gap) > kGapLimit) {
    throw NumericalError("transport duality gap " + std::to_string(out.duality_gap) + " exceeds tolerance");
  }
  return out;
}

TransportPlan w1_distance(const Distribution& p, const Distribution& q, const GroundMetric& metric) {
  return w1_distance(p.weights(), q.weights(), metric);
}

}  // namespace bcl
