// Property-based acceptance run. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bcl/bellman_flow.hpp"
#include "bcl/bounds.hpp"
#include "bcl/cli.hpp"
#include "bcl/dynamics.hpp"
#include "bcl/mbrl.hpp"
#include "bcl/metrics.hpp"
#include "bcl/transport.hpp"
#include "oracles.hpp"

using namespace bcl;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::string distribution_summary(std::vector<double> v) {
  if (v.empty()) return "n=0";
  std::sort(v.begin(), v.end());
  auto at = [&](double q) { return v[static_cast<std::size_t>(q * static_cast<double>(v.size() - 1))]; };
  return fmt("n=%zu min=%.3g p10=%.3g median=%.3g p90=%.3g max=%.3g", v.size(), v.front(), at(0.1), at(0.5),
             at(0.9), v.back());
}

std::vector<double> dense_random_distribution(std::size_t n, std::mt19937_64& rng) {
  std::exponential_distribution<double> ex(1.0);
  std::vector<double> p(n);
  double total = 0.0;
  for (double& x : p) total += (x = ex(rng));
  for (double& x : p) x /= total;
  return p;
}

std::vector<double> random_distribution(std::size_t n, std::mt19937_64& rng) {
  if (rng() % 2 == 0) return dense_random_distribution(n, rng);
  return oracle::random_sparse_distribution(n, 1 + rng() % n, rng);
}

double l1(const std::vector<double>& a, const std::vector<double>& b) { return 2.0 * oracle::tv(a, b); }

// ---------------------------------------------------------------- 1 and 2

struct FlowInstance {
  TabularMDP mdp;
  DiscretePolicy pi;
};

FlowInstance flow_instance(std::size_t k) {
  std::mt19937_64 rng(1000 + k);
  const std::size_t n = 2 + rng() % 49, m = 1 + rng() % 5;
  const double gammas[] = {0.5, 0.9, 0.99};
  const double stoch = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  const TabularMDP mdp = make_random_mdp(n, m, rng(), stoch, gammas[k % 3]);
  return {mdp, random_policy(n, m, rng())};
}

Outcome criterion_fixed_point() {
  double worst_residual = 0.0, worst_excess = -1.0;
  std::size_t pairs = 0;
  for (std::size_t k = 0; k < 100; ++k) {
    const FlowInstance inst = flow_instance(k);
    const double g = inst.mdp.gamma();
    const BellmanFlowOperator op(inst.mdp.init_dist(), inst.pi, inst.mdp, g);
    const OccupancyMeasure occ = occupancy(inst.pi, inst.mdp);
    worst_residual = std::max(worst_residual, l1(op.apply(occ.state_dist).vector(), occ.state_dist.vector()));
    std::mt19937_64 rng(7 + k);
    for (int i = 0; i < 1000; ++i) {
      const Distribution p(random_distribution(op.n_states(), rng)), q(random_distribution(op.n_states(), rng));
      const double before = tv_distance(p, q), after = tv_distance(op.apply(p), op.apply(q));
      worst_excess = std::max(worst_excess, after - g * before);
      ++pairs;
    }
  }
  std::cout << "  fixed-point residual max " << fmt("%.3g", worst_residual) << ", max TV(Bp,Bq) - g TV(p,q) "
            << fmt("%.3g", worst_excess) << " over " << pairs << " pairs\n";
  return {worst_residual <= 1e-10 && worst_excess <= 1e-12,
          fmt("residual %.2g <= 1e-10, contraction excess %.2g <= 1e-12", worst_residual, worst_excess)};
}

Outcome criterion_symmetry_bridge() {
  double worst = -1.0;
  std::size_t checks = 0;
  for (std::size_t k = 0; k < 100; ++k) {
    const FlowInstance inst = flow_instance(k);
    const double g = inst.mdp.gamma();
    const BellmanFlowOperator op(inst.mdp.init_dist(), inst.pi, inst.mdp, g);
    const Distribution star = occupancy(inst.pi, inst.mdp).state_dist;
    std::mt19937_64 rng(99 + k);
    for (int i = 0; i < 1000; ++i) {
      const Distribution rho(random_distribution(op.n_states(), rng));
      const double lhs = tv_distance(rho, star), rhs = tv_distance(rho, op.apply(rho)) / (1.0 - g);
      worst = std::max(worst, lhs - rhs);
      ++checks;
    }
  }
  return {worst <= 1e-10, fmt("%zu draws, max lhs - rhs %.2g <= 1e-10", checks, worst)};
}

// ---------------------------------------------------------------- 3 to 5

struct StochasticTrial {
  TabularMDP mdp;
  TabularMDP model;
  DiscretePolicy pi_d;
  DiscretePolicy pi;
  double beta = 0.5;
};

StochasticTrial stochastic_trial(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::size_t n = 3 + rng() % 28, m = 2 + rng() % 4;
  const double gammas[] = {0.5, 0.9, 0.99};
  const double g = gammas[rng() % 3];
  const TabularMDP mdp = make_random_mdp(n, m, rng(), u(rng), g);
  const DiscretePolicy pi_d = random_policy(n, m, rng());
  const DiscretePolicy pi = perturb_policy(pi_d, 0.01 + 0.5 * u(rng), rng());
  const TabularMDP model = mdp.with_kernel(perturb_kernel(mdp, 0.01 + 0.5 * u(rng), rng()));
  std::vector<double> betas;
  for (int b = 1; b <= 8; ++b) {
    if (0.1 * b < g - 1e-12) betas.push_back(0.1 * b);
  }
  return {mdp, model, pi_d, pi, betas[rng() % betas.size()]};
}

struct Tally {
  std::size_t pass = 0, fail = 0, vacuous = 0;
  std::vector<double> tightness;
  void add(const BoundReport& r) {
    if (r.status == BoundStatus::Fail) ++fail;
    if (r.status == BoundStatus::Vacuous) ++vacuous;
    if (r.status == BoundStatus::Pass) {
      ++pass;
      if (r.tightness_defined) tightness.push_back(r.tightness);
    }
  }
  std::size_t total() const { return pass + fail + vacuous; }
};

Outcome criterion_stochastic_bounds() {
  const std::vector<std::string> ids{"thm1", "thm2", "lemma2", "cor_mbrl_stoch", "cor3_branched"};
  std::vector<Tally> tallies(ids.size());
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const StochasticTrial t = stochastic_trial(50000 + seed);
    tallies[0].add(check_theorem1(t.mdp, t.pi_d, t.pi));
    tallies[1].add(check_theorem2(t.mdp, t.model, t.pi_d));
    tallies[2].add(check_lemma2(occupancy(t.pi_d, t.mdp), occupancy(t.pi, t.mdp), t.mdp));
    tallies[3].add(check_mbrl_stochastic(t.mdp, t.model, t.pi_d, t.pi));
    tallies[4].add(check_cor3_branched(t.mdp, t.model, t.pi_d, t.pi, t.beta));
  }
  bool ok = true;
  std::size_t failures = 0;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const Tally& t = tallies[i];
    std::cout << "  " << ids[i] << ": " << t.pass << " pass, " << t.fail << " fail, " << t.vacuous
              << " vacuous; tightness " << distribution_summary(t.tightness) << "\n";
    ok = ok && t.fail == 0 && t.total() >= 1000 && t.pass > 0;
    failures += t.fail;
  }
  return {ok, fmt("5 checkers x 1000 trials, %zu non-vacuous failures", failures)};
}

Outcome criterion_lemma5() {
  const double gammas[] = {0.9, 0.99};
  Tally tally;
  double worst_formula = 0.0, rhs_at_reference = std::nan("");
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const double g = gammas[seed % 2];
    const double beta = 0.1 * static_cast<double>(1 + (seed / 2) % 8);
    std::mt19937_64 rng(70000 + seed);
    const std::size_t n = 3 + rng() % 28, m = 2 + rng() % 4;
    const TabularMDP mdp = make_random_mdp(n, m, rng(), 0.5, g);
    const BoundReport r = check_lemma5(mdp, random_policy(n, m, rng()), g, beta);
    tally.add(r);
    const double closed = (1.0 - g) * beta / (g - beta);
    worst_formula = std::max(worst_formula, std::abs(r.rhs - closed) / closed);
    if (g == 0.9 && std::abs(beta - 0.5) < 1e-12) rhs_at_reference = r.rhs;
  }

  // the rhs column of the command-line report
  const auto dir = std::filesystem::temp_directory_path() / "bcl_acceptance_lemma5";
  std::filesystem::create_directories(dir);
  const std::string mdp_path = (dir / "m.json").string(), out_path = (dir / "r.csv").string();
  std::ostringstream sink;
  int code = cli::run({"bcl", "gen", "--random", "--states", "10", "--actions", "3", "--out", mdp_path}, sink, sink);
  code = code == 0 ? cli::run({"bcl", "check", "lemma5", "--gamma", "0.9", "--beta", "0.5", "--mdp", mdp_path,
                               "--out", out_path},
                              sink, sink)
                   : code;
  double column = std::nan("");
  {
    std::ifstream in(out_path);
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    std::vector<std::string> names, cells;
    std::string cell;
    for (std::istringstream hs(header); std::getline(hs, cell, ',');) names.push_back(cell);
    for (std::istringstream rs(row); std::getline(rs, cell, ',');) cells.push_back(cell);
    for (std::size_t i = 0; i < names.size() && i < cells.size(); ++i) {
      if (names[i] == "rhs") column = std::stod(cells[i]);
    }
  }
  std::filesystem::remove_all(dir);
  std::cout << "  lemma5: " << tally.pass << " pass, " << tally.fail << " fail, " << tally.vacuous
            << " vacuous; tightness " << distribution_summary(tally.tightness) << "\n";
  std::cout << "  rhs at gamma 0.9, beta 0.5: library " << fmt("%.17g", rhs_at_reference) << ", cli column "
            << fmt("%.17g", column) << "\n";
  const bool ok = tally.fail == 0 && tally.vacuous == 0 && worst_formula <= 1e-14 &&
                  std::abs(rhs_at_reference - 0.125) <= 1e-15 && code == 0 && std::abs(column - 0.125) <= 1e-15;
  return {ok, fmt("1000 trials, %zu failures, rhs at (0.9, 0.5) = %.15g", tally.fail, column)};
}

Outcome criterion_bc_gail() {
  Tally bc, gail;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const StochasticTrial t = stochastic_trial(90000 + seed);
    bc.add(check_bc_bound(t.mdp, t.pi_d, t.pi));
    gail.add(check_gail_bound(t.mdp, t.pi_d, t.pi));
  }
  std::cout << "  cor_bc: " << bc.pass << " pass, " << bc.fail << " fail, " << bc.vacuous << " vacuous; tightness "
            << distribution_summary(bc.tightness) << "\n";
  std::cout << "  cor_gail: " << gail.pass << " pass, " << gail.fail << " fail, " << gail.vacuous
            << " vacuous; tightness " << distribution_summary(gail.tightness) << "\n";

  // gamma sweep on fixed instances and a fixed perturbation
  const double gammas[] = {0.5, 0.9, 0.95, 0.99};
  std::size_t monotone = 0;
  const std::size_t sweeps = 50;
  for (std::uint64_t k = 0; k < sweeps; ++k) {
    const TabularMDP base = make_random_mdp(10 + k % 20, 2 + k % 4, 300 + k, 0.5 + 0.01 * k);
    const DiscretePolicy pi_d = random_policy(base.n_states(), base.n_actions(), 400 + k);
    const DiscretePolicy pi = perturb_policy(pi_d, 0.2, 500 + k);
    if (k == 0) {
      std::cout << "  gamma   1/(1-gamma)   bc_rhs        gail_rhs      bc/gail\n";
    }
    double prev = -1.0;
    bool up = true;
    for (double g : gammas) {
      const TabularMDP mdp = base.with_gamma(g);
      const BoundReport b = check_bc_bound(mdp, pi_d, pi), a = check_gail_bound(mdp, pi_d, pi);
      const double ratio = b.rhs / a.rhs;
      if (k == 0) {
        std::cout << fmt("  %-7.2f %-13.1f %-13.6g %-13.6g %.6g\n", g, 1.0 / (1.0 - g), b.rhs, a.rhs, ratio);
      }
      up = up && ratio > prev;
      prev = ratio;
    }
    monotone += up ? 1 : 0;
  }
  std::cout << "  ratio strictly increasing on " << monotone << " of " << sweeps << " fixed instances\n";
  const bool ok = bc.fail == 0 && gail.fail == 0 && bc.pass > 0 && gail.pass > 0 && monotone == sweeps;
  return {ok, fmt("bc %zu / gail %zu failures, ratio monotone on %zu/%zu sweeps", bc.fail, gail.fail, monotone,
                  sweeps)};
}

// ---------------------------------------------------------------- 6

Outcome criterion_w1() {
  std::mt19937_64 rng(6060);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::size_t cases = 0, mismatches = 0;
  double worst_gap = 0.0, worst_diff = 0.0;
  for (int rep = 0; rep < 15; ++rep) {
    for (std::size_t sp = 1; sp <= 6; ++sp) {
      for (std::size_t sq = 1; sq <= 6; ++sq) {
        const std::size_t n = 6 + rng() % 7, dim = 1 + rng() % 3;
        std::vector<double> coords(n * dim);
        for (double& c : coords) c = u(rng);
        const GroundMetric metric = GroundMetric::euclidean(PointSet(dim, coords));
        const auto p = oracle::random_sparse_distribution(n, sp, rng);
        const auto q = oracle::random_sparse_distribution(n, sq, rng);
        const TransportPlan plan = w1_distance(p, q, metric);
        std::vector<double> ps, qs;
        std::vector<std::size_t> si, sj;
        for (std::size_t i = 0; i < n; ++i) {
          if (p[i] > 0.0) si.push_back(i), ps.push_back(p[i]);
          if (q[i] > 0.0) sj.push_back(i), qs.push_back(q[i]);
        }
        std::vector<std::vector<double>> cost(si.size(), std::vector<double>(sj.size()));
        for (std::size_t a = 0; a < si.size(); ++a) {
          for (std::size_t b = 0; b < sj.size(); ++b) cost[a][b] = metric(si[a], sj[b]);
        }
        const double ref = oracle::VertexW1(ps, qs, cost).solve();
        const double diff = std::abs(plan.cost - ref);
        worst_diff = std::max(worst_diff, diff);
        worst_gap = std::max(worst_gap, plan.duality_gap);
        if (diff > 1e-9 * std::max(1.0, ref)) ++mismatches;
        ++cases;
      }
    }
  }
  const bool ok = cases >= 500 && mismatches == 0 && worst_gap <= 1e-8;
  return {ok, fmt("%zu cases with support <= 6, %zu mismatches (max diff %.2g), max duality gap %.2g", cases,
                  mismatches, worst_diff, worst_gap)};
}

// ---------------------------------------------------------------- 7

// Every successor moved by a fixed number of grid steps, clamped to the box.
TabularMDP shifted_model(const TabularMDP& di, const GridSpec& grid, long dx, long dv) {
  const auto& table = di.kernel().next_state_table();
  std::vector<std::size_t> next(table.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    const long ix = static_cast<long>(table[i] / grid.v.count), iv = static_cast<long>(table[i] % grid.v.count);
    const long nx = std::clamp<long>(ix + dx, 0, static_cast<long>(grid.x.count) - 1);
    const long nv = std::clamp<long>(iv + dv, 0, static_cast<long>(grid.v.count) - 1);
    next[i] = grid.index(static_cast<std::size_t>(nx), static_cast<std::size_t>(nv));
  }
  return di.with_kernel(TransitionKernel::from_map(di.n_states(), di.n_actions(), next));
}

struct PerturbedPair {
  TabularMDP truth;
  TabularMDP model;
};

PerturbedPair perturbed_pair(const TabularMDP& di, const GridSpec& grid, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  long dx = 0, dv = 0;
  while (dx == 0 && dv == 0) {
    dx = static_cast<long>(rng() % 7) - 3;
    dv = static_cast<long>(rng() % 3) - 1;
  }
  const double fraction = 0.02 + 0.18 * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  return {di.with_kernel(perturb_deterministic(di, fraction, rng())), shifted_model(di, grid, dx, dv)};
}

Outcome criterion_double_integrator() {
  const AlignedGrid grid{};
  bool ok = true;
  std::size_t thm3_pass = 0, thm3_other = 0;
  std::vector<double> tightness;
  for (double delta : {0.01, 0.05}) {
    const TabularMDP di = build_aligned_double_integrator(delta, grid);
    const GridSpec spec = aligned_grid_spec(delta, grid);
    const DiscretePolicy pi_d = velocity_softmax_policy(di, 0.5);
    const LipschitzProfile p = estimate_lipschitz(di, pi_d);
    const double g = di.gamma(), ge = g * p.eta;
    const BellmanFlowOperator op(di.init_dist(), pi_d, di, g);
    const ContractionMeasurement cm =
        measure_w1_contraction(op, GroundMetric::euclidean(di.state_embed()), 1000, 77);
    std::cout << fmt("  delta %.2f: %zu states, eta %.6g, gamma*eta %.6g, measured modulus %.6g (%zu pairs)\n",
                     delta, di.n_states(), p.eta, ge, cm.modulus, cm.valid_pairs);
    ok = ok && ge < 1.0 && !cm.no_valid_pairs() && cm.modulus <= ge + 1e-8;
    for (std::uint64_t k = 0; k < 50; ++k) {
      const PerturbedPair pair = perturbed_pair(di, spec, 7000 + k + static_cast<std::uint64_t>(delta * 1e4));
      const BoundReport r = check_theorem3(pair.truth, pair.model, pi_d);
      if (r.status == BoundStatus::Pass) {
        ++thm3_pass;
        if (r.tightness_defined) tightness.push_back(r.tightness);
      } else {
        ++thm3_other;
      }
    }
  }
  std::cout << "  thm3: " << thm3_pass << " of 100 perturbed models pass non-vacuously; tightness "
            << distribution_summary(tightness) << "\n";
  ok = ok && thm3_pass == 100 && thm3_other == 0;

  const TabularMDP di = build_aligned_double_integrator(0.5, grid);
  const GridSpec spec = aligned_grid_spec(0.5, grid);
  const DiscretePolicy pi_d = velocity_softmax_policy(di, 0.5);
  const DiscretePolicy pi = velocity_softmax_policy(di, 0.7);
  const LipschitzProfile p = estimate_lipschitz(di, pi_d);
  std::size_t gate_fired = 0, cor4_pass = 0;
  std::vector<double> cor4_tightness;
  for (std::uint64_t k = 0; k < 20; ++k) {
    const PerturbedPair pair = perturbed_pair(di, spec, 8000 + k);
    const BoundReport t3 = check_theorem3(pair.truth, pair.model, pi_d);
    const BoundReport c4 = check_cor4_branched_det(pair.truth, pair.model, pi_d, pi, 0.5);
    gate_fired += t3.vacuous ? 1 : 0;
    if (c4.status == BoundStatus::Pass) {
      ++cor4_pass;
      if (c4.tightness_defined) cor4_tightness.push_back(c4.tightness);
    }
  }
  std::cout << fmt("  delta 0.50: gamma*eta %.6g, beta*eta %.6g; thm3 vacuous on %zu/20, cor4 (beta 0.5) passes "
                   "non-vacuously on %zu/20; tightness %s\n",
                   di.gamma() * p.eta, 0.5 * p.eta, gate_fired, cor4_pass,
                   distribution_summary(cor4_tightness).c_str());
  ok = ok && di.gamma() * p.eta >= 1.0 && gate_fired == 20 && cor4_pass == 20;
  return {ok, fmt("contraction within gamma*eta at delta 0.01/0.05, thm3 %zu/100, delta 0.5 gate %zu/20 and cor4 "
                  "%zu/20",
                  thm3_pass, gate_fired, cor4_pass)};
}

// ---------------------------------------------------------------- 8

struct ChainPair {
  TabularMDP truth;
  TabularMDP model;
  DiscretePolicy pi_d;
};

ChainPair chain_pair(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::size_t n = 4 + rng() % 17, m = 2 + rng() % 3;
  const double gammas[] = {0.5, 0.9, 0.99};
  const double g = gammas[rng() % 3];
  const std::size_t kind = rng() % 4;
  std::vector<std::vector<double>> states, actions;
  for (std::size_t s = 0; s < n; ++s) states.push_back({static_cast<double>(s)});
  for (std::size_t a = 0; a < m; ++a) actions.push_back({-1.0 + 2.0 * static_cast<double>(a) / (m - 1)});
  const long last = static_cast<long>(n) - 1;
  std::vector<std::size_t> model_map(n * m), true_map(n * m);
  std::vector<double> reward(n * m);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t a = 0; a < m; ++a) {
      const long si = static_cast<long>(s), ai = static_cast<long>(a);
      long t = 0;
      switch (kind) {
        case 0: t = si + ai - 1; break;                       // shift
        case 1: t = static_cast<long>((a * 7 + 3) % n); break;  // constant per action
        case 2: t = si / 2 + ai; break;                       // halving
        default: t = last - si + ai - 1; break;               // reflection
      }
      model_map[s * m + a] = static_cast<std::size_t>(std::clamp<long>(t, 0, last));
      true_map[s * m + a] = u(rng) < 0.2 ? rng() % n : model_map[s * m + a];
      reward[s * m + a] = u(rng);
    }
  }
  const TabularMDP truth(PointSet::from_rows(states), PointSet::from_rows(actions),
                         TransitionKernel::from_map(n, m, true_map), reward, 1.0, g);
  return {truth, truth.with_kernel(TransitionKernel::from_map(n, m, model_map)), random_policy(n, m, rng())};
}

Outcome criterion_theorem4() {
  Tally tally;
  std::size_t non_contractive = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const ChainPair c = chain_pair(110000 + seed);
    const LipschitzProfile p = estimate_lipschitz(c.model, c.pi_d);
    if (p.L_T_s > 1.0) ++non_contractive;
    tally.add(check_theorem4(c.truth, c.model, c.pi_d, p));
  }
  std::cout << "  thm4: " << tally.pass << " pass, " << tally.fail << " fail, " << tally.vacuous
            << " vacuous; tightness " << distribution_summary(tally.tightness) << "\n";
  double worst = 0.0;
  for (double g : {0.3, 0.5, 0.9}) {
    for (int k = 1; k <= 3; ++k) {
      const double ref = oracle::geometric_moment_sum(g, k);
      worst = std::max(worst, std::abs(geometric_moment(g, k) - ref) / std::max(1.0, ref));
    }
  }
  std::cout << fmt("  geometric moments: max relative difference to brute force %.2g\n", worst);
  const bool ok = non_contractive == 0 && tally.fail == 0 && tally.vacuous == 0 && worst <= 1e-10;
  return {ok, fmt("1000 instances with L_T_s <= 1, %zu failures, moments within %.2g", tally.fail, worst)};
}

// ---------------------------------------------------------------- 9

Outcome criterion_mbrl() {
  double worst_identity = 0.0, worst_gain = 0.0;
  for (std::uint64_t k = 0; k < 20; ++k) {
    const TabularMDP mdp = make_random_mdp(8 + k, 2 + k % 3, 600 + k, 0.3 + 0.03 * k);
    MbrlConfig cfg;
    cfg.iterations = 10;
    cfg.rollouts_per_iter = 30 + 10 * k;
    cfg.truncation_q = 1 + k % 3;
    cfg.kappa = 0.05 + 0.04 * k;
    cfg.seed = k;
    if (k % 2 == 1) cfg.beta = 0.5;
    for (const auto& it : run_mbrl(mdp, cfg).iterations) {
      const double lhs = it.reward_true - it.prev_reward_true;
      const double rhs = (it.reward_model - it.prev_reward_model) +
                         (it.reward_true - it.reward_model + it.prev_reward_model - it.prev_reward_true);
      worst_identity = std::max({worst_identity, std::abs(lhs - rhs), std::abs(it.identity_residual)});
      worst_gain = std::min(worst_gain, it.model_gain);
    }
  }

  double worst_drop = 0.0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    std::mt19937_64 rng(130000 + seed);
    const std::size_t n = 3 + rng() % 20, m = 2 + rng() % 4;
    const TabularMDP model = make_random_mdp(n, m, rng(), 0.6);
    const DiscretePolicy pi_d = random_policy(n, m, rng());
    const double kappa = 0.01 + 0.99 * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const DiscretePolicy next = improve_policy(pi_d, model, kappa);
    const double before = cumulative_reward(occupancy(pi_d, model), model);
    const double after = cumulative_reward(occupancy(next, model), model);
    worst_drop = std::max(worst_drop, before - after);
  }

  const TabularMDP ten = make_random_mdp(10, 3, 17, 0.5);
  MbrlConfig exact;
  exact.iterations = 50;
  exact.rollouts_per_iter = 5;
  exact.kappa = 1.0;
  exact.exact_model = true;
  const double optimum = oracle::optimal_value(ten);
  const double reached = run_mbrl(ten, exact).iterations.back().reward_true;

  std::size_t decreasing = 0;
  const std::size_t instances = 5;
  for (std::uint64_t k = 0; k < instances; ++k) {
    const TabularMDP mdp = make_random_mdp(10, 3, 700 + k, 0.6);
    std::vector<double> eps;
    for (std::size_t rollouts : {10, 100, 1000}) {
      MbrlConfig cfg;
      cfg.iterations = 1;
      cfg.rollouts_per_iter = rollouts;
      cfg.seed = 800 + k;
      eps.push_back(run_mbrl(mdp, cfg).iterations.back().eps_model);
    }
    std::cout << fmt("  data sweep %llu: eps_model %.4g, %.4g, %.4g for 10, 100, 1000 rollouts\n",
                     static_cast<unsigned long long>(k), eps[0], eps[1], eps[2]);
    decreasing += (eps[0] > eps[1] && eps[1] > eps[2]) ? 1 : 0;
  }
  std::cout << fmt("  identity residual max %.2g; min model gain %.2g; max improver drop %.2g; "
                   "optimum %.12g reached %.12g\n",
                   worst_identity, worst_gain, worst_drop, optimum, reached);
  const bool ok = worst_identity <= 1e-12 && worst_gain >= -1e-12 && worst_drop <= 1e-12 &&
                  std::abs(reached - optimum) <= 1e-6 && decreasing == instances;
  return {ok, fmt("identity %.2g, improver drop %.2g, optimum gap %.2g, data sweep decreasing on %zu/%zu",
                  worst_identity, worst_drop, std::abs(reached - optimum), decreasing, instances)};
}

// ---------------------------------------------------------------- 10

Outcome criterion_determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "bcl_acceptance_cli";
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto path = [&](const std::string& name) { return (dir / name).string(); };
  auto slurp = [](const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  const std::vector<std::vector<std::string>> setup = {
      {"gen", "--random", "--states", "10", "--actions", "3", "--stoch", "1", "--seed", "1", "--out", path("m.json")},
      {"gen", "--double-integrator", "--delta", "0.05", "--grid", "-1:1:11,-1:1:11", "--actions", "-1,0,1", "--out",
       path("di.json")},
  };
  const std::vector<std::vector<std::string>> commands = {
      {"gen", "--random", "--states", "10", "--actions", "3", "--stoch", "1", "--seed", "1", "--out", path("OUT")},
      {"gen", "--double-integrator", "--delta", "0.1", "--grid", "-1:1:11,-1:1:11", "--actions", "-1,0,1", "--out",
       path("OUT")},
      {"check", "all", "--mdp", path("m.json"), "--trials", "16", "--out", path("OUT")},
      {"check", "all", "--mdp", path("di.json"), "--policy", "softmax", "--trials", "4", "--format", "json", "--out",
       path("OUT")},
      {"sweep", "--axis", "gamma", "--values", "0.5,0.9,0.95,0.99", "--target", "bc_gail", "--mdp", path("m.json"),
       "--out", path("OUT")},
      {"sweep", "--axis", "beta", "--range", "0.1:0.8:8", "--mdp", path("m.json"), "--out", path("OUT")},
      {"sweep", "--axis", "delta", "--values", "0.01,0.05", "--out", path("OUT")},
      {"sweep", "--axis", "data", "--values", "10,100", "--mdp", path("m.json"), "--out", path("OUT")},
      {"mbrl", "--mdp", path("m.json"), "--iters", "20", "--rollouts", "200", "--kappa", "0.2", "--out", path("OUT")},
      {"mbrl", "--mdp", path("m.json"), "--iters", "5", "--beta", "0.5", "--json", path("OUT")},
      {"info", "--mdp", path("di.json"), "--policy", "softmax", "--out", path("OUT")},
  };
  std::ostringstream sink;
  bool ok = true;
  for (auto cmd : setup) {
    cmd.insert(cmd.begin(), "bcl");
    ok = ok && cli::run(cmd, sink, sink) == 0;
  }
  std::size_t identical = 0;
  for (auto cmd : commands) {
    cmd.insert(cmd.begin(), "bcl");
    std::vector<std::string> outputs;
    bool ran = true;
    for (const char* threads : {"1", "3", "1"}) {
      setenv("BCL_THREADS", threads, 1);
      fs::remove(path("OUT"));
      ran = ran && cli::run(cmd, sink, sink) == 0;
      outputs.push_back(slurp(path("OUT")));
    }
    const bool same = ran && !outputs[0].empty() && outputs[0] == outputs[1] && outputs[0] == outputs[2];
    if (!same) std::cout << "  differs: " << cmd[1] << " " << cmd[2] << "\n";
    identical += same ? 1 : 0;
  }
  unsetenv("BCL_THREADS");
  fs::remove_all(dir);
  ok = ok && identical == commands.size();
  return {ok, fmt("%zu/%zu commands byte-identical across reruns and worker counts", identical, commands.size())};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"fixed point and TV contraction", criterion_fixed_point},
      {"symmetry bridge", criterion_symmetry_bridge},
      {"stochastic policy and model bounds", criterion_stochastic_bounds},
      {"branched occupancy gap", criterion_lemma5},
      {"behavior cloning vs adversarial imitation", criterion_bc_gail},
      {"exact W1 solver", criterion_w1},
      {"double integrator contraction", criterion_double_integrator},
      {"one-sided deterministic bound", criterion_theorem4},
      {"model-based loop", criterion_mbrl},
      {"CLI determinism", criterion_determinism},
  };
  int failed = 0;
  std::vector<std::string> lines;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    std::cout << "[" << i + 1 << "] " << criteria[i].first << "\n";
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (i == 0 && secs >= 30.0) {
      o.pass = false;
      o.detail += ", over the 30 s budget";
    }
    const std::string line = fmt("%s criterion %zu: %s (%s; %.1f s)", o.pass ? "PASS" : "FAIL", i + 1,
                                 criteria[i].first.c_str(), o.detail.c_str(), secs);
    std::cout << line << "\n";
    lines.push_back(line);
    failed += o.pass ? 0 : 1;
  }
  std::cout << "\nsummary\n";
  for (const auto& l : lines) std::cout << l << "\n";
  std::cout << (failed == 0 ? "all criteria pass" : fmt("%d criteria fail", failed)) << "\n";
  return failed == 0 ? 0 : 1;
}
