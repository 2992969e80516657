#include <doctest.h>

#include <cmath>

#include <json.hpp>

#include "bcl/bellman_flow.hpp"
#include "bcl/errors.hpp"
#include "bcl/mbrl.hpp"
#include "bcl/mbrl_io.hpp"
#include "oracles.hpp"

using namespace bcl;

namespace {

// V^pi at the given discount from each start state, by truncated series.
std::vector<double> series_values(const TabularMDP& mdp, const DiscretePolicy& pi, double g) {
  std::vector<double> v(mdp.n_states());
  for (std::size_t s = 0; s < mdp.n_states(); ++s) {
    std::vector<double> init(mdp.n_states(), 0.0);
    init[s] = 1.0;
    v[s] = oracle::series_occupancy(mdp, pi, init, g).reward;
  }
  return v;
}

double model_reward(const DiscretePolicy& pi, const TabularMDP& mdp) {
  return oracle::series_occupancy(mdp, pi, mdp.init_dist().vector(), mdp.gamma()).reward;
}

}  // namespace

TEST_CASE("fit_model counts with smoothing") {
  const Dataset data{{0, 0, 1}, {0, 0, 1}, {0, 0, 0}, {1, 1, 1}};
  const TransitionKernel k = fit_model(data, 0.5, 2, 2);
  CHECK(k(1, 0, 0) == doctest::Approx(2.5 / 4.0));
  CHECK(k(0, 0, 0) == doctest::Approx(1.5 / 4.0));
  CHECK(k(0, 1, 0) == doctest::Approx(0.5));  // unseen pair: uniform
  CHECK(k(1, 1, 1) == doctest::Approx(1.5 / 2.0));
  CHECK_THROWS_AS(fit_model({}, 0.5, 2, 2), ArgumentError);
  CHECK_THROWS_AS(fit_model({{0, 0, 5}}, 0.5, 2, 2), ArgumentError);
  CHECK_THROWS_AS(fit_model(data, 0.0, 2, 2), ArgumentError);
}

TEST_CASE("sampling policy is the occupancy-weighted mixture") {
  const TabularMDP mdp = make_random_mdp(7, 3, 2, 0.6);
  const DiscretePolicy a = random_policy(7, 3, 1), b = random_policy(7, 3, 2);
  CHECK(sampling_policy({a}, mdp) == a);
  const DiscretePolicy mix = sampling_policy({a, b}, mdp);
  const auto oa = oracle::series_occupancy(mdp, a, mdp.init_dist().vector(), mdp.gamma());
  const auto ob = oracle::series_occupancy(mdp, b, mdp.init_dist().vector(), mdp.gamma());
  for (std::size_t s = 0; s < 7; ++s) {
    for (std::size_t k = 0; k < 3; ++k) {
      const double ref = (oa.state[s] * a(s, k) + ob.state[s] * b(s, k)) / (oa.state[s] + ob.state[s]);
      CHECK(mix(s, k) == doctest::Approx(ref).epsilon(1e-10));
    }
  }
  CHECK_THROWS_AS(sampling_policy({}, mdp), ArgumentError);
}

TEST_CASE("action values satisfy the Bellman equation") {
  const TabularMDP mdp = make_random_mdp(9, 3, 5, 0.7);
  const DiscretePolicy pi = random_policy(9, 3, 6);
  for (double g : {0.5, 0.9}) {
    const auto q = action_values(pi, mdp, g);
    const auto v = series_values(mdp, pi, g);
    for (std::size_t s = 0; s < 9; ++s) {
      double vs = 0.0;
      for (std::size_t a = 0; a < 3; ++a) {
        double ref = mdp.reward(s, a);
        for (std::size_t t = 0; t < 9; ++t) ref += g * mdp.kernel()(t, s, a) * v[t];
        CHECK(q[s * 3 + a] == doctest::Approx(ref).epsilon(1e-10));
        vs += pi(s, a) * q[s * 3 + a];
      }
      CHECK(vs == doctest::Approx(v[s]).epsilon(1e-10));
    }
  }
}

TEST_CASE("improve_policy stays in the TV ball and never lowers model reward") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const TabularMDP model = make_random_mdp(8, 3, seed, 0.5);
    const DiscretePolicy pi_d = random_policy(8, 3, seed + 50);
    const double kappa = 0.05 + 0.1 * static_cast<double>(seed % 10);
    const std::optional<double> beta = seed % 3 == 0 ? std::optional<double>(0.5) : std::nullopt;
    const DiscretePolicy next = improve_policy(pi_d, model, kappa, beta);
    for (std::size_t s = 0; s < 8; ++s) {
      double row = 0.0;
      for (std::size_t a = 0; a < 3; ++a) row += std::abs(next(s, a) - pi_d(s, a));
      CHECK(0.5 * row <= kappa + 1e-12);
    }
    if (!beta) CHECK(model_reward(next, model) >= model_reward(pi_d, model) - 1e-12);
  }
  // kappa = 1 is the greedy policy
  const TabularMDP model = make_random_mdp(8, 3, 1, 0.5);
  const DiscretePolicy pi_d = random_policy(8, 3, 2);
  const DiscretePolicy greedy = improve_policy(pi_d, model, 1.0);
  const auto q = action_values(pi_d, model, model.gamma());
  for (std::size_t s = 0; s < 8; ++s) {
    const std::size_t best = std::max_element(q.begin() + s * 3, q.begin() + s * 3 + 3) - (q.begin() + s * 3);
    CHECK(greedy(s, best) == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("rollouts follow the kernel and are reproducible") {
  const TabularMDP mdp = make_random_mdp(10, 2, 3, 0.4);
  const DiscretePolicy pi = random_policy(10, 2, 4);
  CHECK(horizon_cap(0.9) == 100);
  CHECK(horizon_cap(0.5) == 20);
  const Dataset d = sample_rollouts(mdp, pi, 200, 7, 1);
  CHECK(d.size() >= 200);
  CHECK(d.size() <= 200 * horizon_cap(0.9));
  for (const auto& t : d) {
    CHECK(mdp.kernel()(t.next, t.state, t.action) > 0.0);
    CHECK(pi(t.state, t.action) > 0.0);
  }
  const Dataset again = sample_rollouts(mdp, pi, 200, 7, 1);
  REQUIRE(again.size() == d.size());
  bool same = true;
  for (std::size_t i = 0; i < d.size(); ++i) {
    same = same && d[i].state == again[i].state && d[i].action == again[i].action && d[i].next == again[i].next;
  }
  CHECK(same);
  // mean horizon near 1 / (1 - gamma) = 10
  CHECK(static_cast<double>(d.size()) / 200.0 == doctest::Approx(10.0).epsilon(0.2));
}

TEST_CASE("loop identity holds at every iteration") {
  const TabularMDP mdp = make_random_mdp(12, 3, 8, 0.6);
  MbrlConfig cfg;
  cfg.iterations = 8;
  cfg.rollouts_per_iter = 50;
  cfg.truncation_q = 2;
  const MbrlTrace trace = run_mbrl(mdp, cfg);
  REQUIRE(trace.iterations.size() == 8);
  double prev = trace.initial_reward_true;
  for (const auto& it : trace.iterations) {
    const double lhs = it.reward_true - it.prev_reward_true;
    const double rhs = (it.reward_model - it.prev_reward_model) +
                       (it.reward_true - it.reward_model + it.prev_reward_model - it.prev_reward_true);
    CHECK(std::abs(lhs - rhs) <= 1e-12);
    CHECK(std::abs(it.identity_residual) <= 1e-12);
    CHECK(it.prev_reward_true == prev);
    CHECK(it.model_gain >= -1e-12);
    CHECK(it.reports.size() == 3);
    for (const auto& r : it.reports) CHECK_FALSE(r.failed());
    prev = it.reward_true;
  }
  CHECK(trace.iterations.back().reward_true == doctest::Approx(model_reward(trace.final_policy, mdp)).epsilon(1e-10));
  CHECK(trace.truncation_mass == doctest::Approx(std::pow(0.9, 99)));
}

TEST_CASE("exact model with kappa 1 reaches the optimum") {
  const TabularMDP mdp = make_random_mdp(10, 3, 17, 0.5);
  MbrlConfig cfg;
  cfg.iterations = 50;
  cfg.rollouts_per_iter = 5;
  cfg.kappa = 1.0;
  cfg.exact_model = true;
  const MbrlTrace trace = run_mbrl(mdp, cfg);
  CHECK(std::abs(trace.iterations.back().reward_true - oracle::optimal_value(mdp)) <= 1e-6);
  for (const auto& it : trace.iterations) CHECK(it.eps_model == 0.0);
}

TEST_CASE("more data shrinks the model error") {
  const TabularMDP mdp = make_random_mdp(10, 3, 21, 0.6);
  double prev = 2.0;
  for (std::size_t rollouts : {10, 100, 1000}) {
    MbrlConfig cfg;
    cfg.iterations = 1;
    cfg.rollouts_per_iter = rollouts;
    const double eps = run_mbrl(mdp, cfg).iterations.back().eps_model;
    CHECK(eps < prev);
    prev = eps;
  }
}

TEST_CASE("branched mode adds cor3_branched reports") {
  const TabularMDP mdp = make_random_mdp(8, 2, 4, 0.5);
  MbrlConfig cfg;
  cfg.iterations = 3;
  cfg.rollouts_per_iter = 40;
  cfg.beta = 0.5;
  const MbrlTrace trace = run_mbrl(mdp, cfg);
  for (const auto& it : trace.iterations) {
    REQUIRE(it.reports.size() == 4);
    CHECK(it.reports.back().bound_id == "cor3_branched");
    CHECK(it.model_gain >= -1e-12);
  }
  const std::string csv = mbrl_trace_csv(trace);
  CHECK(csv.find("cor3_branched_rhs") != std::string::npos);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}

TEST_CASE("config validation and json config") {
  const TabularMDP mdp = make_random_mdp(5, 2, 1, 0.5);
  MbrlConfig cfg;
  cfg.kappa = 0.0;
  CHECK_THROWS_AS(cfg.validate(mdp), ArgumentError);
  cfg = MbrlConfig{};
  cfg.beta = 0.95;
  CHECK_THROWS_AS(cfg.validate(mdp), ArgumentError);
  cfg = MbrlConfig{};
  cfg.truncation_q = 0;
  CHECK_THROWS_AS(run_mbrl(mdp, cfg), ArgumentError);

  const auto doc = nlohmann::json::parse(R"({"iterations": 4, "kappa": 0.3, "beta": 0.4, "exact_model": true})");
  const MbrlConfig parsed = mbrl_config_from_json(doc);
  CHECK(parsed.iterations == 4);
  CHECK(parsed.kappa == 0.3);
  CHECK(parsed.beta == 0.4);
  CHECK(parsed.exact_model);
  CHECK(parsed.rollouts_per_iter == 100);
  CHECK_THROWS_AS(mbrl_config_from_json(nlohmann::json::parse(R"({"iters": 4})")), ArgumentError);

  const MbrlTrace trace = run_mbrl(mdp, parsed);
  const auto j = mbrl_trace_json(trace, parsed);
  CHECK(j.at("iterations").size() == 4);
  CHECK(mbrl_trace_json(run_mbrl(mdp, parsed), parsed).dump() == j.dump());
}
