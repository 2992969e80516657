#include "bcl/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bcl/errors.hpp"
#include "bcl/metrics.hpp"

namespace bcl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void same_shape(const TabularMDP& a, const TabularMDP& b) {
  if (a.n_states() != b.n_states() || a.n_actions() != b.n_actions()) {
    throw ArgumentError("true and model MDPs have different state/action sets");
  }
  if (a.gamma() != b.gamma()) throw ArgumentError("true and model MDPs use different discounts");
}

void check_policy(const TabularMDP& mdp, const DiscretePolicy& pi) {
  if (pi.n_states() != mdp.n_states() || pi.n_actions() != mdp.n_actions()) {
    throw ArgumentError("policy shape does not match the MDP");
  }
}

void check_beta(double beta, double gamma) {
  if (!(beta > 0.0 && beta < gamma)) throw ArgumentError("branched discount must satisfy 0 < beta < gamma");
}

void require_deterministic(const TabularMDP& a, const TabularMDP& b) {
  if (!a.deterministic() || !b.deterministic()) throw ArgumentError("this check needs deterministic transitions");
}

double reward_of(const DiscretePolicy& pi, const TabularMDP& mdp) { return cumulative_reward(occupancy(pi, mdp), mdp); }

// Policy-shift factor 1/(1-g) + g/(1-g)^2.
double policy_factor(double g) { return 1.0 / (1.0 - g) + g / ((1.0 - g) * (1.0 - g)); }

void add_profile(BoundReport& r, const LipschitzProfile& p) {
  r.inputs["L_T_s"] = p.L_T_s;
  r.inputs["L_T_a"] = p.L_T_a;
  r.inputs["L_pi_w1"] = p.L_pi_w1;
  r.inputs["L_pi_dens"] = p.L_pi_dens;
  r.inputs["L_r"] = p.L_r;
  r.inputs["L_r_s"] = p.L_r_s;
  r.inputs["eta"] = p.eta;
  r.inputs["diam_A"] = p.diam_A;
  r.inputs["dim_A"] = static_cast<double>(p.dim_A);
}

// Pieces shared by the branched corollaries.
struct Branched {
  double r_long = 0.0;         // R_gamma(rho0, pi, T)
  double r_branch = 0.0;       // R_beta(rho_{T,gamma}^{pi_d}, pi, T_hat)
  double lhs_signed = 0.0;     // r_long - (1-beta)/(1-gamma) r_branch
  double eps_pi_long = 0.0;    // policy gap under rho_{T,gamma}^{pi_d}
  double eps_pi_branch = 0.0;  // policy gap under rho_{T_hat,beta}^{rho_gamma, pi}
  OccupancyMeasure long_d;     // rho_{T,gamma}^{pi_d}
  OccupancyMeasure short_d;    // rho_{T,beta}^{rho_gamma, pi_d}
};

Branched branched_terms(const TabularMDP& t, const TabularMDP& t_hat, const DiscretePolicy& pi_d,
                        const DiscretePolicy& pi, double beta) {
  const double g = t.gamma();
  Branched b;
  b.long_d = occupancy(pi_d, t);
  b.r_long = reward_of(pi, t);
  const auto branch = branched_occupancy(t_hat, pi, beta, b.long_d.state_dist);
  b.r_branch = cumulative_reward(branch, t_hat);
  b.lhs_signed = b.r_long - (1.0 - beta) / (1.0 - g) * b.r_branch;
  b.eps_pi_long = policy_gap_tv(pi_d, pi, b.long_d.state_dist);
  b.eps_pi_branch = policy_gap_tv(pi_d, pi, branch.state_dist);
  b.short_d = branched_occupancy(t, pi_d, beta, b.long_d.state_dist);
  return b;
}

double branched_policy_rhs(const Branched& b, double r_max, double g, double beta) {
  return r_max * (b.eps_pi_long * g / ((1.0 - g) * (1.0 - g)) +
                  b.eps_pi_branch * beta / ((1.0 - beta) * (1.0 - g)) +
                  (b.eps_pi_long + b.eps_pi_branch) / (1.0 - g) + beta / (g - beta));
}

void add_branched(BoundReport& r, const Branched& b, double g, double beta) {
  r.inputs["gamma"] = g;
  r.inputs["beta"] = beta;
  r.inputs["eps_pi_T_gamma"] = b.eps_pi_long;
  r.inputs["eps_pi_That_beta"] = b.eps_pi_branch;
  r.aux["R_gamma_true"] = b.r_long;
  r.aux["R_beta_model"] = b.r_branch;
}

// One-sided weak-Lipschitz pieces at discount g: sqrt(2 eps r_max L_r_s) and
// r_max sqrt(2 eps L_pi_dens * size).
double weak_reward_root(double eps, double r_max, const LipschitzProfile& p) {
  return std::sqrt(2.0 * eps * r_max * p.L_r_s);
}
double weak_policy_root(double eps, double r_max, const LipschitzProfile& p, double size) {
  return r_max * std::sqrt(2.0 * eps * p.L_pi_dens * size);
}

}  // namespace

const char* to_string(BoundStatus status) {
  switch (status) {
    case BoundStatus::Pass:
      return "pass";
    case BoundStatus::Fail:
      return "fail";
    case BoundStatus::Vacuous:
      return "vacuous";
  }
  return "?";
}

BoundReport make_report(std::string id, double lhs, double rhs, bool gate_ok) {
  BoundReport r;
  r.bound_id = std::move(id);
  r.lhs = lhs;
  r.rhs = rhs;
  r.holds = lhs <= rhs + kBoundTolerance;
  r.vacuous = !gate_ok || std::isinf(rhs);
  if (rhs > 0.0) {
    r.tightness = std::max(lhs, 0.0) / rhs;
  } else {
    r.tightness = std::numeric_limits<double>::quiet_NaN();
    r.tightness_defined = false;
  }
  if (r.vacuous) {
    r.status = BoundStatus::Vacuous;
  } else {
    r.status = r.holds ? BoundStatus::Pass : BoundStatus::Fail;
  }
  return r;
}

const std::vector<std::string>& bound_ids() {
  static const std::vector<std::string> ids = {
      "lemma2", "thm1", "cor_bc", "cor_gail", "thm2", "cor_mbrl_stoch", "lemma5", "cor3_branched",
      "thm3", "cor4_branched_det", "thm4", "cor6_branched_weak", "cor5_weak"};
  return ids;
}

TabularMDP model_mdp(const TabularMDP& mdp_true, const TabularMDP& mdp_model) {
  same_shape(mdp_true, mdp_model);
  return mdp_true.with_kernel(mdp_model.kernel());
}

BoundReport check_lemma2(const OccupancyMeasure& rho1, const OccupancyMeasure& rho2, const TabularMDP& mdp) {
  if (rho1.discount != rho2.discount) throw ArgumentError("occupancies use different discounts");
  const std::size_t sa = mdp.n_states() * mdp.n_actions();
  if (rho1.state_action_dist.size() != sa || rho2.state_action_dist.size() != sa) {
    throw ArgumentError("occupancies do not match the MDP");
  }
  const double g = rho1.discount;
  const double lhs = std::abs(cumulative_reward(rho1, mdp) - cumulative_reward(rho2, mdp));
  const double tv = tv_distance(rho1.state_action_dist, rho2.state_action_dist);
  auto r = make_report("lemma2", lhs, tv * mdp.r_max() / (1.0 - g), true);
  r.inputs["gamma"] = g;
  r.inputs["r_max"] = mdp.r_max();
  r.inputs["tv"] = tv;
  return r;
}

BoundReport check_theorem1(const TabularMDP& mdp, const DiscretePolicy& pi_d, const DiscretePolicy& pi) {
  check_policy(mdp, pi_d);
  check_policy(mdp, pi);
  const double g = mdp.gamma();
  const auto occ_d = occupancy(pi_d, mdp);
  const auto occ = occupancy(pi, mdp);
  const double lhs = std::abs(cumulative_reward(occ_d, mdp) - cumulative_reward(occ, mdp));
  const double eps = policy_gap_tv(pi_d, pi, occ_d.state_dist);
  auto r = make_report("thm1", lhs, eps * mdp.r_max() * policy_factor(g), true);
  r.inputs["gamma"] = g;
  r.inputs["r_max"] = mdp.r_max();
  r.inputs["eps_pi"] = eps;
  return r;
}

BoundReport check_bc_bound(const TabularMDP& mdp, const DiscretePolicy& pi_expert, const DiscretePolicy& pi_agent) {
  check_policy(mdp, pi_expert);
  check_policy(mdp, pi_agent);
  const double g = mdp.gamma();
  const auto occ_e = occupancy(pi_expert, mdp);
  const double lhs = std::abs(cumulative_reward(occ_e, mdp) - reward_of(pi_agent, mdp));
  double eps = 0.0;
  bool finite = true;
  for (std::size_t s = 0; s < mdp.n_states(); ++s) {
    const double w = occ_e.state_dist[s];
    if (w == 0.0) continue;
    const auto kl = kl_divergence(pi_expert.row(s), pi_agent.row(s));
    if (kl.infinite) {
      finite = false;
      break;
    }
    eps += w * kl.value;
  }
  const double rhs = finite ? std::sqrt(eps / 2.0) * mdp.r_max() * policy_factor(g) : kInf;
  auto r = make_report("cor_bc", lhs, rhs, finite);
  r.inputs["gamma"] = g;
  r.inputs["r_max"] = mdp.r_max();
  r.inputs["eps_bc"] = finite ? eps : kInf;
  if (!finite) r.notes.emplace_back("agent policy misses expert support at a visited state");
  return r;
}

BoundReport check_gail_bound(const TabularMDP& mdp, const DiscretePolicy& pi_expert,
                             const DiscretePolicy& pi_agent) {
  check_policy(mdp, pi_expert);
  check_policy(mdp, pi_agent);
  const double g = mdp.gamma();
  const auto occ_e = occupancy(pi_expert, mdp);
  const auto occ_a = occupancy(pi_agent, mdp);
  const double lhs = std::abs(cumulative_reward(occ_e, mdp) - cumulative_reward(occ_a, mdp));
  const double eps = js_divergence(occ_e.state_action_dist, occ_a.state_action_dist);
  auto r = make_report("cor_gail", lhs, std::sqrt(2.0 * eps) * mdp.r_max() / (1.0 - g), true);
  r.inputs["gamma"] = g;
  r.inputs["r_max"] = mdp.r_max();
  r.inputs["eps_gail"] = eps;
  return r;
}

BoundReport check_theorem2(const TabularMDP& mdp_true, const TabularMDP& mdp_model, const DiscretePolicy& pi_d) {
  check_policy(mdp_true, pi_d);
  const TabularMDP model = model_mdp(mdp_true, mdp_model);
  const double g = mdp_true.gamma();
  const auto occ_t = occupancy(pi_d, mdp_true);
  const double lhs = std::abs(cumulative_reward(occ_t, mdp_true) - reward_of(pi_d, model));
  const double eps = transition_gap_tv(mdp_true.kernel(), model.kernel(), occ_t.state_action_dist);
  auto r = make_report("thm2", lhs, eps * mdp_true.r_max() * g / ((1.0 - g) * (1.0 - g)), true);
  r.inputs["gamma"] = g;
  r.inputs["r_max"] = mdp_true.r_max();
  r.inputs["eps_model"] = eps;
  return r;
}

BoundReport check_mbrl_stochastic(const TabularMDP& mdp_true, const TabularMDP& mdp_model,
                                  const DiscretePolicy& pi_d, const DiscretePolicy& pi) {
  check_policy(mdp_true, pi_d);
  check_policy(mdp_true, pi);
  const TabularMDP model = model_mdp(mdp_true, mdp_model);
  const double g = mdp_true.gamma(), rm = mdp_true.r_max();

  const auto d_true = occupancy(pi_d, mdp_true);
  const auto p_true = occupancy(pi, mdp_true);
  const auto d_model = occupancy(pi_d, model);
  const auto p_model = occupancy(pi, model);
  const double R_p_t = cumulative_reward(p_true, mdp_true), R_d_t = cumulative_reward(d_true, mdp_true);
  const double R_d_m = cumulative_reward(d_model, model), R_p_m = cumulative_reward(p_model, model);

  const double eps_model = transition_gap_tv(mdp_true.kernel(), model.kernel(), d_true.state_action_dist);
  const double eps_pi_t = policy_gap_tv(pi_d, pi, d_true.state_dist);
  const double eps_pi_m = policy_gap_tv(pi_d, pi, p_model.state_dist);

  const double q2 = (1.0 - g) * (1.0 - g);
  const double rhs = (eps_model + eps_pi_t + eps_pi_m) * rm * g / q2 + (eps_pi_t + eps_pi_m) * rm / (1.0 - g);
  auto r = make_report("cor_mbrl_stoch", std::abs(R_p_t - R_p_m), rhs, true);
  r.inputs["gamma"] = g;
  r.inputs["r_max"] = rm;
  r.inputs["eps_model"] = eps_model;
  r.inputs["eps_pi_T"] = eps_pi_t;
  r.inputs["eps_pi_That"] = eps_pi_m;
  r.aux["term1"] = std::abs(R_p_t - R_d_t);
  r.aux["term2"] = std::abs(R_d_t - R_d_m);
  r.aux["term3"] = std::abs(R_d_m - R_p_m);
  r.aux["term1_rhs"] = eps_pi_t * rm * policy_factor(g);
  r.aux["term2_rhs"] = eps_model * rm * g / q2;
  r.aux["term3_rhs"] = eps_pi_m * rm * policy_factor(g);
  return r;
}

OccupancyMeasure branched_occupancy(const TabularMDP& mdp_model, const DiscretePolicy& pi, double beta,
                                    const Distribution& init) {
  check_beta(beta, mdp_model.gamma());
  return occupancy(init, pi, mdp_model, beta);
}

BoundReport check_lemma5(const TabularMDP& mdp_true, const DiscretePolicy& pi_d, double gamma, double beta) {
  check_policy(mdp_true, pi_d);
  if (!(gamma > 0.0 && gamma < 1.0)) throw ArgumentError("gamma must lie in (0, 1)");
  check_beta(beta, gamma);
  const auto long_d = occupancy(mdp_true.init_dist(), pi_d, mdp_true, gamma);
  const auto short_d = occupancy(long_d.state_dist, pi_d, mdp_true, beta);
  const double lhs = tv_distance(long_d.state_action_dist, short_d.state_action_dist);
  auto r = make_report("lemma5", lhs, (1.0 - gamma) * beta / (gamma - beta), true);
  r.inputs["gamma"] = gamma;
  r.inputs["beta"] = beta;
  return r;
}

BoundReport check_cor3_branched(const TabularMDP& mdp_true, const TabularMDP& mdp_model,
                                const DiscretePolicy& pi_d, const DiscretePolicy& pi, double beta) {
  check_policy(mdp_true, pi_d);
  check_policy(mdp_true, pi);
  const TabularMDP model = model_mdp(mdp_true, mdp_model);
  const double g = mdp_true.gamma(), rm = mdp_true.r_max();
  check_beta(beta, g);
  const Branched b = branched_terms(mdp_true, model, pi_d, pi, beta);
  const double eps_model = transition_gap_tv(mdp_true.kernel(), model.kernel(), b.short_d.state_action_dist);
  const double rhs = branched_policy_rhs(b, rm, g, beta) + rm * eps_model * beta / ((1.0 - beta) * (1.0 - g));
  auto r = make_report("cor3_branched", std::abs(b.lhs_signed), rhs, true);
  add_branched(r, b, g, beta);
  r.inputs["r_max"] = rm;
  r.inputs["eps_model_beta"] = eps_model;
  r.aux["rhs_model_term"] = rm * eps_model * beta / ((1.0 - beta) * (1.0 - g));
  r.aux["rhs_horizon_term"] = rm * beta / (g - beta);
  return r;
}

BoundReport check_theorem3(const TabularMDP& mdp_true_det, const TabularMDP& mdp_model_det,
                           const DiscretePolicy& pi_d, const LipschitzProfile& prof) {
  check_policy(mdp_true_det, pi_d);
  const TabularMDP model = model_mdp(mdp_true_det, mdp_model_det);
  require_deterministic(mdp_true_det, model);
  const double g = mdp_true_det.gamma();
  const auto occ_t = occupancy(pi_d, mdp_true_det);
  const double lhs = std::abs(cumulative_reward(occ_t, mdp_true_det) - reward_of(pi_d, model));
  const double eps = transition_gap_l2(mdp_true_det.kernel(), model.kernel(), occ_t.state_action_dist,
                                       mdp_true_det.state_embed());
  const bool gate = g * prof.eta < 1.0;
  const double rhs = gate ? (1.0 + prof.L_pi_w1) * prof.L_r * g * eps / ((1.0 - g) * (1.0 - g * prof.eta)) : kInf;
  auto r = make_report("thm3", lhs, rhs, gate);
  r.inputs["gamma"] = g;
  r.inputs["eps_l2"] = eps;
  add_profile(r, prof);
  r.aux["gamma_eta"] = g * prof.eta;
  if (!gate) r.notes.emplace_back("gamma * eta >= 1: no W1 contraction");
  return r;
}

BoundReport check_theorem3(const TabularMDP& mdp_true_det, const TabularMDP& mdp_model_det,
                           const DiscretePolicy& pi_d) {
  const TabularMDP model = model_mdp(mdp_true_det, mdp_model_det);
  return check_theorem3(mdp_true_det, model, pi_d, estimate_lipschitz(model, pi_d));
}

BoundReport check_cor4_branched_det(const TabularMDP& mdp_true_det, const TabularMDP& mdp_model_det,
                                    const DiscretePolicy& pi_d, const DiscretePolicy& pi, double beta,
                                    const LipschitzProfile& prof) {
  check_policy(mdp_true_det, pi_d);
  check_policy(mdp_true_det, pi);
  const TabularMDP model = model_mdp(mdp_true_det, mdp_model_det);
  require_deterministic(mdp_true_det, model);
  const double g = mdp_true_det.gamma(), rm = mdp_true_det.r_max();
  check_beta(beta, g);
  const Branched b = branched_terms(mdp_true_det, model, pi_d, pi, beta);
  const double eps = transition_gap_l2(mdp_true_det.kernel(), model.kernel(), b.short_d.state_action_dist,
                                       mdp_true_det.state_embed());
  const bool gate = beta * prof.eta < 1.0;
  const double model_term =
      gate ? (1.0 + prof.L_pi_w1) * prof.L_r * beta * eps / ((1.0 - g) * (1.0 - beta * prof.eta)) : kInf;
  auto r = make_report("cor4_branched_det", std::abs(b.lhs_signed), branched_policy_rhs(b, rm, g, beta) + model_term,
                       gate);
  add_branched(r, b, g, beta);
  r.inputs["r_max"] = rm;
  r.inputs["eps_l2_beta"] = eps;
  add_profile(r, prof);
  r.aux["beta_eta"] = beta * prof.eta;
  r.aux["gamma_eta"] = g * prof.eta;
  r.aux["rhs_model_term"] = model_term;
  if (!gate) r.notes.emplace_back("beta * eta >= 1: no W1 contraction for the branch");
  return r;
}

BoundReport check_cor4_branched_det(const TabularMDP& mdp_true_det, const TabularMDP& mdp_model_det,
                                    const DiscretePolicy& pi_d, const DiscretePolicy& pi, double beta) {
  const TabularMDP model = model_mdp(mdp_true_det, mdp_model_det);
  return check_cor4_branched_det(mdp_true_det, model, pi_d, pi, beta, estimate_lipschitz(model, pi_d));
}

BoundReport check_theorem4(const TabularMDP& mdp_true_det, const TabularMDP& mdp_model_det,
                           const DiscretePolicy& pi_d, const LipschitzProfile& prof) {
  check_policy(mdp_true_det, pi_d);
  const TabularMDP model = model_mdp(mdp_true_det, mdp_model_det);
  require_deterministic(mdp_true_det, model);
  const double g = mdp_true_det.gamma(), rm = mdp_true_det.r_max();
  const auto occ_t = occupancy(pi_d, mdp_true_det);
  const double lhs = cumulative_reward(occ_t, mdp_true_det) - reward_of(pi_d, model);
  const double eps = transition_gap_l2(mdp_true_det.kernel(), model.kernel(), occ_t.state_action_dist,
                                       mdp_true_det.state_embed());
  const bool gate = prof.L_T_s <= 1.0;
  const double q = 1.0 - g;
  const double h2 = geometric_moment(g, 2), h3 = geometric_moment(g, 3);
  const double rhs = (1.0 + g) / (q * q) * weak_reward_root(eps, rm, prof) +
                     weak_policy_root(eps, rm, prof, prof.diam_A) / std::pow(q, 2.5);
  const double m = static_cast<double>(mdp_true_det.n_actions());
  auto r = make_report("thm4", lhs, rhs, gate);
  r.inputs["gamma"] = g;
  r.inputs["r_max"] = rm;
  r.inputs["eps_l2"] = eps;
  add_profile(r, prof);
  r.aux["rhs_derived"] = h2 * weak_reward_root(eps, rm, prof) + weak_policy_root(eps, rm, prof, m) * std::sqrt(h2 * h3);
  if (!gate) r.notes.emplace_back("model state constant above 1: iota > 0, rhs shown without the O(iota) terms");
  return r;
}

BoundReport check_theorem4(const TabularMDP& mdp_true_det, const TabularMDP& mdp_model_det,
                           const DiscretePolicy& pi_d) {
  const TabularMDP model = model_mdp(mdp_true_det, mdp_model_det);
  return check_theorem4(mdp_true_det, model, pi_d, estimate_lipschitz(model, pi_d));
}

BoundReport check_cor6_branched_weak(const TabularMDP& mdp_true_det, const TabularMDP& mdp_model_det,
                                     const DiscretePolicy& pi_d, const DiscretePolicy& pi, double beta,
                                     const LipschitzProfile& prof) {
  check_policy(mdp_true_det, pi_d);
  check_policy(mdp_true_det, pi);
  const TabularMDP model = model_mdp(mdp_true_det, mdp_model_det);
  require_deterministic(mdp_true_det, model);
  const double g = mdp_true_det.gamma(), rm = mdp_true_det.r_max();
  check_beta(beta, g);
  const Branched b = branched_terms(mdp_true_det, model, pi_d, pi, beta);
  const double eps = transition_gap_l2(mdp_true_det.kernel(), model.kernel(), b.short_d.state_action_dist,
                                       mdp_true_det.state_embed());
  const bool gate = prof.L_T_s <= 1.0;
  const double model_term = (1.0 + beta) / ((1.0 - beta) * (1.0 - g)) * weak_reward_root(eps, rm, prof) +
                            weak_policy_root(eps, rm, prof, prof.diam_A) / (std::pow(1.0 - beta, 1.5) * (1.0 - g));
  auto r = make_report("cor6_branched_weak", b.lhs_signed, branched_policy_rhs(b, rm, g, beta) + model_term, gate);
  add_branched(r, b, g, beta);
  r.inputs["r_max"] = rm;
  r.inputs["eps_l2_beta"] = eps;
  add_profile(r, prof);
  r.aux["rhs_model_term"] = model_term;
  if (!gate) r.notes.emplace_back("model state constant above 1: iota > 0, rhs shown without the O(iota) terms");
  return r;
}

BoundReport check_cor6_branched_weak(const TabularMDP& mdp_true_det, const TabularMDP& mdp_model_det,
                                     const DiscretePolicy& pi_d, const DiscretePolicy& pi, double beta) {
  const TabularMDP model = model_mdp(mdp_true_det, mdp_model_det);
  return check_cor6_branched_weak(mdp_true_det, model, pi_d, pi, beta, estimate_lipschitz(model, pi_d));
}

BoundReport check_cor5_weak(const TabularMDP& mdp_true_det, const TabularMDP& mdp_model_det,
                            const DiscretePolicy& pi_d, const DiscretePolicy& pi, const LipschitzProfile& prof) {
  check_policy(mdp_true_det, pi);
  const TabularMDP model = model_mdp(mdp_true_det, mdp_model_det);
  const auto weak = check_theorem4(mdp_true_det, model, pi_d, prof);
  const double g = mdp_true_det.gamma(), rm = mdp_true_det.r_max();
  const auto d_true = occupancy(pi_d, mdp_true_det);
  const auto p_model = occupancy(pi, model);
  const double eps_pi_t = policy_gap_tv(pi_d, pi, d_true.state_dist);
  const double eps_pi_m = policy_gap_tv(pi_d, pi, p_model.state_dist);
  const double lhs = reward_of(pi, mdp_true_det) - cumulative_reward(p_model, model);
  const double rhs = (eps_pi_t + eps_pi_m) * rm * policy_factor(g) + weak.rhs;
  auto r = make_report("cor5_weak", lhs, rhs, !weak.vacuous);
  r.inputs = weak.inputs;
  r.inputs["eps_pi_T"] = eps_pi_t;
  r.inputs["eps_pi_That"] = eps_pi_m;
  r.aux["model_lhs"] = weak.lhs;
  r.aux["model_rhs"] = weak.rhs;
  r.notes.emplace_back("reconstructed: policy gap + one-sided model gap + policy gap");
  return r;
}

}  // namespace bcl
