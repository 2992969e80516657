#pragma once

#include <map>
#include <string>
#include <vector>

#include "bcl/bellman_flow.hpp"
#include "bcl/distribution.hpp"
#include "bcl/dynamics.hpp"
#include "bcl/mdp.hpp"

namespace bcl {

enum class BoundStatus { Pass, Fail, Vacuous };

const char* to_string(BoundStatus status);

/// Outcome of one inequality check.
///
/// `holds` is lhs <= rhs + 1e-9 regardless of the assumption gate; `status`
/// is Vacuous whenever the gate fails or rhs is infinite, and only then
/// ignores `holds`.
struct BoundReport {
  std::string bound_id;
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = true;
  /// lhs / rhs, NaN when rhs is zero (see `tightness_defined`).
  double tightness = 0.0;
  bool tightness_defined = true;
  bool vacuous = false;
  BoundStatus status = BoundStatus::Pass;
  /// Every epsilon, constant and discount that went into rhs.
  std::map<std::string, double> inputs;
  /// Secondary quantities: decompositions, alternative right-hand sides.
  std::map<std::string, double> aux;
  std::vector<std::string> notes;

  bool failed() const { return status == BoundStatus::Fail; }
};

inline constexpr double kBoundTolerance = 1e-9;

BoundReport make_report(std::string id, double lhs, double rhs, bool gate_ok);

/// Identifiers accepted by `check_by_id` style dispatchers, in canonical order.
const std::vector<std::string>& bound_ids();

/// Copy of `mdp_true` with the model's kernel; reward, r_max, gamma and the
/// initial distribution stay those of the true MDP.
TabularMDP model_mdp(const TabularMDP& mdp_true, const TabularMDP& mdp_model);

BoundReport check_lemma2(const OccupancyMeasure& rho1, const OccupancyMeasure& rho2, const TabularMDP& mdp);

BoundReport check_theorem1(const TabularMDP& mdp, const DiscretePolicy& pi_d, const DiscretePolicy& pi);
BoundReport check_bc_bound(const TabularMDP& mdp, const DiscretePolicy& pi_expert, const DiscretePolicy& pi_agent);
BoundReport check_gail_bound(const TabularMDP& mdp, const DiscretePolicy& pi_expert, const DiscretePolicy& pi_agent);

BoundReport check_theorem2(const TabularMDP& mdp_true, const TabularMDP& mdp_model, const DiscretePolicy& pi_d);

/// aux carries the three exact reward gaps of the policy/model/policy chain
/// ("term1".."term3") and their individual bounds ("term1_rhs".."term3_rhs").
BoundReport check_mbrl_stochastic(const TabularMDP& mdp_true, const TabularMDP& mdp_model,
                                  const DiscretePolicy& pi_d, const DiscretePolicy& pi);

/// Occupancy of (init, pi, model) at discount beta. Requires 0 < beta < model gamma.
OccupancyMeasure branched_occupancy(const TabularMDP& mdp_model, const DiscretePolicy& pi, double beta,
                                    const Distribution& init);

BoundReport check_lemma5(const TabularMDP& mdp_true, const DiscretePolicy& pi_d, double gamma, double beta);

BoundReport check_cor3_branched(const TabularMDP& mdp_true, const TabularMDP& mdp_model,
                                const DiscretePolicy& pi_d, const DiscretePolicy& pi, double beta);

/// `model_profile` is the Lipschitz profile of the model MDP under pi_d.
BoundReport check_theorem3(const TabularMDP& mdp_true_det, const TabularMDP& mdp_model_det,
                           const DiscretePolicy& pi_d, const LipschitzProfile& model_profile);
BoundReport check_theorem3(const TabularMDP& mdp_true_det, const TabularMDP& mdp_model_det,
                           const DiscretePolicy& pi_d);

BoundReport check_cor4_branched_det(const TabularMDP& mdp_true_det, const TabularMDP& mdp_model_det,
                                    const DiscretePolicy& pi_d, const DiscretePolicy& pi, double beta,
                                    const LipschitzProfile& model_profile);
BoundReport check_cor4_branched_det(const TabularMDP& mdp_true_det, const TabularMDP& mdp_model_det,
                                    const DiscretePolicy& pi_d, const DiscretePolicy& pi, double beta);

/// One-sided bound at iota = 0. When the model's state constant exceeds 1 the
/// report is vacuous and rhs holds the iota-free part only. aux["rhs_derived"]
/// keeps the moment factor sqrt((1+g)(1+4g+g^2)) and replaces diam_A by the
/// action count.
BoundReport check_theorem4(const TabularMDP& mdp_true_det, const TabularMDP& mdp_model_det,
                           const DiscretePolicy& pi_d, const LipschitzProfile& model_profile);
BoundReport check_theorem4(const TabularMDP& mdp_true_det, const TabularMDP& mdp_model_det,
                           const DiscretePolicy& pi_d);

BoundReport check_cor6_branched_weak(const TabularMDP& mdp_true_det, const TabularMDP& mdp_model_det,
                                     const DiscretePolicy& pi_d, const DiscretePolicy& pi, double beta,
                                     const LipschitzProfile& model_profile);
BoundReport check_cor6_branched_weak(const TabularMDP& mdp_true_det, const TabularMDP& mdp_model_det,
                                     const DiscretePolicy& pi_d, const DiscretePolicy& pi, double beta);

/// Signed R(pi, T) - R(pi, T_hat) against the policy, one-sided model and
/// policy chain. Reconstructed; carries a note saying so.
BoundReport check_cor5_weak(const TabularMDP& mdp_true_det, const TabularMDP& mdp_model_det,
                            const DiscretePolicy& pi_d, const DiscretePolicy& pi,
                            const LipschitzProfile& model_profile);

}  // namespace bcl
