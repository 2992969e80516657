#include "bcl/mbrl_io.hpp"

#include <cmath>
#include <set>

#include "bcl/errors.hpp"
#include "bcl/format.hpp"
#include "bcl/report_io.hpp"

namespace bcl {

namespace {

nlohmann::json number(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

}  // namespace

std::string mbrl_trace_csv(const MbrlTrace& trace) {
  std::string out =
      "iteration,dataset_size,reward_true,reward_model,prev_reward_true,prev_reward_model,true_change,"
      "improvement_model,reward_errors,identity_residual,eps_model,eps_policy,model_gain";
  if (!trace.iterations.empty()) {
    for (const auto& r : trace.iterations.front().reports) out += "," + r.bound_id + "_lhs," + r.bound_id + "_rhs," + r.bound_id + "_status";
  }
  out += '\n';
  for (const auto& it : trace.iterations) {
    out += std::to_string(it.iteration) + ',' + std::to_string(it.dataset_size);
    for (double x : {it.reward_true, it.reward_model, it.prev_reward_true, it.prev_reward_model, it.true_change,
                     it.improvement_model, it.reward_errors, it.identity_residual, it.eps_model, it.eps_policy,
                     it.model_gain}) {
      out += ',' + format_real(x);
    }
    for (const auto& r : it.reports) out += ',' + format_real(r.lhs) + ',' + format_real(r.rhs) + ',' + to_string(r.status);
    out += '\n';
  }
  return out;
}

nlohmann::json mbrl_trace_json(const MbrlTrace& trace, const MbrlConfig& cfg) {
  nlohmann::json j;
  j["config"] = {{"iterations", cfg.iterations},
                 {"rollouts_per_iter", cfg.rollouts_per_iter},
                 {"truncation_q", cfg.truncation_q},
                 {"smoothing_alpha", cfg.smoothing_alpha},
                 {"kappa", cfg.kappa},
                 {"beta", cfg.beta ? nlohmann::json(*cfg.beta) : nlohmann::json(nullptr)},
                 {"seed", cfg.seed},
                 {"exact_model", cfg.exact_model}};
  j["initial_reward_true"] = number(trace.initial_reward_true);
  j["horizon_cap"] = trace.horizon_cap;
  j["truncation_mass"] = number(trace.truncation_mass);
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& it : trace.iterations) {
    nlohmann::json row;
    row["iteration"] = it.iteration;
    row["dataset_size"] = it.dataset_size;
    row["reward_true"] = number(it.reward_true);
    row["reward_model"] = number(it.reward_model);
    row["prev_reward_true"] = number(it.prev_reward_true);
    row["prev_reward_model"] = number(it.prev_reward_model);
    row["true_change"] = number(it.true_change);
    row["improvement_model"] = number(it.improvement_model);
    row["reward_errors"] = number(it.reward_errors);
    row["identity_residual"] = number(it.identity_residual);
    row["eps_model"] = number(it.eps_model);
    row["eps_policy"] = number(it.eps_policy);
    row["model_gain"] = number(it.model_gain);
    nlohmann::json reports = nlohmann::json::array();
    for (const auto& r : it.reports) reports.push_back(report_to_json(r));
    row["reports"] = std::move(reports);
    rows.push_back(std::move(row));
  }
  j["iterations"] = std::move(rows);
  j["final_policy"] = trace.final_policy.probs();
  return j;
}

MbrlConfig mbrl_config_from_json(const nlohmann::json& doc, MbrlConfig cfg) {
  if (!doc.is_object()) throw ArgumentError("MBRL config must be a JSON object");
  static const std::set<std::string> known = {"iterations", "rollouts_per_iter", "truncation_q", "smoothing_alpha",
                                              "kappa", "beta", "seed", "exact_model"};
  for (const auto& [key, value] : doc.items()) {
    if (!known.count(key)) throw ArgumentError("unknown MBRL config key '" + key + "'");
  }
  try {
    if (doc.contains("iterations")) cfg.iterations = doc["iterations"].get<std::size_t>();
    if (doc.contains("rollouts_per_iter")) cfg.rollouts_per_iter = doc["rollouts_per_iter"].get<std::size_t>();
    if (doc.contains("truncation_q")) cfg.truncation_q = doc["truncation_q"].get<std::size_t>();
    if (doc.contains("smoothing_alpha")) cfg.smoothing_alpha = doc["smoothing_alpha"].get<double>();
    if (doc.contains("kappa")) cfg.kappa = doc["kappa"].get<double>();
    if (doc.contains("beta")) {
      if (doc["beta"].is_null()) {
        cfg.beta.reset();
      } else {
        cfg.beta = doc["beta"].get<double>();
      }
    }
    if (doc.contains("seed")) cfg.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("exact_model")) cfg.exact_model = doc["exact_model"].get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError(std::string("bad MBRL config: ") + e.what());
  }
  return cfg;
}

}  // namespace bcl
