#pragma once

#include <string>

#include <json.hpp>

#include "bcl/mbrl.hpp"

namespace bcl {

/// One row per iteration; report columns are <bound_id>_lhs, _rhs, _status.
std::string mbrl_trace_csv(const MbrlTrace& trace);
nlohmann::json mbrl_trace_json(const MbrlTrace& trace, const MbrlConfig& config);

/// Reads iterations, rollouts_per_iter, truncation_q, smoothing_alpha, kappa,
/// beta, seed and exact_model on top of `base`. Unknown keys raise ArgumentError.
MbrlConfig mbrl_config_from_json(const nlohmann::json& doc, MbrlConfig base = {});

}  // namespace bcl
