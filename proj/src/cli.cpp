#include "bcl/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string_view>

#include <CLI11.hpp>
#include <json.hpp>

#include "bcl/bellman_flow.hpp"
#include "bcl/bounds.hpp"
#include "bcl/dynamics.hpp"
#include "bcl/errors.hpp"
#include "bcl/format.hpp"
#include "bcl/mbrl.hpp"
#include "bcl/mbrl_io.hpp"
#include "bcl/mdp.hpp"
#include "bcl/mdp_io.hpp"
#include "bcl/parallel.hpp"
#include "bcl/report_io.hpp"

namespace bcl::cli {
namespace {

using nlohmann::json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

double parse_real(std::string_view text, const std::string& what) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
    throw UsageError("invalid number '" + std::string(text) + "' in " + what);
  }
  return value;
}

std::vector<double> parse_real_list(std::string_view text, const std::string& what) {
  std::vector<double> out;
  if (trim(text).empty()) return out;
  while (true) {
    const auto comma = text.find(',');
    out.push_back(parse_real(text.substr(0, comma), what));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

/// "lo:hi:count", endpoints included.
std::vector<double> parse_range(std::string_view text) {
  const auto c1 = text.find(':');
  const auto c2 = c1 == std::string_view::npos ? c1 : text.find(':', c1 + 1);
  if (c2 == std::string_view::npos) throw UsageError("range must look like lo:hi:count");
  const double lo = parse_real(text.substr(0, c1), "--range");
  const double hi = parse_real(text.substr(c1 + 1, c2 - c1 - 1), "--range");
  const double count = parse_real(text.substr(c2 + 1), "--range");
  if (count < 0 || count != std::floor(count)) throw UsageError("range count must be a nonnegative integer");
  const auto n = static_cast<std::size_t>(count);
  std::vector<double> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  return out;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw std::runtime_error("cannot open " + path + " for writing");
  file << text;
  if (!file) throw std::runtime_error("write failed: " + path);
}

std::string real_or_empty(double x) { return std::isnan(x) ? std::string() : format_real(x); }

bool deterministic_only(const std::string& id) {
  return id == "thm3" || id == "cor4_branched_det" || id == "thm4" || id == "cor6_branched_weak" ||
         id == "cor5_weak";
}

std::string valid_ids_text() {
  std::string s;
  for (const auto& id : bound_ids()) s += (s.empty() ? "" : ", ") + id;
  return s;
}

void require_known_id(const std::string& id) {
  for (const auto& known : bound_ids()) {
    if (known == id) return;
  }
  throw UsageError("unknown bound id '" + id + "'; valid ids: " + valid_ids_text() + ", all");
}

// ---------------------------------------------------------------- instances

struct InstanceFlags {
  std::string mdp_path;
  std::string model_path;
  double perturb = 0.1;
  double model_perturb = 0.1;
  std::uint64_t seed = 42;
  std::optional<double> gamma;
  double beta = 0.5;
  std::string policy = "random";
  double slope = 0.5;
};

void add_instance_flags(CLI::App* cmd, InstanceFlags& f) {
  cmd->add_option("--mdp", f.mdp_path, "True MDP (bcl-mdp-v1)");
  cmd->add_option("--model", f.model_path, "Model MDP; default is a seeded perturbation of --mdp");
  cmd->add_option("--perturb", f.perturb, "Policy perturbation magnitude")->capture_default_str();
  cmd->add_option("--model-perturb", f.model_perturb,
                  "Kernel mixing weight, or redirect fraction for deterministic MDPs")
      ->capture_default_str();
  cmd->add_option("--seed", f.seed, "Base seed")->capture_default_str();
  cmd->add_option("--gamma", f.gamma, "Override the discount of the loaded MDP");
  cmd->add_option("--beta", f.beta, "Branched discount")->capture_default_str();
  cmd->add_option("--policy", f.policy, "Data policy: random, uniform or softmax")
      ->check(CLI::IsMember({"random", "uniform", "softmax"}))
      ->capture_default_str();
  cmd->add_option("--slope", f.slope, "Slope of the softmax data policy")->capture_default_str();
}

struct Instance {
  TabularMDP mdp;
  std::optional<TabularMDP> model_file;
};

Instance load_instance(const InstanceFlags& f) {
  if (f.mdp_path.empty()) throw UsageError("--mdp is required");
  Instance inst{load_mdp(f.mdp_path), std::nullopt};
  if (f.gamma) inst.mdp = inst.mdp.with_gamma(*f.gamma);
  if (!f.model_path.empty()) {
    TabularMDP model = load_mdp(f.model_path);
    if (f.gamma) model = model.with_gamma(*f.gamma);
    inst.model_file = model_mdp(inst.mdp, model);
  }
  return inst;
}

struct Trial {
  TabularMDP mdp;
  TabularMDP model;
  DiscretePolicy pi_d;
  DiscretePolicy pi;
};

Trial make_trial(const TabularMDP& mdp, const std::optional<TabularMDP>& model_file, const InstanceFlags& f,
                 std::uint64_t seed) {
  Trial t{mdp, mdp, {}, {}};
  if (f.policy == "uniform") {
    t.pi_d = DiscretePolicy::uniform(mdp.n_states(), mdp.n_actions());
  } else if (f.policy == "softmax") {
    t.pi_d = velocity_softmax_policy(mdp, f.slope);
  } else {
    t.pi_d = random_policy(mdp.n_states(), mdp.n_actions(), derive_seed(seed, 1));
  }
  t.pi = perturb_policy(t.pi_d, f.perturb, derive_seed(seed, 2));
  if (model_file) {
    t.model = *model_file;
  } else if (mdp.deterministic()) {
    t.model = mdp.with_kernel(perturb_deterministic(mdp, f.model_perturb, derive_seed(seed, 3)));
  } else {
    t.model = mdp.with_kernel(perturb_kernel(mdp, f.model_perturb, derive_seed(seed, 3)));
  }
  return t;
}

bool applicable(const std::string& id, const Trial& t) {
  return !deterministic_only(id) || (t.mdp.deterministic() && t.model.deterministic());
}

BoundReport run_check(const std::string& id, const Trial& t, double beta,
                      std::optional<LipschitzProfile>& profile) {
  if (deterministic_only(id) && !profile) profile = estimate_lipschitz(t.model, t.pi_d);
  if (id == "lemma2") return check_lemma2(occupancy(t.pi_d, t.mdp), occupancy(t.pi, t.mdp), t.mdp);
  if (id == "thm1") return check_theorem1(t.mdp, t.pi_d, t.pi);
  if (id == "cor_bc") return check_bc_bound(t.mdp, t.pi_d, t.pi);
  if (id == "cor_gail") return check_gail_bound(t.mdp, t.pi_d, t.pi);
  if (id == "thm2") return check_theorem2(t.mdp, t.model, t.pi_d);
  if (id == "cor_mbrl_stoch") return check_mbrl_stochastic(t.mdp, t.model, t.pi_d, t.pi);
  if (id == "lemma5") return check_lemma5(t.mdp, t.pi_d, t.mdp.gamma(), beta);
  if (id == "cor3_branched") return check_cor3_branched(t.mdp, t.model, t.pi_d, t.pi, beta);
  if (id == "thm3") return check_theorem3(t.mdp, t.model, t.pi_d, *profile);
  if (id == "cor4_branched_det") return check_cor4_branched_det(t.mdp, t.model, t.pi_d, t.pi, beta, *profile);
  if (id == "thm4") return check_theorem4(t.mdp, t.model, t.pi_d, *profile);
  if (id == "cor6_branched_weak") return check_cor6_branched_weak(t.mdp, t.model, t.pi_d, t.pi, beta, *profile);
  if (id == "cor5_weak") return check_cor5_weak(t.mdp, t.model, t.pi_d, t.pi, *profile);
  throw UsageError("unknown bound id '" + id + "'");
}

// ---------------------------------------------------------------- gen

struct GenFlags {
  bool random = false;
  bool double_integrator = false;
  std::size_t states = 0;
  std::string actions;
  double stoch = 1.0;
  std::uint64_t seed = 42;
  double gamma = 0.9;
  std::size_t embed_dim = 2;
  double delta = 0.0;
  std::string grid;
  double r_max = 1.0;
  std::string out;
};

int cmd_gen(const GenFlags& f, std::ostream& out) {
  if (f.random == f.double_integrator) throw UsageError("choose exactly one of --random or --double-integrator");
  TabularMDP mdp;
  if (f.random) {
    if (f.states == 0 || f.actions.empty()) throw UsageError("--random needs --states and --actions");
    const double m = parse_real(f.actions, "--actions");
    if (m < 1 || m != std::floor(m)) throw UsageError("--actions must be a positive integer with --random");
    mdp = make_random_mdp(f.states, static_cast<std::size_t>(m), f.seed, f.stoch, f.gamma, f.embed_dim);
  } else {
    if (f.grid.empty() || f.actions.empty() || f.delta == 0.0) {
      throw UsageError("--double-integrator needs --delta, --grid and --actions");
    }
    const GridSpec grid = GridSpec::parse(f.grid);
    DoubleIntegratorOptions opts;
    opts.r_max = f.r_max;
    opts.gamma = f.gamma;
    mdp = build_double_integrator(f.delta, grid, parse_real_list(f.actions, "--actions"), opts);
  }
  save_mdp(mdp, f.out);
  out << "wrote " << f.out << ": " << mdp.n_states() << " states, " << mdp.n_actions() << " actions, "
      << (mdp.deterministic() ? "deterministic" : "stochastic") << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- check

struct CheckFlags {
  std::string bound_id;
  InstanceFlags inst;
  std::size_t trials = 1;
  std::string out;
  std::string format = "csv";
};

int cmd_check(const CheckFlags& f, std::ostream& out, std::ostream& err) {
  const bool all = f.bound_id == "all";
  if (!all) require_known_id(f.bound_id);
  if (f.trials == 0) throw UsageError("--trials must be positive");
  const Instance inst = load_instance(f.inst);

  std::vector<std::string> ids;
  if (all) {
    ids = bound_ids();
  } else {
    ids.push_back(f.bound_id);
  }

  const auto per_trial = parallel_map(f.trials, [&](std::size_t t) {
    const std::uint64_t seed = f.inst.seed + t;
    const Trial trial = make_trial(inst.mdp, inst.model_file, f.inst, seed);
    std::vector<BoundReport> reports;
    std::optional<LipschitzProfile> profile;
    for (const auto& id : ids) {
      if (!applicable(id, trial)) {
        if (!all) throw UsageError(id + " needs deterministic true and model MDPs");
        continue;
      }
      reports.push_back(run_check(id, trial, f.inst.beta, profile));
    }
    return reports;
  });

  std::size_t total = 0, failed = 0, vacuous = 0;
  std::string text;
  json doc = json::array();
  if (f.format == "csv") text = report_csv_header() + '\n';
  for (std::size_t t = 0; t < per_trial.size(); ++t) {
    const std::uint64_t seed = f.inst.seed + t;
    for (const auto& r : per_trial[t]) {
      ++total;
      failed += r.failed() ? 1 : 0;
      vacuous += r.vacuous ? 1 : 0;
      if (f.format == "csv") {
        text += report_csv_row(r, seed) + '\n';
      } else {
        json j = report_to_json(r);
        j["seed"] = seed;
        doc.push_back(std::move(j));
      }
    }
  }
  if (f.format == "json") text = doc.dump(2) + '\n';
  emit(text, f.out, out);
  err << total << " reports, " << failed << " failed, " << vacuous << " vacuous\n";
  return failed > 0 ? kExitCheckFailed : kExitOk;
}

// ---------------------------------------------------------------- sweep

struct SweepFlags {
  std::string axis;
  std::string values;
  std::string range;
  std::string target;
  InstanceFlags inst;
  std::string out;
  AlignedGrid aligned;
  std::size_t iters = 1;
  double kappa = 0.2;
  std::size_t q = 1;
  double alpha = 1e-3;
};

struct SweepRow {
  std::string bound_id;
  std::optional<BoundReport> report;
  std::string metric;
  double metric_value = std::nan("");
};

std::string sweep_header() { return "axis,value,bound_id,lhs,rhs,tightness,vacuous,metric,metric_value"; }

std::string sweep_line(const std::string& axis, double value, const SweepRow& row) {
  std::string s = axis + ',' + format_real(value) + ',' + row.bound_id + ',';
  if (row.report) {
    const BoundReport& r = *row.report;
    s += format_real(r.lhs) + ',' + format_real(r.rhs) + ',' +
         (r.tightness_defined ? format_real(r.tightness) : std::string()) + ',' + (r.vacuous ? "1" : "0");
  } else {
    s += ",,,";
  }
  s += ',' + row.metric + ',' + real_or_empty(row.metric_value);
  return s;
}

SweepRow metric_row(std::string id, std::string metric, double value) {
  return SweepRow{std::move(id), std::nullopt, std::move(metric), value};
}

std::vector<SweepRow> sweep_bound_point(const std::string& target, const TabularMDP& mdp,
                                        const std::optional<TabularMDP>& model_file, const InstanceFlags& inst,
                                        double beta) {
  const Trial trial = make_trial(mdp, model_file, inst, inst.seed);
  std::optional<LipschitzProfile> profile;
  std::vector<SweepRow> rows;
  if (target == "bc_gail") {
    const BoundReport bc = run_check("cor_bc", trial, beta, profile);
    const BoundReport gail = run_check("cor_gail", trial, beta, profile);
    const double ratio = gail.rhs > 0.0 ? bc.rhs / gail.rhs : std::nan("");
    rows.push_back({"cor_bc", bc, "", std::nan("")});
    rows.push_back({"cor_gail", gail, "", std::nan("")});
    rows.push_back(metric_row("bc_gail", "rhs_ratio", ratio));
    return rows;
  }
  if (!applicable(target, trial)) throw UsageError(target + " needs deterministic true and model MDPs");
  rows.push_back({target, run_check(target, trial, beta, profile), "", std::nan("")});
  return rows;
}

int cmd_sweep(const SweepFlags& f, std::ostream& out) {
  std::vector<double> values;
  if (!f.values.empty() && !f.range.empty()) throw UsageError("give either --values or --range");
  if (!f.range.empty()) {
    values = parse_range(f.range);
  } else {
    values = parse_real_list(f.values, "--values");
  }
  if (values.empty()) throw UsageError("empty sweep range");

  std::function<std::vector<SweepRow>(double)> point;
  std::optional<Instance> inst;
  if (f.axis == "gamma" || f.axis == "beta") {
    const std::string target = f.target.empty() ? (f.axis == "beta" ? "cor3_branched" : "bc_gail") : f.target;
    if (target != "bc_gail") require_known_id(target);
    inst = load_instance(f.inst);
    point = [&, target](double v) {
      if (f.axis == "beta") return sweep_bound_point(target, inst->mdp, inst->model_file, f.inst, v);
      const TabularMDP mdp = inst->mdp.with_gamma(v);
      std::optional<TabularMDP> model;
      if (inst->model_file) model = inst->model_file->with_gamma(v);
      return sweep_bound_point(target, mdp, model, f.inst, f.inst.beta);
    };
  } else if (f.axis == "delta") {
    if (!f.target.empty() && f.target != "eta") throw UsageError("the delta axis sweeps the eta profile only");
    point = [&](double delta) {
      DoubleIntegratorOptions opts;
      opts.gamma = f.inst.gamma.value_or(0.9);
      const TabularMDP di = build_aligned_double_integrator(delta, f.aligned, opts);
      const LipschitzProfile p = estimate_lipschitz(di, velocity_softmax_policy(di, f.inst.slope));
      return std::vector<SweepRow>{metric_row("profile", "eta", p.eta),
                                   metric_row("profile", "gamma_eta", opts.gamma * p.eta),
                                   metric_row("profile", "L_T_s", p.L_T_s),
                                   metric_row("profile", "L_T_a", p.L_T_a),
                                   metric_row("profile", "L_pi_w1", p.L_pi_w1)};
    };
  } else if (f.axis == "data") {
    if (!f.target.empty() && f.target != "mbrl") throw UsageError("the data axis sweeps mbrl only");
    inst = load_instance(f.inst);
    point = [&](double rollouts) {
      if (rollouts < 1 || rollouts != std::floor(rollouts)) {
        throw UsageError("data axis values are rollout counts (positive integers)");
      }
      MbrlConfig cfg;
      cfg.iterations = f.iters;
      cfg.rollouts_per_iter = static_cast<std::size_t>(rollouts);
      cfg.kappa = f.kappa;
      cfg.truncation_q = f.q;
      cfg.smoothing_alpha = f.alpha;
      cfg.seed = f.inst.seed;
      cfg.validate(inst->mdp);
      const MbrlTrace trace = run_mbrl(inst->mdp, cfg);
      const MbrlIteration& last = trace.iterations.back();
      std::vector<SweepRow> rows;
      for (const auto& r : last.reports) rows.push_back({r.bound_id, r, "", std::nan("")});
      rows.push_back(metric_row("mbrl", "eps_model", last.eps_model));
      rows.push_back(metric_row("mbrl", "eps_policy", last.eps_policy));
      rows.push_back(metric_row("mbrl", "dataset_size", static_cast<double>(last.dataset_size)));
      return rows;
    };
  } else {
    throw UsageError("--axis must be gamma, beta, delta or data");
  }

  const auto results = parallel_map(values.size(), [&](std::size_t i) { return point(values[i]); });
  std::string text = sweep_header() + '\n';
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (const auto& row : results[i]) text += sweep_line(f.axis, values[i], row) + '\n';
  }
  emit(text, f.out, out);
  return kExitOk;
}

// ---------------------------------------------------------------- mbrl

struct MbrlFlags {
  std::string mdp_path;
  std::string config_path;
  std::size_t iters = 0;
  std::size_t rollouts = 0;
  double kappa = 0.0;
  std::size_t q = 0;
  double alpha = 0.0;
  double beta = 0.0;
  std::uint64_t seed = 0;
  bool exact_model = false;
  std::string out;
  std::string json_out;
};

int cmd_mbrl(const MbrlFlags& f, const CLI::App& cmd, std::ostream& out) {
  if (f.mdp_path.empty()) throw UsageError("--mdp is required");
  const TabularMDP mdp = load_mdp(f.mdp_path);
  MbrlConfig cfg;
  if (!f.config_path.empty()) {
    std::ifstream in(f.config_path, std::ios::binary);
    if (!in) throw UsageError("cannot read config " + f.config_path);
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::exception& e) {
      throw UsageError("config " + f.config_path + ": " + e.what());
    }
    cfg = mbrl_config_from_json(doc, cfg);
  }
  const auto given = [&](const char* name) { return cmd.count(name) > 0; };
  if (given("--iters")) cfg.iterations = f.iters;
  if (given("--rollouts")) cfg.rollouts_per_iter = f.rollouts;
  if (given("--kappa")) cfg.kappa = f.kappa;
  if (given("--q")) cfg.truncation_q = f.q;
  if (given("--alpha")) cfg.smoothing_alpha = f.alpha;
  if (given("--beta")) cfg.beta = f.beta;
  if (given("--seed")) cfg.seed = f.seed;
  if (f.exact_model) cfg.exact_model = true;
  cfg.validate(mdp);

  const MbrlTrace trace = run_mbrl(mdp, cfg);
  emit(mbrl_trace_csv(trace), f.out, out);
  if (!f.json_out.empty()) emit(mbrl_trace_json(trace, cfg).dump(2) + '\n', f.json_out, out);
  for (const auto& it : trace.iterations) {
    for (const auto& r : it.reports) {
      if (r.failed()) return kExitCheckFailed;
    }
  }
  return kExitOk;
}

// ---------------------------------------------------------------- info

struct InfoFlags {
  std::string mdp_path;
  std::string policy = "uniform";
  std::uint64_t seed = 42;
  double slope = 0.5;
  std::string out;
};

json real_json(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

int cmd_info(const InfoFlags& f, std::ostream& out) {
  const TabularMDP mdp = load_mdp(f.mdp_path);
  json doc;
  doc["n_states"] = mdp.n_states();
  doc["n_actions"] = mdp.n_actions();
  doc["gamma"] = mdp.gamma();
  doc["r_max"] = mdp.r_max();
  doc["deterministic"] = mdp.deterministic();
  doc["state_dim"] = mdp.state_embed().dim();
  doc["action_dim"] = mdp.action_embed().dim();
  const auto& r = mdp.rewards();
  doc["reward_min"] = r.empty() ? 0.0 : *std::min_element(r.begin(), r.end());
  doc["reward_max"] = r.empty() ? 0.0 : *std::max_element(r.begin(), r.end());
  doc["init_support"] = mdp.init_dist().support().size();
  doc["policy"] = f.policy;

  DiscretePolicy pi;
  if (f.policy == "uniform") {
    pi = DiscretePolicy::uniform(mdp.n_states(), mdp.n_actions());
  } else if (f.policy == "softmax") {
    pi = velocity_softmax_policy(mdp, f.slope);
  } else {
    pi = random_policy(mdp.n_states(), mdp.n_actions(), derive_seed(f.seed, 1));
  }
  doc["reward_true"] = real_json(cumulative_reward(occupancy(pi, mdp), mdp));

  if (mdp.deterministic()) {
    const LipschitzProfile p = estimate_lipschitz(mdp, pi);
    json prof;
    prof["L_T_s"] = real_json(p.L_T_s);
    prof["L_T_a"] = real_json(p.L_T_a);
    prof["L_pi_w1"] = real_json(p.L_pi_w1);
    prof["L_pi_dens"] = real_json(p.L_pi_dens);
    prof["L_r"] = real_json(p.L_r);
    prof["L_r_s"] = real_json(p.L_r_s);
    prof["eta"] = real_json(p.eta);
    prof["gamma_eta"] = real_json(mdp.gamma() * p.eta);
    prof["diam_A"] = real_json(p.diam_A);
    prof["dim_A"] = p.dim_A;
    doc["lipschitz"] = prof;
  } else {
    doc["lipschitz"] = nullptr;
  }
  emit(doc.dump(2) + '\n', f.out, out);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Occupancy-measure bound checks for tabular MDPs and model-based RL", "bcl"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Expand all help");

  GenFlags gen;
  CLI::App* gen_cmd = app.add_subcommand("gen", "Generate an MDP instance");
  gen_cmd->add_flag("--random", gen.random, "Random tabular MDP");
  gen_cmd->add_flag("--double-integrator", gen.double_integrator, "Gridded double integrator");
  gen_cmd->add_option("--states", gen.states, "Number of states (random)");
  gen_cmd->add_option("--actions", gen.actions, "Action count (random) or comma-separated action values");
  gen_cmd->add_option("--stoch", gen.stoch, "Kernel stochasticity in [0, 1]")->capture_default_str();
  gen_cmd->add_option("--seed", gen.seed, "Seed")->capture_default_str();
  gen_cmd->add_option("--gamma", gen.gamma, "Discount")->capture_default_str();
  gen_cmd->add_option("--embed-dim", gen.embed_dim, "Embedding dimension (random)")->capture_default_str();
  gen_cmd->add_option("--delta", gen.delta, "Time step (double integrator)");
  gen_cmd->add_option("--grid", gen.grid, "x0:x1:nx,v0:v1:nv");
  gen_cmd->add_option("--r-max", gen.r_max, "Reward scale")->capture_default_str();
  gen_cmd->add_option("--out", gen.out, "Output file")->required();

  CheckFlags check;
  CLI::App* check_cmd = app.add_subcommand("check", "Check one bound (or all) over seeded trials");
  check_cmd->add_option("bound_id", check.bound_id, "Bound id or 'all'")->required();
  add_instance_flags(check_cmd, check.inst);
  check_cmd->add_option("--trials", check.trials, "Number of trials")->capture_default_str();
  check_cmd->add_option("--out", check.out, "Output file (default stdout)");
  check_cmd->add_option("--format", check.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();

  SweepFlags sweep;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Tabulate a bound or profile along one axis");
  sweep_cmd->add_option("--axis", sweep.axis, "gamma, beta, delta or data")->required();
  sweep_cmd->add_option("--values", sweep.values, "Comma-separated axis values");
  sweep_cmd->add_option("--range", sweep.range, "lo:hi:count, endpoints included");
  sweep_cmd->add_option("--target", sweep.target, "Bound id, bc_gail, eta or mbrl");
  add_instance_flags(sweep_cmd, sweep.inst);
  sweep_cmd->add_option("--out", sweep.out, "Output CSV (default stdout)");
  sweep_cmd->add_option("--h-v", sweep.aligned.h_v, "Velocity step of the aligned grid")->capture_default_str();
  sweep_cmd->add_option("--v-half", sweep.aligned.v_half, "Velocity half-width in steps")->capture_default_str();
  sweep_cmd->add_option("--x-half", sweep.aligned.x_half, "Position half-width in steps")->capture_default_str();
  sweep_cmd->add_option("--iters", sweep.iters, "MBRL iterations per point (data axis)")->capture_default_str();
  sweep_cmd->add_option("--kappa", sweep.kappa, "Policy step (data axis)")->capture_default_str();
  sweep_cmd->add_option("--q", sweep.q, "Dataset truncation (data axis)")->capture_default_str();
  sweep_cmd->add_option("--alpha", sweep.alpha, "Model smoothing (data axis)")->capture_default_str();

  MbrlFlags mbrl;
  CLI::App* mbrl_cmd = app.add_subcommand("mbrl", "Run the model-based RL loop and write its trace");
  mbrl_cmd->add_option("--mdp", mbrl.mdp_path, "True MDP")->required();
  mbrl_cmd->add_option("--config", mbrl.config_path, "JSON config; flags override it");
  mbrl_cmd->add_option("--iters", mbrl.iters, "Iterations");
  mbrl_cmd->add_option("--rollouts", mbrl.rollouts, "Rollouts per iteration");
  mbrl_cmd->add_option("--kappa", mbrl.kappa, "Per-state TV step of the policy update");
  mbrl_cmd->add_option("--q", mbrl.q, "Keep the datasets of the last q iterations");
  mbrl_cmd->add_option("--alpha", mbrl.alpha, "Dirichlet smoothing");
  mbrl_cmd->add_option("--beta", mbrl.beta, "Branched discount");
  mbrl_cmd->add_option("--seed", mbrl.seed, "Seed");
  mbrl_cmd->add_flag("--exact-model", mbrl.exact_model, "Use the true kernel as the model");
  mbrl_cmd->add_option("--out", mbrl.out, "Trace CSV (default stdout)");
  mbrl_cmd->add_option("--json", mbrl.json_out, "Trace JSON");

  InfoFlags info;
  CLI::App* info_cmd = app.add_subcommand("info", "Instance statistics and Lipschitz profile");
  info_cmd->add_option("--mdp", info.mdp_path, "MDP file")->required();
  info_cmd->add_option("--policy", info.policy, "random, uniform or softmax")
      ->check(CLI::IsMember({"random", "uniform", "softmax"}))
      ->capture_default_str();
  info_cmd->add_option("--seed", info.seed, "Seed of the random policy")->capture_default_str();
  info_cmd->add_option("--slope", info.slope, "Slope of the softmax policy")->capture_default_str();
  info_cmd->add_option("--out", info.out, "Output file (default stdout)");

  std::vector<std::string> argv_store = args.empty() ? std::vector<std::string>{"bcl"} : args;
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (*gen_cmd) return cmd_gen(gen, out);
    if (*check_cmd) return cmd_check(check, out, err);
    if (*sweep_cmd) return cmd_sweep(sweep, out);
    if (*mbrl_cmd) return cmd_mbrl(mbrl, *mbrl_cmd, out);
    if (*info_cmd) return cmd_info(info, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitCheckFailed;
  }
  return kExitUsage;
}

}  // namespace bcl::cli
