#include "bcl/mdp_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "bcl/errors.hpp"

namespace bcl {

using nlohmann::json;

namespace {

json points_to_json(const PointSet& points) {
  json rows = json::array();
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto p = points[i];
    rows.push_back(std::vector<double>(p.begin(), p.end()));
  }
  return rows;
}

template <typename T>
T required(const json& doc, const char* key) {
  if (!doc.contains(key)) throw ArgumentError(std::string("instance file is missing field '") + key + "'");
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ArgumentError(std::string("field '") + key + "': " + e.what());
  }
}

}  // namespace

std::string mdp_to_json(const TabularMDP& mdp) {
  json doc;
  doc["version"] = kMdpFormatVersion;
  doc["n_states"] = mdp.n_states();
  doc["n_actions"] = mdp.n_actions();
  doc["gamma"] = mdp.gamma();
  doc["r_max"] = mdp.r_max();
  doc["state_embed"] = points_to_json(mdp.state_embed());
  doc["action_embed"] = points_to_json(mdp.action_embed());
  doc["reward"] = mdp.rewards();
  doc["kernel"] = mdp.kernel().probs();
  doc["init_dist"] = mdp.init_dist().vector();
  return doc.dump() + "\n";
}

TabularMDP mdp_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ArgumentError(std::string("malformed instance file: ") + e.what());
  }
  const auto version = required<std::string>(doc, "version");
  if (version != kMdpFormatVersion) throw ArgumentError("unsupported instance version '" + version + "'");

  const auto n = required<std::size_t>(doc, "n_states");
  const auto m = required<std::size_t>(doc, "n_actions");
  auto states = PointSet::from_rows(required<std::vector<std::vector<double>>>(doc, "state_embed"));
  auto actions = PointSet::from_rows(required<std::vector<std::vector<double>>>(doc, "action_embed"));
  if (states.size() != n || actions.size() != m) throw ArgumentError("embedding counts disagree with n_states/n_actions");

  std::optional<Distribution> init;
  if (doc.contains("init_dist")) init = Distribution(required<std::vector<double>>(doc, "init_dist"));

  return TabularMDP(std::move(states), std::move(actions),
                    TransitionKernel(n, m, required<std::vector<double>>(doc, "kernel")),
                    required<std::vector<double>>(doc, "reward"), required<double>(doc, "r_max"),
                    required<double>(doc, "gamma"), std::move(init));
}

void save_mdp(const TabularMDP& mdp, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArgumentError("cannot open " + path.string() + " for writing");
  out << mdp_to_json(mdp);
}

TabularMDP load_mdp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return mdp_from_json(buf.str());
}

}  // namespace bcl
