#include "bcl/report_io.hpp"

#include <cmath>

#include "bcl/format.hpp"

namespace bcl {

namespace {

nlohmann::json number(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

nlohmann::json number_map(const std::map<std::string, double>& m) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [k, v] : m) out[k] = number(v);
  return out;
}

std::string lookup(const std::map<std::string, double>& m, const char* key) {
  const auto it = m.find(key);
  return it == m.end() ? std::string() : format_real(it->second);
}

}  // namespace

nlohmann::json report_to_json(const BoundReport& r) {
  nlohmann::json j;
  j["bound_id"] = r.bound_id;
  j["lhs"] = number(r.lhs);
  j["rhs"] = number(r.rhs);
  j["rhs_infinite"] = std::isinf(r.rhs);
  j["holds"] = r.holds;
  j["tightness"] = r.tightness_defined ? number(r.tightness) : nlohmann::json(nullptr);
  j["vacuous"] = r.vacuous;
  j["status"] = to_string(r.status);
  j["inputs"] = number_map(r.inputs);
  j["aux"] = number_map(r.aux);
  j["notes"] = r.notes;
  return j;
}

std::string report_csv_header() { return "bound_id,seed,gamma,beta,lhs,rhs,tightness,vacuous"; }

std::string report_csv_row(const BoundReport& r, std::uint64_t seed) {
  std::string row = r.bound_id;
  row += ',' + std::to_string(seed);
  row += ',' + lookup(r.inputs, "gamma");
  row += ',' + lookup(r.inputs, "beta");
  row += ',' + format_real(r.lhs);
  row += ',' + format_real(r.rhs);
  row += ',' + (r.tightness_defined ? format_real(r.tightness) : std::string("nan"));
  row += r.vacuous ? ",1" : ",0";
  return row;
}

}  // namespace bcl
