#include "hbatk/report.hpp"

#include <chrono>
#include <ctime>

namespace hbatk {

using nlohmann::json;

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json to_json(const FitReport& r) {
  json params = json::array();
  for (const auto& p : r.params) params.push_back({{"name", p.name}, {"value", p.value}, {"sigma", p.sigma}});
  json diag = json::object();
  for (const auto& [k, v] : r.diagnostics) diag[k] = v;
  return {{"model", r.model},
          {"params", params},
          {"residual_rms", r.residual_rms},
          {"dof", r.dof},
          {"converged", r.converged},
          {"excluded_points", r.excluded_points},
          {"diagnostics", diag},
          {"notes", r.notes}};
}

json to_json(const ValueWithSigma& v) { return {{"value", v.value}, {"sigma", v.sigma}}; }

json to_json(const MechanismVerdict& v) {
  return {{"verdict", std::string(to_string(v.verdict))},
          {"pump_slope", to_json(v.pump_slope)},
          {"attenuation_slope", to_json(v.attenuation_slope)},
          {"threshold", v.threshold},
          {"rule_trace", v.rule_trace}};
}

json make_report(std::string_view command, const json& config_echo, const json& results, const Provenance& p) {
  json prov = {{"toolkit_version", std::string(kToolkitVersion)},
               {"command_line", p.command_line},
               {"seed", p.seed ? json(*p.seed) : json()},
               {"generator", p.generator ? json(*p.generator) : json()},
               {"started_utc", p.started_utc},
               {"finished_utc", p.finished_utc}};
  return {{"schema_version", std::string(kReportSchemaVersion)},
          {"command", std::string(command)},
          {"config_echo", config_echo},
          {"results", results},
          {"provenance", prov}};
}

std::vector<std::string> validate_report(const json& r) {
  std::vector<std::string> errs;
  if (!r.is_object()) return {"report is not an object"};
  static const char* top[] = {"schema_version", "command", "config_echo", "results", "provenance"};
  for (const char* k : top) {
    if (!r.contains(k)) errs.push_back(std::string("missing key '") + k + "'");
  }
  for (const auto& [k, _] : r.items()) {
    bool known = false;
    for (const char* t : top) known = known || k == t;
    if (!known) errs.push_back("unexpected key '" + k + "'");
  }
  if (!errs.empty()) return errs;
  if (r["schema_version"] != std::string(kReportSchemaVersion)) errs.push_back("schema_version mismatch");
  if (!r["command"].is_string() || r["command"].get<std::string>().empty()) errs.push_back("command must be a string");
  if (!r["config_echo"].is_object() && !r["config_echo"].is_null()) errs.push_back("config_echo must be object or null");
  if (!r["results"].is_object()) errs.push_back("results must be an object");
  const auto& p = r["provenance"];
  if (!p.is_object()) {
    errs.push_back("provenance must be an object");
    return errs;
  }
  if (!p.contains("toolkit_version") || !p["toolkit_version"].is_string()) errs.push_back("provenance.toolkit_version");
  if (!p.contains("command_line") || !p["command_line"].is_array()) errs.push_back("provenance.command_line");
  if (!p.contains("seed") || !(p["seed"].is_null() || p["seed"].is_number_unsigned()))
    errs.push_back("provenance.seed must be null or a non-negative integer");
  if (!p.contains("generator") || !(p["generator"].is_null() || p["generator"].is_string()))
    errs.push_back("provenance.generator must be null or a string");
  for (const char* k : {"started_utc", "finished_utc"}) {
    if (!p.contains(k) || !p[k].is_string()) errs.push_back(std::string("provenance.") + k);
  }
  return errs;
}

std::string dump_report(const json& report) { return report.dump(2) + "\n"; }

}  // namespace hbatk
