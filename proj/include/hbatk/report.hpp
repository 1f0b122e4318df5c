#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hbatk/inference.hpp"

namespace hbatk {

inline constexpr std::string_view kReportSchemaVersion = "hbatk.report/1";
inline constexpr std::string_view kToolkitVersion = "0.1.0";

struct Provenance {
  std::vector<std::string> command_line;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> generator;
  std::string started_utc;
  std::string finished_utc;
};

/// ISO-8601 UTC timestamp with second resolution.
std::string utc_timestamp();

nlohmann::json to_json(const FitReport& r);
nlohmann::json to_json(const ValueWithSigma& v);
nlohmann::json to_json(const MechanismVerdict& v);

nlohmann::json make_report(std::string_view command, const nlohmann::json& config_echo, const nlohmann::json& results,
                           const Provenance& provenance);

/// Schema violations, empty when the document conforms.
std::vector<std::string> validate_report(const nlohmann::json& report);

/// Serialises with full double precision.
std::string dump_report(const nlohmann::json& report);

}  // namespace hbatk
