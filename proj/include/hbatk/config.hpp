#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hbatk/signal_model.hpp"

namespace hbatk {

/// `run` section of a configuration file.
struct RunSection {
  std::optional<std::uint64_t> seed;
  double dwell_s = 100.0;
  std::optional<std::string> output_dir;
  std::optional<Mechanism> mechanism;
  std::optional<SweepKind> sweep;
  std::vector<double> powers_w;
};

/// A fully resolved configuration: spectra loaded, defaults applied, and a
/// JSON echo that reproduces the same run when fed back in.
struct RunConfig {
  ExperimentConfig experiment;
  std::optional<ExcitationSource> source;
  double background_cps = 4.0;
  E2paParams e2pa;
  RunSection run;
  std::string nu_max_mode;  // "auto" or "given"
  nlohmann::json echo;
};

/// Parses a configuration document. Relative spectrum paths resolve against
/// `base_dir`. Unknown keys, missing files and invalid values raise ConfigError.
RunConfig parse_run_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);

RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace hbatk
