#pragma once

#include <optional>
#include <string>

#include "agdesign/power.hpp"
#include "agdesign/scenario.hpp"

namespace agdesign {

// Optional run-stage parameters; each subcommand validates what it needs.
struct RunConfig {
  std::optional<double> target_power;
  std::optional<long> n_total;
  std::optional<long> replicates;
  std::optional<std::uint64_t> seed;
};

struct ParsedConfig {
  TrialScenario scenario;
  Hypothesis hypothesis;
  RunConfig run;
};

// Parse the JSON scenario configuration. Validation is strict: unknown fields
// are errors, and every error names the offending field path. Throws
// DomainError.
ParsedConfig parse_config(const std::string& json_text);

// Canonical JSON text of a parsed configuration (keys sorted, all defaults
// resolved). parse_config(resolved_config_text(cfg)) reproduces cfg.
std::string resolved_config_text(const ParsedConfig& cfg);

}  // namespace agdesign
