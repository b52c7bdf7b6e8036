#pragma once

#include <optional>
#include <string>
#include <vector>

#include "msond/experiments.hpp"

namespace msond {

/// Builds a validated spec from `args`: the subcommand followed by flags.
/// Values from --config FILE (key = value, keys spelled like the long flags)
/// are overridden by flags on the command line. `env_seed` is the
/// MSOND_SEED fallback, used only when no seed is given otherwise.
/// Throws ConfigError naming the offending key.
ExperimentSpec parse_config(const std::vector<std::string>& args,
                            const std::optional<std::string>& env_seed = std::nullopt);

/// Normalized one-line-per-field echo of a resolved spec.
std::string describe(const ExperimentSpec& spec);

/// Usage text listing the subcommands and flags.
std::string usage();

}  // namespace msond
