#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace wiplab {

// Executes the experiment named in the config file.  Returns 0 when every
// acceptance check passed, 1 when a check failed, 2 on configuration or
// runtime errors (diagnostics on stderr).
int run_experiment_file(const std::string& config_path,
                        std::optional<std::uint64_t> seed_override,
                        std::optional<std::string> out_override, int threads);

// Names, parameters, and the property each experiment verifies.
std::string experiment_catalog();

}  // namespace wiplab
