#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "psit/finance.hpp"

namespace psit {

// Raised for malformed or out-of-range configuration; the CLI maps it to
// exit code 2. Messages carry the dotted key path of the offending entry.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class RunMode { verify, simulate, finance };

struct RunConfig {
    RunMode mode = RunMode::verify;
    std::vector<double> multipliers = {0.5, 0.8, 1.0, 1.2, 2.0};
    std::string outputs = "out";
};

struct ScenarioConfig {
    MarketInputs market;
    RunConfig run;
};

// Strict parse: unknown keys are rejected (with a nearest-key suggestion),
// every numeric constraint is checked here rather than deep in the engine.
// Required blocks: grid, market. Optional: rng, run.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::string& path);

}  // namespace psit
