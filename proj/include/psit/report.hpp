#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "psit/config.hpp"

namespace psit {

struct CheckResult {
    std::string name;
    bool passed = false;
    double measured = 0.0;   // headline quantity of the check
    double tolerance = 0.0;  // bound it is held against
    std::string detail;      // secondary measured values, human oriented
    long long paths_used = 0;
    double wall_seconds = 0.0;
    double budget_seconds = 0.0;  // 0: no runtime budget
};

struct RunReport {
    std::vector<CheckResult> checks;

    bool all_passed() const;
};

// Fixed verification battery. Sizes, grids and tolerances are pinned here;
// only the master seed comes from the config. filter keeps the checks whose
// name contains it (empty keeps all).
//
// Setting PSIT_FAULT_INJECT=ibp_sign flips a sign inside the
// exact_identities check; it exists so the failure path of the harness can
// be exercised end to end and has no effect on the library itself.
RunReport run_verify(const ScenarioConfig& cfg, const std::string& filter);

void write_verify_text(const RunReport& r, std::ostream& os);
void write_verify_json(const RunReport& r, const std::string& path);

// Finance mode: builds the market, sweeps the strategy multipliers with
// common random numbers, and writes utility_by_multiplier.csv,
// sample_path.csv and summary.json into out_dir.
void run_finance(const ScenarioConfig& cfg, const std::string& out_dir);

// Simulate mode: market build only; writes sample_path.csv (t, S, w, Z) and
// summary.json.
void run_simulate(const ScenarioConfig& cfg, const std::string& out_dir);

// Shortest round-trippable decimal form (17 significant digits).
std::string fmt17(double x);

}  // namespace psit
