// Experiment orchestration shared by the command line tool and the
// acceptance suite: run a configured scenario, emit CSV/JSON artifacts
// and append the run manifest.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "illiq/scenario.hpp"

namespace illiq {

struct RunOptions {
    std::string out_dir;
    unsigned threads = 1;
    double ci_level = 0.95;
    // CLI overrides; 0 / absent means "use the config value".
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::size_t n_paths = 0;
};

ScenarioSpec apply_overrides(ScenarioSpec spec, const RunOptions& opt);

nlohmann::json spec_to_json(const ScenarioSpec& spec);

// simulate: per-path dump of the density leg under both measures.
std::vector<std::string> run_simulate(const ScenarioSpec& spec, const RunOptions& opt);

// premium: PremiumSurface CSV plus JSON summary with the market-kind cell.
std::vector<std::string> run_premium(const ScenarioSpec& spec, const std::vector<double>& t_list,
                                     const std::vector<double>& T_list, const RunOptions& opt);

// arbitrage: hedge run CSV plus JSON cluster summary.
std::vector<std::string> run_arbitrage(const ScenarioSpec& spec, Measure measure,
                                       const RunOptions& opt);

struct OracleOutcome {
    bool ok = false;
    std::string report;
};
OracleOutcome run_oracle(const std::string& tree_path);

}  // namespace illiq
