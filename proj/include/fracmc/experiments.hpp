#pragma once

#include <string>
#include <vector>

#include "fracmc/config.hpp"
#include "fracmc/errors.hpp"

namespace fracmc {

struct RunResult {
    std::string stem;
    std::vector<std::string> files;
};

// Validates the config, runs the experiment and writes its artifacts into
// cfg.output_dir as <stem>.csv / <stem>.json (plus kind-specific extras).
// Errors propagate as fracmc::Error.
RunResult run_experiment(const ExperimentConfig& cfg);

// Process exit status for an error: 3 for numerical failures, 2 otherwise.
int exit_status(const Error& e);

// Machine-readable failure record; written next to the would-be outputs.
nlohmann::ordered_json failure_record(const std::string& kind, const Error& e);

}  // namespace fracmc
