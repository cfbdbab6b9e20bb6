#pragma once

#include <cstdint>
#include <string>

#include "mapek/simnet/scenario.hpp"

namespace mapek::simnet {

struct RunOptions {
    Tick ticks = 0;
    std::uint64_t seed = 0;
};

struct RunSummary {
    Tick ticks = 0;
    std::uint64_t records = 0;
    std::uint64_t adaptations = 0;  // plan records
    std::uint64_t alerts = 0;       // gateway alert records
};

/// `ticks=<n> records=<n> adaptations=<n> alerts=<n>`
std::string format_summary(const RunSummary& summary);

struct RunResult {
    std::string log;  // LF-terminated JSON lines
    RunSummary summary;
};

/// Runs ticks 1..N of the scenario; tick 0 is the initial state. The log is a
/// pure function of (scenario, ticks, seed). Throws invalid-scenario when
/// validation reports errors.
RunResult run_scenario(const Scenario& scenario, const RunOptions& options);

}  // namespace mapek::simnet
