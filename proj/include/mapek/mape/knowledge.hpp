#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mapek/mape/types.hpp"
#include "mapek/policy/state.hpp"

namespace mapek::mape {

/// Notification the knowledge base sends to its observers after each report.
struct StateEvent {
    Tick tick = 0;
    Tick window_end = 0;
    policy::SystemState state;
    std::vector<policy::EventRecord> new_events;
    std::vector<std::pair<std::string, Sample>> samples;  // properties measured in the window
};

struct LoggedAlert {
    Tick logged = 0;
    Alert alert;
};

class Knowledge {
public:
    /// `initial` holds the carried-forward values before the first report.
    explicit Knowledge(policy::SystemState initial,
                       std::vector<std::string> environment_properties = {});

    /// Merges a report (carry-forward for absent properties), logs its alerts
    /// as events named by threshold id, and returns the new-state event.
    /// Throws Error{"out-of-order-report"} unless the window is contiguous.
    StateEvent append(const StateReport& report, Tick now);

    /// Writes commanded values once a plan completes.
    void apply_commanded(const std::vector<policy::Action>& actions, Tick now);

    const policy::SystemState& state() const { return state_; }
    const policy::EventHistory& history() const { return history_; }
    const std::vector<LoggedAlert>& alerts() const { return alerts_; }
    Tick last_window_end() const { return last_window_end_; }

private:
    bool is_environment(const std::string& path) const;

    policy::SystemState state_;
    std::vector<std::string> environment_properties_;
    policy::EventHistory history_;
    std::vector<LoggedAlert> alerts_;
    Tick last_window_end_ = 0;
};

}  // namespace mapek::mape
