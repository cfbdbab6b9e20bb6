#include "mapek/mape/knowledge.hpp"

#include <algorithm>

namespace mapek::mape {

Knowledge::Knowledge(policy::SystemState initial, std::vector<std::string> environment_properties)
    : state_(std::move(initial)), environment_properties_(std::move(environment_properties)) {}

bool Knowledge::is_environment(const std::string& path) const {
    return std::find(environment_properties_.begin(), environment_properties_.end(), path) !=
           environment_properties_.end();
}

StateEvent Knowledge::append(const StateReport& report, Tick now) {
    if (report.window_start != last_window_end_ || report.window_end <= report.window_start) {
        throw Error("out-of-order-report",
                    "report window (" + std::to_string(report.window_start) + ", " +
                        std::to_string(report.window_end) + "] does not continue from " +
                        std::to_string(last_window_end_));
    }
    last_window_end_ = report.window_end;
    StateEvent event;
    event.window_end = report.window_end;
    for (const auto& [path, agg] : report.properties) {
        const auto value = agg.count > 0 ? agg.representative() : std::nullopt;
        if (!value) continue;
        (is_environment(path) ? state_.environment : state_.system)[path] = *value;
        event.samples.emplace_back(path, Sample{report.window_end, *value});
    }
    for (const auto& alert : report.alerts) {
        alerts_.push_back(LoggedAlert{now, alert});
        event.new_events.push_back(history_.append(now, alert.threshold));
    }
    state_.tick = now;
    event.tick = now;
    event.state = state_;
    return event;
}

void Knowledge::apply_commanded(const std::vector<policy::Action>& actions, Tick now) {
    for (const auto& a : actions) {
        auto& bucket = is_environment(a.target) ? state_.environment : state_.system;
        switch (a.command) {
            case policy::Command::set_property:
            case policy::Command::set_actuator: bucket[a.target] = a.value; break;
            case policy::Command::adjust_property:
                if (auto it = bucket.find(a.target); it != bucket.end()) it->second += a.value;
                break;
            case policy::Command::set_reporting_interval: break;
        }
    }
    state_.tick = now;
}

}  // namespace mapek::mape
