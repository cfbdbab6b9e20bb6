#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mapek/error.hpp"

namespace mapek::policy {

/// Runtime state: system property values plus environment property values.
struct SystemState {
    Tick tick = 0;
    std::map<std::string, double> system;
    std::map<std::string, double> environment;

    std::optional<double> value(std::string_view path) const;

    friend bool operator==(const SystemState&, const SystemState&) = default;
};

struct EventRecord {
    Tick tick = 0;
    std::uint64_t seq = 0;
    std::string name;

    friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

/// Append-only event log ordered by (tick, seq), indexed per event name.
class EventHistory {
public:
    /// Throws Error{"history-out-of-order"} when `tick` precedes the last entry.
    const EventRecord& append(Tick tick, std::string name);

    /// Events named `name` with tick in (now - window, now].
    std::size_t count(std::string_view name, Tick window, Tick now) const;

    const std::vector<EventRecord>& records() const { return records_; }

private:
    std::vector<EventRecord> records_;
    std::unordered_map<std::string, std::vector<Tick>> by_name_;
};

struct StateView {
    const SystemState& state;
    const EventHistory& history;
};

/// Count of `event` occurrences with tick in (now - window, now]; window >= 1.
std::size_t window_frequency(const StateView& view, std::string_view event, Tick window, Tick now);

}  // namespace mapek::policy
