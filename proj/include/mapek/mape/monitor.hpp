#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mapek/mape/types.hpp"

namespace mapek::mape {

/// Per-sensor memory for event-triggered (deadband) sampling.
struct SensorMemory {
    std::optional<double> last_emitted;
};

/// Decides whether a sensor emits at `now`.
///  periodic:  now % interval == 0
///  event:     first sample, or |value - last emitted| >= deadband
///  on-demand: only when demanded
std::optional<SensorReading> sensor_sample(const SenseSpec& spec, SensorMemory& memory,
                                           std::string_view entity, double value, Tick now,
                                           bool demanded);

/// Gateway-side monitor: buffers readings per reporting window, runs the
/// local thresholds (alert-only) and flushes aggregated StateReports.
class Monitor {
public:
    Monitor(std::string id, MonitorConfig config);

    /// Buffers the reading; returns alerts for thresholds entering `violated`.
    /// Throws Error{"unknown-property"} for unconfigured properties.
    std::vector<Alert> ingest(const SensorReading& reading);

    bool flush_due(Tick now) const { return now >= window_start_ + config_.reporting_interval; }
    Tick window_start() const { return window_start_; }

    /// Aggregates the window (window_start, window_end] and clears the buffer.
    StateReport flush(Tick window_end);

    /// Throws Error{"invalid-interval"} for 0.
    void set_reporting_interval(Tick interval);

    const MonitorConfig& config() const { return config_; }
    policy::ThresholdState threshold_state(std::string_view id) const;

private:
    std::string id_;
    MonitorConfig config_;
    Tick window_start_ = 0;
    std::map<std::string, std::vector<double>> buffer_;
    std::map<std::string, policy::ThresholdState> states_;
    std::vector<Alert> pending_alerts_;
};

/// Aggregates a window of values for the requested functions. Count is always
/// reported; the other aggregates are omitted for an empty window.
Aggregates aggregate(const std::vector<double>& values, const AggregateSet& functions);

}  // namespace mapek::mape
