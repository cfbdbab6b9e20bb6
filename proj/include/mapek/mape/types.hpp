#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mapek/error.hpp"
#include "mapek/policy/rules.hpp"
#include "mapek/policy/threshold.hpp"

namespace mapek::mape {

enum class SenseMode { periodic, event, on_demand };

std::string_view to_string(SenseMode mode);
std::optional<SenseMode> parse_sense_mode(std::string_view text);

struct AggregateSet {
    bool mean = true;
    bool min = true;
    bool max = true;
    bool last = true;
    bool count = true;

    friend bool operator==(const AggregateSet&, const AggregateSet&) = default;
};

/// Space-separated subset of "mean min max last count", canonical order.
std::string to_string(const AggregateSet& set);
std::optional<AggregateSet> parse_aggregates(std::string_view text);

struct SenseSpec {
    std::string property;
    SenseMode mode = SenseMode::periodic;
    Tick interval = 1;
    double deadband = 0.0;
    AggregateSet aggregates;

    friend bool operator==(const SenseSpec&, const SenseSpec&) = default;
};

struct LocalThreshold {
    std::string id;
    policy::Threshold threshold;

    friend bool operator==(const LocalThreshold&, const LocalThreshold&) = default;
};

struct MonitorConfig {
    Tick reporting_interval = 5;
    std::vector<SenseSpec> senses;
    std::vector<LocalThreshold> thresholds;

    const SenseSpec* find_sense(std::string_view property) const;
    const LocalThreshold* find_threshold(std::string_view id) const;

    friend bool operator==(const MonitorConfig&, const MonitorConfig&) = default;
};

/// Proactive analysis: fit the last `samples` state values of the threshold's
/// property and raise a request when the crossing falls within `horizon`.
struct PredictionSpec {
    std::string name;
    std::string threshold;
    std::size_t samples = 5;
    Tick horizon = 20;
    Tick cooldown = 20;

    friend bool operator==(const PredictionSpec&, const PredictionSpec&) = default;
};

struct SensorReading {
    std::string entity;
    std::string property;  // full path, e.g. "room.temp"
    double value = 0.0;
    Tick tick = 0;
    SenseMode mode = SenseMode::periodic;

    friend bool operator==(const SensorReading&, const SensorReading&) = default;
};

struct Alert {
    std::string threshold;
    std::string property;
    double value = 0.0;
    Tick tick = 0;

    friend bool operator==(const Alert&, const Alert&) = default;
};

struct Aggregates {
    std::uint64_t count = 0;
    std::optional<double> mean;
    std::optional<double> min;
    std::optional<double> max;
    std::optional<double> last;

    /// Representative value for the knowledge state: last, else mean, max, min.
    std::optional<double> representative() const;

    friend bool operator==(const Aggregates&, const Aggregates&) = default;
};

/// Monitor output for the window (window_start, window_end].
struct StateReport {
    std::string reporter;
    Tick window_start = 0;
    Tick window_end = 0;
    std::vector<std::pair<std::string, Aggregates>> properties;
    std::vector<Alert> alerts;
};

struct Sample {
    Tick tick = 0;
    double value = 0.0;
};

enum class RequestMode { reactive, proactive };

std::string_view to_string(RequestMode mode);

struct AdaptationRequest {
    std::string id;
    std::string symptom;
    std::string event;
    std::uint64_t frequency = 0;
    Tick window = 0;
    RequestMode mode = RequestMode::reactive;
    Tick issued = 0;
    std::optional<Tick> predicted;
};

struct ChangePlan {
    std::string id;
    std::string request;
    std::string rule;
    std::vector<policy::PlanStep> steps;
};

}  // namespace mapek::mape
