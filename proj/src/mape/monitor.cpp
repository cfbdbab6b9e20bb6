#include "mapek/mape/monitor.hpp"

#include <algorithm>
#include <cmath>

namespace mapek::mape {

std::optional<SensorReading> sensor_sample(const SenseSpec& spec, SensorMemory& memory,
                                           std::string_view entity, double value, Tick now,
                                           bool demanded) {
    bool emit = false;
    switch (spec.mode) {
        case SenseMode::periodic: emit = spec.interval > 0 && now % spec.interval == 0; break;
        case SenseMode::event:
            emit = !memory.last_emitted || std::fabs(value - *memory.last_emitted) >= spec.deadband;
            break;
        case SenseMode::on_demand: emit = demanded; break;
    }
    if (!emit) return std::nullopt;
    memory.last_emitted = value;
    return SensorReading{std::string(entity), spec.property, value, now, spec.mode};
}

Aggregates aggregate(const std::vector<double>& values, const AggregateSet& functions) {
    Aggregates out;
    out.count = values.size();
    if (values.empty()) return out;
    if (functions.mean) {
        double sum = 0.0;
        for (double v : values) sum += v;
        out.mean = sum / static_cast<double>(values.size());
    }
    if (functions.min) out.min = *std::min_element(values.begin(), values.end());
    if (functions.max) out.max = *std::max_element(values.begin(), values.end());
    if (functions.last) out.last = values.back();
    return out;
}

Monitor::Monitor(std::string id, MonitorConfig config) : id_(std::move(id)), config_(std::move(config)) {
    for (const auto& t : config_.thresholds) states_[t.id] = policy::ThresholdState::normal;
}

std::vector<Alert> Monitor::ingest(const SensorReading& reading) {
    if (config_.find_sense(reading.property) == nullptr) {
        throw Error("unknown-property", "monitor has no sensor for '" + reading.property + "'",
                    reading.property);
    }
    buffer_[reading.property].push_back(reading.value);
    std::vector<Alert> raised;
    for (const auto& t : config_.thresholds) {
        if (t.threshold.property != reading.property) continue;
        auto& state = states_[t.id];
        const auto next = policy::threshold_step(t.threshold, reading.value, state);
        if (state == policy::ThresholdState::normal && next == policy::ThresholdState::violated) {
            raised.push_back(Alert{t.id, reading.property, reading.value, reading.tick});
        }
        state = next;
    }
    pending_alerts_.insert(pending_alerts_.end(), raised.begin(), raised.end());
    return raised;
}

StateReport Monitor::flush(Tick window_end) {
    StateReport report;
    report.reporter = id_;
    report.window_start = window_start_;
    report.window_end = window_end;
    for (const auto& sense : config_.senses) {
        auto it = buffer_.find(sense.property);
        static const std::vector<double> empty;
        report.properties.emplace_back(sense.property,
                                       aggregate(it == buffer_.end() ? empty : it->second, sense.aggregates));
    }
    report.alerts = std::move(pending_alerts_);
    pending_alerts_.clear();
    buffer_.clear();
    window_start_ = window_end;
    return report;
}

void Monitor::set_reporting_interval(Tick interval) {
    if (interval < 1) throw Error("invalid-interval", "reporting interval must be at least 1 tick");
    config_.reporting_interval = interval;
}

policy::ThresholdState Monitor::threshold_state(std::string_view id) const {
    auto it = states_.find(std::string(id));
    return it == states_.end() ? policy::ThresholdState::normal : it->second;
}

}  // namespace mapek::mape
