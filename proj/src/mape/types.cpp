#include "mapek/mape/types.hpp"

#include <sstream>

namespace mapek::mape {

std::string_view to_string(SenseMode mode) {
    switch (mode) {
        case SenseMode::periodic: return "periodic";
        case SenseMode::event: return "event";
        case SenseMode::on_demand: return "on-demand";
    }
    return "?";
}

std::optional<SenseMode> parse_sense_mode(std::string_view text) {
    for (auto m : {SenseMode::periodic, SenseMode::event, SenseMode::on_demand}) {
        if (to_string(m) == text) return m;
    }
    return std::nullopt;
}

std::string to_string(const AggregateSet& set) {
    std::string out;
    auto put = [&](bool on, const char* name) {
        if (!on) return;
        if (!out.empty()) out += ' ';
        out += name;
    };
    put(set.mean, "mean");
    put(set.min, "min");
    put(set.max, "max");
    put(set.last, "last");
    put(set.count, "count");
    return out;
}

std::optional<AggregateSet> parse_aggregates(std::string_view text) {
    AggregateSet set{false, false, false, false, false};
    std::istringstream in{std::string(text)};
    std::string word;
    while (in >> word) {
        if (word == "mean") set.mean = true;
        else if (word == "min") set.min = true;
        else if (word == "max") set.max = true;
        else if (word == "last") set.last = true;
        else if (word == "count") set.count = true;
        else return std::nullopt;
    }
    return set;
}

const SenseSpec* MonitorConfig::find_sense(std::string_view property) const {
    for (const auto& s : senses) {
        if (s.property == property) return &s;
    }
    return nullptr;
}

const LocalThreshold* MonitorConfig::find_threshold(std::string_view id) const {
    for (const auto& t : thresholds) {
        if (t.id == id) return &t;
    }
    return nullptr;
}

std::optional<double> Aggregates::representative() const {
    if (last) return last;
    if (mean) return mean;
    if (max) return max;
    return min;
}

std::string_view to_string(RequestMode mode) {
    return mode == RequestMode::reactive ? "reactive" : "proactive";
}

}  // namespace mapek::mape
