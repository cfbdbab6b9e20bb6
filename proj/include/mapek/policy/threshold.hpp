#pragma once

#include <string>
#include <string_view>

namespace mapek::policy {

enum class ThresholdOp { above, below };  // '>' and '<'

std::string_view to_string(ThresholdOp op);

struct Threshold {
    std::string property;
    ThresholdOp op = ThresholdOp::above;
    double limit = 0.0;
    double hysteresis = 0.0;

    friend bool operator==(const Threshold&, const Threshold&) = default;
};

enum class ThresholdState { normal, violated };

/// Two-state machine. For '>': enter violated when value > limit, clear when
/// value < limit - hysteresis. Mirror image for '<'.
ThresholdState threshold_step(const Threshold& th, double value, ThresholdState prior);

}  // namespace mapek::policy
