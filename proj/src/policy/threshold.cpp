#include "mapek/policy/threshold.hpp"

namespace mapek::policy {

std::string_view to_string(ThresholdOp op) { return op == ThresholdOp::above ? ">" : "<"; }

ThresholdState threshold_step(const Threshold& th, double value, ThresholdState prior) {
    if (th.op == ThresholdOp::above) {
        if (prior == ThresholdState::normal) {
            return value > th.limit ? ThresholdState::violated : ThresholdState::normal;
        }
        return value < th.limit - th.hysteresis ? ThresholdState::normal : ThresholdState::violated;
    }
    if (prior == ThresholdState::normal) {
        return value < th.limit ? ThresholdState::violated : ThresholdState::normal;
    }
    return value > th.limit + th.hysteresis ? ThresholdState::normal : ThresholdState::violated;
}

}  // namespace mapek::policy
