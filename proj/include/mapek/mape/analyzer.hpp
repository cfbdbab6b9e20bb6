#pragma once

#include <deque>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mapek/mape/knowledge.hpp"
#include "mapek/mape/types.hpp"
#include "mapek/policy/rules.hpp"

namespace mapek::mape {

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
};

/// Ordinary least squares over (tick, value); throws insufficient-samples for
/// fewer than two points and invalid-samples for non-increasing ticks.
LinearFit fit_line(std::span<const Sample> samples);

/// Tick at which the fitted line reaches the limit, when the trend moves
/// toward it and the crossing t* satisfies now < t* <= now + horizon.
/// Returns ceil(t*).
std::optional<Tick> predict_crossing(std::span<const Sample> samples, const policy::Threshold& th,
                                     Tick horizon, Tick now);

/// Observer of the knowledge base. Keeps its own replica of state and event
/// history built from StateEvents, and emits adaptation requests.
class Analyzer {
public:
    Analyzer(std::vector<PredictionSpec> predictions, std::vector<LocalThreshold> thresholds);

    /// Reactive symptoms in repository order, then proactive predictions.
    std::vector<AdaptationRequest> on_state(const StateEvent& event,
                                            const policy::SymptomRepository& repository, Tick now);

    const policy::SystemState& state() const { return state_; }
    const policy::EventHistory& history() const { return history_; }

private:
    bool cooling_down(const std::string& name, Tick cooldown, Tick now) const;
    AdaptationRequest make_request(std::string symptom, RequestMode mode, Tick now);

    std::vector<PredictionSpec> predictions_;
    std::vector<LocalThreshold> thresholds_;
    policy::SystemState state_;
    policy::EventHistory history_;
    std::map<std::string, std::deque<Sample>> samples_;
    std::map<std::string, Tick> last_fired_;
    std::uint64_t next_request_ = 1;
};

}  // namespace mapek::mape
