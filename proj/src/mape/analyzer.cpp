#include "mapek/mape/analyzer.hpp"

#include <algorithm>
#include <cmath>

namespace mapek::mape {

LinearFit fit_line(std::span<const Sample> samples) {
    if (samples.size() < 2) throw Error("insufficient-samples", "need at least two samples to fit a trend");
    for (std::size_t i = 1; i < samples.size(); ++i) {
        if (samples[i].tick <= samples[i - 1].tick) {
            throw Error("invalid-samples", "sample ticks must be strictly increasing");
        }
    }
    const double n = static_cast<double>(samples.size());
    double mean_t = 0.0;
    double mean_v = 0.0;
    for (const auto& s : samples) {
        mean_t += static_cast<double>(s.tick);
        mean_v += s.value;
    }
    mean_t /= n;
    mean_v /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (const auto& s : samples) {
        const double dt = static_cast<double>(s.tick) - mean_t;
        sxx += dt * dt;
        sxy += dt * (s.value - mean_v);
    }
    const double slope = sxy / sxx;
    return LinearFit{slope, mean_v - slope * mean_t};
}

std::optional<Tick> predict_crossing(std::span<const Sample> samples, const policy::Threshold& th,
                                     Tick horizon, Tick now) {
    const auto fit = fit_line(samples);
    const bool toward = th.op == policy::ThresholdOp::above ? fit.slope > 0.0 : fit.slope < 0.0;
    if (!toward) return std::nullopt;
    const double crossing = (th.limit - fit.intercept) / fit.slope;
    const double lo = static_cast<double>(now);
    const double hi = static_cast<double>(now + horizon);
    if (!(crossing > lo && crossing <= hi)) return std::nullopt;
    return static_cast<Tick>(std::ceil(crossing));
}

Analyzer::Analyzer(std::vector<PredictionSpec> predictions, std::vector<LocalThreshold> thresholds)
    : predictions_(std::move(predictions)), thresholds_(std::move(thresholds)) {}

bool Analyzer::cooling_down(const std::string& name, Tick cooldown, Tick now) const {
    auto it = last_fired_.find(name);
    return it != last_fired_.end() && now - it->second <= cooldown;
}

AdaptationRequest Analyzer::make_request(std::string symptom, RequestMode mode, Tick now) {
    AdaptationRequest r;
    r.id = "req-" + std::to_string(next_request_++);
    r.symptom = std::move(symptom);
    r.mode = mode;
    r.issued = now;
    return r;
}

std::vector<AdaptationRequest> Analyzer::on_state(const StateEvent& event,
                                                  const policy::SymptomRepository& repository, Tick now) {
    state_ = event.state;
    // Replica entries are stamped with the arrival tick so remote delivery keeps order.
    for (const auto& e : event.new_events) history_.append(now, e.name);

    std::size_t keep = 2;
    for (const auto& p : predictions_) keep = std::max(keep, p.samples);
    for (const auto& [path, sample] : event.samples) {
        auto& q = samples_[path];
        q.push_back(sample);
        while (q.size() > keep) q.pop_front();
    }

    std::vector<AdaptationRequest> requests;
    const policy::StateView view{state_, history_};
    for (const auto& symptom : repository.symptoms()) {
        if (cooling_down(symptom.name, symptom.cooldown, now)) continue;
        if (!policy::eval_expression(symptom.trigger, view, now)) continue;
        last_fired_[symptom.name] = now;
        history_.append(now, symptom.name);
        auto request = make_request(symptom.name, RequestMode::reactive, now);
        request.window = symptom.window;
        const auto events = policy::referenced_events(symptom.trigger);
        std::size_t frequency = 0;
        if (!events.empty()) {
            request.event = events.front();
            frequency = policy::window_frequency(view, request.event, symptom.window, now);
        }
        if (frequency == 0) {
            request.event = symptom.name;
            frequency = policy::window_frequency(view, symptom.name, symptom.window, now);
        }
        request.frequency = frequency;
        requests.push_back(std::move(request));
    }

    for (const auto& spec : predictions_) {
        auto th = std::find_if(thresholds_.begin(), thresholds_.end(),
                               [&](const LocalThreshold& t) { return t.id == spec.threshold; });
        if (th == thresholds_.end()) continue;
        auto it = samples_.find(th->threshold.property);
        if (it == samples_.end() || it->second.size() < spec.samples) continue;
        if (cooling_down(spec.name, spec.cooldown, now)) continue;
        std::vector<Sample> window(it->second.end() - static_cast<std::ptrdiff_t>(spec.samples),
                                   it->second.end());
        const auto predicted = predict_crossing(window, th->threshold, spec.horizon, now);
        if (!predicted) continue;
        last_fired_[spec.name] = now;
        history_.append(now, spec.name);
        auto request = make_request(spec.name, RequestMode::proactive, now);
        request.event = spec.threshold;
        request.window = spec.horizon;
        request.frequency = policy::window_frequency(view, spec.threshold, spec.horizon, now);
        request.predicted = *predicted;
        requests.push_back(std::move(request));
    }
    return requests;
}

}  // namespace mapek::mape
