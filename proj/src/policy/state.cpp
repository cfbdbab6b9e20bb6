#include "mapek/policy/state.hpp"

#include <algorithm>

namespace mapek::policy {

std::optional<double> SystemState::value(std::string_view path) const {
    const std::string key(path);
    if (auto it = system.find(key); it != system.end()) return it->second;
    if (auto it = environment.find(key); it != environment.end()) return it->second;
    return std::nullopt;
}

const EventRecord& EventHistory::append(Tick tick, std::string name) {
    if (!records_.empty() && tick < records_.back().tick) {
        throw Error("history-out-of-order", "event '" + name + "' at tick " + std::to_string(tick) +
                                                " precedes tick " +
                                                std::to_string(records_.back().tick));
    }
    const std::uint64_t seq = records_.empty() ? 0 : records_.back().seq + 1;
    by_name_[name].push_back(tick);
    records_.push_back(EventRecord{tick, seq, std::move(name)});
    return records_.back();
}

std::size_t EventHistory::count(std::string_view name, Tick window, Tick now) const {
    auto it = by_name_.find(std::string(name));
    if (it == by_name_.end()) return 0;
    const auto& ticks = it->second;
    const auto hi = std::upper_bound(ticks.begin(), ticks.end(), now);
    const auto lo = window > now ? ticks.begin() : std::upper_bound(ticks.begin(), hi, now - window);
    return static_cast<std::size_t>(hi - lo);
}

std::size_t window_frequency(const StateView& view, std::string_view event, Tick window, Tick now) {
    if (window < 1) throw Error("invalid-window", "window must be at least 1 tick");
    return view.history.count(event, window, now);
}

}  // namespace mapek::policy
