#include "mapek/simnet/device.hpp"

namespace mapek::simnet {

std::uint64_t device_stream_seed(std::uint64_t run_seed, const DeviceSpec& spec) {
    return run_seed ^ (0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(spec.id) + 1)) ^ spec.seed;
}

Device::Device(DeviceSpec spec, std::uint64_t run_seed)
    : spec_(std::move(spec)), active_(spec_.actuators.size(), false), rng_(device_stream_seed(run_seed, spec_)) {
    for (const auto& p : spec_.properties) values_.push_back(p.initial);
}

void Device::advance() {
    for (std::size_t i = 0; i < spec_.properties.size(); ++i) {
        const auto& p = spec_.properties[i];
        double delta = p.drift;
        for (std::size_t a = 0; a < spec_.actuators.size(); ++a) {
            if (active_[a] && spec_.actuators[a].property == p.name) delta += spec_.actuators[a].effect;
        }
        const double u = rng_.uniform();
        values_[i] += delta + p.noise * u;
    }
}

std::optional<double> Device::value(const std::string& property) const {
    for (std::size_t i = 0; i < spec_.properties.size(); ++i) {
        if (spec_.properties[i].name == property) return values_[i];
    }
    return std::nullopt;
}

std::optional<std::string> Device::apply(const policy::Action& action) {
    const auto prefix = spec_.name + ".";
    if (action.target.rfind(prefix, 0) != 0) return "unknown-target";
    const auto member = action.target.substr(prefix.size());
    switch (action.command) {
        case policy::Command::set_actuator:
            for (std::size_t a = 0; a < spec_.actuators.size(); ++a) {
                if (spec_.actuators[a].name == member) {
                    active_[a] = action.value != 0.0;
                    return std::nullopt;
                }
            }
            return "unknown-target";
        case policy::Command::set_property:
        case policy::Command::adjust_property:
            for (std::size_t i = 0; i < spec_.properties.size(); ++i) {
                if (spec_.properties[i].name == member) {
                    if (action.command == policy::Command::set_property) values_[i] = action.value;
                    else values_[i] += action.value;
                    return std::nullopt;
                }
            }
            return "unknown-target";
        case policy::Command::set_reporting_interval: return "unsupported-command";
    }
    return "unsupported-command";
}

}  // namespace mapek::simnet
