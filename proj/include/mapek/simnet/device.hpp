#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mapek/device_spec.hpp"
#include "mapek/policy/rules.hpp"

namespace mapek::simnet {

/// splitmix64; `uniform()` maps the top 53 bits onto [-1, 1).
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t state) : state_(state) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    double uniform() { return 2.0 * (static_cast<double>(next() >> 11) * 0x1.0p-53) - 1.0; }

private:
    std::uint64_t state_;
};

std::uint64_t device_stream_seed(std::uint64_t run_seed, const DeviceSpec& spec);

/// Simulated physical device: property values plus actuator on/off states.
class Device {
public:
    Device(DeviceSpec spec, std::uint64_t run_seed);

    /// v += drift + sum of active effects + noise * u; one draw per property,
    /// in property order, whatever the noise amplitude.
    void advance();

    /// Applies a command addressed to this device. Returns the failure code
    /// (unknown-target, unsupported-command) for a negative ack.
    std::optional<std::string> apply(const policy::Action& action);

    const DeviceSpec& spec() const { return spec_; }
    double value(std::size_t property) const { return values_[property]; }
    std::optional<double> value(const std::string& property) const;
    bool actuator_active(std::size_t actuator) const { return active_[actuator]; }

private:
    DeviceSpec spec_;
    std::vector<double> values_;
    std::vector<bool> active_;
    SplitMix64 rng_;
};

}  // namespace mapek::simnet
