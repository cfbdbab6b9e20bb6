#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mapek/device_spec.hpp"
#include "mapek/diagnostic.hpp"
#include "mapek/mape/types.hpp"
#include "mapek/placement.hpp"
#include "mapek/policy/rules.hpp"
#include "mapek/xml.hpp"

namespace mapek::simnet {

/// Piecewise-constant timeline of (from_tick, value); first point at 0.
struct EnvironmentProperty {
    std::string name;
    std::vector<std::pair<Tick, double>> timeline;

    double value_at(Tick t) const;

    friend bool operator==(const EnvironmentProperty&, const EnvironmentProperty&) = default;
};

enum class ScriptKind { demand, add_symptom, update_symptom, remove_symptom, add_rule, remove_rule, inject_frame };

std::string_view to_string(ScriptKind kind);

struct ScriptItem {
    Tick tick = 0;
    ScriptKind kind = ScriptKind::demand;
    std::string name;  // demanded property, or the symptom name / rule id to remove
    std::optional<policy::Symptom> symptom;
    std::optional<policy::EcaRule> rule;
    std::vector<std::uint8_t> frame;

    friend bool operator==(const ScriptItem&, const ScriptItem&) = default;
};

struct Scenario {
    std::string name;
    std::vector<DeviceSpec> devices;
    std::vector<EnvironmentProperty> environment;
    mape::MonitorConfig monitor;
    std::vector<policy::Symptom> symptoms;
    std::vector<mape::PredictionSpec> predictions;
    std::vector<policy::EcaRule> rules;
    Placements placements = default_placements();
    std::vector<LinkSpec> links;
    std::vector<ScriptItem> script;

    const DeviceSpec* find_device(std::string_view name) const;
    const EnvironmentProperty* find_environment(std::string_view name) const;
    /// True for "device.property" paths and environment property names.
    bool has_property(std::string_view path) const;

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Throws the model parse errors (malformed-xml, wrong-stage-root, ...).
Scenario parse_scenario(std::string_view text);

/// Structural checks plus a dry run of the script's symptom and rule edits.
std::vector<Diagnostic> validate_scenario(const Scenario& scenario);

XmlElement to_xml(const Scenario& scenario);
std::string serialize_scenario(const Scenario& scenario);

/// Link latency between two nodes; nullopt when no link joins them.
std::optional<Tick> link_latency(const Scenario& scenario, Node a, Node b);

}  // namespace mapek::simnet
