#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mapek/policy/expression.hpp"

namespace mapek::policy {

enum class Command { set_property, adjust_property, set_actuator, set_reporting_interval };

std::string_view to_string(Command command);
std::optional<Command> parse_command(std::string_view text);

struct Action {
    std::string effector;
    Command command = Command::set_property;
    std::string target;
    double value = 0.0;

    friend bool operator==(const Action&, const Action&) = default;
};

/// One plan step: a single action, or several dispatched together.
using PlanStep = std::vector<Action>;

struct Symptom {
    std::string name;
    Expression trigger;
    Tick window = 1;
    Tick cooldown = 0;

    friend bool operator==(const Symptom&, const Symptom&) = default;
};

struct EcaRule {
    std::string id;
    std::int64_t priority = 0;
    std::string event;
    std::optional<Expression> condition;
    std::vector<PlanStep> plan_template;

    friend bool operator==(const EcaRule&, const EcaRule&) = default;
};

/// Symptoms in insertion order; names are unique.
class SymptomRepository {
public:
    void add(Symptom symptom);                    // duplicate-symptom
    void update(Symptom symptom);                 // unknown-symptom
    void remove(std::string_view name);           // unknown-symptom
    const Symptom* find(std::string_view name) const;
    const std::vector<Symptom>& symptoms() const { return symptoms_; }

private:
    std::vector<Symptom> symptoms_;
};

/// ECA rules in insertion order; ids are unique.
class PolicySet {
public:
    void add(EcaRule rule);              // duplicate-rule
    void remove(std::string_view id);    // unknown-rule
    const EcaRule* find(std::string_view id) const;
    const std::vector<EcaRule>& rules() const { return rules_; }

private:
    std::vector<EcaRule> rules_;
};

/// Highest-priority rule whose event matches and whose condition holds;
/// equal priorities resolve to the bytewise-smallest id.
const EcaRule* select_rule(std::span<const EcaRule> rules, std::string_view event,
                           const StateView& view, Tick now);

}  // namespace mapek::policy
