#include "mapek/policy/rules.hpp"

#include <algorithm>

namespace mapek::policy {

std::string_view to_string(Command command) {
    switch (command) {
        case Command::set_property: return "set_property";
        case Command::adjust_property: return "adjust_property";
        case Command::set_actuator: return "set_actuator";
        case Command::set_reporting_interval: return "set_reporting_interval";
    }
    return "?";
}

std::optional<Command> parse_command(std::string_view text) {
    for (auto c : {Command::set_property, Command::adjust_property, Command::set_actuator,
                   Command::set_reporting_interval}) {
        if (to_string(c) == text) return c;
    }
    return std::nullopt;
}

void SymptomRepository::add(Symptom symptom) {
    if (find(symptom.name) != nullptr) {
        throw Error("duplicate-symptom", "symptom '" + symptom.name + "' already defined");
    }
    symptoms_.push_back(std::move(symptom));
}

void SymptomRepository::update(Symptom symptom) {
    auto it = std::find_if(symptoms_.begin(), symptoms_.end(),
                           [&](const Symptom& s) { return s.name == symptom.name; });
    if (it == symptoms_.end()) {
        throw Error("unknown-symptom", "symptom '" + symptom.name + "' is not defined");
    }
    *it = std::move(symptom);
}

void SymptomRepository::remove(std::string_view name) {
    auto it = std::find_if(symptoms_.begin(), symptoms_.end(),
                           [&](const Symptom& s) { return s.name == name; });
    if (it == symptoms_.end()) {
        throw Error("unknown-symptom", "symptom '" + std::string(name) + "' is not defined");
    }
    symptoms_.erase(it);
}

const Symptom* SymptomRepository::find(std::string_view name) const {
    for (const auto& s : symptoms_) {
        if (s.name == name) return &s;
    }
    return nullptr;
}

void PolicySet::add(EcaRule rule) {
    if (find(rule.id) != nullptr) throw Error("duplicate-rule", "rule '" + rule.id + "' already defined");
    rules_.push_back(std::move(rule));
}

void PolicySet::remove(std::string_view id) {
    auto it = std::find_if(rules_.begin(), rules_.end(), [&](const EcaRule& r) { return r.id == id; });
    if (it == rules_.end()) throw Error("unknown-rule", "rule '" + std::string(id) + "' is not defined");
    rules_.erase(it);
}

const EcaRule* PolicySet::find(std::string_view id) const {
    for (const auto& r : rules_) {
        if (r.id == id) return &r;
    }
    return nullptr;
}

const EcaRule* select_rule(std::span<const EcaRule> rules, std::string_view event,
                           const StateView& view, Tick now) {
    const EcaRule* best = nullptr;
    for (const auto& rule : rules) {
        if (rule.event != event) continue;
        if (rule.condition && !eval_expression(*rule.condition, view, now)) continue;
        if (best == nullptr || rule.priority > best->priority ||
            (rule.priority == best->priority && rule.id < best->id)) {
            best = &rule;
        }
    }
    return best;
}

}  // namespace mapek::policy
