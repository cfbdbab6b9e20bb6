#include <algorithm>
#include <set>

#include "mapek/model/model.hpp"

namespace mapek::model {

namespace {

class Sink {
public:
    explicit Sink(std::vector<Diagnostic>& out) : out_(out) {}

    void error(std::string code, std::string path, std::string message) {
        out_.push_back({Severity::error, std::move(code), std::move(path), std::move(message)});
    }
    void warning(std::string code, std::string path, std::string message) {
        out_.push_back({Severity::warning, std::move(code), std::move(path), std::move(message)});
    }

private:
    std::vector<Diagnostic>& out_;
};

std::string item(const std::string& parent, std::string_view name, std::size_t index) {
    return child_path(parent, name, index + 1);
}

void validate_pim(const PimModel& pim, const std::string& base, Sink& sink) {
    std::set<std::string, std::less<>> ids;
    auto claim = [&](const std::string& id, const std::string& path) {
        if (id.empty()) {
            sink.error("missing-required-field", path + "/@id", "id must not be empty");
        } else if (!ids.insert(id).second) {
            sink.error("duplicate-id", path + "/@id", "id '" + id + "' is already defined");
        }
    };

    for (std::size_t i = 0; i < pim.tasks.size(); ++i) {
        const auto& task = pim.tasks[i];
        const auto path = item(base + "/tasks", "task", i);
        claim(task.id, path);
        if (task.composite_refs.empty()) {
            sink.error("empty-refs", path + "/@composites", "task '" + task.id + "' references no composite");
        }
        for (const auto& ref : task.composite_refs) {
            if (pim.find_composite(ref) == nullptr) {
                sink.error("unresolved-ref", path + "/@composites", "no composite named '" + ref + "'");
            }
        }
    }

    for (std::size_t i = 0; i < pim.services.size(); ++i) {
        const auto& service = pim.services[i];
        const auto path = item(base + "/services", "service", i);
        claim(service.id, path);
        const bool physical = service.kind != ServiceKind::logic;
        if (physical && service.property.empty()) {
            sink.error("missing-property", path + "/@property",
                       std::string(to_string(service.kind)) + " '" + service.id + "' needs a property");
        }
        if (!physical && !service.property.empty()) {
            sink.error("unexpected-property", path + "/@property",
                       "logic-service '" + service.id + "' must not carry a property");
        }
        if (pim.entities.empty() || !physical || service.property.empty()) continue;
        const auto* entity = pim.find_entity(service.entity_ref);
        if (entity == nullptr) {
            sink.error("unresolved-ref", path + "/@entity", "no entity named '" + service.entity_ref + "'");
        } else if (service.kind == ServiceKind::sensor && entity->find_property(service.property) == nullptr) {
            sink.error("unresolved-ref", path + "/@property",
                       "entity '" + entity->name + "' has no property '" + service.property + "'");
        } else if (service.kind == ServiceKind::actuator && entity->find_actuator(service.property) == nullptr) {
            sink.error("unresolved-ref", path + "/@property",
                       "entity '" + entity->name + "' has no actuator '" + service.property + "'");
        }
    }

    for (std::size_t i = 0; i < pim.composites.size(); ++i) {
        const auto& composite = pim.composites[i];
        const auto path = item(base + "/composites", "composite", i);
        claim(composite.id, path);
        if (composite.service_refs.empty()) {
            sink.error("empty-refs", path + "/@services", "composite '" + composite.id + "' references no service");
        }
        for (const auto& ref : composite.service_refs) {
            if (pim.find_service(ref) == nullptr) {
                sink.error("unresolved-ref", path + "/@services", "no service named '" + ref + "'");
            }
        }
        const auto member = [&](const std::string& ref) {
            return std::find(composite.service_refs.begin(), composite.service_refs.end(), ref) !=
                   composite.service_refs.end();
        };
        for (std::size_t j = 0; j < composite.interactions.size(); ++j) {
            const auto& interaction = composite.interactions[j];
            const auto ipath = item(path, "interaction", j);
            if (!member(interaction.from)) {
                sink.error("interaction-outside-composite", ipath + "/@from",
                           "'" + interaction.from + "' is not a member of composite '" + composite.id + "'");
            }
            if (!member(interaction.to)) {
                sink.error("interaction-outside-composite", ipath + "/@to",
                           "'" + interaction.to + "' is not a member of composite '" + composite.id + "'");
            }
        }
    }

    std::set<std::uint16_t> device_ids;
    for (std::size_t i = 0; i < pim.entities.size(); ++i) {
        const auto& entity = pim.entities[i];
        const auto path = item(base + "/entities", "entity", i);
        claim(entity.name, path);
        if (!device_ids.insert(entity.id).second) {
            sink.error("duplicate-device-id", path + "/@device",
                       "device id " + std::to_string(entity.id) + " is already used");
        }
        std::set<std::string> names;
        std::set<std::uint8_t> wire_ids;
        for (std::size_t j = 0; j < entity.properties.size(); ++j) {
            const auto& property = entity.properties[j];
            const auto ppath = item(path, "property", j);
            if (!names.insert(property.name).second) {
                sink.error("duplicate-property", ppath + "/@name", "property '" + property.name + "' repeated");
            }
            if (!wire_ids.insert(property.id).second) {
                sink.error("duplicate-property-id", ppath + "/@id",
                           "property id " + std::to_string(property.id) + " repeated");
            }
        }
        for (std::size_t j = 0; j < entity.actuators.size(); ++j) {
            const auto& actuator = entity.actuators[j];
            if (entity.find_property(actuator.property) == nullptr) {
                sink.error("unresolved-ref", item(path, "actuator", j) + "/@property",
                           "entity '" + entity.name + "' has no property '" + actuator.property + "'");
            }
        }
    }
}

// Checks a command target against the effector it is addressed to.
std::optional<std::string> target_problem(const PimModel& pim, const policy::Action& action) {
    using policy::Command;
    if (action.command == Command::set_reporting_interval) {
        if (action.effector != "monitor") return "set_reporting_interval must address the monitor effector";
        if (!(action.value >= 1.0)) return "reporting interval must be at least 1";
        return std::nullopt;
    }
    if (action.effector == "monitor") return "the monitor effector only accepts set_reporting_interval";
    const auto prefix = action.effector + ".";
    if (action.target.rfind(prefix, 0) != 0 || action.target.size() == prefix.size()) {
        return "target '" + action.target + "' must name a member of '" + action.effector + "'";
    }
    const auto* entity = pim.find_entity(action.effector);
    if (entity == nullptr) return std::nullopt;
    const auto member = action.target.substr(prefix.size());
    if (action.command == Command::set_actuator) {
        if (entity->find_actuator(member) == nullptr) return "no actuator '" + action.target + "'";
    } else if (entity->find_property(member) == nullptr) {
        return "no property '" + action.target + "'";
    }
    return std::nullopt;
}

void validate_loop(const PimModel& pim, const MapeLoopSpec& loop, const std::string& path, Sink& sink) {
    const auto* task = pim.find_task(loop.task_ref);
    if (task == nullptr) {
        sink.error("unresolved-ref", path + "/@task", "no task named '" + loop.task_ref + "'");
    }
    std::set<std::string> sensed;
    std::set<std::string> effector_entities{"monitor"};
    std::vector<const Service*> services;
    if (task != nullptr) services = pim.task_services(*task);
    for (const auto* s : services) {
        if (s->kind == ServiceKind::sensor) sensed.insert(s->path());
    }

    const auto monitor_path = path + "/monitor";
    const auto& monitor = loop.monitor;
    if (monitor.reporting_interval < 1) {
        sink.error("invalid-interval", monitor_path + "/@reporting-interval", "reporting interval must be >= 1");
    }
    if (monitor.senses.empty()) {
        sink.warning("empty-monitor", monitor_path, "loop for '" + loop.task_ref + "' monitors no property");
    }
    std::set<std::string> monitored;
    for (std::size_t j = 0; j < monitor.senses.size(); ++j) {
        const auto& sense = monitor.senses[j];
        const auto spath = item(monitor_path, "sense", j);
        if (!monitored.insert(sense.property).second) {
            sink.error("duplicate-sense", spath + "/@property", "'" + sense.property + "' sensed twice");
        }
        if (task != nullptr && !sensed.contains(sense.property)) {
            sink.error("unknown-sensor-property", spath + "/@property",
                       "'" + sense.property + "' is not provided by a sensor-service of task '" + task->id + "'");
        }
        if (sense.mode == mape::SenseMode::periodic && sense.interval < 1) {
            sink.error("invalid-interval", spath + "/@interval", "sampling interval must be >= 1");
        }
        if (!(sense.deadband >= 0.0)) {
            sink.error("invalid-value", spath + "/@deadband", "deadband must be >= 0");
        }
    }

    std::set<std::string> events;
    std::set<std::string> threshold_ids;
    for (std::size_t j = 0; j < monitor.thresholds.size(); ++j) {
        const auto& threshold = monitor.thresholds[j];
        const auto tpath = item(monitor_path, "threshold", j);
        if (!threshold_ids.insert(threshold.id).second) {
            sink.error("duplicate-id", tpath + "/@id", "threshold '" + threshold.id + "' repeated");
        }
        events.insert(threshold.id);
        if (!monitored.contains(threshold.threshold.property)) {
            sink.error("unmonitored-property", tpath + "/@property",
                       "'" + threshold.threshold.property + "' is not monitored by this loop");
        }
        if (!(threshold.threshold.hysteresis >= 0.0)) {
            sink.error("invalid-value", tpath + "/@hysteresis", "hysteresis must be >= 0");
        }
    }
    for (const auto& s : loop.symptoms) events.insert(s.name);
    for (const auto& p : loop.predictions) events.insert(p.name);

    const auto analyzer_path = path + "/analyzer";
    std::set<std::string> symptom_names;
    for (std::size_t j = 0; j < loop.symptoms.size(); ++j) {
        const auto& symptom = loop.symptoms[j];
        const auto spath = item(analyzer_path, "symptom", j);
        if (!symptom_names.insert(symptom.name).second) {
            sink.error("duplicate-symptom", spath + "/@name", "symptom '" + symptom.name + "' repeated");
        }
        if (symptom.window < 1) sink.error("invalid-window", spath + "/@window", "window must be >= 1");
        for (const auto& property : policy::referenced_properties(symptom.trigger)) {
            if (task != nullptr && !sensed.contains(property)) {
                sink.error("unmonitored-property", spath,
                           "symptom '" + symptom.name + "' references '" + property + "', not sensed by the task");
            }
        }
        for (const auto& event : policy::referenced_events(symptom.trigger)) {
            if (!events.contains(event)) {
                sink.warning("unknown-event", spath, "no threshold, symptom or prediction named '" + event + "'");
            }
        }
    }
    for (std::size_t j = 0; j < loop.predictions.size(); ++j) {
        const auto& prediction = loop.predictions[j];
        const auto ppath = item(analyzer_path, "prediction", j);
        if (!symptom_names.insert(prediction.name).second) {
            sink.error("duplicate-symptom", ppath + "/@name", "'" + prediction.name + "' repeated");
        }
        if (!threshold_ids.contains(prediction.threshold)) {
            sink.error("unresolved-ref", ppath + "/@threshold", "no threshold named '" + prediction.threshold + "'");
        }
        if (prediction.samples < 2) sink.error("invalid-value", ppath + "/@samples", "need at least 2 samples");
        if (prediction.horizon < 1) sink.error("invalid-value", ppath + "/@horizon", "horizon must be >= 1");
    }

    const auto executor_path = path + "/executor";
    for (std::size_t j = 0; j < loop.effectors.size(); ++j) {
        const auto& ref = loop.effectors[j];
        const auto epath = item(executor_path, "effector", j) + "/@service";
        const auto* service = pim.find_service(ref);
        if (service == nullptr) {
            sink.error("unresolved-ref", epath, "no service named '" + ref + "'");
        } else if (service->kind != ServiceKind::actuator) {
            sink.error("not-an-actuator", epath, "'" + ref + "' is not an actuator-service");
        } else {
            effector_entities.insert(service->entity_ref);
        }
    }

    const auto planner_path = path + "/planner";
    std::set<std::string> rule_ids;
    for (std::size_t j = 0; j < loop.rules.size(); ++j) {
        const auto& rule = loop.rules[j];
        const auto rpath = item(planner_path, "rule", j);
        if (!rule_ids.insert(rule.id).second) {
            sink.error("duplicate-rule", rpath + "/@id", "rule '" + rule.id + "' repeated");
        }
        if (!symptom_names.contains(rule.event)) {
            sink.warning("unknown-event", rpath + "/@event", "no symptom or prediction named '" + rule.event + "'");
        }
        if (rule.condition) {
            for (const auto& property : policy::referenced_properties(*rule.condition)) {
                if (task != nullptr && !sensed.contains(property)) {
                    sink.error("unmonitored-property", rpath + "/condition",
                               "rule '" + rule.id + "' references '" + property + "', not sensed by the task");
                }
            }
        }
        if (rule.plan_template.empty()) {
            sink.error("empty-plan", rpath, "rule '" + rule.id + "' has no plan steps");
        }
        for (std::size_t k = 0; k < rule.plan_template.size(); ++k) {
            const auto& step = rule.plan_template[k];
            const auto stpath = item(rpath, "step", k);
            if (step.empty()) sink.error("empty-plan", stpath, "plan step has no actions");
            for (std::size_t m = 0; m < step.size(); ++m) {
                const auto& action = step[m];
                const auto apath = item(stpath, "action", m);
                if (!effector_entities.contains(action.effector)) {
                    sink.error("unknown-effector", apath + "/@effector",
                               "'" + action.effector + "' is not bound to this loop's executor");
                } else if (auto problem = target_problem(pim, action)) {
                    sink.error("invalid-target", apath + "/@target", *problem);
                }
            }
        }
    }
}

void validate_apim(const ApimModel& apim, const std::string& base, Sink& sink) {
    validate_pim(apim.pim, base + "/pim", sink);
    std::set<std::string> tasks;
    for (std::size_t i = 0; i < apim.loops.size(); ++i) {
        const auto path = item(base + "/loops", "loop", i);
        if (!tasks.insert(apim.loops[i].task_ref).second) {
            sink.error("duplicate-loop", path + "/@task", "task '" + apim.loops[i].task_ref + "' has two loops");
        }
        validate_loop(apim.pim, apim.loops[i], path, sink);
    }
}

void validate_apsm(const ApsmModel& apsm, Sink& sink) {
    const std::string base = "/apsm";
    validate_apim(apsm.apim, base + "/apim", sink);
    const auto& targets = known_targets();
    if (std::find(targets.begin(), targets.end(), apsm.target) == targets.end()) {
        sink.error("unknown-target", base + "/@target", "no template target named '" + apsm.target + "'");
    }
    for (auto component : all_components) {
        if (!apsm.placements.contains(component)) {
            sink.error("missing-placement", base + "/placements",
                       "no node for component '" + std::string(to_string(component)) + "'");
        }
    }
    std::set<std::pair<Node, Node>> pairs;
    for (std::size_t i = 0; i < apsm.links.size(); ++i) {
        const auto& link = apsm.links[i];
        const auto path = item(base + "/links", "link", i);
        if (link.a == link.b) {
            sink.error("invalid-link", path, "a link must join two different nodes");
            continue;
        }
        if (!pairs.insert(std::minmax(link.a, link.b)).second) {
            sink.error("duplicate-link", path, "nodes already linked");
        }
    }
    const bool split = std::any_of(apsm.placements.begin(), apsm.placements.end(),
                                   [](const auto& p) { return p.second == Node::backend; });
    if (split && !pairs.contains({Node::gateway, Node::backend})) {
        sink.error("missing-link", base + "/links", "components on gateway and backend need a link");
    }
    if (apsm.target == "simkernel") {
        for (std::size_t i = 0; i < apsm.apim.pim.services.size(); ++i) {
            const auto& service = apsm.apim.pim.services[i];
            if (service.kind == ServiceKind::logic) continue;
            if (apsm.apim.pim.find_entity(service.entity_ref) == nullptr) {
                sink.error("missing-entity", item(base + "/apim/pim/services", "service", i) + "/@entity",
                           "target simkernel needs an <entity> for '" + service.entity_ref + "'");
            }
        }
    }
}

}  // namespace

std::vector<Diagnostic> validate_model(const Model& model) {
    std::vector<Diagnostic> out;
    Sink sink(out);
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, PimModel>) validate_pim(m, "/pim", sink);
            else if constexpr (std::is_same_v<T, ApimModel>) validate_apim(m, "/apim", sink);
            else validate_apsm(m, sink);
        },
        model);
    return out;
}

}  // namespace mapek::model
