#include "mapek/model/elements.hpp"

#include <array>
#include <map>

#include "mapek/numfmt.hpp"

namespace mapek::model {

namespace {

// Elements that occur at most once under their parent are addressed without an index.
bool singleton(std::string_view name) {
    static constexpr std::array<std::string_view, 21> names{
        "pim",      "apim",     "tasks",   "services", "composites", "entities",   "loops",
        "monitor",  "analyzer", "planner", "executor", "devices",    "environment", "symptoms",
        "policies", "placements", "links", "script",   "goal",       "condition",  "predictions"};
    for (auto n : names) {
        if (n == name) return true;
    }
    return false;
}

}  // namespace

ElementReader::ElementReader(const XmlElement& element, std::string path)
    : element_(element), path_(std::move(path)) {}

std::string ElementReader::attr_path(std::string_view key) const { return path_ + "/@" + std::string(key); }

std::optional<std::string> ElementReader::optional(std::string_view key) {
    used_.insert(std::string(key));
    if (const auto* v = element_.attribute(key)) return *v;
    return std::nullopt;
}

std::string ElementReader::required(std::string_view key) {
    auto v = optional(key);
    if (!v || trim(*v).empty()) {
        throw Error("missing-required-field", "<" + element_.name + "> requires attribute '" + std::string(key) + "'",
                    attr_path(key));
    }
    return *v;
}

double ElementReader::number(std::string_view key) {
    const auto text = required(key);
    auto v = parse_double(text);
    if (!v) throw Error("invalid-value", "'" + text + "' is not a number", attr_path(key));
    return *v;
}

double ElementReader::number_or(std::string_view key, double fallback) {
    return optional(key) ? number(key) : fallback;
}

std::uint64_t ElementReader::unsigned_int(std::string_view key, std::uint64_t max) {
    const auto text = required(key);
    auto v = parse_unsigned(text);
    if (!v || *v > max) {
        throw Error("invalid-value", "'" + text + "' is not an integer in [0, " + std::to_string(max) + "]",
                    attr_path(key));
    }
    return *v;
}

std::uint64_t ElementReader::unsigned_or(std::string_view key, std::uint64_t fallback, std::uint64_t max) {
    return optional(key) ? unsigned_int(key, max) : fallback;
}

std::int64_t ElementReader::signed_int(std::string_view key) {
    const auto text = required(key);
    auto v = parse_signed(text);
    if (!v) throw Error("invalid-value", "'" + text + "' is not an integer", attr_path(key));
    return *v;
}

void ElementReader::finish() {
    for (const auto& [k, v] : element_.attributes) {
        if (used_.find(k) == used_.end()) {
            throw Error("unknown-attribute", "<" + element_.name + "> has unknown attribute '" + k + "'",
                        attr_path(k));
        }
    }
}

std::vector<std::pair<const XmlElement*, std::string>> ElementReader::children() const {
    std::vector<std::pair<const XmlElement*, std::string>> out;
    std::map<std::string, std::size_t> seen;
    for (const auto& child : element_.children) {
        const auto index = ++seen[child.name];
        out.emplace_back(&child, child_path(path_, child.name, singleton(child.name) ? 0 : index));
    }
    return out;
}

void ElementReader::no_text() const {
    if (!element_.text.empty()) {
        throw Error("unexpected-text", "<" + element_.name + "> must not contain text", path_);
    }
}

void unknown_element(const XmlElement& element, const std::string& path) {
    throw Error("unknown-element", "unexpected element <" + element.name + ">", path);
}

policy::Expression read_expression(std::string_view text, const std::string& path) {
    try {
        return policy::parse_expression(text);
    } catch (const policy::SyntaxError& e) {
        throw Error("syntax-error", e.what(), path);
    }
}

mape::SenseSpec read_sense(const XmlElement& element, const std::string& path) {
    ElementReader r(element, path);
    mape::SenseSpec s;
    s.property = r.required("property");
    const auto mode = r.required("mode");
    auto parsed = mape::parse_sense_mode(mode);
    if (!parsed) throw Error("invalid-value", "unknown sensing mode '" + mode + "'", path + "/@mode");
    s.mode = *parsed;
    s.interval = r.unsigned_or("interval", 1);
    s.deadband = r.number_or("deadband", 0.0);
    if (auto agg = r.optional("aggregates")) {
        auto set = mape::parse_aggregates(*agg);
        if (!set) throw Error("invalid-value", "unknown aggregate in '" + *agg + "'", path + "/@aggregates");
        s.aggregates = *set;
    }
    r.finish();
    if (!element.children.empty()) unknown_element(element.children.front(), path);
    r.no_text();
    return s;
}

mape::LocalThreshold read_threshold(const XmlElement& element, const std::string& path) {
    ElementReader r(element, path);
    mape::LocalThreshold t;
    t.id = r.required("id");
    t.threshold.property = r.required("property");
    const auto op = r.required("op");
    if (op == ">") t.threshold.op = policy::ThresholdOp::above;
    else if (op == "<") t.threshold.op = policy::ThresholdOp::below;
    else throw Error("invalid-value", "threshold op must be '>' or '<'", path + "/@op");
    t.threshold.limit = r.number("limit");
    t.threshold.hysteresis = r.number_or("hysteresis", 0.0);
    r.finish();
    if (!element.children.empty()) unknown_element(element.children.front(), path);
    r.no_text();
    return t;
}

mape::MonitorConfig read_monitor(const XmlElement& element, const std::string& path) {
    ElementReader r(element, path);
    mape::MonitorConfig m;
    m.reporting_interval = r.unsigned_or("reporting-interval", 5);
    r.finish();
    r.no_text();
    for (const auto& [child, child_path] : r.children()) {
        if (child->name == "sense") m.senses.push_back(read_sense(*child, child_path));
        else if (child->name == "threshold") m.thresholds.push_back(read_threshold(*child, child_path));
        else unknown_element(*child, child_path);
    }
    return m;
}

policy::Symptom read_symptom(const XmlElement& element, const std::string& path) {
    ElementReader r(element, path);
    policy::Symptom s;
    s.name = r.required("name");
    s.window = r.unsigned_int("window");
    s.cooldown = r.unsigned_or("cooldown", s.window);
    r.finish();
    if (!element.children.empty()) unknown_element(element.children.front(), path);
    if (element.text.empty()) throw Error("missing-required-field", "symptom requires a trigger expression", path);
    s.trigger = read_expression(element.text, path);
    return s;
}

mape::PredictionSpec read_prediction(const XmlElement& element, const std::string& path) {
    ElementReader r(element, path);
    mape::PredictionSpec p;
    p.name = r.required("name");
    p.threshold = r.required("threshold");
    p.samples = r.unsigned_or("samples", 5);
    p.horizon = r.unsigned_int("horizon");
    p.cooldown = r.unsigned_or("cooldown", p.horizon);
    r.finish();
    if (!element.children.empty()) unknown_element(element.children.front(), path);
    r.no_text();
    return p;
}

policy::Action read_action(const XmlElement& element, const std::string& path) {
    ElementReader r(element, path);
    policy::Action a;
    a.effector = r.required("effector");
    const auto command = r.required("command");
    auto parsed = policy::parse_command(command);
    if (!parsed) throw Error("invalid-value", "unknown command '" + command + "'", path + "/@command");
    a.command = *parsed;
    a.target = r.required("target");
    a.value = r.number("value");
    r.finish();
    if (!element.children.empty()) unknown_element(element.children.front(), path);
    r.no_text();
    return a;
}

policy::EcaRule read_rule(const XmlElement& element, const std::string& path) {
    ElementReader r(element, path);
    policy::EcaRule rule;
    rule.id = r.required("id");
    rule.priority = r.signed_int("priority");
    rule.event = r.required("event");
    r.finish();
    r.no_text();
    for (const auto& [child, child_path] : r.children()) {
        if (child->name == "condition") {
            ElementReader(*child, child_path).finish();
            if (!child->children.empty()) unknown_element(child->children.front(), child_path);
            if (!child->text.empty()) rule.condition = read_expression(child->text, child_path);
        } else if (child->name == "step") {
            ElementReader step_reader(*child, child_path);
            step_reader.finish();
            step_reader.no_text();
            policy::PlanStep step;
            for (const auto& [action, action_path] : step_reader.children()) {
                if (action->name != "action") unknown_element(*action, action_path);
                step.push_back(read_action(*action, action_path));
            }
            rule.plan_template.push_back(std::move(step));
        } else {
            unknown_element(*child, child_path);
        }
    }
    return rule;
}

void read_device_body(const XmlElement& element, const std::string& path, DeviceSpec& device) {
    ElementReader r(element, path);
    for (const auto& [child, child_path] : r.children()) {
        ElementReader c(*child, child_path);
        if (child->name == "property") {
            PropertySpec p;
            p.id = static_cast<std::uint8_t>(c.unsigned_int("id", 255));
            p.name = c.required("name");
            p.initial = c.number_or("initial", 0.0);
            p.drift = c.number_or("drift", 0.0);
            p.noise = c.number_or("noise", 0.0);
            device.properties.push_back(std::move(p));
        } else if (child->name == "actuator") {
            ActuatorSpec a;
            a.name = c.required("name");
            a.property = c.required("property");
            a.effect = c.number("effect");
            device.actuators.push_back(std::move(a));
        } else {
            unknown_element(*child, child_path);
        }
        c.finish();
        if (!child->children.empty()) unknown_element(child->children.front(), child_path);
        c.no_text();
    }
}

Placements read_placements(const XmlElement& element, const std::string& path) {
    ElementReader r(element, path);
    r.finish();
    r.no_text();
    Placements placements = default_placements();
    for (const auto& [child, child_path] : r.children()) {
        if (child->name != "place") unknown_element(*child, child_path);
        ElementReader c(*child, child_path);
        const auto component = c.required("component");
        const auto node = c.required("node");
        c.finish();
        auto comp = parse_component(component);
        if (!comp) {
            throw Error("unknown-component-in-placement", "no component named '" + component + "'",
                        child_path + "/@component");
        }
        auto n = parse_node(node);
        if (!n) throw Error("invalid-value", "node must be gateway or backend", child_path + "/@node");
        placements[*comp] = *n;
    }
    return placements;
}

std::vector<LinkSpec> read_links(const XmlElement& element, const std::string& path) {
    ElementReader r(element, path);
    r.finish();
    r.no_text();
    std::vector<LinkSpec> links;
    for (const auto& [child, child_path] : r.children()) {
        if (child->name != "link") unknown_element(*child, child_path);
        ElementReader c(*child, child_path);
        const auto a = c.required("a");
        const auto b = c.required("b");
        LinkSpec link;
        link.latency = c.unsigned_int("latency");
        c.finish();
        auto na = parse_node(a);
        auto nb = parse_node(b);
        if (!na) throw Error("invalid-value", "unknown node '" + a + "'", child_path + "/@a");
        if (!nb) throw Error("invalid-value", "unknown node '" + b + "'", child_path + "/@b");
        link.a = *na;
        link.b = *nb;
        links.push_back(link);
    }
    return links;
}

XmlElement write_sense(const mape::SenseSpec& sense) {
    XmlElement el{"sense"};
    el.set("property", sense.property)
        .set("mode", std::string(mape::to_string(sense.mode)))
        .set("interval", std::to_string(sense.interval))
        .set("deadband", format_number(sense.deadband))
        .set("aggregates", mape::to_string(sense.aggregates));
    return el;
}

XmlElement write_threshold(const mape::LocalThreshold& t) {
    XmlElement el{"threshold"};
    el.set("id", t.id)
        .set("property", t.threshold.property)
        .set("op", std::string(policy::to_string(t.threshold.op)))
        .set("limit", format_number(t.threshold.limit))
        .set("hysteresis", format_number(t.threshold.hysteresis));
    return el;
}

XmlElement write_monitor(const mape::MonitorConfig& monitor) {
    XmlElement el{"monitor"};
    el.set("reporting-interval", std::to_string(monitor.reporting_interval));
    for (const auto& s : monitor.senses) el.add(write_sense(s));
    for (const auto& t : monitor.thresholds) el.add(write_threshold(t));
    return el;
}

XmlElement write_symptom(const policy::Symptom& symptom) {
    XmlElement el{"symptom"};
    el.set("name", symptom.name)
        .set("window", std::to_string(symptom.window))
        .set("cooldown", std::to_string(symptom.cooldown));
    el.text = policy::to_string(symptom.trigger);
    return el;
}

XmlElement write_prediction(const mape::PredictionSpec& p) {
    XmlElement el{"prediction"};
    el.set("name", p.name)
        .set("threshold", p.threshold)
        .set("samples", std::to_string(p.samples))
        .set("horizon", std::to_string(p.horizon))
        .set("cooldown", std::to_string(p.cooldown));
    return el;
}

XmlElement write_action(const policy::Action& action) {
    XmlElement el{"action"};
    el.set("effector", action.effector)
        .set("command", std::string(policy::to_string(action.command)))
        .set("target", action.target)
        .set("value", format_number(action.value));
    return el;
}

XmlElement write_rule(const policy::EcaRule& rule) {
    XmlElement el{"rule"};
    el.set("id", rule.id).set("priority", std::to_string(rule.priority)).set("event", rule.event);
    if (rule.condition) {
        XmlElement cond{"condition"};
        cond.text = policy::to_string(*rule.condition);
        el.add(std::move(cond));
    }
    for (const auto& step : rule.plan_template) {
        XmlElement s{"step"};
        for (const auto& a : step) s.add(write_action(a));
        el.add(std::move(s));
    }
    return el;
}

void write_device_body(const DeviceSpec& device, XmlElement& element) {
    for (const auto& p : device.properties) {
        XmlElement el{"property"};
        el.set("id", std::to_string(p.id))
            .set("name", p.name)
            .set("initial", format_number(p.initial))
            .set("drift", format_number(p.drift))
            .set("noise", format_number(p.noise));
        element.add(std::move(el));
    }
    for (const auto& a : device.actuators) {
        XmlElement el{"actuator"};
        el.set("name", a.name).set("property", a.property).set("effect", format_number(a.effect));
        element.add(std::move(el));
    }
}

XmlElement write_placements(const Placements& placements) {
    XmlElement el{"placements"};
    for (auto c : all_components) {
        auto it = placements.find(c);
        if (it == placements.end()) continue;
        XmlElement p{"place"};
        p.set("component", std::string(to_string(c))).set("node", std::string(to_string(it->second)));
        el.add(std::move(p));
    }
    return el;
}

XmlElement write_links(const std::vector<LinkSpec>& links) {
    XmlElement el{"links"};
    for (const auto& l : links) {
        XmlElement x{"link"};
        x.set("a", std::string(to_string(l.a)))
            .set("b", std::string(to_string(l.b)))
            .set("latency", std::to_string(l.latency));
        el.add(std::move(x));
    }
    return el;
}

}  // namespace mapek::model
