#include "mapek/simnet/scenario.hpp"

#include <algorithm>
#include <set>

#include "mapek/model/elements.hpp"
#include "mapek/numfmt.hpp"
#include "mapek/simnet/frame.hpp"

namespace mapek::simnet {

using model::ElementReader;
using model::unknown_element;

double EnvironmentProperty::value_at(Tick t) const {
    double v = 0.0;
    for (const auto& [from, value] : timeline) {
        if (from > t) break;
        v = value;
    }
    return v;
}

std::string_view to_string(ScriptKind kind) {
    switch (kind) {
        case ScriptKind::demand: return "demand";
        case ScriptKind::add_symptom: return "add-symptom";
        case ScriptKind::update_symptom: return "update-symptom";
        case ScriptKind::remove_symptom: return "remove-symptom";
        case ScriptKind::add_rule: return "add-rule";
        case ScriptKind::remove_rule: return "remove-rule";
        case ScriptKind::inject_frame: return "inject-frame";
    }
    return "?";
}

const DeviceSpec* Scenario::find_device(std::string_view name) const {
    for (const auto& d : devices) {
        if (d.name == name) return &d;
    }
    return nullptr;
}

const EnvironmentProperty* Scenario::find_environment(std::string_view name) const {
    for (const auto& e : environment) {
        if (e.name == name) return &e;
    }
    return nullptr;
}

bool Scenario::has_property(std::string_view path) const {
    const auto dot = path.find('.');
    if (dot == std::string_view::npos) return find_environment(path) != nullptr;
    const auto* device = find_device(path.substr(0, dot));
    return device != nullptr && device->find_property(std::string(path.substr(dot + 1))) != nullptr;
}

std::optional<Tick> link_latency(const Scenario& scenario, Node a, Node b) {
    if (a == b) return Tick{0};
    for (const auto& l : scenario.links) {
        if ((l.a == a && l.b == b) || (l.a == b && l.b == a)) return l.latency;
    }
    return std::nullopt;
}

namespace {

void no_children(const XmlElement& el, const std::string& path) {
    if (!el.children.empty()) unknown_element(el.children.front(), path + "/" + el.children.front().name);
}

DeviceSpec read_device(const XmlElement& el, const std::string& path) {
    ElementReader r(el, path);
    DeviceSpec d;
    d.id = static_cast<std::uint16_t>(r.unsigned_int("id", 65535));
    d.name = r.required("name");
    d.gateway = r.optional("gateway").value_or("gateway");
    d.seed = r.unsigned_or("seed", 0);
    r.finish();
    r.no_text();
    model::read_device_body(el, path, d);
    return d;
}

EnvironmentProperty read_environment_property(const XmlElement& el, const std::string& path) {
    ElementReader r(el, path);
    EnvironmentProperty e;
    e.name = r.required("name");
    r.finish();
    r.no_text();
    for (const auto& [child, child_path] : r.children()) {
        if (child->name != "at") unknown_element(*child, child_path);
        ElementReader c(*child, child_path);
        const auto tick = c.unsigned_int("tick");
        const auto value = c.number("value");
        c.finish();
        no_children(*child, child_path);
        e.timeline.emplace_back(tick, value);
    }
    return e;
}

const XmlElement& only_child(const XmlElement& el, const std::string& path, std::string_view name) {
    if (el.children.size() != 1 || el.children.front().name != name) {
        throw Error("missing-required-field", "expected exactly one <" + std::string(name) + ">", path);
    }
    return el.children.front();
}

ScriptItem read_script_item(const XmlElement& el, const std::string& path) {
    ElementReader r(el, path);
    ScriptItem item;
    item.tick = r.unsigned_int("tick");
    const auto& name = el.name;
    if (name == "demand") {
        item.kind = ScriptKind::demand;
        item.name = r.required("property");
    } else if (name == "add-symptom" || name == "update-symptom") {
        item.kind = name == "add-symptom" ? ScriptKind::add_symptom : ScriptKind::update_symptom;
        item.symptom = model::read_symptom(only_child(el, path, "symptom"), path + "/symptom");
        item.name = item.symptom->name;
    } else if (name == "remove-symptom") {
        item.kind = ScriptKind::remove_symptom;
        item.name = r.required("name");
    } else if (name == "add-rule") {
        item.kind = ScriptKind::add_rule;
        item.rule = model::read_rule(only_child(el, path, "rule"), path + "/rule");
        item.name = item.rule->id;
    } else if (name == "remove-rule") {
        item.kind = ScriptKind::remove_rule;
        item.name = r.required("id");
    } else if (name == "inject-frame") {
        item.kind = ScriptKind::inject_frame;
        const auto hex = r.required("hex");
        try {
            item.frame = from_hex(hex);
        } catch (const Error& e) {
            throw Error("invalid-value", e.what(), path + "/@hex");
        }
    } else {
        unknown_element(el, path);
    }
    r.finish();
    r.no_text();
    if (item.kind != ScriptKind::add_symptom && item.kind != ScriptKind::update_symptom &&
        item.kind != ScriptKind::add_rule) {
        no_children(el, path);
    }
    return item;
}

template <typename Read>
void read_items(const XmlElement& section, const std::string& path, std::string_view item, Read read) {
    ElementReader r(section, path);
    r.finish();
    r.no_text();
    for (const auto& [child, child_path] : r.children()) {
        if (!item.empty() && child->name != item) unknown_element(*child, child_path);
        read(*child, child_path);
    }
}

}  // namespace

Scenario parse_scenario(std::string_view text) {
    const XmlElement root = parse_xml(text);
    if (root.name != "scenario") {
        throw Error("wrong-stage-root", "expected <scenario> root, found <" + root.name + ">", "/" + root.name);
    }
    const std::string base = "/scenario";
    ElementReader r(root, base);
    Scenario s;
    s.name = r.required("name");
    r.finish();
    r.no_text();
    for (const auto& [child, path] : r.children()) {
        const auto& name = child->name;
        if (name == "devices") {
            read_items(*child, path, "device", [&](const XmlElement& e, const std::string& p) {
                s.devices.push_back(read_device(e, p));
            });
        } else if (name == "environment") {
            read_items(*child, path, "property", [&](const XmlElement& e, const std::string& p) {
                s.environment.push_back(read_environment_property(e, p));
            });
        } else if (name == "monitor") {
            s.monitor = model::read_monitor(*child, path);
        } else if (name == "symptoms") {
            read_items(*child, path, "", [&](const XmlElement& e, const std::string& p) {
                if (e.name == "symptom") s.symptoms.push_back(model::read_symptom(e, p));
                else if (e.name == "prediction") s.predictions.push_back(model::read_prediction(e, p));
                else unknown_element(e, p);
            });
        } else if (name == "policies") {
            read_items(*child, path, "rule", [&](const XmlElement& e, const std::string& p) {
                s.rules.push_back(model::read_rule(e, p));
            });
        } else if (name == "placements") {
            s.placements = model::read_placements(*child, path);
        } else if (name == "links") {
            s.links = model::read_links(*child, path);
        } else if (name == "script") {
            read_items(*child, path, "", [&](const XmlElement& e, const std::string& p) {
                s.script.push_back(read_script_item(e, p));
            });
        } else {
            unknown_element(*child, path);
        }
    }
    return s;
}

namespace {

class Checker {
public:
    Checker(const Scenario& s, std::vector<Diagnostic>& out) : s_(s), out_(out) {}

    void run() {
        devices();
        environment();
        monitor();
        analysis();
        policies();
        topology();
        script();
    }

private:
    void error(std::string code, std::string path, std::string message) {
        out_.push_back({Severity::error, std::move(code), std::move(path), std::move(message)});
    }
    void warning(std::string code, std::string path, std::string message) {
        out_.push_back({Severity::warning, std::move(code), std::move(path), std::move(message)});
    }
    static std::string item(const std::string& parent, std::string_view name, std::size_t i) {
        return child_path(parent, name, i + 1);
    }

    void devices() {
        std::set<std::string> names;
        std::set<std::uint16_t> ids;
        for (std::size_t i = 0; i < s_.devices.size(); ++i) {
            const auto& d = s_.devices[i];
            const auto path = item("/scenario/devices", "device", i);
            if (d.name.empty() || d.name.find('.') != std::string::npos) {
                error("invalid-value", path + "/@name", "device name must be non-empty and contain no '.'");
            }
            if (!names.insert(d.name).second) error("duplicate-id", path + "/@name", "device '" + d.name + "' repeated");
            if (!ids.insert(d.id).second) {
                error("duplicate-device-id", path + "/@id", "device id " + std::to_string(d.id) + " repeated");
            }
            if (d.gateway != "gateway") {
                error("unknown-gateway", path + "/@gateway", "only the single gateway 'gateway' exists");
            }
            std::set<std::string> props;
            std::set<std::uint8_t> prop_ids;
            for (std::size_t j = 0; j < d.properties.size(); ++j) {
                const auto& p = d.properties[j];
                const auto ppath = item(path, "property", j);
                if (!props.insert(p.name).second) error("duplicate-property", ppath + "/@name", "'" + p.name + "' repeated");
                if (!prop_ids.insert(p.id).second) {
                    error("duplicate-property-id", ppath + "/@id", "property id " + std::to_string(p.id) + " repeated");
                }
                if (!(p.noise >= 0.0)) error("invalid-value", ppath + "/@noise", "noise amplitude must be >= 0");
            }
            for (std::size_t j = 0; j < d.actuators.size(); ++j) {
                const auto& a = d.actuators[j];
                if (d.find_property(a.property) == nullptr) {
                    error("unresolved-ref", item(path, "actuator", j) + "/@property",
                          "device '" + d.name + "' has no property '" + a.property + "'");
                }
            }
        }
    }

    void environment() {
        std::set<std::string> names;
        for (std::size_t i = 0; i < s_.environment.size(); ++i) {
            const auto& e = s_.environment[i];
            const auto path = item("/scenario/environment", "property", i);
            if (e.name.empty() || e.name.find('.') != std::string::npos) {
                error("invalid-value", path + "/@name", "environment property names contain no '.'");
            }
            if (!names.insert(e.name).second) error("duplicate-id", path + "/@name", "'" + e.name + "' repeated");
            if (e.timeline.empty() || e.timeline.front().first != 0) {
                error("invalid-timeline", path, "timeline must start at tick 0");
            }
            for (std::size_t j = 1; j < e.timeline.size(); ++j) {
                if (e.timeline[j].first <= e.timeline[j - 1].first) {
                    error("invalid-timeline", item(path, "at", j) + "/@tick", "ticks must be strictly increasing");
                }
            }
        }
    }

    void monitor() {
        const std::string path = "/scenario/monitor";
        const auto& m = s_.monitor;
        if (m.reporting_interval < 1) error("invalid-interval", path + "/@reporting-interval", "must be >= 1");
        if (m.senses.empty()) warning("empty-monitor", path, "no property is sensed");
        for (std::size_t j = 0; j < m.senses.size(); ++j) {
            const auto& sense = m.senses[j];
            const auto spath = item(path, "sense", j);
            if (!sensed_.insert(sense.property).second) {
                error("duplicate-sense", spath + "/@property", "'" + sense.property + "' sensed twice");
            }
            if (!s_.has_property(sense.property)) {
                error("unknown-sensor-property", spath + "/@property", "no device or environment property '" +
                                                                           sense.property + "'");
            }
            if (sense.mode == mape::SenseMode::periodic && sense.interval < 1) {
                error("invalid-interval", spath + "/@interval", "sampling interval must be >= 1");
            }
            if (!(sense.deadband >= 0.0)) error("invalid-value", spath + "/@deadband", "deadband must be >= 0");
        }
        std::set<std::string> ids;
        for (std::size_t j = 0; j < m.thresholds.size(); ++j) {
            const auto& t = m.thresholds[j];
            const auto tpath = item(path, "threshold", j);
            if (!ids.insert(t.id).second) error("duplicate-id", tpath + "/@id", "threshold '" + t.id + "' repeated");
            if (!sensed_.contains(t.threshold.property)) {
                error("unmonitored-property", tpath + "/@property", "'" + t.threshold.property + "' is not sensed");
            }
            if (!(t.threshold.hysteresis >= 0.0)) error("invalid-value", tpath + "/@hysteresis", "must be >= 0");
            events_.insert(t.id);
        }
    }

    void check_trigger(const policy::Symptom& symptom, const std::string& path) {
        if (symptom.window < 1) error("invalid-window", path + "/@window", "window must be >= 1");
        for (const auto& p : policy::referenced_properties(symptom.trigger)) {
            if (!sensed_.contains(p)) {
                error("unmonitored-property", path, "symptom '" + symptom.name + "' reads '" + p + "', which is not sensed");
            }
        }
        for (const auto& e : policy::referenced_events(symptom.trigger)) {
            if (!events_.contains(e)) warning("unknown-event", path, "no threshold, symptom or prediction '" + e + "'");
        }
    }

    void analysis() {
        for (const auto& s : s_.symptoms) events_.insert(s.name);
        for (const auto& p : s_.predictions) events_.insert(p.name);
        for (const auto& item : s_.script) {
            if (item.symptom) events_.insert(item.symptom->name);
        }
        const std::string path = "/scenario/symptoms";
        for (std::size_t j = 0; j < s_.symptoms.size(); ++j) {
            const auto& symptom = s_.symptoms[j];
            const auto spath = item(path, "symptom", j);
            if (!symptoms_.insert(symptom.name).second) {
                error("duplicate-symptom", spath + "/@name", "symptom '" + symptom.name + "' repeated");
            }
            check_trigger(symptom, spath);
        }
        for (std::size_t j = 0; j < s_.predictions.size(); ++j) {
            const auto& p = s_.predictions[j];
            const auto ppath = item(path, "prediction", j);
            if (!symptoms_.insert(p.name).second) error("duplicate-symptom", ppath + "/@name", "'" + p.name + "' repeated");
            if (s_.monitor.find_threshold(p.threshold) == nullptr) {
                error("unresolved-ref", ppath + "/@threshold", "no threshold '" + p.threshold + "'");
            }
            if (p.samples < 2) error("invalid-value", ppath + "/@samples", "need at least 2 samples");
            if (p.horizon < 1) error("invalid-value", ppath + "/@horizon", "horizon must be >= 1");
        }
    }

    void check_rule(const policy::EcaRule& rule, const std::string& path) {
        if (!events_.contains(rule.event)) {
            warning("unknown-event", path + "/@event", "no symptom or prediction named '" + rule.event + "'");
        }
        if (rule.condition) {
            for (const auto& p : policy::referenced_properties(*rule.condition)) {
                if (!sensed_.contains(p)) {
                    error("unmonitored-property", path + "/condition", "rule '" + rule.id + "' reads '" + p + "'");
                }
            }
        }
        if (rule.plan_template.empty()) error("empty-plan", path, "rule '" + rule.id + "' has no steps");
        for (std::size_t k = 0; k < rule.plan_template.size(); ++k) {
            const auto& step = rule.plan_template[k];
            const auto stpath = item(path, "step", k);
            if (step.empty()) error("empty-plan", stpath, "step has no actions");
            for (std::size_t m = 0; m < step.size(); ++m) {
                const auto& a = step[m];
                const auto apath = item(stpath, "action", m);
                const bool known = a.effector == "monitor" || a.effector == "environment" ||
                                   s_.find_device(a.effector) != nullptr;
                if (!known) {
                    warning("unknown-effector", apath + "/@effector", "'" + a.effector + "' is not an effector; the plan will fail");
                } else if (!target_ok(a)) {
                    warning("invalid-target", apath + "/@target", "'" + a.target + "' will be rejected by the effector");
                }
            }
        }
    }

    bool target_ok(const policy::Action& a) const {
        using policy::Command;
        if (a.effector == "monitor") return a.command == Command::set_reporting_interval && a.value >= 1.0;
        if (a.command == Command::set_reporting_interval) return false;
        if (a.effector == "environment") return a.command != Command::set_actuator && s_.find_environment(a.target);
        const auto* device = s_.find_device(a.effector);
        const auto prefix = a.effector + ".";
        if (a.target.rfind(prefix, 0) != 0) return false;
        const auto member = a.target.substr(prefix.size());
        return a.command == Command::set_actuator ? device->find_actuator(member) != nullptr
                                                  : device->find_property(member) != nullptr;
    }

    void policies() {
        const std::string path = "/scenario/policies";
        for (std::size_t j = 0; j < s_.rules.size(); ++j) {
            const auto& rule = s_.rules[j];
            const auto rpath = item(path, "rule", j);
            if (!rules_.insert(rule.id).second) error("duplicate-rule", rpath + "/@id", "rule '" + rule.id + "' repeated");
            check_rule(rule, rpath);
        }
    }

    void topology() {
        std::set<std::pair<Node, Node>> pairs;
        for (std::size_t i = 0; i < s_.links.size(); ++i) {
            const auto& l = s_.links[i];
            const auto path = item("/scenario/links", "link", i);
            if (l.a == l.b) {
                error("invalid-link", path, "a link must join two different nodes");
                continue;
            }
            if (!pairs.insert(std::minmax(l.a, l.b)).second) error("duplicate-link", path, "nodes already linked");
        }
        const bool split = std::any_of(s_.placements.begin(), s_.placements.end(),
                                       [](const auto& p) { return p.second == Node::backend; });
        if (split && !pairs.contains({Node::gateway, Node::backend})) {
            error("missing-link", "/scenario/links", "components on gateway and backend need a link");
        }
    }

    void script() {
        // Apply edits in execution order (tick, then document order) to a
        // copy of the name sets, so add/remove sequences are checked as run.
        std::vector<std::size_t> order(s_.script.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return s_.script[a].tick < s_.script[b].tick; });
        std::vector<std::string> paths(s_.script.size());
        std::map<std::string, std::size_t> seen;
        for (std::size_t i = 0; i < s_.script.size(); ++i) {
            const auto name = std::string(to_string(s_.script[i].kind));
            paths[i] = child_path("/scenario/script", name, ++seen[name]);
        }
        for (auto i : order) {
            const auto& it = s_.script[i];
            const auto& path = paths[i];
            switch (it.kind) {
                case ScriptKind::demand: {
                    const auto* sense = s_.monitor.find_sense(it.name);
                    if (sense == nullptr) {
                        error("unknown-sensor-property", path + "/@property", "'" + it.name + "' is not sensed");
                    } else if (sense->mode != mape::SenseMode::on_demand) {
                        warning("not-on-demand", path + "/@property", "'" + it.name + "' is not an on-demand sensor");
                    }
                    break;
                }
                case ScriptKind::add_symptom:
                    if (!symptoms_.insert(it.name).second) {
                        error("duplicate-symptom", path + "/symptom/@name", "symptom '" + it.name + "' already defined");
                    }
                    check_trigger(*it.symptom, path + "/symptom");
                    break;
                case ScriptKind::update_symptom:
                    if (!symptoms_.contains(it.name)) {
                        error("unknown-symptom", path + "/symptom/@name", "no symptom '" + it.name + "' at that tick");
                    }
                    check_trigger(*it.symptom, path + "/symptom");
                    break;
                case ScriptKind::remove_symptom:
                    if (symptoms_.erase(it.name) == 0) {
                        error("unknown-symptom", path + "/@name", "no symptom '" + it.name + "' at that tick");
                    }
                    break;
                case ScriptKind::add_rule:
                    if (!rules_.insert(it.name).second) {
                        error("duplicate-rule", path + "/rule/@id", "rule '" + it.name + "' already defined");
                    }
                    check_rule(*it.rule, path + "/rule");
                    break;
                case ScriptKind::remove_rule:
                    if (rules_.erase(it.name) == 0) {
                        error("unknown-rule", path + "/@id", "no rule '" + it.name + "' at that tick");
                    }
                    break;
                case ScriptKind::inject_frame: break;
            }
        }
    }

    const Scenario& s_;
    std::vector<Diagnostic>& out_;
    std::set<std::string> sensed_;
    std::set<std::string> events_;
    std::set<std::string> symptoms_;
    std::set<std::string> rules_;
};

}  // namespace

std::vector<Diagnostic> validate_scenario(const Scenario& scenario) {
    std::vector<Diagnostic> out;
    if (scenario.name.empty()) out.push_back({Severity::error, "missing-required-field", "/scenario/@name", "empty name"});
    Checker(scenario, out).run();
    return out;
}

XmlElement to_xml(const Scenario& s) {
    XmlElement root("scenario");
    root.set("name", s.name);
    if (!s.devices.empty()) {
        XmlElement devices("devices");
        for (const auto& d : s.devices) {
            XmlElement el("device");
            el.set("id", std::to_string(d.id)).set("name", d.name).set("gateway", d.gateway).set("seed", std::to_string(d.seed));
            model::write_device_body(d, el);
            devices.add(std::move(el));
        }
        root.add(std::move(devices));
    }
    if (!s.environment.empty()) {
        XmlElement env("environment");
        for (const auto& e : s.environment) {
            XmlElement el("property");
            el.set("name", e.name);
            for (const auto& [tick, value] : e.timeline) {
                XmlElement at("at");
                at.set("tick", std::to_string(tick)).set("value", format_number(value));
                el.add(std::move(at));
            }
            env.add(std::move(el));
        }
        root.add(std::move(env));
    }
    root.add(model::write_monitor(s.monitor));
    if (!s.symptoms.empty() || !s.predictions.empty()) {
        XmlElement symptoms("symptoms");
        for (const auto& sy : s.symptoms) symptoms.add(model::write_symptom(sy));
        for (const auto& p : s.predictions) symptoms.add(model::write_prediction(p));
        root.add(std::move(symptoms));
    }
    if (!s.rules.empty()) {
        XmlElement policies("policies");
        for (const auto& r : s.rules) policies.add(model::write_rule(r));
        root.add(std::move(policies));
    }
    root.add(model::write_placements(s.placements));
    if (!s.links.empty()) root.add(model::write_links(s.links));
    if (!s.script.empty()) {
        XmlElement script("script");
        for (const auto& it : s.script) {
            XmlElement el{std::string(to_string(it.kind))};
            el.set("tick", std::to_string(it.tick));
            switch (it.kind) {
                case ScriptKind::demand: el.set("property", it.name); break;
                case ScriptKind::add_symptom:
                case ScriptKind::update_symptom: el.add(model::write_symptom(*it.symptom)); break;
                case ScriptKind::remove_symptom: el.set("name", it.name); break;
                case ScriptKind::add_rule: el.add(model::write_rule(*it.rule)); break;
                case ScriptKind::remove_rule: el.set("id", it.name); break;
                case ScriptKind::inject_frame: el.set("hex", to_hex(it.frame)); break;
            }
            script.add(std::move(el));
        }
        root.add(std::move(script));
    }
    return root;
}

std::string serialize_scenario(const Scenario& scenario) { return write_xml(to_xml(scenario)); }

}  // namespace mapek::simnet
