#include "mapek/model/model.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "mapek/model/elements.hpp"
#include "mapek/numfmt.hpp"

namespace mapek::model {

std::string_view to_string(Stage stage) {
    switch (stage) {
        case Stage::pim: return "pim";
        case Stage::apim: return "apim";
        case Stage::apsm: return "apsm";
    }
    return "?";
}

std::string_view to_string(ServiceKind kind) {
    switch (kind) {
        case ServiceKind::sensor: return "sensor-service";
        case ServiceKind::actuator: return "actuator-service";
        case ServiceKind::logic: return "logic-service";
    }
    return "?";
}

const Task* PimModel::find_task(std::string_view id) const {
    for (const auto& t : tasks) {
        if (t.id == id) return &t;
    }
    return nullptr;
}

const Service* PimModel::find_service(std::string_view id) const {
    for (const auto& s : services) {
        if (s.id == id) return &s;
    }
    return nullptr;
}

const Composite* PimModel::find_composite(std::string_view id) const {
    for (const auto& c : composites) {
        if (c.id == id) return &c;
    }
    return nullptr;
}

const DeviceSpec* PimModel::find_entity(std::string_view id) const {
    for (const auto& e : entities) {
        if (e.name == id) return &e;
    }
    return nullptr;
}

std::vector<const Service*> PimModel::task_services(const Task& task) const {
    std::vector<const Service*> out;
    for (const auto& cref : task.composite_refs) {
        const auto* composite = find_composite(cref);
        if (composite == nullptr) continue;
        for (const auto& sref : composite->service_refs) {
            const auto* service = find_service(sref);
            if (service != nullptr && std::find(out.begin(), out.end(), service) == out.end()) {
                out.push_back(service);
            }
        }
    }
    return out;
}

MapeLoopSpec* ApimModel::find_loop(std::string_view task) {
    for (auto& l : loops) {
        if (l.task_ref == task) return &l;
    }
    return nullptr;
}

namespace {

std::vector<std::string> split_refs(std::string_view text) {
    std::vector<std::string> out;
    std::istringstream in{std::string(text)};
    std::string word;
    while (in >> word) out.push_back(word);
    return out;
}

std::string join_refs(const std::vector<std::string>& refs) {
    std::string out;
    for (const auto& r : refs) {
        if (!out.empty()) out += ' ';
        out += r;
    }
    return out;
}

void require_no_children(const XmlElement& el, const std::string& path) {
    if (!el.children.empty()) unknown_element(el.children.front(), path + "/" + el.children.front().name);
}

Task read_task(const XmlElement& el, const std::string& path) {
    ElementReader r(el, path);
    Task t;
    t.id = r.required("id");
    t.composite_refs = split_refs(r.optional("composites").value_or(""));
    r.finish();
    r.no_text();
    for (const auto& [child, child_path] : r.children()) {
        if (child->name != "goal") unknown_element(*child, child_path);
        ElementReader(*child, child_path).finish();
        require_no_children(*child, child_path);
        t.goal = child->text;
    }
    return t;
}

Service read_service(const XmlElement& el, const std::string& path) {
    ElementReader r(el, path);
    Service s;
    s.id = r.required("id");
    const auto kind = r.required("kind");
    if (kind == "sensor-service") s.kind = ServiceKind::sensor;
    else if (kind == "actuator-service") s.kind = ServiceKind::actuator;
    else if (kind == "logic-service") s.kind = ServiceKind::logic;
    else throw Error("invalid-value", "unknown service kind '" + kind + "'", path + "/@kind");
    s.entity_ref = r.required("entity");
    s.property = r.optional("property").value_or("");
    r.finish();
    require_no_children(el, path);
    r.no_text();
    return s;
}

Composite read_composite(const XmlElement& el, const std::string& path) {
    ElementReader r(el, path);
    Composite c;
    c.id = r.required("id");
    c.service_refs = split_refs(r.optional("services").value_or(""));
    r.finish();
    r.no_text();
    for (const auto& [child, child_path] : r.children()) {
        if (child->name != "interaction") unknown_element(*child, child_path);
        ElementReader ir(*child, child_path);
        Interaction i{ir.required("from"), ir.required("to"), ir.required("message")};
        ir.finish();
        require_no_children(*child, child_path);
        c.interactions.push_back(std::move(i));
    }
    return c;
}

DeviceSpec read_entity(const XmlElement& el, const std::string& path) {
    ElementReader r(el, path);
    DeviceSpec d;
    d.name = r.required("id");
    d.id = static_cast<std::uint16_t>(r.unsigned_int("device", 65535));
    d.seed = r.unsigned_or("seed", 0);
    r.finish();
    r.no_text();
    read_device_body(el, path, d);
    return d;
}

template <typename T, typename Read>
void read_section(const XmlElement& section, const std::string& path, std::string_view item,
                  std::vector<T>& out, Read read) {
    ElementReader r(section, path);
    r.finish();
    r.no_text();
    for (const auto& [child, child_path] : r.children()) {
        if (child->name != item) unknown_element(*child, child_path);
        out.push_back(read(*child, child_path));
    }
}

PimModel read_pim(const XmlElement& root, const std::string& path) {
    ElementReader r(root, path);
    PimModel pim;
    pim.domain_name = r.required("domain");
    r.finish();
    r.no_text();
    for (const auto& [child, child_path] : r.children()) {
        if (child->name == "tasks") read_section(*child, child_path, "task", pim.tasks, read_task);
        else if (child->name == "services") read_section(*child, child_path, "service", pim.services, read_service);
        else if (child->name == "composites")
            read_section(*child, child_path, "composite", pim.composites, read_composite);
        else if (child->name == "entities") read_section(*child, child_path, "entity", pim.entities, read_entity);
        else unknown_element(*child, child_path);
    }
    return pim;
}

MapeLoopSpec read_loop(const XmlElement& el, const std::string& path) {
    ElementReader r(el, path);
    MapeLoopSpec loop;
    loop.task_ref = r.required("task");
    r.finish();
    r.no_text();
    for (const auto& [child, child_path] : r.children()) {
        if (child->name == "monitor") {
            loop.monitor = read_monitor(*child, child_path);
        } else if (child->name == "analyzer") {
            ElementReader ar(*child, child_path);
            ar.finish();
            ar.no_text();
            for (const auto& [item, item_path] : ar.children()) {
                if (item->name == "symptom") loop.symptoms.push_back(read_symptom(*item, item_path));
                else if (item->name == "prediction") loop.predictions.push_back(read_prediction(*item, item_path));
                else unknown_element(*item, item_path);
            }
        } else if (child->name == "planner") {
            read_section(*child, child_path, "rule", loop.rules, read_rule);
        } else if (child->name == "executor") {
            read_section(*child, child_path, "effector", loop.effectors,
                         [](const XmlElement& e, const std::string& p) {
                             ElementReader er(e, p);
                             auto service = er.required("service");
                             er.finish();
                             require_no_children(e, p);
                             return service;
                         });
        } else {
            unknown_element(*child, child_path);
        }
    }
    return loop;
}

ApimModel read_apim(const XmlElement& root, const std::string& path) {
    ElementReader r(root, path);
    r.finish();
    r.no_text();
    ApimModel apim;
    bool have_pim = false;
    for (const auto& [child, child_path] : r.children()) {
        if (child->name == "pim" && !have_pim) {
            apim.pim = read_pim(*child, child_path);
            have_pim = true;
        } else if (child->name == "loops") {
            read_section(*child, child_path, "loop", apim.loops, read_loop);
        } else {
            unknown_element(*child, child_path);
        }
    }
    if (!have_pim) throw Error("missing-required-field", "<apim> requires an embedded <pim>", path + "/pim");
    return apim;
}

ApsmModel read_apsm(const XmlElement& root, const std::string& path) {
    ElementReader r(root, path);
    ApsmModel apsm;
    apsm.target = r.required("target");
    r.finish();
    r.no_text();
    apsm.placements = default_placements();
    bool have_apim = false;
    for (const auto& [child, child_path] : r.children()) {
        if (child->name == "apim" && !have_apim) {
            apsm.apim = read_apim(*child, child_path);
            have_apim = true;
        } else if (child->name == "placements") {
            apsm.placements = read_placements(*child, child_path);
        } else if (child->name == "links") {
            apsm.links = read_links(*child, child_path);
        } else {
            unknown_element(*child, child_path);
        }
    }
    if (!have_apim) throw Error("missing-required-field", "<apsm> requires an embedded <apim>", path + "/apim");
    return apsm;
}

}  // namespace

std::string root_name(std::string_view text) { return parse_xml(text).name; }

Model parse_model(std::string_view text, Stage stage) {
    const XmlElement root = parse_xml(text);
    const std::string expected(to_string(stage));
    if (root.name != expected) {
        throw Error("wrong-stage-root", "expected <" + expected + "> root, found <" + root.name + ">", "/" + root.name);
    }
    const std::string path = "/" + root.name;
    switch (stage) {
        case Stage::pim: return read_pim(root, path);
        case Stage::apim: return read_apim(root, path);
        case Stage::apsm: return read_apsm(root, path);
    }
    return PimModel{};
}

XmlElement to_xml(const PimModel& pim) {
    XmlElement root{"pim"};
    root.set("domain", pim.domain_name);
    if (!pim.tasks.empty()) {
        XmlElement section{"tasks"};
        for (const auto& t : pim.tasks) {
            XmlElement el{"task"};
            el.set("id", t.id).set("composites", join_refs(t.composite_refs));
            if (!t.goal.empty()) {
                XmlElement goal{"goal"};
                goal.text = t.goal;
                el.add(std::move(goal));
            }
            section.add(std::move(el));
        }
        root.add(std::move(section));
    }
    if (!pim.services.empty()) {
        XmlElement section{"services"};
        for (const auto& s : pim.services) {
            XmlElement el{"service"};
            el.set("id", s.id).set("kind", std::string(to_string(s.kind))).set("entity", s.entity_ref);
            if (!s.property.empty()) el.set("property", s.property);
            section.add(std::move(el));
        }
        root.add(std::move(section));
    }
    if (!pim.composites.empty()) {
        XmlElement section{"composites"};
        for (const auto& c : pim.composites) {
            XmlElement el{"composite"};
            el.set("id", c.id).set("services", join_refs(c.service_refs));
            for (const auto& i : c.interactions) {
                XmlElement ie{"interaction"};
                ie.set("from", i.from).set("to", i.to).set("message", i.message);
                el.add(std::move(ie));
            }
            section.add(std::move(el));
        }
        root.add(std::move(section));
    }
    if (!pim.entities.empty()) {
        XmlElement section{"entities"};
        for (const auto& e : pim.entities) {
            XmlElement el{"entity"};
            el.set("id", e.name).set("device", std::to_string(e.id)).set("seed", std::to_string(e.seed));
            write_device_body(e, el);
            section.add(std::move(el));
        }
        root.add(std::move(section));
    }
    return root;
}

XmlElement to_xml(const ApimModel& apim) {
    XmlElement root{"apim"};
    root.add(to_xml(apim.pim));
    if (!apim.loops.empty()) {
        XmlElement loops{"loops"};
        for (const auto& l : apim.loops) {
            XmlElement el{"loop"};
            el.set("task", l.task_ref);
            el.add(write_monitor(l.monitor));
            if (!l.symptoms.empty() || !l.predictions.empty()) {
                XmlElement analyzer{"analyzer"};
                for (const auto& s : l.symptoms) analyzer.add(write_symptom(s));
                for (const auto& p : l.predictions) analyzer.add(write_prediction(p));
                el.add(std::move(analyzer));
            }
            if (!l.rules.empty()) {
                XmlElement planner{"planner"};
                for (const auto& r : l.rules) planner.add(write_rule(r));
                el.add(std::move(planner));
            }
            if (!l.effectors.empty()) {
                XmlElement executor{"executor"};
                for (const auto& e : l.effectors) {
                    XmlElement b{"effector"};
                    b.set("service", e);
                    executor.add(std::move(b));
                }
                el.add(std::move(executor));
            }
            loops.add(std::move(el));
        }
        root.add(std::move(loops));
    }
    return root;
}

XmlElement to_xml(const ApsmModel& apsm) {
    XmlElement root{"apsm"};
    root.set("target", apsm.target);
    root.add(to_xml(apsm.apim));
    if (!apsm.placements.empty()) root.add(write_placements(apsm.placements));
    if (!apsm.links.empty()) root.add(write_links(apsm.links));
    return root;
}

std::string canonical_serialize(const Model& model) {
    return std::visit([](const auto& m) { return write_xml(to_xml(m)); }, model);
}

const std::vector<std::string>& known_targets() {
    static const std::vector<std::string> targets{"simkernel"};
    return targets;
}

ApimModel pim_to_apim(const PimModel& pim, const ScaffoldOptions& options) {
    const auto diagnostics = validate_model(pim);
    if (has_errors(diagnostics)) {
        for (const auto& d : diagnostics) {
            if (d.severity == Severity::error) throw Error("invalid-pim", d.code + ": " + d.message, d.path);
        }
    }
    ApimModel apim;
    apim.pim = pim;
    for (const auto& task : pim.tasks) {
        MapeLoopSpec loop;
        loop.task_ref = task.id;
        loop.monitor.reporting_interval = options.reporting_interval;
        for (const auto* service : pim.task_services(task)) {
            if (service->kind == ServiceKind::sensor) {
                const auto path = service->path();
                if (loop.monitor.find_sense(path) != nullptr) continue;
                mape::SenseSpec sense;
                sense.property = path;
                sense.mode = mape::SenseMode::periodic;
                sense.interval = options.sensor_interval;
                loop.monitor.senses.push_back(std::move(sense));
            } else if (service->kind == ServiceKind::actuator) {
                loop.effectors.push_back(service->id);
            }
        }
        apim.loops.push_back(std::move(loop));
    }
    return apim;
}

ApsmModel apim_to_apsm(const ApimModel& apim, const Binding& binding) {
    const auto& targets = known_targets();
    if (std::find(targets.begin(), targets.end(), binding.target) == targets.end()) {
        throw Error("unknown-target", "no template target named '" + binding.target + "'", "/apsm/@target");
    }
    for (const auto& d : validate_model(apim)) {
        if (d.severity == Severity::error) throw Error("invalid-apim", d.code + ": " + d.message, d.path);
    }
    ApsmModel apsm;
    apsm.apim = apim;
    apsm.target = binding.target;
    apsm.placements = default_placements();
    for (const auto& [component, node] : binding.placements) {
        auto c = parse_component(component);
        if (!c) {
            throw Error("unknown-component-in-placement", "no component named '" + component + "'",
                        "/apsm/placements");
        }
        auto n = parse_node(node);
        if (!n) throw Error("invalid-value", "node must be gateway or backend, got '" + node + "'", "/apsm/placements");
        apsm.placements[*c] = *n;
    }
    apsm.links = binding.links;
    if (apsm.links.empty()) apsm.links.push_back(LinkSpec{Node::gateway, Node::backend, default_link_latency});
    return apsm;
}

}  // namespace mapek::model
