#include "mapek/model/templates.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "mapek/numfmt.hpp"

namespace mapek::model {

namespace {

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (const auto& s : items) {
        if (!out.empty()) out += ' ';
        out += s;
    }
    return out;
}

TemplateView steps_view(const std::vector<policy::PlanStep>& steps) {
    auto out = TemplateView::array();
    for (const auto& step : steps) {
        auto actions = TemplateView::array();
        for (const auto& a : step) {
            actions.push_back({{"effector", a.effector},
                               {"command", std::string(policy::to_string(a.command))},
                               {"target", a.target},
                               {"value", format_number(a.value)}});
        }
        out.push_back({{"actions", std::move(actions)}});
    }
    return out;
}

}  // namespace

TemplateView build_template_view(const ApsmModel& apsm) {
    const auto& pim = apsm.apim.pim;
    TemplateView view = TemplateView::object();
    view["domain_name"] = pim.domain_name;
    view["target"] = apsm.target;

    Tick reporting = 0;
    for (const auto& loop : apsm.apim.loops) {
        if (reporting == 0 || loop.monitor.reporting_interval < reporting) {
            reporting = loop.monitor.reporting_interval;
        }
    }
    view["reporting_interval"] = std::to_string(reporting == 0 ? 5 : reporting);

    auto tasks = TemplateView::array();
    for (const auto& t : pim.tasks) {
        tasks.push_back({{"id", t.id}, {"goal", t.goal}, {"composites", join(t.composite_refs)}});
    }
    auto services = TemplateView::array();
    for (const auto& s : pim.services) {
        services.push_back({{"id", s.id},
                            {"kind", std::string(to_string(s.kind))},
                            {"entity", s.entity_ref},
                            {"property", s.property}});
    }
    auto composites = TemplateView::array();
    for (const auto& c : pim.composites) {
        auto interactions = TemplateView::array();
        for (const auto& i : c.interactions) {
            interactions.push_back({{"from", i.from}, {"to", i.to}, {"message", i.message}});
        }
        composites.push_back(
            {{"id", c.id}, {"services", join(c.service_refs)}, {"interactions", std::move(interactions)}});
    }
    auto devices = TemplateView::array();
    for (const auto& d : pim.entities) {
        auto properties = TemplateView::array();
        for (const auto& p : d.properties) {
            properties.push_back({{"id", std::to_string(p.id)},
                                  {"name", p.name},
                                  {"initial", format_number(p.initial)},
                                  {"drift", format_number(p.drift)},
                                  {"noise", format_number(p.noise)}});
        }
        auto actuators = TemplateView::array();
        for (const auto& a : d.actuators) {
            actuators.push_back({{"name", a.name}, {"property", a.property}, {"effect", format_number(a.effect)}});
        }
        devices.push_back({{"id", std::to_string(d.id)},
                           {"name", d.name},
                           {"gateway", d.gateway},
                           {"seed", std::to_string(d.seed)},
                           {"properties", std::move(properties)},
                           {"actuators", std::move(actuators)}});
    }

    auto senses = TemplateView::array();
    auto thresholds = TemplateView::array();
    auto symptoms = TemplateView::array();
    auto predictions = TemplateView::array();
    auto rules = TemplateView::array();
    for (const auto& loop : apsm.apim.loops) {
        for (const auto& s : loop.monitor.senses) {
            senses.push_back({{"property", s.property},
                              {"mode", std::string(mape::to_string(s.mode))},
                              {"interval", std::to_string(s.interval)},
                              {"deadband", format_number(s.deadband)},
                              {"aggregates", mape::to_string(s.aggregates)}});
        }
        for (const auto& t : loop.monitor.thresholds) {
            thresholds.push_back({{"id", t.id},
                                  {"property", t.threshold.property},
                                  {"op", std::string(policy::to_string(t.threshold.op))},
                                  {"limit", format_number(t.threshold.limit)},
                                  {"hysteresis", format_number(t.threshold.hysteresis)}});
        }
        for (const auto& s : loop.symptoms) {
            symptoms.push_back({{"name", s.name},
                                {"trigger", policy::to_string(s.trigger)},
                                {"window", std::to_string(s.window)},
                                {"cooldown", std::to_string(s.cooldown)}});
        }
        for (const auto& p : loop.predictions) {
            predictions.push_back({{"name", p.name},
                                   {"threshold", p.threshold},
                                   {"samples", std::to_string(p.samples)},
                                   {"horizon", std::to_string(p.horizon)},
                                   {"cooldown", std::to_string(p.cooldown)}});
        }
        for (const auto& r : loop.rules) {
            // Zero or one element, so a template can emit <condition> only when present.
            auto conditions = TemplateView::array();
            if (r.condition) conditions.push_back({{"text", policy::to_string(*r.condition)}});
            rules.push_back({{"id", r.id},
                             {"priority", std::to_string(r.priority)},
                             {"event", r.event},
                             {"conditions", std::move(conditions)},
                             {"steps", steps_view(r.plan_template)}});
        }
    }

    auto placements = TemplateView::array();
    for (auto c : all_components) {
        auto it = apsm.placements.find(c);
        if (it == apsm.placements.end()) continue;
        placements.push_back({{"component", std::string(to_string(c))}, {"node", std::string(to_string(it->second))}});
    }
    auto links = TemplateView::array();
    for (const auto& l : apsm.links) {
        links.push_back({{"a", std::string(to_string(l.a))},
                         {"b", std::string(to_string(l.b))},
                         {"latency", std::to_string(l.latency)}});
    }
    view["tasks"] = std::move(tasks);
    view["services"] = std::move(services);
    view["composites"] = std::move(composites);
    view["devices"] = std::move(devices);
    view["senses"] = std::move(senses);
    view["thresholds"] = std::move(thresholds);
    view["symptoms"] = std::move(symptoms);
    view["predictions"] = std::move(predictions);
    view["rules"] = std::move(rules);
    view["placements"] = std::move(placements);
    view["links"] = std::move(links);
    return view;
}

namespace {

struct Node {
    enum class Kind { text, escaped, raw, each };
    Kind kind = Kind::text;
    std::string value;  // literal text or path
    int line = 0;
    std::vector<Node> body;
};

std::string line_ref(int line) { return "line " + std::to_string(line); }

std::string_view trim_view(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

class TemplateParser {
public:
    std::vector<Node> parse(std::string_view text) {
        stack_.push_back({});
        int line = 1;
        std::size_t pos = 0;
        while (pos < text.size()) {
            auto nl = text.find('\n', pos);
            const bool has_newline = nl != std::string_view::npos;
            auto content = text.substr(pos, has_newline ? nl - pos : std::string_view::npos);
            auto trimmed = trim_view(content);
            if (standalone(trimmed)) {
                tag(trimmed.substr(2, trimmed.size() - 4), line);
            } else {
                scan(content, line);
                if (has_newline) emit_text("\n", line);
            }
            pos = has_newline ? nl + 1 : text.size();
            ++line;
        }
        if (stack_.size() != 1) {
            throw Error("unbalanced-each", "{{#each " + open_.back().first + "}} is never closed",
                        line_ref(open_.back().second));
        }
        return std::move(stack_.front());
    }

private:
    static bool standalone(std::string_view trimmed) {
        if (trimmed.size() < 4 || trimmed.substr(0, 2) != "{{" || trimmed.substr(trimmed.size() - 2) != "}}") {
            return false;
        }
        auto inner = trim_view(trimmed.substr(2, trimmed.size() - 4));
        if (trimmed.find("{{", 2) != std::string_view::npos) return false;
        return inner.starts_with("#each ") || inner == "/each";
    }

    void scan(std::string_view content, int line) {
        std::size_t pos = 0;
        while (pos < content.size()) {
            auto open = content.find("{{", pos);
            if (open == std::string_view::npos) {
                emit_text(content.substr(pos), line);
                return;
            }
            emit_text(content.substr(pos, open - pos), line);
            auto close = content.find("}}", open + 2);
            if (close == std::string_view::npos) {
                throw Error("malformed-tag", "'{{' without a closing '}}'", line_ref(line));
            }
            tag(content.substr(open + 2, close - open - 2), line);
            pos = close + 2;
        }
    }

    void tag(std::string_view raw_inner, int line) {
        auto inner = trim_view(raw_inner);
        if (inner.starts_with("#each ")) {
            auto path = std::string(trim_view(inner.substr(6)));
            if (path.empty()) throw Error("malformed-tag", "{{#each}} needs a collection path", line_ref(line));
            stack_.push_back({});
            open_.emplace_back(path, line);
        } else if (inner == "/each") {
            if (open_.empty()) throw Error("unbalanced-each", "{{/each}} without a matching {{#each}}", line_ref(line));
            Node node{Node::Kind::each, open_.back().first, open_.back().second, std::move(stack_.back())};
            stack_.pop_back();
            open_.pop_back();
            stack_.back().push_back(std::move(node));
        } else if (inner.starts_with("&")) {
            auto path = std::string(trim_view(inner.substr(1)));
            if (path.empty()) throw Error("malformed-tag", "empty placeholder", line_ref(line));
            stack_.back().push_back({Node::Kind::raw, path, line, {}});
        } else {
            if (inner.empty() || inner.starts_with("#") || inner.starts_with("/")) {
                throw Error("malformed-tag", "unsupported tag '{{" + std::string(inner) + "}}'", line_ref(line));
            }
            stack_.back().push_back({Node::Kind::escaped, std::string(inner), line, {}});
        }
    }

    void emit_text(std::string_view text, int line) {
        if (text.empty()) return;
        auto& nodes = stack_.back();
        if (!nodes.empty() && nodes.back().kind == Node::Kind::text) {
            nodes.back().value += text;
        } else {
            nodes.push_back({Node::Kind::text, std::string(text), line, {}});
        }
    }

    std::vector<std::vector<Node>> stack_;
    std::vector<std::pair<std::string, int>> open_;
};

class Renderer {
public:
    explicit Renderer(const TemplateView& root) { scopes_.push_back(&root); }

    void render(const std::vector<Node>& nodes, std::string& out) {
        for (const auto& node : nodes) {
            switch (node.kind) {
                case Node::Kind::text: out += node.value; break;
                case Node::Kind::escaped: out += escape_xml(scalar(node)); break;
                case Node::Kind::raw: out += scalar(node); break;
                case Node::Kind::each: {
                    const auto* collection = lookup(node.value);
                    if (collection == nullptr || !collection->is_array()) {
                        throw Error("unresolved-placeholder", "no collection '" + node.value + "'", line_ref(node.line));
                    }
                    for (const auto& element : *collection) {
                        scopes_.push_back(&element);
                        render(node.body, out);
                        scopes_.pop_back();
                    }
                    break;
                }
            }
        }
    }

private:
    const TemplateView* lookup(const std::string& path) const {
        if (path == ".") return scopes_.back();
        std::vector<std::string> segments;
        std::stringstream in(path);
        for (std::string s; std::getline(in, s, '.');) segments.push_back(s);
        for (auto scope = scopes_.rbegin(); scope != scopes_.rend(); ++scope) {
            const auto* current = *scope;
            if (!current->is_object() || !current->contains(segments.front())) continue;
            current = &(*current)[segments.front()];
            for (std::size_t i = 1; i < segments.size() && current != nullptr; ++i) {
                current = current->is_object() && current->contains(segments[i]) ? &(*current)[segments[i]] : nullptr;
            }
            return current;
        }
        return nullptr;
    }

    std::string scalar(const Node& node) const {
        const auto* value = lookup(node.value);
        if (value == nullptr || value->is_structured() || value->is_null()) {
            throw Error("unresolved-placeholder", "'" + node.value + "' does not name a value", line_ref(node.line));
        }
        return value->is_string() ? value->get<std::string>() : value->dump();
    }

    std::vector<const TemplateView*> scopes_;
};

}  // namespace

std::string render_template(std::string_view text, const TemplateView& view) {
    const auto nodes = TemplateParser{}.parse(text);
    std::string out;
    Renderer(view).render(nodes, out);
    return out;
}

std::map<std::string, std::string> render_templates(const ApsmModel& apsm, const std::filesystem::path& pack_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (!fs::is_directory(pack_dir, ec)) {
        throw Error("missing-template-pack", "not a directory", pack_dir.string());
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(pack_dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".tmpl") files.push_back(entry.path());
    }
    if (files.empty()) throw Error("empty-template-pack", "no *.tmpl files", pack_dir.string());
    std::sort(files.begin(), files.end());

    const auto view = build_template_view(apsm);
    std::map<std::string, std::string> out;
    for (const auto& file : files) {
        std::ifstream in(file, std::ios::binary);
        std::stringstream buffer;
        buffer << in.rdbuf();
        try {
            out[file.stem().string()] = render_template(buffer.str(), view);
        } catch (const Error& e) {
            throw Error(e.code(), e.what(), file.filename().string() + ":" + e.where());
        }
    }
    return out;
}

}  // namespace mapek::model
