#include "mapek/cli/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "mapek/model/elements.hpp"
#include "mapek/model/model.hpp"
#include "mapek/model/templates.hpp"
#include "mapek/numfmt.hpp"
#include "mapek/simnet/event_log.hpp"
#include "mapek/simnet/runtime.hpp"
#include "mapek/simnet/scenario.hpp"

namespace mapek::cli {

namespace {

namespace fs = std::filesystem;

// Unwinds to run_cli with an exit code after the message has been printed.
struct Exit {
    int code;
};

class Session {
public:
    Session(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

    std::string read(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) {
            err_ << "mapek: cannot read '" << path << "'\n";
            throw Exit{usage};
        }
        std::stringstream buffer;
        buffer << in.rdbuf();
        return buffer.str();
    }

    void write(const fs::path& path, const std::string& text) {
        std::ofstream file(path, std::ios::binary | std::ios::trunc);
        file << text;
        file.close();
        if (!file) io_error("cannot write '" + path.string() + "'");
    }

    [[noreturn]] void fail(const Error& e) {
        out_ << format_diagnostic({Severity::error, e.code(), e.where().empty() ? "-" : e.where(), e.what()}) << '\n';
        throw Exit{diagnostics};
    }

    [[noreturn]] void usage_error(const std::string& message) {
        err_ << "mapek: " << message << '\n';
        throw Exit{usage};
    }

    [[noreturn]] void io_error(const std::string& message) {
        err_ << "mapek: " << message << '\n';
        throw Exit{runtime_failure};
    }

    int report(const std::vector<Diagnostic>& ds) {
        for (const auto& d : ds) out_ << format_diagnostic(d) << '\n';
        return has_errors(ds) ? diagnostics : ok;
    }

    std::ostream& out() { return out_; }

private:
    std::ostream& out_;
    std::ostream& err_;
};

std::optional<model::Stage> stage_of(std::string_view name) {
    if (name == "pim") return model::Stage::pim;
    if (name == "apim") return model::Stage::apim;
    if (name == "apsm") return model::Stage::apsm;
    return std::nullopt;
}

struct ValidateArgs {
    std::string path;
    std::string stage;
};

int cmd_validate(Session& s, const ValidateArgs& a) {
    const auto text = s.read(a.path);
    try {
        if (a.stage == "scenario") return s.report(simnet::validate_scenario(simnet::parse_scenario(text)));
        auto stage = stage_of(a.stage);
        if (!stage) s.usage_error("--stage must be pim, apim, apsm or scenario");
        return s.report(model::validate_model(model::parse_model(text, *stage)));
    } catch (const Error& e) {
        s.fail(e);
    }
}

struct TransformArgs {
    std::string from;
    std::string to;
    std::string input;
    std::string output;
    Tick interval = 1;
    Tick reporting_interval = 5;
    std::string target = "simkernel";
    std::vector<std::string> places;
    std::vector<std::string> links;
};

LinkSpec parse_link_flag(Session& s, const std::string& text) {
    const auto first = text.find(':');
    const auto second = first == std::string::npos ? first : text.find(':', first + 1);
    if (second == std::string::npos) s.usage_error("--link expects a:b:latency, got '" + text + "'");
    auto a = parse_node(text.substr(0, first));
    auto b = parse_node(text.substr(first + 1, second - first - 1));
    auto latency = parse_unsigned(text.substr(second + 1));
    if (!a || !b || !latency) s.usage_error("--link expects gateway|backend:gateway|backend:ticks, got '" + text + "'");
    return LinkSpec{*a, *b, *latency};
}

int cmd_transform(Session& s, const TransformArgs& a) {
    const bool pim_apim = a.from == "pim" && a.to == "apim";
    const bool apim_apsm = a.from == "apim" && a.to == "apsm";
    if (!pim_apim && !apim_apsm) s.usage_error("supported transforms: --from pim --to apim, --from apim --to apsm");
    model::Binding binding;
    binding.target = a.target;
    for (const auto& place : a.places) {
        const auto eq = place.find('=');
        if (eq == std::string::npos) s.usage_error("--place expects component=node, got '" + place + "'");
        binding.placements.emplace_back(place.substr(0, eq), place.substr(eq + 1));
    }
    for (const auto& link : a.links) binding.links.push_back(parse_link_flag(s, link));

    const auto text = s.read(a.input);
    std::string result;
    try {
        if (pim_apim) {
            const auto pim = std::get<model::PimModel>(model::parse_model(text, model::Stage::pim));
            result = model::canonical_serialize(model::pim_to_apim(pim, {a.interval, a.reporting_interval}));
        } else {
            const auto apim = std::get<model::ApimModel>(model::parse_model(text, model::Stage::apim));
            result = model::canonical_serialize(model::apim_to_apsm(apim, binding));
        }
    } catch (const Error& e) {
        s.fail(e);
    }
    s.write(a.output, result);
    return ok;
}

struct GenerateArgs {
    std::string apsm;
    std::string templates;
    std::string out;
};

int cmd_generate(Session& s, const GenerateArgs& a) {
    const auto text = s.read(a.apsm);
    std::map<std::string, std::string> files;
    try {
        const auto apsm = std::get<model::ApsmModel>(model::parse_model(text, model::Stage::apsm));
        const auto ds = model::validate_model(apsm);
        if (has_errors(ds)) return s.report(ds);
        files = model::render_templates(apsm, a.templates);
    } catch (const Error& e) {
        s.fail(e);
    }
    std::error_code ec;
    fs::create_directories(a.out, ec);
    if (ec) s.io_error("cannot create '" + a.out + "': " + ec.message());
    for (const auto& [name, content] : files) {
        const auto path = fs::path(a.out) / name;
        s.write(path, content);
        s.out() << "wrote " << path.string() << '\n';
    }
    return ok;
}

struct RunArgs {
    std::string scenario;
    Tick ticks = 0;
    std::uint64_t seed = 0;
    std::string log;
};

int cmd_run(Session& s, const RunArgs& a) {
    const auto text = s.read(a.scenario);
    simnet::RunResult result;
    try {
        const auto scenario = simnet::parse_scenario(text);
        const auto ds = simnet::validate_scenario(scenario);
        if (has_errors(ds)) return s.report(ds);
        result = simnet::run_scenario(scenario, {a.ticks, a.seed});
    } catch (const Error& e) {
        s.fail(e);
    }
    s.write(a.log, result.log);
    s.out() << simnet::format_summary(result.summary) << '\n';
    return ok;
}

std::vector<simnet::LogRecord> load_log(Session& s, const std::string& path) {
    const auto text = s.read(path);
    try {
        return simnet::parse_log(text);
    } catch (const Error& e) {
        s.fail(e);
    }
}

int cmd_replay(Session& s, const std::string& path) {
    const auto records = load_log(s, path);
    const auto problems = simnet::replay_check(records);
    for (const auto& p : problems) s.out() << "error replay " << p << '\n';
    if (!problems.empty()) return diagnostics;
    s.out() << "ok records=" << records.size() << '\n';
    return ok;
}

std::string csv_field(const std::string& text) {
    if (text.find_first_of(",\"\n") == std::string::npos) return text;
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

struct InspectArgs {
    std::string log;
    std::string property;
    std::string kind;
};

int cmd_inspect(Session& s, const InspectArgs& a) {
    if (a.property.empty() == a.kind.empty()) s.usage_error("inspect needs exactly one of --property or --kind");
    const auto records = load_log(s, a.log);
    auto& out = s.out();
    if (!a.property.empty()) {
        out << "tick,value\n";
        for (const auto& r : records) {
            if (r.kind != "state") continue;
            for (const char* bucket : {"system", "environment"}) {
                const auto& p = r.payload;
                if (p.contains(bucket) && p[bucket].contains(a.property) && p[bucket][a.property].is_number()) {
                    out << r.tick << ',' << format_fixed6(p[bucket][a.property].get<double>()) << '\n';
                    break;
                }
            }
        }
        return ok;
    }
    out << "tick,seq,kind,source,payload\n";
    for (const auto& r : records) {
        if (r.kind != a.kind) continue;
        out << r.tick << ',' << r.seq << ',' << csv_field(r.kind) << ',' << csv_field(r.source) << ','
            << csv_field(simnet::render_json(r.payload)) << '\n';
    }
    return ok;
}

struct PolicyArgs {
    std::string file;
    std::string task;
    std::string operand;
};

// The editable policy sections of either a scenario or one APIM loop.
struct PolicyTarget {
    std::vector<policy::EcaRule>* rules = nullptr;
    std::vector<policy::Symptom>* symptoms = nullptr;
    std::vector<mape::PredictionSpec>* predictions = nullptr;
    std::vector<mape::LocalThreshold>* thresholds = nullptr;
};

template <typename T, typename Key>
auto find_by(std::vector<T>& items, const std::string& id, Key key) {
    return std::find_if(items.begin(), items.end(), [&](const T& item) { return key(item) == id; });
}

void edit_policy(Session& s, PolicyTarget& t, const std::string& action, const std::string& operand) {
    const auto rule_id = [](const policy::EcaRule& r) { return r.id; };
    const auto symptom_name = [](const policy::Symptom& x) { return x.name; };
    const auto threshold_id = [](const mape::LocalThreshold& x) { return x.id; };
    if (action == "list") {
        for (const auto& r : *t.rules) s.out() << r.id << ' ' << r.priority << ' ' << r.event << '\n';
    } else if (action == "add") {
        auto rule = model::read_rule(parse_xml(s.read(operand)), "/rule");
        if (find_by(*t.rules, rule.id, rule_id) != t.rules->end()) {
            throw Error("duplicate-rule", "rule '" + rule.id + "' already exists", "/rule/@id");
        }
        t.rules->push_back(std::move(rule));
    } else if (action == "remove") {
        auto it = find_by(*t.rules, operand, rule_id);
        if (it == t.rules->end()) throw Error("unknown-rule", "no rule '" + operand + "'", operand);
        t.rules->erase(it);
    } else if (action == "add-symptom") {
        auto symptom = model::read_symptom(parse_xml(s.read(operand)), "/symptom");
        const bool taken = find_by(*t.symptoms, symptom.name, symptom_name) != t.symptoms->end() ||
                           std::any_of(t.predictions->begin(), t.predictions->end(),
                                       [&](const mape::PredictionSpec& p) { return p.name == symptom.name; });
        if (taken) throw Error("duplicate-symptom", "symptom '" + symptom.name + "' already exists", "/symptom/@name");
        t.symptoms->push_back(std::move(symptom));
    } else if (action == "remove-symptom") {
        auto it = find_by(*t.symptoms, operand, symptom_name);
        if (it == t.symptoms->end()) throw Error("unknown-symptom", "no symptom '" + operand + "'", operand);
        t.symptoms->erase(it);
    } else if (action == "add-threshold") {
        auto threshold = model::read_threshold(parse_xml(s.read(operand)), "/threshold");
        if (find_by(*t.thresholds, threshold.id, threshold_id) != t.thresholds->end()) {
            throw Error("duplicate-id", "threshold '" + threshold.id + "' already exists", "/threshold/@id");
        }
        t.thresholds->push_back(std::move(threshold));
    } else if (action == "remove-threshold") {
        auto it = find_by(*t.thresholds, operand, threshold_id);
        if (it == t.thresholds->end()) throw Error("unknown-threshold", "no threshold '" + operand + "'", operand);
        t.thresholds->erase(it);
    }
}

int cmd_policy(Session& s, const PolicyArgs& a, const std::string& action) {
    const auto text = s.read(a.file);
    try {
        const auto root = model::root_name(text);
        if (root == "scenario") {
            auto scenario = simnet::parse_scenario(text);
            PolicyTarget t{&scenario.rules, &scenario.symptoms, &scenario.predictions, &scenario.monitor.thresholds};
            edit_policy(s, t, action, a.operand);
            if (action == "list") return ok;
            const auto ds = simnet::validate_scenario(scenario);
            if (has_errors(ds)) return s.report(ds);
            s.write(a.file, simnet::serialize_scenario(scenario));
            return ok;
        }
        if (root == "apim") {
            auto apim = std::get<model::ApimModel>(model::parse_model(text, model::Stage::apim));
            model::MapeLoopSpec* loop = nullptr;
            if (!a.task.empty()) {
                loop = apim.find_loop(a.task);
                if (loop == nullptr) throw Error("unknown-task", "no loop for task '" + a.task + "'", "/apim/loops");
            } else if (apim.loops.size() == 1) {
                loop = &apim.loops.front();
            } else {
                s.usage_error("the APIM has " + std::to_string(apim.loops.size()) + " loops; choose one with --task");
            }
            PolicyTarget t{&loop->rules, &loop->symptoms, &loop->predictions, &loop->monitor.thresholds};
            edit_policy(s, t, action, a.operand);
            if (action == "list") return ok;
            const auto ds = model::validate_model(apim);
            if (has_errors(ds)) return s.report(ds);
            s.write(a.file, model::canonical_serialize(apim));
            return ok;
        }
        throw Error("wrong-stage-root", "policy edits apply to <scenario> or <apim> documents", "/" + root);
    } catch (const Error& e) {
        s.fail(e);
    }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Self-adaptive IoT toolchain: MDD models, templates, MAPE-K simulation and logs", "mapek"};
    app.require_subcommand(1);

    ValidateArgs validate;
    auto* v = app.add_subcommand("validate", "Check a model or scenario document");
    v->add_option("path", validate.path, "Document to check")->required();
    v->add_option("--stage", validate.stage, "pim, apim, apsm or scenario")
        ->required()
        ->check(CLI::IsMember({"pim", "apim", "apsm", "scenario"}));

    TransformArgs transform;
    auto* t = app.add_subcommand("transform", "Run a model transformation (pim->apim, apim->apsm)");
    t->add_option("--from", transform.from, "Source stage")->required()->check(CLI::IsMember({"pim", "apim"}));
    t->add_option("--to", transform.to, "Target stage")->required()->check(CLI::IsMember({"apim", "apsm"}));
    t->add_option("input", transform.input, "Input model")->required();
    t->add_option("output", transform.output, "Output model")->required();
    t->add_option("--interval", transform.interval, "Scaffolded sensor interval (ticks)")->check(CLI::PositiveNumber);
    t->add_option("--reporting-interval", transform.reporting_interval, "Scaffolded reporting interval (ticks)")
        ->check(CLI::PositiveNumber);
    t->add_option("--target", transform.target, "Template target for the APSM");
    t->add_option("--place", transform.places, "component=gateway|backend (repeatable)");
    t->add_option("--link", transform.links, "a:b:latency (repeatable)");

    GenerateArgs generate;
    auto* g = app.add_subcommand("generate", "Render a template pack for an APSM");
    g->add_option("apsm", generate.apsm, "APSM document")->required();
    g->add_option("--templates", generate.templates, "Template pack directory")->required();
    g->add_option("--out", generate.out, "Output directory")->required();

    RunArgs run;
    auto* r = app.add_subcommand("run", "Simulate a scenario and write its event log");
    r->add_option("scenario", run.scenario, "Scenario document")->required();
    r->add_option("--ticks", run.ticks, "Number of ticks to simulate")->required();
    r->add_option("--seed", run.seed, "Run seed for device noise");
    r->add_option("--log", run.log, "Event log output path")->required();

    std::string replay_log;
    auto* rp = app.add_subcommand("replay", "Re-check the structural invariants of an event log");
    rp->add_option("log", replay_log, "Event log")->required();

    InspectArgs inspect;
    auto* in = app.add_subcommand("inspect", "Print log contents as CSV");
    in->add_option("log", inspect.log, "Event log")->required();
    in->add_option("--property", inspect.property, "Property path: tick,value rows from state records");
    in->add_option("--kind", inspect.kind, "Record kind: matching records");

    PolicyArgs policy_args;
    auto* p = app.add_subcommand("policy", "Edit rules, symptoms and thresholds of a scenario or APIM");
    p->add_option("file", policy_args.file, "Scenario or APIM document")->required();
    p->add_option("--task", policy_args.task, "APIM loop to edit (by task id)");
    p->require_subcommand(1);
    p->add_subcommand("list", "Print `id priority event` for each rule");
    const std::vector<std::pair<const char*, const char*>> editing{
        {"add", "rule.xml"},          {"remove", "rule id"},          {"add-symptom", "symptom.xml"},
        {"remove-symptom", "name"},   {"add-threshold", "threshold.xml"}, {"remove-threshold", "threshold id"}};
    for (const auto& [name, operand] : editing) {
        p->add_subcommand(name, std::string(name) + " <" + operand + ">")
            ->add_option("operand", policy_args.operand, operand)
            ->required();
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? ok : usage;
    }

    Session session(out, err);
    try {
        if (*v) return cmd_validate(session, validate);
        if (*t) return cmd_transform(session, transform);
        if (*g) return cmd_generate(session, generate);
        if (*r) return cmd_run(session, run);
        if (*rp) return cmd_replay(session, replay_log);
        if (*in) return cmd_inspect(session, inspect);
        if (*p) return cmd_policy(session, policy_args, p->get_subcommands().front()->get_name());
    } catch (const Exit& e) {
        return e.code;
    } catch (const Error& e) {
        err << "mapek: " << e.code() << ": " << e.what() << '\n';
        return runtime_failure;
    } catch (const std::exception& e) {
        err << "mapek: " << e.what() << '\n';
        return runtime_failure;
    }
    return usage;
}

}  // namespace mapek::cli
