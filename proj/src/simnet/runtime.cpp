#include "mapek/simnet/runtime.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <set>
#include <variant>

#include "mapek/mape/analyzer.hpp"
#include "mapek/mape/executor.hpp"
#include "mapek/mape/knowledge.hpp"
#include "mapek/mape/monitor.hpp"
#include "mapek/mape/planner.hpp"
#include "mapek/simnet/device.hpp"
#include "mapek/simnet/engine.hpp"
#include "mapek/simnet/event_log.hpp"
#include "mapek/simnet/frame.hpp"

namespace mapek::simnet {

std::string format_summary(const RunSummary& s) {
    return "ticks=" + std::to_string(s.ticks) + " records=" + std::to_string(s.records) +
           " adaptations=" + std::to_string(s.adaptations) + " alerts=" + std::to_string(s.alerts);
}

namespace {

struct ReadingMsg {
    mape::SensorReading reading;
};
struct ReportMsg {
    mape::StateReport report;
};
struct StateMsg {
    mape::StateEvent event;
};
// The request travels with the analyzer's view so the planner never reads
// another component's state.
struct RequestMsg {
    mape::AdaptationRequest request;
    policy::SystemState state;
    std::shared_ptr<const policy::EventHistory> history;
};
struct DispatchMsg {
    mape::Dispatch dispatch;
};
struct AckMsg {
    mape::Ack ack;
};
struct UpdateMsg {
    std::string plan;
    std::vector<policy::Action> actions;
};

using Message = std::variant<ReadingMsg, ReportMsg, StateMsg, RequestMsg, DispatchMsg, AckMsg, UpdateMsg>;

Json action_json(const policy::Action& a) {
    return Json{{"effector", a.effector},
                {"command", std::string(policy::to_string(a.command))},
                {"target", a.target},
                {"value", a.value}};
}

Json dispatch_json(const mape::Dispatch& d) {
    Json j{{"plan", d.plan}, {"step", d.step}, {"action", d.action}};
    const Json action = action_json(d.command);
    for (const auto& [k, v] : action.items()) j[k] = v;
    return j;
}

Json aggregates_json(const mape::Aggregates& agg) {
    Json j = Json::object();
    j["count"] = agg.count;
    if (agg.mean) j["mean"] = *agg.mean;
    if (agg.min) j["min"] = *agg.min;
    if (agg.max) j["max"] = *agg.max;
    if (agg.last) j["last"] = *agg.last;
    return j;
}

Json alert_json(const mape::Alert& a) {
    return Json{{"threshold", a.threshold}, {"property", a.property}, {"value", a.value}, {"tick", a.tick}};
}

policy::SystemState initial_state(const Scenario& s) {
    policy::SystemState state;
    for (const auto& sense : s.monitor.senses) {
        if (const auto* env = s.find_environment(sense.property)) {
            state.environment[sense.property] = env->value_at(0);
            continue;
        }
        const auto dot = sense.property.find('.');
        const auto* device = s.find_device(sense.property.substr(0, dot));
        if (device == nullptr) continue;
        if (const auto* p = device->find_property(sense.property.substr(dot + 1))) {
            state.system[sense.property] = p->initial;
        }
    }
    return state;
}

std::vector<std::string> environment_names(const Scenario& s) {
    std::vector<std::string> out;
    for (const auto& e : s.environment) out.push_back(e.name);
    return out;
}

std::set<std::string> effector_ids(const Scenario& s) {
    std::set<std::string> out{"environment", "monitor"};
    for (const auto& d : s.devices) out.insert(d.name);
    return out;
}

class Runtime {
public:
    Runtime(const Scenario& scenario, const RunOptions& options)
        : s_(scenario),
          options_(options),
          monitor_("gateway", scenario.monitor),
          knowledge_(initial_state(scenario), environment_names(scenario)),
          analyzer_(scenario.predictions, scenario.monitor.thresholds),
          executor_(effector_ids(scenario)) {
        for (const auto& d : s_.devices) devices_.emplace_back(d, options_.seed);
        for (const auto& e : s_.environment) environment_.push_back(e.value_at(0));
        for (const auto& sy : s_.symptoms) symptoms_.add(sy);
        for (const auto& r : s_.rules) rules_.add(r);
        for (std::size_t i = 0; i < s_.script.size(); ++i) script_order_.push_back(i);
        std::stable_sort(script_order_.begin(), script_order_.end(),
                         [&](std::size_t a, std::size_t b) { return s_.script[a].tick < s_.script[b].tick; });
    }

    RunResult run() {
        header();
        run_script(0);
        engine_.drain([&](auto& event) { handle(event.message); });
        for (Tick t = 1; t <= options_.ticks; ++t) {
            engine_.advance_clock(t);
            for (auto& d : devices_) d.advance();
            for (std::size_t i = 0; i < s_.environment.size(); ++i) {
                for (const auto& [from, value] : s_.environment[i].timeline) {
                    if (from == t) environment_[i] = value;
                }
            }
            run_script(t);
            sample();
            drain();
            if (monitor_.flush_due(t)) flush();
            drain();
            demanded_.clear();
        }
        summary_.ticks = options_.ticks;
        return RunResult{std::move(log_), summary_};
    }

private:
    Tick now() const { return engine_.now(); }
    Node node(Component c) const { return s_.placements.at(c); }
    std::string at(Component c, std::string_view role) const {
        return std::string(to_string(node(c))) + "/" + std::string(role);
    }
    std::string monitor_id() const { return at(Component::monitor, "monitor"); }
    std::string knowledge_id() const { return at(Component::knowledge, "knowledge"); }
    std::string analyzer_id() const { return at(Component::analyzer, "analyzer"); }
    std::string planner_id() const { return at(Component::planner, "planner"); }
    // Plan sequencing and ack tracking live with the planner; the executor
    // placement names the node whose effectors apply commands.
    std::string coordinator_id() const { return at(Component::planner, "executor"); }
    std::string effector_id() const { return at(Component::executor, "effector"); }

    void emit(std::string kind, std::string source, Json payload) {
        LogRecord r{now(), seq_++, std::move(kind), std::move(source), std::move(payload)};
        if (r.kind == "plan") ++summary_.adaptations;
        if (r.kind == "alert") ++summary_.alerts;
        log_ += render_record(r);
        log_ += '\n';
        ++summary_.records;
    }

    void error(const std::string& source, const Error& e) {
        Json p{{"code", e.code()}, {"message", e.what()}};
        if (!e.where().empty()) p["where"] = e.where();
        emit("error", source, std::move(p));
    }

    // Logs the send and delivers: directly on the same node, otherwise
    // after the link latency.
    void send(Node from, Node to, std::string kind, std::string source, Json payload, std::string receiver,
              Message message) {
        payload["to"] = std::move(receiver);
        if (from == to) {
            emit(std::move(kind), std::move(source), std::move(payload));
            handle(message);
            return;
        }
        const Tick latency = link_latency(s_, from, to).value_or(default_link_latency);
        payload["link"] = std::string(to_string(from)) + "->" + std::string(to_string(to));
        payload["arrive"] = now() + latency;
        emit(std::move(kind), std::move(source), std::move(payload));
        engine_.schedule(now() + latency, std::move(message));
    }

    void drain() {
        engine_.drain([&](auto& event) { handle(event.message); });
    }

    void handle(const Message& message) {
        std::visit(
            [&](const auto& m) {
                using T = std::decay_t<decltype(m)>;
                if constexpr (std::is_same_v<T, ReadingMsg>) on_reading(m.reading);
                else if constexpr (std::is_same_v<T, ReportMsg>) on_report(m.report);
                else if constexpr (std::is_same_v<T, StateMsg>) on_state(m.event);
                else if constexpr (std::is_same_v<T, RequestMsg>) on_request(m);
                else if constexpr (std::is_same_v<T, DispatchMsg>) on_dispatch(m.dispatch);
                else if constexpr (std::is_same_v<T, AckMsg>) on_ack(m.ack);
                else on_update(m);
            },
            message);
    }

    void header() {
        Json placements = Json::object();
        for (auto c : all_components) placements[std::string(to_string(c))] = std::string(to_string(node(c)));
        Json links = Json::array();
        for (const auto& l : s_.links) {
            links.push_back(Json{{"a", std::string(to_string(l.a))},
                                 {"b", std::string(to_string(l.b))},
                                 {"latency", l.latency}});
        }
        emit("header", "sim",
             Json{{"format", std::string(log_format)},
                  {"scenario", s_.name},
                  {"ticks", options_.ticks},
                  {"seed", options_.seed},
                  {"placements", std::move(placements)},
                  {"links", std::move(links)}});
    }

    void run_script(Tick t) {
        while (next_script_ < script_order_.size() && s_.script[script_order_[next_script_]].tick <= t) {
            const auto& item = s_.script[script_order_[next_script_++]];
            if (item.tick < t) continue;
            Json p{{"action", std::string(to_string(item.kind))}};
            try {
                switch (item.kind) {
                    case ScriptKind::demand:
                        p["property"] = item.name;
                        demanded_.insert(item.name);
                        break;
                    case ScriptKind::add_symptom:
                        p["name"] = item.name;
                        symptoms_.add(*item.symptom);
                        break;
                    case ScriptKind::update_symptom:
                        p["name"] = item.name;
                        symptoms_.update(*item.symptom);
                        break;
                    case ScriptKind::remove_symptom:
                        p["name"] = item.name;
                        symptoms_.remove(item.name);
                        break;
                    case ScriptKind::add_rule:
                        p["id"] = item.name;
                        rules_.add(*item.rule);
                        break;
                    case ScriptKind::remove_rule:
                        p["id"] = item.name;
                        rules_.remove(item.name);
                        break;
                    case ScriptKind::inject_frame: p["bytes"] = to_hex(item.frame); break;
                }
            } catch (const Error& e) {
                error("sim/script", e);
                continue;
            }
            emit("script", "sim/script", std::move(p));
            if (item.kind == ScriptKind::inject_frame) receive_frame(item.frame);
        }
    }

    void sample() {
        for (const auto& sense : monitor_.config().senses) {
            const bool demanded = demanded_.contains(sense.property);
            if (const auto* env = s_.find_environment(sense.property)) {
                const auto i = static_cast<std::size_t>(env - s_.environment.data());
                auto reading = mape::sensor_sample(sense, memory_[sense.property], "environment", environment_[i],
                                                   now(), demanded);
                if (reading) deliver(*reading);
                continue;
            }
            const auto dot = sense.property.find('.');
            const auto device_name = sense.property.substr(0, dot);
            const auto property = sense.property.substr(dot + 1);
            auto device = std::find_if(devices_.begin(), devices_.end(),
                                       [&](const Device& d) { return d.spec().name == device_name; });
            if (device == devices_.end()) continue;
            const auto& props = device->spec().properties;
            auto p = std::find_if(props.begin(), props.end(), [&](const PropertySpec& ps) { return ps.name == property; });
            if (p == props.end()) continue;
            const auto index = static_cast<std::size_t>(p - props.begin());
            auto reading = mape::sensor_sample(sense, memory_[sense.property], device_name, device->value(index), now(),
                                               demanded);
            if (!reading) continue;
            const FrameReading frame{device->spec().id, p->id, static_cast<float>(reading->value),
                                     static_cast<std::uint32_t>(now() & 0xFFFFFFFFULL)};
            const auto bytes = encode_frame(frame);
            emit("frame", "device/" + device_name,
                 Json{{"device", frame.device},
                      {"property", frame.property},
                      {"value", static_cast<double>(frame.value)},
                      {"bytes", to_hex(bytes)},
                      {"to", "gateway/adapter"}});
            receive_frame(bytes);
        }
    }

    // Gateway protocol adapter: binary frame to SensorReading.
    void receive_frame(std::span<const std::uint8_t> bytes) {
        try {
            const auto frame = decode_frame(bytes);
            auto device = std::find_if(devices_.begin(), devices_.end(),
                                       [&](const Device& d) { return d.spec().id == frame.device; });
            if (device == devices_.end()) throw Error("unknown-device", "no device " + std::to_string(frame.device));
            const auto& spec = device->spec();
            auto p = std::find_if(spec.properties.begin(), spec.properties.end(),
                                  [&](const PropertySpec& ps) { return ps.id == frame.property; });
            if (p == spec.properties.end()) {
                throw Error("unknown-property", "device " + spec.name + " has no property " +
                                                    std::to_string(frame.property));
            }
            const auto path = spec.name + "." + p->name;
            const auto* sense = monitor_.config().find_sense(path);
            if (sense == nullptr) throw Error("unmonitored-property", "'" + path + "' is not sensed");
            // Rebuild the full tick from its low 32 bits, never ahead of the clock.
            Tick tick = (now() & ~Tick{0xFFFFFFFF}) | frame.tick;
            if (tick > now()) tick -= Tick{1} << 32;
            deliver(mape::SensorReading{spec.name, path, static_cast<double>(frame.value), tick, sense->mode});
        } catch (const Error& e) {
            emit("frame-rejected", "gateway/adapter",
                 Json{{"reason", e.code()}, {"message", e.what()}, {"bytes", to_hex(bytes)}});
        }
    }

    void deliver(const mape::SensorReading& r) {
        if (node(Component::monitor) == Node::gateway) {
            on_reading(r);
            return;
        }
        send(Node::gateway, node(Component::monitor), "reading", "gateway/adapter",
             Json{{"entity", r.entity},
                  {"property", r.property},
                  {"value", r.value},
                  {"tick", r.tick},
                  {"mode", std::string(mape::to_string(r.mode))}},
             monitor_id(), ReadingMsg{r});
    }

    void on_reading(const mape::SensorReading& r) {
        try {
            for (const auto& alert : monitor_.ingest(r)) emit("alert", monitor_id(), alert_json(alert));
        } catch (const Error& e) {
            error(monitor_id(), e);
        }
    }

    void flush() {
        auto report = monitor_.flush(now());
        Json properties = Json::object();
        for (const auto& [path, agg] : report.properties) properties[path] = aggregates_json(agg);
        Json alerts = Json::array();
        for (const auto& a : report.alerts) alerts.push_back(alert_json(a));
        Json payload{{"reporter", report.reporter},
                     {"window_start", report.window_start},
                     {"window_end", report.window_end},
                     {"properties", std::move(properties)},
                     {"alerts", std::move(alerts)}};
        send(node(Component::monitor), node(Component::knowledge), "report", monitor_id(), std::move(payload),
             knowledge_id(), ReportMsg{std::move(report)});
    }

    void on_report(const mape::StateReport& report) {
        mape::StateEvent event;
        try {
            event = knowledge_.append(report, now());
        } catch (const Error& e) {
            error(knowledge_id(), e);
            return;
        }
        for (const auto& a : report.alerts) {
            emit("alert-logged", knowledge_id(),
                 Json{{"threshold", a.threshold}, {"property", a.property}, {"value", a.value}, {"raised", a.tick}});
        }
        Json system = Json::object();
        for (const auto& [k, v] : event.state.system) system[k] = v;
        Json environment = Json::object();
        for (const auto& [k, v] : event.state.environment) environment[k] = v;
        Json events = Json::array();
        for (const auto& e : event.new_events) events.push_back(e.name);
        send(node(Component::knowledge), node(Component::analyzer), "state", knowledge_id(),
             Json{{"window_end", event.window_end},
                  {"system", std::move(system)},
                  {"environment", std::move(environment)},
                  {"events", std::move(events)}},
             analyzer_id(), StateMsg{std::move(event)});
    }

    void on_state(const mape::StateEvent& event) {
        std::vector<mape::AdaptationRequest> requests;
        try {
            requests = analyzer_.on_state(event, symptoms_, now());
        } catch (const Error& e) {
            error(analyzer_id(), e);
            return;
        }
        for (auto& r : requests) {
            Json p{{"id", r.id},
                   {"symptom", r.symptom},
                   {"event", r.event},
                   {"frequency", r.frequency},
                   {"window", r.window},
                   {"mode", std::string(mape::to_string(r.mode))},
                   {"issued", r.issued}};
            if (r.predicted) p["predicted"] = *r.predicted;
            RequestMsg msg{r, analyzer_.state(), std::make_shared<policy::EventHistory>(analyzer_.history())};
            send(node(Component::analyzer), node(Component::planner), "request", analyzer_id(), std::move(p),
                 planner_id(), std::move(msg));
        }
    }

    void on_request(const RequestMsg& msg) {
        std::optional<mape::ChangePlan> plan;
        try {
            plan = planner_.compose(msg.request, rules_.rules(), policy::StateView{msg.state, *msg.history}, now());
        } catch (const Error& e) {
            error(planner_id(), e);
            return;
        }
        if (!plan) {
            emit("unhandled", planner_id(), Json{{"request", msg.request.id}, {"symptom", msg.request.symptom}});
            return;
        }
        Json steps = Json::array();
        for (const auto& step : plan->steps) {
            Json actions = Json::array();
            for (const auto& a : step) actions.push_back(action_json(a));
            steps.push_back(std::move(actions));
        }
        emit("plan", planner_id(),
             Json{{"id", plan->id},
                  {"request", plan->request},
                  {"rule", plan->rule},
                  {"steps", std::move(steps)},
                  {"to", coordinator_id()}});
        try {
            process(executor_.run(*plan));
        } catch (const Error& e) {
            error(coordinator_id(), e);
        }
    }

    void process(mape::ExecutorUpdate update) {
        if (update.failed_plan) {
            emit("plan-failed", coordinator_id(),
                 Json{{"plan", *update.failed_plan}, {"reason", update.failure_reason}, {"detail", update.failure_detail}});
        }
        for (auto& d : update.dispatches) {
            Json p = dispatch_json(d);
            send(node(Component::planner), node(Component::executor), "dispatch", coordinator_id(), std::move(p),
                 effector_id(), DispatchMsg{d});
        }
        if (update.completed) {
            std::vector<policy::Action> actions;
            for (const auto& step : update.completed->steps) actions.insert(actions.end(), step.begin(), step.end());
            send(node(Component::planner), node(Component::knowledge), "plan-complete", coordinator_id(),
                 Json{{"plan", update.completed->id}, {"rule", update.completed->rule}}, knowledge_id(),
                 UpdateMsg{update.completed->id, std::move(actions)});
        }
    }

    std::optional<std::string> apply(const policy::Action& a) {
        using policy::Command;
        if (a.effector == "monitor") {
            if (a.command != Command::set_reporting_interval) return "unsupported-command";
            if (!(a.value >= 1.0) || a.value != std::floor(a.value)) return "invalid-value";
            monitor_.set_reporting_interval(static_cast<Tick>(a.value));
            return std::nullopt;
        }
        if (a.effector == "environment") {
            for (std::size_t i = 0; i < s_.environment.size(); ++i) {
                if (s_.environment[i].name != a.target) continue;
                if (a.command == Command::set_property) environment_[i] = a.value;
                else if (a.command == Command::adjust_property) environment_[i] += a.value;
                else return "unsupported-command";
                return std::nullopt;
            }
            return "unknown-target";
        }
        for (auto& d : devices_) {
            if (d.spec().name == a.effector) return d.apply(a);
        }
        return "unknown-effector";
    }

    void on_dispatch(const mape::Dispatch& d) {
        const auto failure = apply(d.command);
        Json p = dispatch_json(d);
        p["ok"] = !failure;
        if (failure) p["reason"] = *failure;
        emit("command", effector_id(), std::move(p));

        mape::Ack ack{d.plan, d.step, d.action, !failure, failure.value_or("")};
        Json a{{"plan", ack.plan}, {"step", ack.step}, {"action", ack.action}, {"ok", ack.ok}};
        if (failure) a["reason"] = *failure;
        send(node(Component::executor), node(Component::planner), "ack", effector_id(), std::move(a), coordinator_id(),
             AckMsg{std::move(ack)});
    }

    void on_ack(const mape::Ack& ack) {
        try {
            process(executor_.on_ack(ack));
        } catch (const Error& e) {
            error(coordinator_id(), e);
        }
    }

    void on_update(const UpdateMsg& msg) {
        knowledge_.apply_commanded(msg.actions, now());
        Json values = Json::object();
        for (const auto& a : msg.actions) {
            if (auto v = knowledge_.state().value(a.target)) values[a.target] = *v;
        }
        emit("update", knowledge_id(), Json{{"plan", msg.plan}, {"values", std::move(values)}});
    }

    const Scenario& s_;
    RunOptions options_;
    Engine<Message> engine_;
    std::vector<Device> devices_;
    std::vector<double> environment_;
    std::map<std::string, mape::SensorMemory> memory_;
    std::set<std::string> demanded_;
    std::vector<std::size_t> script_order_;
    std::size_t next_script_ = 0;

    mape::Monitor monitor_;
    mape::Knowledge knowledge_;
    mape::Analyzer analyzer_;
    policy::SymptomRepository symptoms_;
    policy::PolicySet rules_;
    mape::Planner planner_;
    mape::Executor executor_;

    std::string log_;
    std::uint64_t seq_ = 0;
    RunSummary summary_;
};

}  // namespace

RunResult run_scenario(const Scenario& scenario, const RunOptions& options) {
    for (const auto& d : validate_scenario(scenario)) {
        if (d.severity == Severity::error) {
            throw Error("invalid-scenario", d.code + " " + d.path + " " + d.message, d.path);
        }
    }
    return Runtime(scenario, options).run();
}

}  // namespace mapek::simnet
