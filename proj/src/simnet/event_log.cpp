#include "mapek/simnet/event_log.hpp"

#include <map>
#include <optional>
#include <set>
#include <tuple>

#include "mapek/numfmt.hpp"

namespace mapek::simnet {

namespace {

void render_into(const Json& v, std::string& out) {
    switch (v.type()) {
        case Json::value_t::object: {
            out += '{';
            bool first = true;
            for (const auto& [key, item] : v.items()) {
                if (!first) out += ',';
                first = false;
                out += Json(key).dump();
                out += ':';
                render_into(item, out);
            }
            out += '}';
            break;
        }
        case Json::value_t::array: {
            out += '[';
            bool first = true;
            for (const auto& item : v) {
                if (!first) out += ',';
                first = false;
                render_into(item, out);
            }
            out += ']';
            break;
        }
        case Json::value_t::number_float: out += format_fixed6(v.get<double>()); break;
        default: out += v.dump(); break;
    }
}

}  // namespace

std::string render_json(const Json& value) {
    std::string out;
    render_into(value, out);
    return out;
}

std::string render_record(const LogRecord& r) {
    Json line = Json::object();
    line["tick"] = r.tick;
    line["seq"] = r.seq;
    line["kind"] = r.kind;
    line["source"] = r.source;
    line["payload"] = r.payload;
    return render_json(line);
}

std::vector<LogRecord> parse_log(std::string_view text) {
    std::vector<LogRecord> out;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() : nl + 1;
        ++line_no;
        const auto where = "line " + std::to_string(line_no);
        Json j;
        try {
            j = Json::parse(line);
        } catch (const Json::exception& e) {
            throw Error("corrupt-log", std::string("not valid JSON: ") + e.what(), where);
        }
        auto field = [&](const char* key, bool (Json::*is)() const noexcept) -> const Json& {
            if (!j.is_object() || !j.contains(key) || !(j[key].*is)()) {
                throw Error("corrupt-log", std::string("missing or mistyped field '") + key + "'", where);
            }
            return j[key];
        };
        LogRecord r;
        r.tick = field("tick", &Json::is_number_unsigned).get<Tick>();
        r.seq = field("seq", &Json::is_number_unsigned).get<std::uint64_t>();
        r.kind = field("kind", &Json::is_string).get<std::string>();
        r.source = field("source", &Json::is_string).get<std::string>();
        r.payload = field("payload", &Json::is_object);
        if (j.size() != 5) throw Error("corrupt-log", "unexpected extra fields", where);
        out.push_back(std::move(r));
    }
    return out;
}

namespace {

using ActionKey = std::tuple<std::string, std::uint64_t, std::uint64_t>;

class Replayer {
public:
    explicit Replayer(const std::vector<LogRecord>& records) : records_(records) {}

    std::vector<std::string> run() {
        if (records_.empty()) {
            fail(1, "empty log");
            return problems_;
        }
        header(records_.front());
        for (std::size_t i = 1; i < records_.size(); ++i) {
            line_ = i + 1;
            const auto& prev = records_[i - 1];
            const auto& r = records_[i];
            if (r.kind == "header") fail(line_, "header record after the first line");
            if (r.tick < prev.tick) {
                fail(line_, "tick " + std::to_string(r.tick) + " precedes " + std::to_string(prev.tick));
            }
            if (r.seq <= prev.seq) fail(line_, "seq " + std::to_string(r.seq) + " is not increasing");
            if (r.tick > ticks_) fail(line_, "tick beyond the run length");
            check_link(r);
            causality(r);
        }
        return problems_;
    }

private:
    void fail(std::size_t line, std::string message) {
        problems_.push_back("line " + std::to_string(line) + ": " + std::move(message));
    }

    static std::optional<std::string> str(const Json& p, const char* key) {
        if (!p.contains(key) || !p[key].is_string()) return std::nullopt;
        return p[key].get<std::string>();
    }
    static std::optional<std::uint64_t> num(const Json& p, const char* key) {
        if (!p.contains(key) || !p[key].is_number_unsigned()) return std::nullopt;
        return p[key].get<std::uint64_t>();
    }

    void header(const LogRecord& r) {
        line_ = 1;
        if (r.kind != "header" || r.tick != 0 || r.seq != 0) {
            fail(1, "first record must be the header at tick 0, seq 0");
            return;
        }
        if (str(r.payload, "format") != std::string(log_format)) fail(1, "unknown log format");
        ticks_ = num(r.payload, "ticks").value_or(0);
        if (r.payload.contains("links") && r.payload["links"].is_array()) {
            for (const auto& l : r.payload["links"]) {
                if (!l.is_object()) continue;
                auto a = str(l, "a");
                auto b = str(l, "b");
                auto lat = num(l, "latency");
                if (!a || !b || !lat) continue;
                latency_[*a + "->" + *b] = *lat;
                latency_[*b + "->" + *a] = *lat;
            }
        }
    }

    // Tick at which the message carried by `r` reaches its receiver.
    static Tick arrival(const LogRecord& r) {
        if (auto a = num(r.payload, "arrive")) return *a;
        return r.tick;
    }

    void check_link(const LogRecord& r) {
        auto link = str(r.payload, "link");
        if (!link) {
            if (r.payload.contains("arrive")) fail(line_, "arrive without link");
            return;
        }
        auto arrive = num(r.payload, "arrive");
        auto it = latency_.find(*link);
        if (it == latency_.end()) {
            fail(line_, "unknown link '" + *link + "'");
            return;
        }
        if (!arrive || *arrive != r.tick + it->second) {
            fail(line_, "arrive must equal tick + latency on " + *link);
            return;
        }
        auto& last = last_arrival_[*link];
        if (*arrive < last) fail(line_, "link " + *link + " delivers out of send order");
        last = *arrive;
    }

    void causality(const LogRecord& r) {
        const auto& p = r.payload;
        if (r.kind == "report") {
            if (auto end = num(p, "window_end")) reports_[*end] = arrival(r);
        } else if (r.kind == "state") {
            auto end = num(p, "window_end");
            auto it = end ? reports_.find(*end) : reports_.end();
            if (it == reports_.end()) {
                fail(line_, "state without a preceding report for its window");
            } else if (it->second != r.tick) {
                fail(line_, "state logged at " + std::to_string(r.tick) + " but its report arrives at " +
                                std::to_string(it->second));
            }
        } else if (r.kind == "request") {
            if (auto id = str(p, "id")) requests_[*id] = arrival(r);
        } else if (r.kind == "plan" || r.kind == "unhandled") {
            auto req = str(p, "request");
            auto it = req ? requests_.find(*req) : requests_.end();
            if (it == requests_.end()) {
                fail(line_, r.kind + " for an unknown request");
            } else if (r.tick < it->second) {
                fail(line_, r.kind + " precedes the arrival of its request");
            }
            if (r.kind == "plan") {
                if (auto id = str(p, "id")) {
                    Plan plan;
                    plan.planned = r.tick;
                    plans_[*id] = std::move(plan);
                }
            }
        } else if (r.kind == "dispatch") {
            auto plan = find_plan(p);
            if (plan == nullptr) return;
            const auto step = num(p, "step").value_or(0);
            if (r.tick < plan->last_ack_arrival) fail(line_, "dispatch before the previous step was acknowledged");
            if (step < plan->step) fail(line_, "dispatch of an earlier step");
            plan->step = step;
            ActionKey key{*str(p, "plan"), step, num(p, "action").value_or(0)};
            plan->dispatched[key] = arrival(r);
        } else if (r.kind == "command") {
            auto plan = find_plan(p);
            if (plan == nullptr) return;
            ActionKey key{*str(p, "plan"), num(p, "step").value_or(0), num(p, "action").value_or(0)};
            auto it = plan->dispatched.find(key);
            if (it == plan->dispatched.end()) {
                fail(line_, "command without a dispatch");
            } else if (it->second != r.tick) {
                fail(line_, "command applied at " + std::to_string(r.tick) + " but dispatched to arrive at " +
                                std::to_string(it->second));
            } else {
                plan->commanded[key] = r.tick;
            }
        } else if (r.kind == "ack") {
            auto plan = find_plan(p);
            if (plan == nullptr) return;
            ActionKey key{*str(p, "plan"), num(p, "step").value_or(0), num(p, "action").value_or(0)};
            auto it = plan->commanded.find(key);
            if (it == plan->commanded.end() || it->second != r.tick) {
                fail(line_, "ack without a command at the same tick");
            }
            plan->acked[key] = arrival(r);
            plan->last_ack_arrival = std::max(plan->last_ack_arrival, arrival(r));
        } else if (r.kind == "plan-complete") {
            auto plan = find_plan(p);
            if (plan == nullptr) return;
            if (plan->acked.size() != plan->dispatched.size()) fail(line_, "plan-complete with unacknowledged actions");
            if (r.tick != plan->last_ack_arrival) fail(line_, "plan-complete is not at the last ack's arrival");
            plans_.erase(*str(p, "plan"));
        } else if (r.kind == "plan-failed") {
            if (find_plan(p) != nullptr) plans_.erase(*str(p, "plan"));
        }
    }

    struct Plan {
        Tick planned = 0;
        std::uint64_t step = 0;
        Tick last_ack_arrival = 0;
        std::map<ActionKey, Tick> dispatched;
        std::map<ActionKey, Tick> commanded;
        std::map<ActionKey, Tick> acked;
    };

    Plan* find_plan(const Json& p) {
        auto id = str(p, "plan");
        auto it = id ? plans_.find(*id) : plans_.end();
        if (it == plans_.end()) {
            fail(line_, "reference to a plan that is not running");
            return nullptr;
        }
        return &it->second;
    }

    const std::vector<LogRecord>& records_;
    std::vector<std::string> problems_;
    std::size_t line_ = 1;
    Tick ticks_ = 0;
    std::map<std::string, Tick> latency_;
    std::map<std::string, Tick> last_arrival_;
    std::map<Tick, Tick> reports_;
    std::map<std::string, Tick> requests_;
    std::map<std::string, Plan> plans_;
};

}  // namespace

std::vector<std::string> replay_check(const std::vector<LogRecord>& records) { return Replayer(records).run(); }

}  // namespace mapek::simnet
