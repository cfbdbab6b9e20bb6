#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "mapek/model/model.hpp"
#include "test_support.hpp"

using namespace mapek;
using namespace mapek::model;

namespace {

template <typename F>
std::string error_code(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return "";
}

std::vector<std::string> codes(const std::vector<Diagnostic>& ds, Severity severity) {
    std::vector<std::string> out;
    for (const auto& d : ds) {
        if (d.severity == severity) out.push_back(d.code);
    }
    return out;
}

const char* minimal_pim = R"(<?xml version="1.0" encoding="UTF-8"?>
<pim domain="home">
  <tasks>
    <task id="t1" composites="c1">
      <goal>keep warm</goal>
    </task>
  </tasks>
  <services>
    <service id="s1" kind="sensor-service" entity="room" property="temp"/>
  </services>
  <composites>
    <composite id="c1" services="s1"/>
  </composites>
</pim>
)";

PimModel thermostat_pim() {
    return std::get<PimModel>(parse_model(testing::read_file(testing::source_path("models/thermostat/pim.xml")),
                                          Stage::pim));
}

// Sensor paths reachable from each task, resolved by hand.
std::set<std::string> sensed_by(const PimModel& pim, const std::string& task_id) {
    std::set<std::string> out;
    for (const auto& task : pim.tasks) {
        if (task.id != task_id) continue;
        for (const auto& cref : task.composite_refs) {
            for (const auto& comp : pim.composites) {
                if (comp.id != cref) continue;
                for (const auto& sref : comp.service_refs) {
                    for (const auto& s : pim.services) {
                        if (s.id == sref && s.kind == ServiceKind::sensor) out.insert(s.entity_ref + "." + s.property);
                    }
                }
            }
        }
    }
    return out;
}

// Random error-free PIMs: every reference resolves and every physical service
// is backed by an entity member.
PimModel random_pim(std::mt19937_64& rng) {
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    PimModel pim;
    pim.domain_name = "gen";

    const int entity_count = pick(1, 3);
    for (int e = 0; e < entity_count; ++e) {
        DeviceSpec d;
        d.id = static_cast<std::uint16_t>(e + 1);
        d.name = "dev" + std::to_string(e);
        for (int p = 0; p < pick(1, 3); ++p) {
            d.properties.push_back({static_cast<std::uint8_t>(p), "p" + std::to_string(p), 20.0 + p, 0.1, 0.0});
        }
        for (int a = 0; a < pick(0, 2); ++a) d.actuators.push_back({"act" + std::to_string(a), "p0", -0.5});
        pim.entities.push_back(d);
    }

    const int service_count = pick(1, 6);
    for (int i = 0; i < service_count; ++i) {
        const auto& d = pim.entities[static_cast<std::size_t>(pick(0, entity_count - 1))];
        Service s;
        s.id = "svc" + std::to_string(i);
        s.entity_ref = d.name;
        const int kind = pick(0, 2);
        if (kind == 1 && !d.actuators.empty()) {
            s.kind = ServiceKind::actuator;
            s.property = d.actuators[static_cast<std::size_t>(pick(0, static_cast<int>(d.actuators.size()) - 1))].name;
        } else if (kind == 2) {
            s.kind = ServiceKind::logic;
        } else {
            s.kind = ServiceKind::sensor;
            s.property =
                d.properties[static_cast<std::size_t>(pick(0, static_cast<int>(d.properties.size()) - 1))].name;
        }
        pim.services.push_back(s);
    }

    const int composite_count = pick(1, 3);
    for (int i = 0; i < composite_count; ++i) {
        Composite c;
        c.id = "comp" + std::to_string(i);
        for (const auto& s : pim.services) {
            if (pick(0, 1) == 1) c.service_refs.push_back(s.id);
        }
        if (c.service_refs.empty()) c.service_refs.push_back(pim.services.front().id);
        if (c.service_refs.size() >= 2) c.interactions.push_back({c.service_refs[0], c.service_refs[1], "msg"});
        pim.composites.push_back(c);
    }

    const int task_count = pick(1, 3);
    for (int i = 0; i < task_count; ++i) {
        Task t;
        t.id = "task" + std::to_string(i);
        t.goal = "goal " + std::to_string(i);
        for (const auto& c : pim.composites) {
            if (pick(0, 1) == 1) t.composite_refs.push_back(c.id);
        }
        if (t.composite_refs.empty()) t.composite_refs.push_back(pim.composites.back().id);
        pim.tasks.push_back(t);
    }
    return pim;
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("minimal PIM parses and validates cleanly") {
    const auto model = parse_model(minimal_pim, Stage::pim);
    const auto& pim = std::get<PimModel>(model);
    CHECK(pim.tasks.size() == 1);
    CHECK(pim.tasks[0].goal == "keep warm");
    CHECK(validate_model(model).empty());
}

TEST_CASE("feeding a PIM as APIM is a stage mismatch") {
    CHECK(error_code([] { parse_model(minimal_pim, Stage::apim); }) == "wrong-stage-root");
}

TEST_CASE("task goals are kept verbatim") {
    std::string text = minimal_pim;
    const std::string from = "keep warm";
    text.replace(text.find(from), from.size(), "monitor energy meter reading at home");
    CHECK(std::get<PimModel>(parse_model(text, Stage::pim)).tasks[0].goal == "monitor energy meter reading at home");
}

TEST_CASE("structural parse errors") {
    std::string text = minimal_pim;
    text.replace(text.find("<composites>"), 12, "<composites><bogus/>");
    CHECK(error_code([&] { parse_model(text, Stage::pim); }) == "unknown-element");
    text = minimal_pim;
    text.replace(text.find(" kind="), 0, " colour=\"red\"");
    CHECK(error_code([&] { parse_model(text, Stage::pim); }) == "unknown-attribute");
    CHECK(error_code([] { parse_model("<pim", Stage::pim); }) == "malformed-xml");
}

TEST_CASE("dangling composite reference is one unresolved-ref") {
    auto pim = std::get<PimModel>(parse_model(minimal_pim, Stage::pim));
    pim.composites[0].service_refs.push_back("ghost");
    const auto ds = validate_model(pim);
    REQUIRE(ds.size() == 1);
    CHECK(ds[0].code == "unresolved-ref");
    CHECK(ds[0].path == "/pim/composites/composite[1]/@services");
}

TEST_CASE("unmonitored symptom properties agree with a hand-built resolver") {
    // Three services: two sensors under task a, one sensor under task b.
    PimModel pim;
    pim.domain_name = "three";
    pim.services = {{"s-temp", ServiceKind::sensor, "room", "temp"},
                    {"s-hum", ServiceKind::sensor, "room", "hum"},
                    {"s-door", ServiceKind::sensor, "door", "open"}};
    pim.composites = {{"ca", {"s-temp", "s-hum"}, {}}, {"cb", {"s-door"}, {}}};
    pim.tasks = {{"a", "", {"ca"}}, {"b", "", {"cb"}}};
    REQUIRE(validate_model(pim).empty());
    const auto apim = pim_to_apim(pim);

    for (const std::string candidate : {"room.temp", "room.hum", "door.open"}) {
        for (const std::string task : {"a", "b"}) {
            auto copy = apim;
            auto* loop = copy.find_loop(task);
            REQUIRE(loop != nullptr);
            loop->symptoms.push_back({"S", policy::parse_expression(candidate + " > 1"), 5, 5});
            const auto errors = codes(validate_model(copy), Severity::error);
            const bool expected_error = !sensed_by(pim, task).contains(candidate);
            CAPTURE(candidate);
            CAPTURE(task);
            CHECK((std::count(errors.begin(), errors.end(), "unmonitored-property") == 1) == expected_error);
        }
    }
}

TEST_CASE("scaffolding: one loop per task, one sense per sensor property") {
    PimModel pim;
    pim.domain_name = "x";
    pim.services = {{"a", ServiceKind::sensor, "e", "p1"},
                    {"b", ServiceKind::sensor, "e", "p2"},
                    {"c", ServiceKind::sensor, "e", "p3"},
                    {"d", ServiceKind::logic, "e", ""}};
    pim.composites = {{"all", {"a", "b", "c"}, {}}, {"logic", {"d"}, {}}};
    pim.tasks = {{"t1", "", {"all"}}, {"t2", "", {"logic"}}};
    const auto apim = pim_to_apim(pim, {2, 7});
    REQUIRE(apim.loops.size() == 2);
    CHECK(apim.loops[0].monitor.senses.size() == 3);
    CHECK(apim.loops[0].monitor.senses[0].interval == 2);
    CHECK(apim.loops[0].monitor.reporting_interval == 7);
    CHECK(apim.loops[1].monitor.senses.empty());
    const auto ds = validate_model(apim);
    CHECK(codes(ds, Severity::error).empty());
    CHECK(codes(ds, Severity::warning) == std::vector<std::string>{"empty-monitor"});
    CHECK(apim.pim == pim);
}

TEST_CASE("scaffolding rejects an invalid PIM") {
    auto pim = std::get<PimModel>(parse_model(minimal_pim, Stage::pim));
    pim.tasks[0].composite_refs = {"ghost"};
    CHECK(error_code([&] { pim_to_apim(pim); }) == "invalid-pim");
}

TEST_CASE("scaffold soundness and round-trip over generated PIMs") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        const auto pim = random_pim(rng);
        REQUIRE(codes(validate_model(pim), Severity::error).empty());
        const auto apim = pim_to_apim(pim);
        CHECK(codes(validate_model(apim), Severity::error).empty());
        CHECK(apim.loops.size() == pim.tasks.size());
        CHECK(apim.pim == pim);

        const auto apsm = apim_to_apsm(apim, {});
        CHECK(codes(validate_model(apsm), Severity::error).empty());
        CHECK(apsm.apim == apim);

        for (const Model& m : {Model{pim}, Model{apim}, Model{apsm}}) {
            const auto stage = static_cast<Stage>(m.index());
            const auto text = canonical_serialize(m);
            const auto back = parse_model(text, stage);
            CHECK(back == m);
            CHECK(canonical_serialize(back) == text);
        }
    }
}

TEST_CASE("attribute order in the source does not change the serialization") {
    const auto original = testing::read_file(testing::source_path("models/thermostat/pim.xml"));
    std::string permuted = original;
    const std::string from = R"(id="temp-sensor" kind="sensor-service" entity="room" property="temp")";
    const std::string to = R"(property="temp" entity="room" kind="sensor-service" id="temp-sensor")";
    permuted.replace(permuted.find(from), from.size(), to);
    REQUIRE(permuted != original);
    CHECK(canonical_serialize(parse_model(permuted, Stage::pim)) == canonical_serialize(parse_model(original, Stage::pim)));
}

TEST_CASE("empty optional lists emit no element") {
    const auto text = canonical_serialize(parse_model(minimal_pim, Stage::pim));
    CHECK(text.find("<entities") == std::string::npos);
    CHECK(text.find("<interaction") == std::string::npos);
}

TEST_CASE("default binding is master-slave with one latency-2 link") {
    const auto apsm = apim_to_apsm(pim_to_apim(thermostat_pim()), {});
    CHECK(apsm.target == "simkernel");
    CHECK(apsm.placements.at(Component::monitor) == Node::gateway);
    CHECK(apsm.placements.at(Component::executor) == Node::gateway);
    CHECK(apsm.placements.at(Component::analyzer) == Node::backend);
    CHECK(apsm.placements.at(Component::planner) == Node::backend);
    CHECK(apsm.placements.at(Component::knowledge) == Node::backend);
    REQUIRE(apsm.links.size() == 1);
    CHECK(apsm.links[0].latency == default_link_latency);
    const auto text = canonical_serialize(apsm);
    CHECK(text.find(R"(<place component="monitor" node="gateway"/>)") != std::string::npos);
}

TEST_CASE("binding errors and zero latency") {
    const auto apim = pim_to_apim(thermostat_pim());
    Binding bad_component;
    bad_component.placements = {{"oracle", "gateway"}};
    CHECK(error_code([&] { apim_to_apsm(apim, bad_component); }) == "unknown-component-in-placement");
    Binding bad_node;
    bad_node.placements = {{"analyzer", "cloud"}};
    CHECK(error_code([&] { apim_to_apsm(apim, bad_node); }) == "invalid-value");
    Binding bad_target;
    bad_target.target = "arduino";
    CHECK(error_code([&] { apim_to_apsm(apim, bad_target); }) == "unknown-target");

    Binding zero;
    zero.links = {{Node::gateway, Node::backend, 0}};
    const auto apsm = apim_to_apsm(apim, zero);
    REQUIRE(apsm.links.size() == 1);
    CHECK(apsm.links[0].latency == 0);
    const auto back = std::get<ApsmModel>(parse_model(canonical_serialize(apsm), Stage::apsm));
    CHECK(back.links[0].latency == 0);
}

TEST_CASE("APSM checks missing entities for the simulator target") {
    auto pim = thermostat_pim();
    pim.entities.clear();
    auto apsm = apim_to_apsm(pim_to_apim(pim), {});
    CHECK(codes(validate_model(apsm), Severity::error) == std::vector<std::string>{"missing-entity", "missing-entity"});
}

TEST_CASE("loop rule checks") {
    auto apim = pim_to_apim(thermostat_pim());
    auto& loop = apim.loops[0];
    loop.monitor.thresholds.push_back({"HighTempAlert", {"room.temp", policy::ThresholdOp::above, 25, 0}});
    loop.symptoms.push_back({"Hot", policy::parse_expression("freq(HighTempAlert, 10) >= 1"), 10, 10});
    loop.rules.push_back({"cool", 1, "Hot", std::nullopt, {{{"room", policy::Command::set_actuator, "room.cooler", 1}}}});
    CHECK(validate_model(apim).empty());

    auto empty_plan = apim;
    empty_plan.loops[0].rules[0].plan_template.clear();
    CHECK(codes(validate_model(empty_plan), Severity::error) == std::vector<std::string>{"empty-plan"});

    auto stray = apim;
    stray.loops[0].rules[0].plan_template[0][0].effector = "hall";
    stray.loops[0].rules[0].plan_template[0][0].target = "hall.light";
    CHECK(codes(validate_model(stray), Severity::error) == std::vector<std::string>{"unknown-effector"});

    auto unknown_event = apim;
    unknown_event.loops[0].rules[0].event = "Nothing";
    CHECK(codes(validate_model(unknown_event), Severity::warning) == std::vector<std::string>{"unknown-event"});
}

}
