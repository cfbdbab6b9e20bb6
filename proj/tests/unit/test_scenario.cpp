#include <doctest.h>

#include "mapek/simnet/scenario.hpp"
#include "test_support.hpp"

using namespace mapek;
using namespace mapek::simnet;

namespace {

Scenario load(std::string_view name) {
    return parse_scenario(testing::read_file(testing::source_path(std::string("scenarios/") + std::string(name))));
}

std::vector<std::string> error_codes(const Scenario& s) {
    std::vector<std::string> out;
    for (const auto& d : validate_scenario(s)) {
        if (d.severity == Severity::error) out.push_back(d.code);
    }
    return out;
}

ScriptItem remove_symptom(Tick t, std::string name) {
    ScriptItem item;
    item.tick = t;
    item.kind = ScriptKind::remove_symptom;
    item.name = std::move(name);
    return item;
}

}  // namespace

TEST_SUITE("scenario") {

TEST_CASE("shipped scenarios parse, validate and serialize canonically") {
    for (const std::string name : {"thermostat.xml", "thermostat-noisy.xml", "proactive.xml", "runtime-edits.xml"}) {
        CAPTURE(name);
        const auto text = testing::read_file(testing::source_path("scenarios/" + name));
        const auto s = parse_scenario(text);
        CHECK(validate_scenario(s).empty());
        CHECK(serialize_scenario(s) == text);
        CHECK(parse_scenario(serialize_scenario(s)) == s);
    }
}

TEST_CASE("thermostat contents") {
    const auto s = load("thermostat.xml");
    REQUIRE(s.devices.size() == 1);
    CHECK(s.devices[0].properties[0].drift == 0.5);
    CHECK(s.monitor.reporting_interval == 5);
    CHECK(s.has_property("room.temp"));
    CHECK_FALSE(s.has_property("room.cooler"));
    CHECK(link_latency(s, Node::gateway, Node::backend) == std::optional<Tick>(2));
    CHECK(link_latency(s, Node::backend, Node::gateway) == std::optional<Tick>(2));
    CHECK(link_latency(s, Node::gateway, Node::gateway) == std::optional<Tick>(0));
}

TEST_CASE("environment timelines are piecewise constant") {
    EnvironmentProperty e{"outdoor", {{0, 10}, {5, 12}, {9, 8}}};
    CHECK(e.value_at(0) == 10);
    CHECK(e.value_at(4) == 10);
    CHECK(e.value_at(5) == 12);
    CHECK(e.value_at(100) == 8);
}

TEST_CASE("structural errors") {
    auto s = load("thermostat.xml");
    s.devices[0].gateway = "gw2";
    CHECK(error_codes(s) == std::vector<std::string>{"unknown-gateway"});

    s = load("thermostat.xml");
    s.environment.push_back({"outdoor", {{3, 1}}});
    CHECK(error_codes(s) == std::vector<std::string>{"invalid-timeline"});

    s = load("thermostat.xml");
    s.links.clear();
    CHECK(error_codes(s) == std::vector<std::string>{"missing-link"});

    s = load("thermostat.xml");
    s.monitor.senses[0].property = "room.humidity";
    const auto codes = error_codes(s);
    CHECK(std::count(codes.begin(), codes.end(), "unknown-sensor-property") == 1);
}

TEST_CASE("script edits are dry-run in tick order") {
    auto s = load("runtime-edits.xml");
    s.script.push_back(remove_symptom(35, "HighTemperature"));
    CHECK(error_codes(s).empty());

    s.script.push_back(remove_symptom(36, "HighTemperature"));
    CHECK(error_codes(s) == std::vector<std::string>{"unknown-symptom"});

    s = load("runtime-edits.xml");
    s.script.push_back(remove_symptom(20, "HighTemperature"));  // before it is added at 30
    CHECK(error_codes(s) == std::vector<std::string>{"unknown-symptom"});

    s = load("runtime-edits.xml");
    s.script.push_back(s.script[0]);
    CHECK(error_codes(s) == std::vector<std::string>{"duplicate-symptom"});

    s = load("runtime-edits.xml");
    ScriptItem again;
    again.tick = 41;
    again.kind = ScriptKind::remove_rule;
    again.name = "cool";
    s.script.push_back(again);
    CHECK(error_codes(s) == std::vector<std::string>{"unknown-rule"});
}

TEST_CASE("parse errors") {
    auto code = [](std::string_view text) {
        try {
            parse_scenario(text);
        } catch (const Error& e) {
            return e.code();
        }
        return std::string();
    };
    CHECK(code("<pim/>") == "wrong-stage-root");
    CHECK(code("<scenario name=\"x\"><devices><device/></devices></scenario>") == "missing-required-field");
    CHECK(code("<scenario name=\"x\"><script><inject-frame tick=\"1\" hex=\"XYZ\"/></script></scenario>") ==
          "invalid-value");
}

}
