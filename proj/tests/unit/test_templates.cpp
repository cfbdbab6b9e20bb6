#include <doctest.h>

#include "mapek/model/templates.hpp"
#include "mapek/simnet/runtime.hpp"
#include "mapek/simnet/scenario.hpp"
#include "test_support.hpp"

using namespace mapek;
using namespace mapek::model;

namespace {

std::string render_error(std::string_view text, const TemplateView& view, std::string* where = nullptr) {
    try {
        render_template(text, view);
    } catch (const Error& e) {
        if (where) *where = e.where();
        return e.code();
    }
    return "";
}

ApsmModel thermostat_apsm() {
    auto pim = std::get<PimModel>(
        parse_model(testing::read_file(testing::source_path("models/thermostat/pim.xml")), Stage::pim));
    auto apim = pim_to_apim(pim);
    auto& loop = apim.loops[0];
    loop.monitor.thresholds.push_back({"HighTempAlert", {"room.temp", policy::ThresholdOp::above, 25, 0}});
    loop.symptoms.push_back({"HighTemperature", policy::parse_expression("freq(HighTempAlert, 10) >= 1"), 10, 10});
    loop.rules.push_back(
        {"cool", 10, "HighTemperature", policy::parse_expression("room.temp > 25"),
         {{{"room", policy::Command::set_actuator, "room.cooler", 1}}}});
    return apim_to_apsm(apim, {});
}

}  // namespace

TEST_SUITE("templates") {

TEST_CASE("substitution") {
    const TemplateView view{{"domain_name", "smarthome"}};
    CHECK(render_template("hello {{domain_name}}", view) == "hello smarthome");
}

TEST_CASE("each iterates in document order") {
    TemplateView view;
    view["tasks"] = TemplateView::array({{{"id", "t1"}}, {{"id", "t2"}}});
    CHECK(render_template("{{#each tasks}}{{id}};{{/each}}", view) == "t1;t2;");
}

TEST_CASE("escaping, raw output, scalars and nested paths") {
    TemplateView view;
    view["expr"] = "a > 1 & b";
    view["names"] = TemplateView::array({"x", "y"});
    view["outer"] = {{"inner", "deep"}};
    CHECK(render_template("{{expr}}", view) == "a &gt; 1 &amp; b");
    CHECK(render_template("{{&expr}}", view) == "a > 1 & b");
    CHECK(render_template("{{#each names}}[{{.}}]{{/each}}", view) == "[x][y]");
    CHECK(render_template("{{outer.inner}}", view) == "deep");
}

TEST_CASE("lines holding only an each tag vanish") {
    TemplateView view;
    view["items"] = TemplateView::array({{{"n", "1"}}, {{"n", "2"}}});
    CHECK(render_template("<list>\n  {{#each items}}\n  <i>{{n}}</i>\n  {{/each}}\n</list>\n", view) ==
          "<list>\n  <i>1</i>\n  <i>2</i>\n</list>\n");
}

TEST_CASE("outer names stay visible inside each") {
    TemplateView view;
    view["domain_name"] = "d";
    view["items"] = TemplateView::array({{{"n", "1"}}});
    CHECK(render_template("{{#each items}}{{domain_name}}{{n}}{{/each}}", view) == "d1");
}

TEST_CASE("template errors carry the line") {
    const TemplateView view{{"a", "1"}};
    std::string where;
    CHECK(render_error("ok\n{{missing}}", view, &where) == "unresolved-placeholder");
    CHECK(where == "line 2");
    CHECK(render_error("{{#each a}}", view) == "unbalanced-each");
    CHECK(render_error("{{/each}}", view) == "unbalanced-each");
    CHECK(render_error("{{a", view) == "malformed-tag");
    CHECK(render_error("{{#if a}}{{/if}}", view) == "malformed-tag");
}

TEST_CASE("thermostat pack renders a valid, runnable scenario") {
    const auto apsm = thermostat_apsm();
    const auto pack = testing::source_path("templates/simkernel");
    const auto files = render_templates(apsm, pack);
    REQUIRE(files.size() == 1);
    REQUIRE(files.count("scenario.xml") == 1);
    CHECK(render_templates(apsm, pack) == files);

    const auto scenario = simnet::parse_scenario(files.at("scenario.xml"));
    CHECK(simnet::validate_scenario(scenario).empty());
    const auto run = simnet::run_scenario(scenario, {1, 1});
    CHECK(run.summary.ticks == 1);
}

TEST_CASE("pack directory errors") {
    testing::TempDir dir;
    auto code_for = [](const std::filesystem::path& pack) {
        try {
            render_templates(thermostat_apsm(), pack);
        } catch (const Error& e) {
            return e.code();
        }
        return std::string();
    };
    CHECK(code_for(dir.path()) == "empty-template-pack");
    CHECK(code_for(dir / "nope") == "missing-template-pack");
    testing::write_file(dir / "bad.txt.tmpl", "x\n{{nope}}\n");
    try {
        render_templates(thermostat_apsm(), dir.path());
        FAIL("expected an unresolved placeholder");
    } catch (const Error& e) {
        CHECK(e.code() == "unresolved-placeholder");
        CHECK(e.where() == "bad.txt.tmpl:line 2");
    }
}

}
