#include <doctest.h>

#include <algorithm>
#include <random>

#include "mapek/policy/expression.hpp"
#include "mapek/policy/rules.hpp"
#include "mapek/policy/state.hpp"
#include "mapek/policy/threshold.hpp"

using namespace mapek;
using namespace mapek::policy;

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

// Random expression generator over a fixed vocabulary.
class ExprGen {
public:
    explicit ExprGen(std::uint64_t seed) : rng_(seed) {}

    Expression make(int depth) {
        const int pick = depth <= 0 ? pick_int(0, 1) : pick_int(0, 4);
        switch (pick) {
            case 0:
                return Expression::comparison(pick_of(paths_), pick_op(), literal());
            case 1:
                return Expression::frequency(pick_of(events_), static_cast<Tick>(pick_int(1, 50)), pick_op(),
                                             pick_int(0, 9));
            case 2:
                return Expression::negation(make(depth - 1));
            case 3:
                return Expression::conjunction(make(depth - 1), make(depth - 1));
            default:
                return Expression::disjunction(make(depth - 1), make(depth - 1));
        }
    }

private:
    int pick_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    CompareOp pick_op() { return static_cast<CompareOp>(pick_int(0, 5)); }
    std::string pick_of(const std::vector<std::string>& v) { return v[pick_int(0, static_cast<int>(v.size()) - 1)]; }
    double literal() {
        switch (pick_int(0, 2)) {
            case 0: return pick_int(-100, 100);
            case 1: return pick_int(-400, 400) / 4.0;
            default: return std::uniform_real_distribution<double>(-1e6, 1e6)(rng_);
        }
    }

    std::mt19937_64 rng_;
    std::vector<std::string> paths_{"room.temp", "door.open", "a", "b_2", "hall.light.level"};
    std::vector<std::string> events_{"HighTemp", "E1", "door_open"};
};

ThresholdState oracle_step(char op, double limit, double h, double v, ThresholdState prior) {
    const bool violated = prior == ThresholdState::violated;
    if (op == '>') {
        if (!violated) return v > limit ? ThresholdState::violated : ThresholdState::normal;
        return v < limit - h ? ThresholdState::normal : ThresholdState::violated;
    }
    if (!violated) return v < limit ? ThresholdState::violated : ThresholdState::normal;
    return v > limit + h ? ThresholdState::normal : ThresholdState::violated;
}

}  // namespace

TEST_SUITE("policy") {

TEST_CASE("parse a single comparison") {
    CHECK(parse_expression("room.temp > 25.0") == Expression::comparison("room.temp", CompareOp::greater, 25.0));
}

TEST_CASE("not binds tighter than and") {
    const auto e = parse_expression("freq(HighTemp, 10) >= 2 and not door.open == 1");
    const auto expected = Expression::conjunction(
        Expression::frequency("HighTemp", 10, CompareOp::greater_equal, 2),
        Expression::negation(Expression::comparison("door.open", CompareOp::equal, 1.0)));
    CHECK(e == expected);
}

TEST_CASE("and binds tighter than or") {
    const auto e = parse_expression("a > 1 or b > 2 and c > 3");
    REQUIRE(e.kind == Expression::Kind::disjunction);
    CHECK(e.operands[1].kind == Expression::Kind::conjunction);
}

TEST_CASE("truncated comparison fails at offset 11") {
    try {
        parse_expression("room.temp >");
        FAIL("expected syntax error");
    } catch (const SyntaxError& e) {
        CHECK(e.code() == "syntax-error");
        CHECK(e.offset() == 11);
    }
}

TEST_CASE("other syntax errors") {
    CHECK(error_code([] { parse_expression(""); }) == "syntax-error");
    CHECK(error_code([] { parse_expression("freq(E, 0) > 1"); }) == "syntax-error");
    CHECK(error_code([] { parse_expression("(a > 1"); }) == "syntax-error");
    CHECK(error_code([] { parse_expression("a > 1 b"); }) == "syntax-error");
    CHECK(error_code([] { parse_expression("and > 1"); }) == "syntax-error");
}

TEST_CASE("printing round-trips for generated expressions") {
    ExprGen gen(7);
    for (int i = 0; i < 2000; ++i) {
        const auto e = gen.make(4);
        const auto text = to_string(e);
        CAPTURE(text);
        CHECK(parse_expression(text) == e);
    }
}

TEST_CASE("evaluation examples") {
    SystemState state;
    EventHistory history;
    state.system["t"] = 26;
    state.system["a"] = 0;
    state.system["b"] = 0;
    history.append(5, "E");
    history.append(12, "E");
    history.append(30, "E");
    const StateView view{state, history};

    CHECK(eval_expression(parse_expression("t > 25"), view, 30));
    CHECK(eval_expression(parse_expression("freq(E, 20) >= 2"), view, 30));
    CHECK_FALSE(eval_expression(parse_expression("freq(E, 20) >= 3"), view, 30));
    CHECK(eval_expression(parse_expression("not (a > 1 or b > 1)"), view, 30));
}

TEST_CASE("environment properties are visible by bare name") {
    SystemState state;
    state.environment["outdoor"] = 31;
    EventHistory history;
    CHECK(eval_expression(parse_expression("outdoor > 30"), StateView{state, history}, 0));
}

TEST_CASE("unknown property names the path") {
    SystemState state;
    EventHistory history;
    try {
        eval_expression(parse_expression("ghost.x > 1"), StateView{state, history}, 0);
        FAIL("expected unknown-property");
    } catch (const Error& e) {
        CHECK(e.code() == "unknown-property");
        CHECK(std::string(e.what()).find("ghost.x") != std::string::npos);
    }
}

TEST_CASE("evaluation is pure") {
    ExprGen gen(11);
    SystemState state;
    for (const char* p : {"room.temp", "door.open", "a", "b_2", "hall.light.level"}) state.system[p] = 3.5;
    EventHistory history;
    history.append(1, "E1");
    history.append(4, "HighTemp");
    const StateView view{state, history};
    for (int i = 0; i < 300; ++i) {
        const auto e = gen.make(3);
        CHECK(eval_expression(e, view, 10) == eval_expression(e, view, 10));
    }
}

TEST_CASE("threshold examples") {
    const Threshold strict{"room.temp", ThresholdOp::above, 25, 0};
    CHECK(threshold_step(strict, 25.0, ThresholdState::normal) == ThresholdState::normal);
    const Threshold h1{"room.temp", ThresholdOp::above, 25, 1};
    CHECK(threshold_step(h1, 24.5, ThresholdState::violated) == ThresholdState::violated);
    CHECK(threshold_step(h1, 23.9, ThresholdState::violated) == ThresholdState::normal);
}

TEST_CASE("threshold grid matches the two-state oracle") {
    for (const auto op : {ThresholdOp::above, ThresholdOp::below}) {
        for (const double h : {0.0, 0.5, 1.0}) {
            const Threshold th{"p", op, 25, h};
            for (int k = -20; k <= 20; ++k) {
                const double v = 25 + k / 10.0;
                for (const auto prior : {ThresholdState::normal, ThresholdState::violated}) {
                    CHECK(threshold_step(th, v, prior) ==
                          oracle_step(op == ThresholdOp::above ? '>' : '<', 25, h, v, prior));
                }
            }
        }
    }
}

TEST_CASE("with zero hysteresis the next state ignores the prior off the limit") {
    for (const auto op : {ThresholdOp::above, ThresholdOp::below}) {
        const Threshold th{"p", op, 10, 0};
        for (int k = -30; k <= 30; ++k) {
            const double v = 10 + k / 10.0;
            if (k == 0) {
                // Both comparisons are strict, so the limit itself holds either state.
                CHECK(threshold_step(th, v, ThresholdState::normal) == ThresholdState::normal);
                CHECK(threshold_step(th, v, ThresholdState::violated) == ThresholdState::violated);
                continue;
            }
            CHECK(threshold_step(th, v, ThresholdState::normal) == threshold_step(th, v, ThresholdState::violated));
        }
    }
}

TEST_CASE("window frequency examples") {
    SystemState state;
    EventHistory history;
    CHECK(window_frequency(StateView{state, history}, "E", 20, 30) == 0);
    history.append(5, "E");
    history.append(12, "E");
    history.append(30, "E");
    CHECK(window_frequency(StateView{state, history}, "E", 20, 30) == 2);
    CHECK(window_frequency(StateView{state, history}, "E", 1, 30) == 1);
}

TEST_CASE("history rejects out-of-order appends") {
    EventHistory history;
    history.append(5, "E");
    CHECK(error_code([&] { history.append(4, "E"); }) == "history-out-of-order");
}

TEST_CASE("window frequency equals a full scan on random histories") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        EventHistory history;
        SystemState state;
        Tick t = 0;
        for (int i = 0; i < 200; ++i) {
            t += std::uniform_int_distribution<Tick>(0, 3)(rng);
            history.append(t, rng() % 2 ? "A" : "B");
        }
        for (int q = 0; q < 20; ++q) {
            const Tick now = std::uniform_int_distribution<Tick>(0, t + 5)(rng);
            const Tick window = std::uniform_int_distribution<Tick>(1, 60)(rng);
            std::size_t expected = 0;
            for (const auto& r : history.records()) {
                if (r.name == "A" && r.tick + window > now && r.tick <= now) ++expected;
            }
            CHECK(window_frequency(StateView{state, history}, "A", window, now) == expected);
        }
    }
}

TEST_CASE("rule selection examples") {
    SystemState state;
    state.system["x"] = 1;
    EventHistory history;
    const StateView view{state, history};
    const std::vector<Action> act{{"room", Command::set_actuator, "room.cooler", 1}};

    std::vector<EcaRule> rules{{"low", 5, "E", std::nullopt, {act}}, {"high", 9, "E", std::nullopt, {act}}};
    REQUIRE(select_rule(rules, "E", view, 0) != nullptr);
    CHECK(select_rule(rules, "E", view, 0)->id == "high");

    std::vector<EcaRule> tie{{"a2", 5, "E", std::nullopt, {act}}, {"a10", 5, "E", std::nullopt, {act}}};
    CHECK(select_rule(tie, "E", view, 0)->id == "a10");

    std::vector<EcaRule> blocked{{"r", 5, "E", parse_expression("x > 2"), {act}}};
    CHECK(select_rule(blocked, "E", view, 0) == nullptr);
    CHECK(select_rule(rules, "Other", view, 0) == nullptr);
}

TEST_CASE("repository and policy set edits") {
    SymptomRepository repo;
    const Symptom s{"Hot", parse_expression("t > 1"), 10, 10};
    repo.add(s);
    CHECK(repo.find("Hot") != nullptr);
    CHECK(error_code([&] { repo.add(s); }) == "duplicate-symptom");
    auto changed = s;
    changed.cooldown = 3;
    repo.update(changed);
    CHECK(repo.find("Hot")->cooldown == 3);
    repo.remove("Hot");
    CHECK(repo.find("Hot") == nullptr);
    CHECK(error_code([&] { repo.remove("Hot"); }) == "unknown-symptom");
    CHECK(error_code([&] { repo.update(s); }) == "unknown-symptom");

    PolicySet rules;
    const EcaRule r{"cool", 1, "Hot", std::nullopt, {{{"room", Command::set_actuator, "room.cooler", 1}}}};
    rules.add(r);
    CHECK(error_code([&] { rules.add(r); }) == "duplicate-rule");
    rules.remove("cool");
    CHECK(error_code([&] { rules.remove("cool"); }) == "unknown-rule");
}

}
