#include <doctest.h>

#include "mapek/simnet/device.hpp"

using namespace mapek;
using namespace mapek::simnet;

namespace {

DeviceSpec room(double noise = 0) {
    DeviceSpec d;
    d.id = 1;
    d.name = "room";
    d.properties = {{0, "temp", 20, 0.5, noise}};
    d.actuators = {{"cooler", "temp", -1.0}};
    return d;
}

}  // namespace

TEST_SUITE("device") {

TEST_CASE("splitmix64 reference outputs") {
    // Published first outputs for seed 0.
    SplitMix64 rng(0);
    CHECK(rng.next() == 0xE220A8397B1DCDAFULL);
    CHECK(rng.next() == 0x6E789E6AA1B965F4ULL);
    CHECK(rng.next() == 0x06C45D188009454FULL);
}

TEST_CASE("uniform draws stay in [-1, 1)") {
    SplitMix64 rng(99);
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.uniform();
        CHECK((u >= -1.0 && u < 1.0));
    }
}

TEST_CASE("drift, then the cooler effect from the next advance") {
    Device d(room(), 1);
    d.advance();
    CHECK(d.value(0) == 20.5);
    CHECK_FALSE(d.apply({"room", policy::Command::set_actuator, "room.cooler", 1}));
    CHECK(d.value(0) == 20.5);
    d.advance();
    CHECK(d.value(0) == 20.0);
    d.advance();
    CHECK(d.value(0) == 19.5);
    CHECK(d.actuator_active(0));
}

TEST_CASE("property commands and failures") {
    Device d(room(), 1);
    CHECK_FALSE(d.apply({"room", policy::Command::adjust_property, "room.temp", 2}));
    CHECK(d.value(0) == 22.0);
    CHECK_FALSE(d.apply({"room", policy::Command::set_property, "room.temp", 18}));
    CHECK(d.value(0) == 18.0);
    CHECK(d.apply({"room", policy::Command::set_actuator, "room.heater", 1}) == std::optional<std::string>("unknown-target"));
    CHECK(d.apply({"room", policy::Command::set_reporting_interval, "room.temp", 3}) ==
          std::optional<std::string>("unsupported-command"));
}

TEST_CASE("noisy trajectories are reproducible per seed") {
    auto trajectory = [](std::uint64_t seed) {
        Device d(room(0.1), seed);
        std::vector<double> out;
        for (int i = 0; i < 50; ++i) {
            d.advance();
            out.push_back(d.value(0));
        }
        return out;
    };
    CHECK(trajectory(42) == trajectory(42));
    CHECK(trajectory(42) != trajectory(43));
}

TEST_CASE("one draw per property per tick regardless of amplitude") {
    // The second property's noise must not depend on the first one's amplitude.
    auto second = [](double first_noise) {
        DeviceSpec d = room(first_noise);
        d.properties.push_back({1, "hum", 40, 0, 0.2});
        Device dev(d, 7);
        for (int i = 0; i < 10; ++i) dev.advance();
        return dev.value(1);
    };
    CHECK(second(0.0) == second(0.3));
}

}
